// Acceptance suite: one binary, one pass/fail line per criterion, nonzero
// exit if anything fails. Each criterion pins its tolerances and, where
// stated, a wall-clock budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "levelk/levelk.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace levelk;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (detail.empty()) detail = why;
    }
};

// 1. Closed-form posterior means match numerical quadrature within 1e-4 on
//    50 randomized (prior, observations) cases; under 5 s.
Outcome conjugacy_oracle() {
    Outcome outcome;
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> shape(1.0, 5.0);
    std::uniform_real_distribution<double> rate(0.5, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const GammaParams prior{shape(rng), rate(rng)};
        std::vector<int> obs(rng() % 11);
        for (int& k : obs) k = static_cast<int>(rng() % 7);
        const double closed = posterior_mean(posterior_update(prior, obs));
        const double numeric = oracles::quadrature_posterior_mean(prior, obs);
        if (std::abs(closed - numeric) > 1e-4)
            outcome.fail("case " + std::to_string(trial) + ": closed " + std::to_string(closed) +
                         " vs quadrature " + std::to_string(numeric));
    }
    return outcome;
}

// 2. On 100 random games (|S| <= 3, |A| <= 3, gamma = 0.9) the greedy policy
//    of the solved induced MDP is within 1e-6 of the exhaustive best
//    deterministic stationary policy; under 30 s.
Outcome best_response_oracle() {
    Outcome outcome;
    std::mt19937_64 rng(2002);
    for (int trial = 0; trial < 100; ++trial) {
        const GameSpec g = testutil::random_game(rng);
        const int j = trial % 2;
        const std::vector<PolicyTable> opp{testutil::random_policy(g, 1 - j, rng)};
        const InducedMdp m = induce_mdp(g, j, opponent_product(g, j, opp));
        const PolicyTable greedy = greedy_policy(solve_value_iteration(m), j);
        std::vector<int> actions(static_cast<std::size_t>(m.num_states));
        for (int s = 0; s < m.num_states; ++s) {
            const auto& row = greedy.probs[static_cast<std::size_t>(s)];
            for (int a = 0; a < m.num_actions; ++a)
                if (row[static_cast<std::size_t>(a)] == 1.0) actions[static_cast<std::size_t>(s)] = a;
        }
        const std::vector<double> value = oracles::evaluate_deterministic_policy(m, actions);
        const std::vector<double> best = oracles::enumerate_best_values(m);
        for (int s = 0; s < m.num_states; ++s) {
            const double gap = best[static_cast<std::size_t>(s)] - value[static_cast<std::size_t>(s)];
            if (gap > 1e-6)
                outcome.fail("game " + std::to_string(trial) + " state " + std::to_string(s) +
                             ": value gap " + std::to_string(gap));
        }
    }
    return outcome;
}

// 3. Every level-k policy, k <= 5, both modes, on 20 random games, is a
//    complete stationary table; under 10 s.
Outcome stationarity_closure() {
    Outcome outcome;
    std::mt19937_64 rng(3003);
    for (int trial = 0; trial < 20; ++trial) {
        const GameSpec g = testutil::random_game(rng);
        for (const HierarchyMode mode : {HierarchyMode::Singleton, HierarchyMode::Mixed}) {
            const Hierarchy h = mode == HierarchyMode::Singleton ? build_singleton(g, 0, 5)
                                                                 : build_mixed(g, 0, 5, 1.4);
            if (h.levels.size() != 6) {
                outcome.fail("expected 6 levels");
                continue;
            }
            for (const auto& level : h.levels) {
                for (int agent = 0; agent < g.num_agents; ++agent) {
                    try {
                        validate_policy_table(g, level[static_cast<std::size_t>(agent)]);
                    } catch (const std::exception& e) {
                        outcome.fail(std::string("game ") + std::to_string(trial) + ": " + e.what());
                    }
                }
            }
        }
    }
    return outcome;
}

// 4. Instrumented solve counts over a 10-round experiment with n = 2, K = 3:
//    Singleton 6 total, Mixed 6 + 10*6 = 66, exactly; under 10 s.
Outcome complexity_claim() {
    Outcome outcome;
    const GameSpec g = coordination();
    for (const HierarchyMode mode : {HierarchyMode::Singleton, HierarchyMode::Mixed}) {
        std::vector<AgentConfig> agents(2);
        agents[0] = AgentConfig{0, TomAgentConfig{mode, 3, GammaParams{2.0, 1.0}, 1e-3}};
        agents[1] = AgentConfig{1, FixedLevelAgentConfig{1}};
        const ExperimentResult result = run_experiment(g, agents, 10, 5, 17);
        long total = 0;
        for (const BeliefRecord& record : result.trace.beliefs)
            if (record.agent == 0) total += record.solves_delta;
        const long expected = mode == HierarchyMode::Singleton ? 6 : 66;
        if (total != expected)
            outcome.fail(std::string(to_string(mode)) + ": " + std::to_string(total) +
                         " solves, expected " + std::to_string(expected));
        if (result.agent_summaries[0].total_solves != expected)
            outcome.fail(std::string(to_string(mode)) + ": summary total " +
                         std::to_string(result.agent_summaries[0].total_solves));
    }
    return outcome;
}

// 5. build_mixed(K=1, lambda) equals build_singleton(K=1) exactly for
//    lambda in {0.1, 1, 5} on 20 random games.
Outcome mode_agreement() {
    Outcome outcome;
    std::mt19937_64 rng(5005);
    for (int trial = 0; trial < 20; ++trial) {
        const GameSpec g = testutil::random_game(rng);
        const Hierarchy singleton = build_singleton(g, 0, 1);
        for (double lambda : {0.1, 1.0, 5.0}) {
            const Hierarchy mixed = build_mixed(g, 0, 1, lambda);
            if (mixed.levels != singleton.levels || mixed.q_cache != singleton.q_cache)
                outcome.fail("game " + std::to_string(trial) + " at rate " + std::to_string(lambda));
        }
    }
    return outcome;
}

// 6. Against a fixed level-1 opponent in the coordination game the inferred
//    level is 1 every round and the rate trajectory is (2+m)/(1+m) exactly
//    for m = 1..20.
Outcome inference_recovery() {
    Outcome outcome;
    const GameSpec g = coordination();
    std::vector<AgentConfig> agents(2);
    agents[0] = AgentConfig{0, TomAgentConfig{HierarchyMode::Singleton, 2, GammaParams{2.0, 1.0}, 1e-3}};
    agents[1] = AgentConfig{1, FixedLevelAgentConfig{1}};
    const ExperimentResult result = run_experiment(g, agents, 20, 5, 23);
    if (result.trace.beliefs.size() != 20) {
        outcome.fail("expected 20 belief rows");
        return outcome;
    }
    for (int m = 1; m <= 20; ++m) {
        const BeliefRecord& record = result.trace.beliefs[static_cast<std::size_t>(m - 1)];
        if (record.inferred.size() != 1 || record.inferred.front().second != 1)
            outcome.fail("round " + std::to_string(m) + ": inferred level != 1");
        if (record.posterior_after.a != 2.0 + m || record.posterior_after.b != 1.0 + m)
            outcome.fail("round " + std::to_string(m) + ": posterior drifted");
        if (record.lambda_hat != (2.0 + m) / (1.0 + m))
            outcome.fail("round " + std::to_string(m) + ": rate estimate drifted");
    }
    return outcome;
}

// 7. Equal seeds produce byte-identical steps.csv and beliefs.csv on the
//    builtin experiments, across ToM modes and opponents.
Outcome determinism() {
    Outcome outcome;
    struct Setup {
        const char* game;
        HierarchyMode mode;
    };
    for (const Setup& setup : {Setup{"matching_pennies", HierarchyMode::Singleton},
                               Setup{"coordination", HierarchyMode::Mixed},
                               Setup{"gridworld_chase", HierarchyMode::Singleton}}) {
        const GameSpec g = setup.game == std::string("gridworld_chase")
                               ? gridworld_chase(3, 3)
                               : builtin_game(setup.game);
        std::vector<AgentConfig> agents(2);
        agents[0] = AgentConfig{0, TomAgentConfig{setup.mode, 2, GammaParams{2.0, 1.0}, 1e-3}};
        agents[1] = AgentConfig{1, FixedLevelAgentConfig{1}};
        std::string first_steps, first_beliefs;
        for (int repeat = 0; repeat < 2; ++repeat) {
            const ExperimentResult result = run_experiment(g, agents, 5, 4, 31);
            std::ostringstream steps, beliefs;
            write_steps_csv(steps, g, result.trace);
            write_beliefs_csv(beliefs, g, result.trace);
            if (repeat == 0) {
                first_steps = steps.str();
                first_beliefs = beliefs.str();
            } else if (steps.str() != first_steps || beliefs.str() != first_beliefs) {
                outcome.fail(std::string(setup.game) + ": traces differ between identical runs");
            }
        }
    }
    return outcome;
}

// 8. Poisson mass sums to 1 within 1e-9 up to level 200 for five rates;
//    truncated weights sum to 1 within 1e-12 and hit the pinned values.
Outcome poisson_laws() {
    Outcome outcome;
    for (double lambda : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        double total = 0.0;
        for (int k = 0; k <= 200; ++k) total += poisson_pmf(k, lambda);
        if (std::abs(total - 1.0) > 1e-9)
            outcome.fail("pmf sum at rate " + std::to_string(lambda));
        for (int k = 0; k <= 6; ++k) {
            const std::vector<double> g = truncated_level_weights(lambda, k);
            double mass = 0.0;
            for (double w : g) mass += w;
            if (std::abs(mass - 1.0) > 1e-12)
                outcome.fail("weight sum at rate " + std::to_string(lambda));
        }
    }
    const std::vector<double> half = truncated_level_weights(1.0, 1);
    if (std::abs(half[0] - 0.5) > 1e-9 || std::abs(half[1] - 0.5) > 1e-9)
        outcome.fail("weights at (rate 1, k 1) are not (0.5, 0.5)");
    const std::vector<double> skewed = truncated_level_weights(2.0, 2);
    if (std::abs(skewed[0] - 0.2) > 1e-9 || std::abs(skewed[1] - 0.4) > 1e-9 ||
        std::abs(skewed[2] - 0.4) > 1e-9)
        outcome.fail("weights at (rate 2, k 2) are not (0.2, 0.4, 0.4)");
    return outcome;
}

struct Criterion {
    const char* name;
    std::function<Outcome()> check;
    double budget_seconds;  // 0 = no budget
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"conjugacy oracle vs quadrature (50 cases, 1e-4)", conjugacy_oracle, 5.0},
        {"best response vs policy enumeration (100 games, 1e-6)", best_response_oracle, 30.0},
        {"stationarity closure (20 games, both modes, depth 5)", stationarity_closure, 10.0},
        {"solve-count law (singleton 6, mixed 66)", complexity_claim, 10.0},
        {"mode agreement at depth 1 (rates 0.1, 1, 5)", mode_agreement, 0.0},
        {"inference recovery ((2+m)/(1+m) for 20 rounds)", inference_recovery, 0.0},
        {"seed determinism (byte-identical CSV traces)", determinism, 0.0},
        {"poisson normalization and truncated weight laws", poisson_laws, 0.0},
    };

    bool all_ok = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].check();
        } catch (const std::exception& e) {
            outcome.fail(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].budget_seconds > 0.0 && elapsed > criteria[i].budget_seconds)
            outcome.fail("runtime " + std::to_string(elapsed) + "s over budget");
        std::printf("[%s] %zu. %s (%.2fs)%s%s\n", outcome.ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].name, elapsed, outcome.detail.empty() ? "" : " - ",
                    outcome.detail.c_str());
        all_ok = all_ok && outcome.ok;
    }
    return all_ok ? 0 : 1;
}
