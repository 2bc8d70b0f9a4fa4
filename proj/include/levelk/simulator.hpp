#pragma once

// Repeated-round execution of a stochastic game among configured agents.
// A round is one fixed-horizon episode from the game's initial state; belief
// updates happen between rounds. Each round a modeling (ToM) agent estimates
// the population rate from its posterior, refreshes or reuses its ladder per
// its mode, plays its best response to the belief, then infers each
// opponent's played level from the episode and folds those observations into
// the posterior. Everything is driven by one seed; identical inputs yield
// bit-identical traces.

#include <cstdint>
#include <memory>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "levelk/belief.hpp"
#include "levelk/game.hpp"
#include "levelk/hierarchy.hpp"

namespace levelk {

/// Agent that maintains a belief over opponents' levels and best responds.
struct TomAgentConfig {
    HierarchyMode mode = HierarchyMode::Singleton;
    int depth = 2;
    GammaParams prior{2.0, 1.0};
    double epsilon = 1e-3;
};

/// Agent pinned to one level of the canonical singleton ladder.
struct FixedLevelAgentConfig {
    int level = 0;
};

/// Agent that plays a fixed, user-supplied table.
struct ScriptedAgentConfig {
    PolicyTable policy;
};

struct AgentConfig {
    int agent = 0;
    std::variant<TomAgentConfig, FixedLevelAgentConfig, ScriptedAgentConfig> behavior;
};

namespace detail {

inline double canonical_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF sampling on the engine's raw output; the standard library's
// distribution algorithms are implementation-defined, this is not.
inline int sample_index(std::mt19937_64& rng, std::span<const double> probs) {
    const double u = canonical_unit(rng);
    double acc = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) last_positive = static_cast<int>(i);
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return last_positive;
}

inline int sample_transition(std::mt19937_64& rng, const TransitionRow& row) {
    const double u = canonical_unit(rng);
    double acc = 0.0;
    int last = row.front().first;
    for (const auto& [next, prob] : row) {
        if (prob > 0.0) last = next;
        acc += prob;
        if (u < acc) return next;
    }
    return last;
}

}  // namespace detail

/// One executed step: the state it was taken in, the joint action, and the
/// per-agent immediate rewards.
struct RoundStep {
    int state = 0;
    std::vector<int> actions;
    std::vector<double> rewards;

    friend bool operator==(const RoundStep&, const RoundStep&) = default;
};

struct RoundTrace {
    std::vector<RoundStep> steps;

    friend bool operator==(const RoundTrace&, const RoundTrace&) = default;
};

/// Plays one fixed-horizon episode with the given stationary policies.
/// Fully determined by the seed.
inline RoundTrace run_round(const GameSpec& g, std::span<const PolicyTable> policies, int horizon,
                            int start_state, std::uint64_t seed) {
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (start_state < 0 || start_state >= g.num_states())
        throw GameError("start state index out of range");
    if (static_cast<int>(policies.size()) != g.num_agents)
        throw GameError("expected one policy per agent");
    for (int i = 0; i < g.num_agents; ++i) {
        if (policies[static_cast<std::size_t>(i)].agent != i)
            throw GameError("policy list is not in agent order");
        validate_policy_table(g, policies[static_cast<std::size_t>(i)]);
    }

    std::mt19937_64 rng(seed);
    RoundTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(horizon));
    std::vector<int> joint(static_cast<std::size_t>(g.num_agents));
    int state = start_state;
    for (int t = 0; t < horizon; ++t) {
        for (int i = 0; i < g.num_agents; ++i)
            joint[static_cast<std::size_t>(i)] = detail::sample_index(
                rng, policies[static_cast<std::size_t>(i)].probs[static_cast<std::size_t>(state)]);
        const int joint_idx = g.joint_index(joint);
        RoundStep step;
        step.state = state;
        step.actions = joint;
        step.rewards.reserve(static_cast<std::size_t>(g.num_agents));
        for (int i = 0; i < g.num_agents; ++i) step.rewards.push_back(g.reward(i, state, joint_idx));
        trace.steps.push_back(std::move(step));
        state = detail::sample_transition(rng, g.transition_row(state, joint_idx));
    }
    return trace;
}

/// Sum of gamma^t * reward_t over the logged steps.
inline double discounted_return(const RoundTrace& trace, int agent, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("discount must lie in [0,1)");
    double total = 0.0;
    double weight = 1.0;
    for (const RoundStep& step : trace.steps) {
        total += weight * step.rewards[static_cast<std::size_t>(agent)];
        weight *= gamma;
    }
    return total;
}

struct StepRecord {
    int round = 0;
    int step = 0;
    int state = 0;
    std::vector<int> actions;
    std::vector<double> rewards;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Per-round belief bookkeeping of one ToM agent: the rate estimate the
/// round was played with, the posterior after folding in the round's
/// inferred levels (lambda_hat is its mean), and how many MDP solves the
/// round cost.
struct BeliefRecord {
    int round = 0;
    int agent = 0;
    double lambda_used = 0.0;
    GammaParams posterior_after;
    double lambda_hat = 0.0;
    std::vector<std::pair<int, int>> inferred;  // (opponent, level), ascending by opponent
    long solves_delta = 0;

    friend bool operator==(const BeliefRecord&, const BeliefRecord&) = default;
};

struct Trace {
    std::vector<StepRecord> steps;
    std::vector<BeliefRecord> beliefs;

    friend bool operator==(const Trace&, const Trace&) = default;
};

struct AgentSummary {
    int agent = 0;
    double mean_discounted_return = 0.0;
    long total_solves = 0;
};

struct ExperimentResult {
    Trace trace;
    std::vector<AgentSummary> agent_summaries;
};

struct ExperimentOptions {
    double solver_tol = 1e-8;
    long solver_max_iterations = 100000;
};

/**
 * Runs the full loop for `rounds` episodes of `horizon` steps each. ToM
 * agents follow estimate / refresh / respond / observe-and-update; fixed-
 * level agents play their level of a canonical singleton ladder built once
 * at experiment start; scripted agents play their table. Throws GameError on
 * configuration mismatches (wrong agent count, fixed level above the depth
 * cap, invalid scripted table).
 */
inline ExperimentResult run_experiment(const GameSpec& g, std::span<const AgentConfig> agents,
                                       int rounds, int horizon, std::uint64_t seed,
                                       const ExperimentOptions& options = {}) {
    if (rounds < 1) throw std::invalid_argument("rounds must be at least 1");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (static_cast<int>(agents.size()) != g.num_agents)
        throw GameError("expected " + std::to_string(g.num_agents) + " agent configs, got " +
                        std::to_string(agents.size()));
    std::vector<const AgentConfig*> by_agent(static_cast<std::size_t>(g.num_agents), nullptr);
    for (const AgentConfig& config : agents) {
        if (config.agent < 0 || config.agent >= g.num_agents)
            throw GameError("agent index " + std::to_string(config.agent) + " out of range");
        if (by_agent[static_cast<std::size_t>(config.agent)])
            throw GameError("two configs for agent " + std::to_string(config.agent));
        by_agent[static_cast<std::size_t>(config.agent)] = &config;
    }

    HierarchyOptions hier_options;
    hier_options.solver_tol = options.solver_tol;
    hier_options.solver_max_iterations = options.solver_max_iterations;

    // Depth cap: the deepest ToM ladder bounds the levels fixed agents may
    // reference; with no ToM agents the fixed levels set the cap themselves.
    int tom_cap = -1;
    int max_fixed = -1;
    for (int i = 0; i < g.num_agents; ++i) {
        if (const auto* tom = std::get_if<TomAgentConfig>(&by_agent[static_cast<std::size_t>(i)]->behavior)) {
            if (tom->depth < 0) throw GameError("ToM depth must be nonnegative");
            check_gamma(tom->prior);
            tom_cap = std::max(tom_cap, tom->depth);
        } else if (const auto* fixed =
                       std::get_if<FixedLevelAgentConfig>(&by_agent[static_cast<std::size_t>(i)]->behavior)) {
            if (fixed->level < 0) throw GameError("fixed level must be nonnegative");
            max_fixed = std::max(max_fixed, fixed->level);
        } else {
            const auto& scripted = std::get<ScriptedAgentConfig>(by_agent[static_cast<std::size_t>(i)]->behavior);
            if (scripted.policy.agent != i)
                throw GameError("scripted policy for agent " + std::to_string(i) +
                                " is labeled for agent " + std::to_string(scripted.policy.agent));
            validate_policy_table(g, scripted.policy);
        }
    }
    if (tom_cap >= 0 && max_fixed > tom_cap)
        throw GameError("fixed level " + std::to_string(max_fixed) + " exceeds the depth cap " +
                        std::to_string(tom_cap));

    // Canonical ladder for fixed-level agents, one meaning of "level k" for
    // the whole experiment. Its solves belong to no ToM agent.
    Hierarchy canonical;
    if (max_fixed >= 0) canonical = build_singleton(g, 0, max_fixed, hier_options);

    struct TomState {
        TomAgentConfig config;
        BeliefState belief;
        Hierarchy ladder;
        long pending_solves = 0;
    };
    std::vector<std::unique_ptr<TomState>> tom(static_cast<std::size_t>(g.num_agents));
    for (int i = 0; i < g.num_agents; ++i) {
        const auto* config = std::get_if<TomAgentConfig>(&by_agent[static_cast<std::size_t>(i)]->behavior);
        if (!config) continue;
        auto state = std::make_unique<TomState>(TomState{
            *config, BeliefState(config->prior, config->depth), Hierarchy{}, 0});
        state->ladder = config->mode == HierarchyMode::Singleton
                            ? build_singleton(g, i, config->depth, hier_options)
                            : build_mixed(g, i, config->depth, posterior_mean(config->prior), hier_options);
        state->pending_solves = state->ladder.solve_count;
        tom[static_cast<std::size_t>(i)] = std::move(state);
    }

    ExperimentResult result;
    std::vector<double> return_sums(static_cast<std::size_t>(g.num_agents), 0.0);
    std::mt19937_64 seeder(seed);
    std::vector<PolicyTable> policies(static_cast<std::size_t>(g.num_agents));
    std::vector<EpisodeStep> episode;
    std::vector<int> observed_levels;

    for (int round = 1; round <= rounds; ++round) {
        // (a) estimate, (b) refresh, (c) respond
        for (int i = 0; i < g.num_agents; ++i) {
            if (TomState* state = tom[static_cast<std::size_t>(i)].get()) {
                const double lambda = state->belief.lambda_hat();
                const long before = state->ladder.solve_count;
                refresh(g, state->ladder, lambda);
                state->pending_solves += state->ladder.solve_count - before;
                policies[static_cast<std::size_t>(i)] = own_best_response(state->ladder, lambda);
            } else if (const auto* fixed = std::get_if<FixedLevelAgentConfig>(
                           &by_agent[static_cast<std::size_t>(i)]->behavior)) {
                policies[static_cast<std::size_t>(i)] =
                    canonical.levels[static_cast<std::size_t>(fixed->level)][static_cast<std::size_t>(i)];
            } else {
                policies[static_cast<std::size_t>(i)] =
                    std::get<ScriptedAgentConfig>(by_agent[static_cast<std::size_t>(i)]->behavior).policy;
            }
        }

        const std::uint64_t round_seed = seeder();
        const RoundTrace round_trace = run_round(g, policies, horizon, g.initial_state, round_seed);
        for (int t = 0; t < static_cast<int>(round_trace.steps.size()); ++t) {
            const RoundStep& step = round_trace.steps[static_cast<std::size_t>(t)];
            result.trace.steps.push_back(StepRecord{round, t, step.state, step.actions, step.rewards});
        }
        for (int i = 0; i < g.num_agents; ++i)
            return_sums[static_cast<std::size_t>(i)] += discounted_return(round_trace, i, g.discount);

        // (d) observe played strategies, update the posterior
        for (int i = 0; i < g.num_agents; ++i) {
            TomState* state = tom[static_cast<std::size_t>(i)].get();
            if (!state) continue;
            BeliefRecord record;
            record.round = round;
            record.agent = i;
            record.lambda_used = state->belief.lambda_hat();
            observed_levels.clear();
            for (int opp = 0; opp < g.num_agents; ++opp) {
                if (opp == i) continue;
                episode.clear();
                for (const RoundStep& step : round_trace.steps)
                    episode.push_back(EpisodeStep{step.state, step.actions[static_cast<std::size_t>(opp)]});
                const std::vector<PolicyTable> candidates = state->ladder.agent_ladder(opp);
                const int level = infer_level(episode, candidates, state->config.epsilon);
                record.inferred.emplace_back(opp, level);
                observed_levels.push_back(level);
            }
            state->belief.observe(observed_levels);
            record.posterior_after = state->belief.posterior();
            record.lambda_hat = state->belief.lambda_hat();
            record.solves_delta = state->pending_solves;
            state->pending_solves = 0;
            result.trace.beliefs.push_back(std::move(record));
        }
    }

    for (int i = 0; i < g.num_agents; ++i) {
        AgentSummary summary;
        summary.agent = i;
        summary.mean_discounted_return = return_sums[static_cast<std::size_t>(i)] / static_cast<double>(rounds);
        if (const TomState* state = tom[static_cast<std::size_t>(i)].get())
            summary.total_solves = state->ladder.solve_count;
        result.agent_summaries.push_back(summary);
    }
    return result;
}

/// steps.csv: round, t, state, action per agent, reward per agent.
/// Identifiers are written by name; LF line endings; byte-stable.
inline void write_steps_csv(std::ostream& out, const GameSpec& g, const Trace& trace) {
    out << "round,t,state";
    for (int i = 0; i < g.num_agents; ++i) out << ",action_" << i;
    for (int i = 0; i < g.num_agents; ++i) out << ",reward_" << i;
    out << "\n";
    for (const StepRecord& step : trace.steps) {
        out << step.round << "," << step.step << "," << g.states[static_cast<std::size_t>(step.state)];
        for (int i = 0; i < g.num_agents; ++i)
            out << ","
                << g.actions[static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(step.actions[static_cast<std::size_t>(i)])];
        for (int i = 0; i < g.num_agents; ++i)
            out << "," << detail::format_double(step.rewards[static_cast<std::size_t>(i)]);
        out << "\n";
    }
}

/// beliefs.csv: round, agent, posterior (a, b, lambda_hat) after the round's
/// update, inferred level per opponent (own column empty), solves_delta.
inline void write_beliefs_csv(std::ostream& out, const GameSpec& g, const Trace& trace) {
    out << "round,agent,a,b,lambda_hat";
    for (int i = 0; i < g.num_agents; ++i) out << ",inferred_level_" << i;
    out << ",solves_delta\n";
    for (const BeliefRecord& record : trace.beliefs) {
        out << record.round << "," << record.agent << "," << detail::format_double(record.posterior_after.a)
            << "," << detail::format_double(record.posterior_after.b) << ","
            << detail::format_double(record.lambda_hat);
        for (int i = 0; i < g.num_agents; ++i) {
            out << ",";
            for (const auto& [opp, level] : record.inferred)
                if (opp == i) out << level;
        }
        out << "," << record.solves_delta << "\n";
    }
}

}  // namespace levelk
