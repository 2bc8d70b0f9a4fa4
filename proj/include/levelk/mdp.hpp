#pragma once

// Induced single-agent MDPs and their exact solution. When the opponents play
// a fixed stationary profile, the modeled agent faces an ordinary MDP whose
// transition and reward rows are the opponent-weighted mixtures of the game's
// joint rows. Solved by synchronous value iteration on Q-values with a
// sup-norm stopping rule; argmax comparisons are exact with lowest-index
// tie-breaks so policies are reproducible across runs and platforms.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levelk/game.hpp"

namespace levelk {

/// Single-agent MDP faced by one agent against a fixed opponent profile.
struct InducedMdp {
    int num_states = 0;
    int num_actions = 0;
    double discount = 0.0;
    std::vector<TransitionRow> trans;  // [state * num_actions + action]
    std::vector<double> reward;        // [state * num_actions + action]

    const TransitionRow& row(int s, int a) const {
        return trans[static_cast<std::size_t>(s) * static_cast<std::size_t>(num_actions) +
                     static_cast<std::size_t>(a)];
    }

    double reward_at(int s, int a) const {
        return reward[static_cast<std::size_t>(s) * static_cast<std::size_t>(num_actions) +
                      static_cast<std::size_t>(a)];
    }
};

/// Q-values of a solved MDP plus the convergence record of the solve.
struct QFunction {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> values;  // [state * num_actions + action]
    double residual = 0.0;
    long iterations = 0;

    double at(int s, int a) const {
        return values[static_cast<std::size_t>(s) * static_cast<std::size_t>(num_actions) +
                      static_cast<std::size_t>(a)];
    }

    friend bool operator==(const QFunction&, const QFunction&) = default;
};

/**
 * Marginalizes the game's transitions and rewards over the opponents'
 * profile: trans(S'|S,a_j) = sum over opponent joints of T(S'|S,a) * p,
 * reward(S,a_j) likewise with the modeled agent's reward table.
 */
inline InducedMdp induce_mdp(const GameSpec& g, int j, const OpponentProfile& profile) {
    if (j < 0 || j >= g.num_agents) throw GameError("agent index " + std::to_string(j) + " out of range");
    if (profile.agent != j)
        throw GameError("opponent profile was built for agent " + std::to_string(profile.agent));
    if (static_cast<int>(profile.joint.size()) != g.num_states())
        throw GameError("opponent profile does not match the game's state count");

    InducedMdp m;
    m.num_states = g.num_states();
    m.num_actions = g.num_actions(j);
    m.discount = g.discount;
    const std::size_t rows = static_cast<std::size_t>(m.num_states) * static_cast<std::size_t>(m.num_actions);
    m.trans.resize(rows);
    m.reward.assign(rows, 0.0);

    const int opp_count = profile.num_joint();
    std::vector<int> opp_acts;
    std::vector<int> full(static_cast<std::size_t>(g.num_agents));
    std::vector<double> successor(static_cast<std::size_t>(m.num_states));

    for (int s = 0; s < m.num_states; ++s) {
        for (int a = 0; a < m.num_actions; ++a) {
            std::fill(successor.begin(), successor.end(), 0.0);
            double r = 0.0;
            for (int mi = 0; mi < opp_count; ++mi) {
                const double p = profile.joint[static_cast<std::size_t>(s)][static_cast<std::size_t>(mi)];
                if (p == 0.0) continue;
                profile.decode(mi, opp_acts);
                full[static_cast<std::size_t>(j)] = a;
                for (std::size_t oi = 0; oi < profile.opponents.size(); ++oi)
                    full[static_cast<std::size_t>(profile.opponents[oi])] = opp_acts[oi];
                const int joint = g.joint_index(full);
                for (const auto& [next, prob] : g.transition_row(s, joint))
                    successor[static_cast<std::size_t>(next)] += p * prob;
                r += p * g.reward(j, s, joint);
            }
            TransitionRow& row = m.trans[static_cast<std::size_t>(s) * static_cast<std::size_t>(m.num_actions) +
                                         static_cast<std::size_t>(a)];
            for (int next = 0; next < m.num_states; ++next)
                if (successor[static_cast<std::size_t>(next)] != 0.0)
                    row.emplace_back(next, successor[static_cast<std::size_t>(next)]);
            m.reward[static_cast<std::size_t>(s) * static_cast<std::size_t>(m.num_actions) +
                     static_cast<std::size_t>(a)] = r;
        }
    }
    return m;
}

/**
 * Synchronous Q-value iteration. The sweep stops once the sup-norm update
 * delta falls below tol * min(1, (1-gamma)/gamma), which makes both
 * guarantees hold at once: the recorded residual is at most tol, and the
 * returned values are within tol of the optimal Q in sup-norm. Throws if the
 * iteration cap is hit before that, which signals the tolerance is
 * unreachable at this cap.
 */
inline QFunction solve_value_iteration(const InducedMdp& m, double tol = 1e-8,
                                       long max_iterations = 100000) {
    if (!(m.discount >= 0.0 && m.discount < 1.0))
        throw std::invalid_argument("discount must lie in [0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    const double stop =
        m.discount > 0.0 ? tol * std::min(1.0, (1.0 - m.discount) / m.discount) : tol;

    QFunction q;
    q.num_states = m.num_states;
    q.num_actions = m.num_actions;
    const std::size_t cells = static_cast<std::size_t>(m.num_states) * static_cast<std::size_t>(m.num_actions);
    q.values.assign(cells, 0.0);
    std::vector<double> next(cells, 0.0);
    std::vector<double> state_value(static_cast<std::size_t>(m.num_states), 0.0);

    for (long iter = 1; iter <= max_iterations; ++iter) {
        for (int s = 0; s < m.num_states; ++s) {
            double best = q.at(s, 0);
            for (int a = 1; a < m.num_actions; ++a) best = std::max(best, q.at(s, a));
            state_value[static_cast<std::size_t>(s)] = best;
        }
        double delta = 0.0;
        for (int s = 0; s < m.num_states; ++s) {
            for (int a = 0; a < m.num_actions; ++a) {
                double v = m.reward_at(s, a);
                for (const auto& [succ, prob] : m.row(s, a))
                    v += m.discount * prob * state_value[static_cast<std::size_t>(succ)];
                const std::size_t idx = static_cast<std::size_t>(s) * static_cast<std::size_t>(m.num_actions) +
                                        static_cast<std::size_t>(a);
                delta = std::max(delta, std::abs(v - q.values[idx]));
                next[idx] = v;
            }
        }
        q.values.swap(next);
        q.iterations = iter;
        q.residual = delta;
        if (delta <= stop) return q;
    }
    throw std::runtime_error("value iteration hit the cap of " + std::to_string(max_iterations) +
                             " iterations before reaching tolerance " +
                             detail::format_double_brief(tol));
}

/// Deterministic argmax policy; ties go to the lowest action index.
inline PolicyTable greedy_policy(const QFunction& q, int agent = 0) {
    PolicyTable p;
    p.agent = agent;
    p.probs.assign(static_cast<std::size_t>(q.num_states),
                   std::vector<double>(static_cast<std::size_t>(q.num_actions), 0.0));
    for (int s = 0; s < q.num_states; ++s) {
        int best = 0;
        for (int a = 1; a < q.num_actions; ++a)
            if (q.at(s, a) > q.at(s, best)) best = a;
        p.probs[static_cast<std::size_t>(s)][static_cast<std::size_t>(best)] = 1.0;
    }
    return p;
}

/**
 * QMDP action selection: per state, the argmax of the belief-weighted sum of
 * the component Q-functions. Weights must be nonnegative and sum to one; the
 * result is a pure policy with the same lowest-index tie-break as
 * greedy_policy.
 */
inline PolicyTable qmdp_policy(std::span<const double> weights, std::span<const QFunction> qs,
                               int agent = 0) {
    if (weights.size() != qs.size() || qs.empty())
        throw std::invalid_argument("need one weight per Q-function");
    double mass = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("negative QMDP weight");
        mass += w;
    }
    if (std::abs(mass - 1.0) > kDistributionTolerance)
        throw std::invalid_argument("QMDP weights sum to " + detail::format_double_brief(mass));
    for (const QFunction& q : qs)
        if (q.num_states != qs.front().num_states || q.num_actions != qs.front().num_actions)
            throw std::invalid_argument("QMDP components have mismatched shapes");

    const int num_states = qs.front().num_states;
    const int num_actions = qs.front().num_actions;
    PolicyTable p;
    p.agent = agent;
    p.probs.assign(static_cast<std::size_t>(num_states),
                   std::vector<double>(static_cast<std::size_t>(num_actions), 0.0));
    std::vector<double> combined(static_cast<std::size_t>(num_actions));
    for (int s = 0; s < num_states; ++s) {
        std::fill(combined.begin(), combined.end(), 0.0);
        for (std::size_t i = 0; i < qs.size(); ++i)
            for (int a = 0; a < num_actions; ++a)
                combined[static_cast<std::size_t>(a)] += weights[i] * qs[i].at(s, a);
        int best = 0;
        for (int a = 1; a < num_actions; ++a)
            if (combined[static_cast<std::size_t>(a)] > combined[static_cast<std::size_t>(best)]) best = a;
        p.probs[static_cast<std::size_t>(s)][static_cast<std::size_t>(best)] = 1.0;
    }
    return p;
}

}  // namespace levelk
