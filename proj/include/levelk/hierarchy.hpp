#pragma once

// Level-k strategy ladders. Level 0 plays uniformly (or a supplied rule);
// level k+1 best responds to the levels below it, either to the single
// level-k profile (Singleton) or to the truncated-Poisson mixture of all
// lower levels via QMDP (Mixed). Ladders are built for every agent so the
// owner can both predict opponents at any level and read off its own cached
// Q-functions. Each build performs exactly num_agents * depth MDP solves,
// tracked in solve_count; a Singleton ladder never changes after its first
// build, a Mixed ladder is rebuilt whenever the rate estimate moves.

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "levelk/belief.hpp"
#include "levelk/game.hpp"
#include "levelk/mdp.hpp"

namespace levelk {

enum class HierarchyMode { Singleton, Mixed };

inline const char* to_string(HierarchyMode mode) {
    return mode == HierarchyMode::Singleton ? "singleton" : "mixed";
}

/// Optional replacement for the uniform level-0 rule.
using Level0Rule = std::function<PolicyTable(const GameSpec&, int agent)>;

struct HierarchyOptions {
    double solver_tol = 1e-8;
    long solver_max_iterations = 100000;
    Level0Rule level0;  // empty -> uniform
};

/// Uniform play in every state, or the custom rule validated and passed
/// through unchanged.
inline PolicyTable level0_policy(const GameSpec& g, int agent, const Level0Rule& rule = {}) {
    if (agent < 0 || agent >= g.num_agents)
        throw GameError("agent index " + std::to_string(agent) + " out of range");
    if (rule) {
        PolicyTable p = rule(g, agent);
        if (p.agent != agent)
            throw GameError("level-0 rule returned a policy for agent " + std::to_string(p.agent));
        validate_policy_table(g, p);
        return p;
    }
    PolicyTable p;
    p.agent = agent;
    const double u = 1.0 / static_cast<double>(g.num_actions(agent));
    p.probs.assign(static_cast<std::size_t>(g.num_states()),
                   std::vector<double>(static_cast<std::size_t>(g.num_actions(agent)), u));
    return p;
}

/**
 * The strategy ladder of one modeling agent. levels[k][i] is agent i's
 * level-k policy; q_cache[k] is the owner's optimal Q-function against the
 * opponents' level-k profile, for k = 0..depth-1 (the solves that built the
 * owner's ladder). built_with_lambda records the rate a Mixed ladder was
 * constructed with; it is NaN in Singleton mode, where the ladder is
 * rate-independent.
 */
struct Hierarchy {
    int owner = 0;
    HierarchyMode mode = HierarchyMode::Singleton;
    int depth = 0;
    double built_with_lambda = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<PolicyTable>> levels;  // [level][agent]
    std::vector<QFunction> q_cache;                // size == depth
    long solve_count = 0;
    HierarchyOptions options;

    /// Agent i's policies at levels 0..depth, e.g. as candidates for level
    /// inference from observed behavior.
    std::vector<PolicyTable> agent_ladder(int agent) const {
        std::vector<PolicyTable> out;
        out.reserve(levels.size());
        for (const auto& level : levels) out.push_back(level[static_cast<std::size_t>(agent)]);
        return out;
    }
};

namespace detail {

inline Hierarchy build_hierarchy(const GameSpec& g, int owner, int depth, HierarchyMode mode,
                                 double lambda, const HierarchyOptions& options) {
    if (owner < 0 || owner >= g.num_agents)
        throw GameError("agent index " + std::to_string(owner) + " out of range");
    if (depth < 0) throw std::invalid_argument("hierarchy depth must be nonnegative");
    if (mode == HierarchyMode::Mixed && lambda < 0.0)
        throw std::invalid_argument("rate must be nonnegative");

    Hierarchy h;
    h.owner = owner;
    h.mode = mode;
    h.depth = depth;
    h.options = options;
    if (mode == HierarchyMode::Mixed) h.built_with_lambda = lambda;

    std::vector<PolicyTable> base;
    base.reserve(static_cast<std::size_t>(g.num_agents));
    for (int i = 0; i < g.num_agents; ++i) base.push_back(level0_policy(g, i, options.level0));
    h.levels.push_back(std::move(base));

    // Mixed-mode level k+1 needs every agent's Q-functions against levels
    // 0..k, not just the owner's.
    std::vector<std::vector<QFunction>> stacks(static_cast<std::size_t>(g.num_agents));

    std::vector<PolicyTable> opponents;
    for (int level = 1; level <= depth; ++level) {
        std::vector<PolicyTable> next(static_cast<std::size_t>(g.num_agents));
        const auto& below = h.levels[static_cast<std::size_t>(level - 1)];
        for (int i = 0; i < g.num_agents; ++i) {
            opponents.clear();
            for (int o = 0; o < g.num_agents; ++o)
                if (o != i) opponents.push_back(below[static_cast<std::size_t>(o)]);
            const OpponentProfile profile = opponent_product(g, i, opponents);
            QFunction q = solve_value_iteration(induce_mdp(g, i, profile), options.solver_tol,
                                                options.solver_max_iterations);
            ++h.solve_count;
            if (mode == HierarchyMode::Singleton) {
                next[static_cast<std::size_t>(i)] = greedy_policy(q, i);
                if (i == owner) h.q_cache.push_back(std::move(q));
            } else {
                stacks[static_cast<std::size_t>(i)].push_back(std::move(q));
                const std::vector<double> weights = truncated_level_weights(lambda, level - 1);
                next[static_cast<std::size_t>(i)] =
                    qmdp_policy(weights, stacks[static_cast<std::size_t>(i)], i);
            }
        }
        h.levels.push_back(std::move(next));
    }
    if (mode == HierarchyMode::Mixed)
        h.q_cache = std::move(stacks[static_cast<std::size_t>(owner)]);
    return h;
}

}  // namespace detail

/// Ladder where each level best responds to the single profile one level
/// below. Rate-independent; performs exactly num_agents * depth solves.
inline Hierarchy build_singleton(const GameSpec& g, int owner, int depth,
                                 const HierarchyOptions& options = {}) {
    return detail::build_hierarchy(g, owner, depth, HierarchyMode::Singleton, 0.0, options);
}

/// Ladder where each level QMDP-responds to the truncated-Poisson mixture of
/// all lower levels, so the construction depends on the rate estimate.
inline Hierarchy build_mixed(const GameSpec& g, int owner, int depth, double lambda,
                             const HierarchyOptions& options = {}) {
    return detail::build_hierarchy(g, owner, depth, HierarchyMode::Mixed, lambda, options);
}

/**
 * The owner's play against its belief: QMDP over the cached Q-functions with
 * truncated-Poisson weights on the opponent levels 0..depth-1. Uses the
 * cache only, so a Singleton ladder answers for any rate with no new solves;
 * a Mixed ladder must have been rebuilt with the queried rate first. With
 * depth 0 there is nothing to respond to and the owner plays its level-0
 * policy.
 */
inline PolicyTable own_best_response(const Hierarchy& h, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("rate must be nonnegative");
    if (h.mode == HierarchyMode::Mixed && std::abs(lambda - h.built_with_lambda) > 1e-12)
        throw std::runtime_error("mixed hierarchy was built with rate " +
                                 detail::format_double_brief(h.built_with_lambda) +
                                 " but queried with " + detail::format_double_brief(lambda) +
                                 "; rebuild before responding");
    if (h.depth == 0) return h.levels.front()[static_cast<std::size_t>(h.owner)];
    const std::vector<double> weights = truncated_level_weights(lambda, h.depth - 1);
    return qmdp_policy(weights, h.q_cache, h.owner);
}

/// Brings the ladder in line with a new rate estimate. Singleton ladders are
/// rate-independent and return untouched; Mixed ladders rebuild all levels,
/// adding num_agents * depth to solve_count.
inline void refresh(const GameSpec& g, Hierarchy& h, double lambda) {
    if (h.mode == HierarchyMode::Singleton) return;
    Hierarchy rebuilt = detail::build_hierarchy(g, h.owner, h.depth, HierarchyMode::Mixed, lambda, h.options);
    rebuilt.solve_count += h.solve_count;
    h = std::move(rebuilt);
}

/// JSON dump of every level's per-agent action distributions, for debugging
/// and golden tests.
inline nlohmann::ordered_json dump_hierarchy(const Hierarchy& h, const GameSpec& g) {
    nlohmann::ordered_json doc;
    doc["owner"] = h.owner;
    doc["mode"] = to_string(h.mode);
    doc["depth"] = h.depth;
    if (h.mode == HierarchyMode::Mixed) doc["built_with_lambda"] = h.built_with_lambda;
    doc["solve_count"] = h.solve_count;
    auto levels = nlohmann::ordered_json::array();
    for (std::size_t level = 0; level < h.levels.size(); ++level) {
        nlohmann::ordered_json entry;
        entry["level"] = level;
        auto agents = nlohmann::ordered_json::array();
        for (int i = 0; i < g.num_agents; ++i) {
            nlohmann::ordered_json one;
            one["agent"] = i;
            nlohmann::ordered_json policy;
            for (int s = 0; s < g.num_states(); ++s)
                policy[g.states[static_cast<std::size_t>(s)]] =
                    h.levels[level][static_cast<std::size_t>(i)].probs[static_cast<std::size_t>(s)];
            one["policy"] = std::move(policy);
            agents.push_back(std::move(one));
        }
        entry["agents"] = std::move(agents);
        levels.push_back(std::move(entry));
    }
    doc["levels"] = std::move(levels);
    return doc;
}

}  // namespace levelk
