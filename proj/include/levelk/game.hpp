#pragma once

// Stochastic game representation: finite agents, states, per-agent action
// sets, joint-action transition distributions, per-agent reward tables and a
// discount factor. Games are immutable after construction and safe to share
// across threads read-only.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace levelk {

/// Thrown for malformed game files, broken invariants and contract misuse.
class GameError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sparse transition row: (successor state, probability), sorted by state.
using TransitionRow = std::vector<std::pair<int, double>>;

namespace detail {

/// Shortest round-trip decimal form; locale-free, byte-stable.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Compact form for human-facing diagnostics ("1.1", not 17 digits).
inline std::string format_double_brief(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

}  // namespace detail

/**
 * A finite stochastic game. States and actions are dense 0-based indices in
 * declaration order; every tie-break elsewhere in the library refers to this
 * order. Joint actions are indexed agent-major: agent 0 varies slowest.
 */
struct GameSpec {
    int num_agents = 0;
    std::vector<std::string> states;
    std::vector<std::vector<std::string>> actions;  // [agent][action]
    int initial_state = 0;
    double discount = 0.9;

    // transitions[state * num_joint_actions() + joint] -> distribution over
    // successors. rewards[agent][state * num_joint_actions() + joint].
    std::vector<TransitionRow> transitions;
    std::vector<std::vector<double>> rewards;

    // Bookkeeping from construction: how many rows/entries were filled by the
    // sparse defaults (self-loop transitions, zero rewards).
    std::size_t defaulted_transition_rows = 0;
    std::size_t defaulted_reward_entries = 0;

    int num_states() const { return static_cast<int>(states.size()); }

    int num_actions(int agent) const {
        return static_cast<int>(actions.at(static_cast<std::size_t>(agent)).size());
    }

    int num_joint_actions() const {
        int n = 1;
        for (const auto& acts : actions) n *= static_cast<int>(acts.size());
        return n;
    }

    int joint_index(std::span<const int> joint) const {
        int idx = 0;
        for (int i = 0; i < num_agents; ++i) idx = idx * num_actions(i) + joint[static_cast<std::size_t>(i)];
        return idx;
    }

    void decode_joint(int joint, std::vector<int>& out) const {
        out.assign(static_cast<std::size_t>(num_agents), 0);
        for (int i = num_agents - 1; i >= 0; --i) {
            const int k = num_actions(i);
            out[static_cast<std::size_t>(i)] = joint % k;
            joint /= k;
        }
    }

    const TransitionRow& transition_row(int state, int joint) const {
        return transitions[static_cast<std::size_t>(state) * static_cast<std::size_t>(num_joint_actions()) +
                           static_cast<std::size_t>(joint)];
    }

    double reward(int agent, int state, int joint) const {
        return rewards[static_cast<std::size_t>(agent)]
                      [static_cast<std::size_t>(state) * static_cast<std::size_t>(num_joint_actions()) +
                       static_cast<std::size_t>(joint)];
    }

    // Semantic equality; the defaulted_* counters are construction metadata
    // and do not participate.
    friend bool operator==(const GameSpec& a, const GameSpec& b) {
        return a.num_agents == b.num_agents && a.states == b.states && a.actions == b.actions &&
               a.initial_state == b.initial_state && a.discount == b.discount &&
               a.transitions == b.transitions && a.rewards == b.rewards;
    }
};

/// Stationary policy of one agent: probs[state][action], each row a
/// distribution over that agent's actions.
struct PolicyTable {
    int agent = 0;
    std::vector<std::vector<double>> probs;

    friend bool operator==(const PolicyTable&, const PolicyTable&) = default;
};

constexpr double kDistributionTolerance = 1e-9;

/// Throws GameError unless p is a complete, normalized policy for `agent`.
inline void validate_policy_table(const GameSpec& g, const PolicyTable& p) {
    if (p.agent < 0 || p.agent >= g.num_agents)
        throw GameError("policy agent index " + std::to_string(p.agent) + " out of range");
    if (static_cast<int>(p.probs.size()) != g.num_states())
        throw GameError("policy for agent " + std::to_string(p.agent) + " covers " +
                        std::to_string(p.probs.size()) + " states, game has " +
                        std::to_string(g.num_states()));
    const std::size_t want = static_cast<std::size_t>(g.num_actions(p.agent));
    for (int s = 0; s < g.num_states(); ++s) {
        const auto& row = p.probs[static_cast<std::size_t>(s)];
        if (row.size() != want)
            throw GameError("policy row for state '" + g.states[static_cast<std::size_t>(s)] +
                            "' has wrong action count");
        double mass = 0.0;
        for (double v : row) {
            if (v < 0.0) throw GameError("negative policy probability in state '" +
                                         g.states[static_cast<std::size_t>(s)] + "'");
            mass += v;
        }
        if (std::abs(mass - 1.0) > kDistributionTolerance)
            throw GameError("policy mass " + detail::format_double_brief(mass) + " in state '" +
                            g.states[static_cast<std::size_t>(s)] + "'");
    }
}

/**
 * Incremental construction of a GameSpec. Unset transition rows default to a
 * deterministic self-loop and unset rewards to zero; build() counts both so
 * silent omissions stay visible in validation reports. Duplicate entries and
 * out-of-range indices throw.
 */
class GameSpecBuilder {
public:
    GameSpecBuilder(int num_agents, std::vector<std::string> states,
                    std::vector<std::vector<std::string>> actions, double discount)
        : spec_{} {
        spec_.num_agents = num_agents;
        spec_.states = std::move(states);
        spec_.actions = std::move(actions);
        spec_.discount = discount;
        joint_ = spec_.actions.empty() ? 0 : 1;
        for (const auto& a : spec_.actions) joint_ *= static_cast<int>(a.size());
        const std::size_t rows =
            static_cast<std::size_t>(spec_.states.size()) * static_cast<std::size_t>(joint_);
        transition_set_.assign(rows, false);
        spec_.transitions.assign(rows, {});
        spec_.rewards.assign(static_cast<std::size_t>(num_agents), std::vector<double>(rows, 0.0));
        reward_set_.assign(static_cast<std::size_t>(num_agents), std::vector<bool>(rows, false));
    }

    void set_initial_state(int s) {
        check_state(s);
        spec_.initial_state = s;
    }

    void set_transition(int state, std::span<const int> joint, TransitionRow dist) {
        const std::size_t idx = row_index(state, joint);
        if (transition_set_[idx])
            throw GameError("duplicate transition entry for state '" +
                            spec_.states[static_cast<std::size_t>(state)] + "', joint action " +
                            joint_name(joint));
        std::sort(dist.begin(), dist.end());
        for (std::size_t i = 0; i + 1 < dist.size(); ++i)
            if (dist[i].first == dist[i + 1].first)
                throw GameError("duplicate successor '" +
                                spec_.states[static_cast<std::size_t>(dist[i].first)] +
                                "' in one distribution");
        for (const auto& [next, prob] : dist) {
            check_state(next);
            (void)prob;
        }
        spec_.transitions[idx] = std::move(dist);
        transition_set_[idx] = true;
    }

    void set_reward(int agent, int state, std::span<const int> joint, double value) {
        check_agent(agent);
        const std::size_t idx = row_index(state, joint);
        if (reward_set_[static_cast<std::size_t>(agent)][idx])
            throw GameError("duplicate reward entry for agent " + std::to_string(agent) +
                            ", state '" + spec_.states[static_cast<std::size_t>(state)] +
                            "', joint action " + joint_name(joint));
        spec_.rewards[static_cast<std::size_t>(agent)][idx] = value;
        reward_set_[static_cast<std::size_t>(agent)][idx] = true;
    }

    /// Finalizes the game: fills sparse defaults and records their counts.
    /// Structural errors throw here; probability-mass problems are left for
    /// validate_game_spec so that reports can be produced for broken files.
    GameSpec build() {
        for (int s = 0; s < static_cast<int>(spec_.states.size()); ++s) {
            for (int j = 0; j < joint_; ++j) {
                const std::size_t idx =
                    static_cast<std::size_t>(s) * static_cast<std::size_t>(joint_) + static_cast<std::size_t>(j);
                if (!transition_set_[idx]) {
                    spec_.transitions[idx] = TransitionRow{{s, 1.0}};
                    ++spec_.defaulted_transition_rows;
                }
            }
        }
        for (const auto& per_agent : reward_set_)
            for (bool set : per_agent)
                if (!set) ++spec_.defaulted_reward_entries;
        return std::move(spec_);
    }

private:
    void check_state(int s) const {
        if (s < 0 || s >= static_cast<int>(spec_.states.size()))
            throw GameError("state index " + std::to_string(s) + " out of range");
    }

    void check_agent(int a) const {
        if (a < 0 || a >= spec_.num_agents)
            throw GameError("agent index " + std::to_string(a) + " out of range");
    }

    std::size_t row_index(int state, std::span<const int> joint) const {
        check_state(state);
        if (static_cast<int>(joint.size()) != spec_.num_agents)
            throw GameError("joint action has " + std::to_string(joint.size()) + " entries, expected " +
                            std::to_string(spec_.num_agents));
        int idx = 0;
        for (int i = 0; i < spec_.num_agents; ++i) {
            const int k = static_cast<int>(spec_.actions[static_cast<std::size_t>(i)].size());
            const int a = joint[static_cast<std::size_t>(i)];
            if (a < 0 || a >= k)
                throw GameError("action index " + std::to_string(a) + " out of range for agent " +
                                std::to_string(i));
            idx = idx * k + a;
        }
        return static_cast<std::size_t>(state) * static_cast<std::size_t>(joint_) + static_cast<std::size_t>(idx);
    }

    std::string joint_name(std::span<const int> joint) const {
        std::string out = "(";
        for (int i = 0; i < spec_.num_agents; ++i) {
            if (i) out += ",";
            out += spec_.actions[static_cast<std::size_t>(i)][static_cast<std::size_t>(joint[static_cast<std::size_t>(i)])];
        }
        return out + ")";
    }

    GameSpec spec_;
    int joint_ = 0;
    std::vector<bool> transition_set_;
    std::vector<std::vector<bool>> reward_set_;
};

/// Result of checking a GameSpec against its invariants. Zero errors means
/// every transition row is a distribution, rewards are finite, and the
/// structural fields are coherent. Defaulted-row counts are carried through
/// from construction so sparse files stay auditable.
struct ValidationReport {
    std::vector<std::string> errors;
    std::size_t defaulted_transition_rows = 0;
    std::size_t defaulted_reward_entries = 0;

    bool ok() const { return errors.empty(); }

    std::string summary_line() const {
        std::string out = std::to_string(errors.size()) + (errors.size() == 1 ? " error, " : " errors, ");
        out += std::to_string(defaulted_transition_rows) +
               (defaulted_transition_rows == 1 ? " defaulted row" : " defaulted rows");
        return out;
    }
};

inline ValidationReport validate_game_spec(const GameSpec& g) {
    ValidationReport report;
    report.defaulted_transition_rows = g.defaulted_transition_rows;
    report.defaulted_reward_entries = g.defaulted_reward_entries;
    auto err = [&report](std::string msg) { report.errors.push_back(std::move(msg)); };

    if (g.num_agents < 2) err("agent count " + std::to_string(g.num_agents) + " is below 2");
    if (g.states.empty()) err("no states declared");
    if (static_cast<int>(g.actions.size()) != g.num_agents)
        err("actions declared for " + std::to_string(g.actions.size()) + " agents, expected " +
            std::to_string(g.num_agents));
    for (std::size_t i = 0; i < g.actions.size(); ++i)
        if (g.actions[i].empty()) err("agent " + std::to_string(i) + " has an empty action set");
    if (!(g.discount >= 0.0 && g.discount < 1.0))
        err("discount " + detail::format_double_brief(g.discount) + " outside [0,1)");
    if (g.initial_state < 0 || g.initial_state >= static_cast<int>(g.states.size()))
        err("initial state index out of range");

    if (!report.ok()) return report;  // shape is broken, row checks would be noise

    const int joint = g.num_joint_actions();
    const std::size_t rows = static_cast<std::size_t>(g.num_states()) * static_cast<std::size_t>(joint);
    if (g.transitions.size() != rows) {
        err("transition table has " + std::to_string(g.transitions.size()) + " rows, expected " +
            std::to_string(rows));
        return report;
    }
    std::vector<int> acts;
    for (int s = 0; s < g.num_states(); ++s) {
        for (int j = 0; j < joint; ++j) {
            const auto& row = g.transition_row(s, j);
            g.decode_joint(j, acts);
            std::string where = "state '" + g.states[static_cast<std::size_t>(s)] + "' joint action (";
            for (int i = 0; i < g.num_agents; ++i) {
                if (i) where += ",";
                where += g.actions[static_cast<std::size_t>(i)][static_cast<std::size_t>(acts[static_cast<std::size_t>(i)])];
            }
            where += ")";
            if (row.empty()) {
                err(where + ": no transition distribution");
                continue;
            }
            double mass = 0.0;
            bool negative = false;
            for (const auto& [next, prob] : row) {
                if (next < 0 || next >= g.num_states()) err(where + ": successor index out of range");
                if (prob < 0.0) negative = true;
                mass += prob;
            }
            if (negative) err(where + ": negative probability");
            if (std::abs(mass - 1.0) > kDistributionTolerance)
                err(where + ": distribution mass " + detail::format_double_brief(mass));
        }
    }
    for (int a = 0; a < g.num_agents; ++a) {
        if (g.rewards[static_cast<std::size_t>(a)].size() != rows) {
            err("reward table for agent " + std::to_string(a) + " has wrong size");
            continue;
        }
        for (double v : g.rewards[static_cast<std::size_t>(a)])
            if (!std::isfinite(v)) {
                err("non-finite reward for agent " + std::to_string(a));
                break;
            }
    }
    return report;
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw GameError(std::string("missing top-level key '") + key + "'");
    return *it;
}

inline int lookup(const std::map<std::string, int>& table, const std::string& name,
                  const char* what) {
    auto it = table.find(name);
    if (it == table.end()) throw GameError(std::string("unknown ") + what + " '" + name + "'");
    return it->second;
}

}  // namespace detail

/**
 * Parses the JSON game format without enforcing distribution invariants,
 * so that validate_game_spec can produce a report for damaged files.
 * Syntax errors, unknown identifiers and duplicate entries still throw.
 */
inline GameSpec parse_game_spec_unchecked(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw GameError(std::string("syntax error: ") + e.what());
    }
    if (!doc.is_object()) throw GameError("top level is not an object");

    const auto& agents_j = detail::require_field(doc, "agents");
    if (!agents_j.is_number_integer()) throw GameError("'agents' must be an integer");
    const int num_agents = agents_j.get<int>();

    const auto& states_j = detail::require_field(doc, "states");
    if (!states_j.is_array()) throw GameError("'states' must be an array of strings");
    std::vector<std::string> states;
    std::map<std::string, int> state_index;
    for (const auto& s : states_j) {
        if (!s.is_string()) throw GameError("'states' must be an array of strings");
        auto name = s.get<std::string>();
        if (!state_index.emplace(name, static_cast<int>(states.size())).second)
            throw GameError("duplicate state '" + name + "'");
        states.push_back(std::move(name));
    }

    const auto& actions_j = detail::require_field(doc, "actions");
    if (!actions_j.is_array() || static_cast<int>(actions_j.size()) != num_agents)
        throw GameError("'actions' must be an array with one entry per agent");
    std::vector<std::vector<std::string>> actions;
    std::vector<std::map<std::string, int>> action_index(static_cast<std::size_t>(num_agents));
    for (int i = 0; i < num_agents; ++i) {
        const auto& list = actions_j[static_cast<std::size_t>(i)];
        if (!list.is_array() || list.empty())
            throw GameError("agent " + std::to_string(i) + " needs a nonempty action array");
        std::vector<std::string> names;
        for (const auto& a : list) {
            if (!a.is_string()) throw GameError("action identifiers must be strings");
            auto name = a.get<std::string>();
            if (!action_index[static_cast<std::size_t>(i)].emplace(name, static_cast<int>(names.size())).second)
                throw GameError("duplicate action '" + name + "' for agent " + std::to_string(i));
            names.push_back(std::move(name));
        }
        actions.push_back(std::move(names));
    }

    const auto& discount_j = detail::require_field(doc, "discount");
    if (!discount_j.is_number()) throw GameError("'discount' must be a number");

    GameSpecBuilder builder(num_agents, states, actions, discount_j.get<double>());

    if (auto it = doc.find("initial_state"); it != doc.end()) {
        if (!it->is_string()) throw GameError("'initial_state' must be a state identifier");
        builder.set_initial_state(detail::lookup(state_index, it->get<std::string>(), "state"));
    }

    auto read_joint = [&](const nlohmann::json& entry) {
        const auto& ja = entry.at("joint_action");
        if (!ja.is_array() || static_cast<int>(ja.size()) != num_agents)
            throw GameError("'joint_action' must list one action per agent");
        std::vector<int> joint(static_cast<std::size_t>(num_agents));
        for (int i = 0; i < num_agents; ++i) {
            const auto& a = ja[static_cast<std::size_t>(i)];
            if (!a.is_string()) throw GameError("'joint_action' entries must be strings");
            joint[static_cast<std::size_t>(i)] =
                detail::lookup(action_index[static_cast<std::size_t>(i)], a.get<std::string>(), "action");
        }
        return joint;
    };

    const auto& transitions_j = detail::require_field(doc, "transitions");
    if (!transitions_j.is_array()) throw GameError("'transitions' must be an array");
    for (const auto& entry : transitions_j) {
        if (!entry.is_object() || !entry.contains("state") || !entry.contains("joint_action") ||
            !entry.contains("dist"))
            throw GameError("transition entries need 'state', 'joint_action' and 'dist'");
        const int state = detail::lookup(state_index, entry.at("state").get<std::string>(), "state");
        const auto joint = read_joint(entry);
        const auto& dist_j = entry.at("dist");
        if (!dist_j.is_array()) throw GameError("'dist' must be an array of [state, prob] pairs");
        TransitionRow row;
        for (const auto& pair : dist_j) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_number())
                throw GameError("'dist' must be an array of [state, prob] pairs");
            row.emplace_back(detail::lookup(state_index, pair[0].get<std::string>(), "state"),
                             pair[1].get<double>());
        }
        builder.set_transition(state, joint, std::move(row));
    }

    const auto& rewards_j = detail::require_field(doc, "rewards");
    if (!rewards_j.is_array()) throw GameError("'rewards' must be an array");
    for (const auto& entry : rewards_j) {
        if (!entry.is_object() || !entry.contains("agent") || !entry.contains("state") ||
            !entry.contains("joint_action") || !entry.contains("value"))
            throw GameError("reward entries need 'agent', 'state', 'joint_action' and 'value'");
        const auto& agent_j = entry.at("agent");
        if (!agent_j.is_number_integer()) throw GameError("reward 'agent' must be an integer");
        const auto& value_j = entry.at("value");
        if (!value_j.is_number()) throw GameError("reward 'value' must be a number");
        builder.set_reward(agent_j.get<int>(),
                           detail::lookup(state_index, entry.at("state").get<std::string>(), "state"),
                           read_joint(entry), value_j.get<double>());
    }

    return builder.build();
}

/// Parses and validates; throws GameError on the first invariant violation.
inline GameSpec parse_game_spec(std::string_view text) {
    GameSpec g = parse_game_spec_unchecked(text);
    ValidationReport report = validate_game_spec(g);
    if (!report.ok()) throw GameError(report.errors.front());
    return g;
}

/// Canonical serialization: every transition row and reward entry explicit,
/// in (state, joint action) declaration order. parse(serialize(g)) == g.
inline std::string serialize_game_spec(const GameSpec& g) {
    nlohmann::ordered_json doc;
    doc["agents"] = g.num_agents;
    doc["states"] = g.states;
    doc["actions"] = g.actions;
    doc["initial_state"] = g.states[static_cast<std::size_t>(g.initial_state)];
    doc["discount"] = g.discount;

    const int joint = g.num_joint_actions();
    std::vector<int> acts;
    auto joint_names = [&](int j) {
        g.decode_joint(j, acts);
        nlohmann::ordered_json names = nlohmann::ordered_json::array();
        for (int i = 0; i < g.num_agents; ++i)
            names.push_back(g.actions[static_cast<std::size_t>(i)][static_cast<std::size_t>(acts[static_cast<std::size_t>(i)])]);
        return names;
    };

    auto transitions = nlohmann::ordered_json::array();
    for (int s = 0; s < g.num_states(); ++s) {
        for (int j = 0; j < joint; ++j) {
            nlohmann::ordered_json entry;
            entry["state"] = g.states[static_cast<std::size_t>(s)];
            entry["joint_action"] = joint_names(j);
            auto dist = nlohmann::ordered_json::array();
            for (const auto& [next, prob] : g.transition_row(s, j))
                dist.push_back({g.states[static_cast<std::size_t>(next)], prob});
            entry["dist"] = std::move(dist);
            transitions.push_back(std::move(entry));
        }
    }
    doc["transitions"] = std::move(transitions);

    auto rewards = nlohmann::ordered_json::array();
    for (int a = 0; a < g.num_agents; ++a) {
        for (int s = 0; s < g.num_states(); ++s) {
            for (int j = 0; j < joint; ++j) {
                nlohmann::ordered_json entry;
                entry["agent"] = a;
                entry["state"] = g.states[static_cast<std::size_t>(s)];
                entry["joint_action"] = joint_names(j);
                entry["value"] = g.reward(a, s, j);
                rewards.push_back(std::move(entry));
            }
        }
    }
    doc["rewards"] = std::move(rewards);
    return doc.dump(2);
}

/**
 * Independent product of the opponents' policies, per state, over the joint
 * opponent action space A_{-j}. Opponent joint indices are mixed-radix over
 * the opponents in ascending agent order.
 */
struct OpponentProfile {
    int agent = -1;               // the modeled agent j (excluded from the product)
    std::vector<int> opponents;   // ascending agent indices != agent
    std::vector<int> opponent_action_counts;
    std::vector<std::vector<double>> joint;  // [state][opponent joint index]

    int num_joint() const {
        int n = 1;
        for (int k : opponent_action_counts) n *= k;
        return n;
    }

    void decode(int m, std::vector<int>& out) const {
        out.assign(opponents.size(), 0);
        for (int i = static_cast<int>(opponents.size()) - 1; i >= 0; --i) {
            const int k = opponent_action_counts[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(i)] = m % k;
            m /= k;
        }
    }
};

inline OpponentProfile opponent_product(const GameSpec& g, int j,
                                        std::span<const PolicyTable> policies) {
    if (j < 0 || j >= g.num_agents) throw GameError("agent index " + std::to_string(j) + " out of range");
    if (static_cast<int>(policies.size()) != g.num_agents - 1)
        throw GameError("expected " + std::to_string(g.num_agents - 1) + " opponent policies, got " +
                        std::to_string(policies.size()));

    OpponentProfile profile;
    profile.agent = j;
    std::vector<const PolicyTable*> by_agent(static_cast<std::size_t>(g.num_agents), nullptr);
    for (const auto& p : policies) {
        validate_policy_table(g, p);
        if (p.agent == j) throw GameError("policy for the modeled agent passed as an opponent");
        if (by_agent[static_cast<std::size_t>(p.agent)])
            throw GameError("two policies given for agent " + std::to_string(p.agent));
        by_agent[static_cast<std::size_t>(p.agent)] = &p;
    }
    for (int i = 0; i < g.num_agents; ++i) {
        if (i == j) continue;
        if (!by_agent[static_cast<std::size_t>(i)])
            throw GameError("missing policy for agent " + std::to_string(i));
        profile.opponents.push_back(i);
        profile.opponent_action_counts.push_back(g.num_actions(i));
    }

    const int m_count = profile.num_joint();
    profile.joint.assign(static_cast<std::size_t>(g.num_states()),
                         std::vector<double>(static_cast<std::size_t>(m_count), 1.0));
    std::vector<int> opp_acts;
    for (int s = 0; s < g.num_states(); ++s) {
        for (int m = 0; m < m_count; ++m) {
            profile.decode(m, opp_acts);
            double p = 1.0;
            for (std::size_t oi = 0; oi < profile.opponents.size(); ++oi) {
                const PolicyTable& table = *by_agent[static_cast<std::size_t>(profile.opponents[oi])];
                p *= table.probs[static_cast<std::size_t>(s)][static_cast<std::size_t>(opp_acts[oi])];
            }
            profile.joint[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)] = p;
        }
    }
    return profile;
}

}  // namespace levelk
