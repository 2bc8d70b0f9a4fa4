#pragma once

// Built-in example games. These are small, fully explicit constructions used
// by the CLI and the test suite.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "levelk/game.hpp"

namespace levelk {

/// Zero-sum matching game: agent 0 wins +1 when the choices match, loses 1
/// otherwise; agent 1 gets the negation.
inline GameSpec matching_pennies() {
    GameSpecBuilder builder(2, {"s0"}, {{"heads", "tails"}, {"heads", "tails"}}, 0.9);
    for (int a0 = 0; a0 < 2; ++a0) {
        for (int a1 = 0; a1 < 2; ++a1) {
            const std::vector<int> joint{a0, a1};
            builder.set_transition(0, joint, TransitionRow{{0, 1.0}});
            const double r0 = a0 == a1 ? 1.0 : -1.0;
            builder.set_reward(0, 0, joint, r0);
            builder.set_reward(1, 0, joint, -r0);
        }
    }
    return builder.build();
}

/// Pure coordination: both agents earn 2 on (A, A), 1 on (B, B), nothing on
/// a mismatch. Diagnostic game: the best response to uniform play is A, so
/// level 1 is distinguishable from level 0 in observed behavior.
inline GameSpec coordination() {
    GameSpecBuilder builder(2, {"s0"}, {{"A", "B"}, {"A", "B"}}, 0.9);
    for (int a0 = 0; a0 < 2; ++a0) {
        for (int a1 = 0; a1 < 2; ++a1) {
            const std::vector<int> joint{a0, a1};
            builder.set_transition(0, joint, TransitionRow{{0, 1.0}});
            const double payoff = a0 == a1 ? (a0 == 0 ? 2.0 : 1.0) : 0.0;
            builder.set_reward(0, 0, joint, payoff);
            builder.set_reward(1, 0, joint, payoff);
        }
    }
    return builder.build();
}

/**
 * Two agents on a w-by-h grid; states enumerate both positions. Five moves
 * each (up, down, left, right, stay), deterministic, clamped at the walls.
 * The chaser (agent 0) earns +1 whenever the move ends co-located, the
 * evader (agent 1) loses 1 on the same event.
 */
inline GameSpec gridworld_chase(int width, int height) {
    if (width < 1 || height < 1 || width > 12 || height > 12)
        throw GameError("gridworld_chase dimensions must lie in [1,12]");
    const int cells = width * height;
    std::vector<std::string> states;
    states.reserve(static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells));
    for (int p0 = 0; p0 < cells; ++p0)
        for (int p1 = 0; p1 < cells; ++p1)
            states.push_back("s" + std::to_string(p0) + "_" + std::to_string(p1));

    const std::vector<std::string> moves{"up", "down", "left", "right", "stay"};
    GameSpecBuilder builder(2, states, {moves, moves}, 0.9);
    builder.set_initial_state(cells - 1);  // chaser in the first cell, evader in the last

    constexpr int row_delta[5] = {-1, 1, 0, 0, 0};
    constexpr int col_delta[5] = {0, 0, -1, 1, 0};
    auto step = [&](int cell, int move) {
        int row = cell / width;
        int col = cell % width;
        row = std::min(std::max(row + row_delta[move], 0), height - 1);
        col = std::min(std::max(col + col_delta[move], 0), width - 1);
        return row * width + col;
    };

    for (int p0 = 0; p0 < cells; ++p0) {
        for (int p1 = 0; p1 < cells; ++p1) {
            const int state = p0 * cells + p1;
            for (int m0 = 0; m0 < 5; ++m0) {
                for (int m1 = 0; m1 < 5; ++m1) {
                    const std::vector<int> joint{m0, m1};
                    const int n0 = step(p0, m0);
                    const int n1 = step(p1, m1);
                    builder.set_transition(state, joint, TransitionRow{{n0 * cells + n1, 1.0}});
                    if (n0 == n1) {
                        builder.set_reward(0, state, joint, 1.0);
                        builder.set_reward(1, state, joint, -1.0);
                    }
                }
            }
        }
    }
    return builder.build();
}

/// Dispatch by name: matching_pennies, coordination, or
/// gridworld_chase(width, height). Unknown names throw GameError.
inline GameSpec builtin_game(const std::string& name, std::span<const int> params = {}) {
    auto no_params = [&] {
        if (!params.empty()) throw GameError("builtin '" + name + "' takes no parameters");
    };
    if (name == "matching_pennies") {
        no_params();
        return matching_pennies();
    }
    if (name == "coordination") {
        no_params();
        return coordination();
    }
    if (name == "gridworld_chase") {
        if (params.size() != 2)
            throw GameError("gridworld_chase needs width and height parameters");
        return gridworld_chase(params[0], params[1]);
    }
    throw GameError("unknown builtin game '" + name + "'");
}

}  // namespace levelk
