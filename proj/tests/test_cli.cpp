#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "levelk/builtins.hpp"
#include "levelk/cli.hpp"
#include "levelk/hierarchy.hpp"

using namespace levelk;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    const fs::path dir = fs::temp_directory_path() / ("levelk_" + tag + "_" + std::to_string(rng()));
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST_CASE("every builtin validates cleanly") {
    for (const std::string name : {"builtin:matching_pennies", "builtin:coordination",
                                   "builtin:gridworld_chase:3x3"}) {
        std::string out;
        CHECK(cli({"validate", name}, &out) == 0);
        CHECK_THAT(out, Catch::Matchers::ContainsSubstring("0 errors"));
    }
}

TEST_CASE("matching pennies is zero-sum") {
    const GameSpec g = matching_pennies();
    for (int j = 0; j < g.num_joint_actions(); ++j)
        CHECK(g.reward(0, 0, j) + g.reward(1, 0, j) == 0.0);
}

TEST_CASE("the coordination diagnostic separates level 1 from level 0") {
    const GameSpec g = coordination();
    const Hierarchy h = build_singleton(g, 0, 1);
    CHECK(h.levels[1][0].probs[0] == std::vector<double>{1.0, 0.0});
}

TEST_CASE("gridworld chase dimensions") {
    const GameSpec g = gridworld_chase(3, 3);
    CHECK(g.num_states() == 81);
    CHECK(g.num_actions(0) == 5);
    CHECK(g.num_actions(1) == 5);
    CHECK(g.initial_state == 8);  // chaser in the first cell, evader in the last
    CHECK(validate_game_spec(g).ok());
    CHECK_THROWS_AS(gridworld_chase(0, 3), GameError);
    CHECK_THROWS_AS(builtin_game("gridworld_chase"), GameError);
    CHECK_THROWS_AS(builtin_game("nope"), GameError);
}

TEST_CASE("a one-cell gridworld pins both agents together") {
    const GameSpec g = gridworld_chase(1, 1);
    CHECK(g.num_states() == 1);
    CHECK(validate_game_spec(g).ok());
    // every move clamps to staying put, so every step pays the chaser
    for (int j = 0; j < g.num_joint_actions(); ++j) {
        CHECK(g.reward(0, 0, j) == 1.0);
        CHECK(g.reward(1, 0, j) == -1.0);
    }
    const Hierarchy h = build_singleton(g, 0, 2);
    CHECK_NOTHROW(own_best_response(h, 1.0));
}

TEST_CASE("run writes the three output files and is byte-stable") {
    const fs::path dir = fresh_dir("run");
    const std::vector<std::string> args{
        "run", "--game", "builtin:matching_pennies", "--agent", "0=tom:singleton,K=2",
        "--agent", "1=level:0", "--rounds", "10", "--horizon", "5",
        "--seed", "7", "--out", dir.string()};
    REQUIRE(cli(args) == 0);
    REQUIRE(fs::exists(dir / "steps.csv"));
    REQUIRE(fs::exists(dir / "beliefs.csv"));
    REQUIRE(fs::exists(dir / "summary.json"));
    const std::string steps = read_file(dir / "steps.csv");
    const std::string beliefs = read_file(dir / "beliefs.csv");

    const fs::path again = fresh_dir("run_again");
    std::vector<std::string> rerun = args;
    rerun.back() = again.string();
    REQUIRE(cli(rerun) == 0);
    CHECK(read_file(again / "steps.csv") == steps);
    CHECK(read_file(again / "beliefs.csv") == beliefs);

    // 10 rounds x 5 steps plus the header
    CHECK(std::count(steps.begin(), steps.end(), '\n') == 51);
}

TEST_CASE("summary.json echoes every default") {
    const fs::path dir = fresh_dir("summary");
    REQUIRE(cli({"run", "--game", "builtin:coordination", "--agent", "0=tom:mixed,K=2,prior=2:1",
                 "--agent", "1=level:1", "--out", dir.string()}) == 0);
    const nlohmann::json summary = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(summary["rounds"] == 10);
    CHECK(summary["horizon"] == 5);
    CHECK(summary["seed"] == 0);
    CHECK(summary["discount"] == 0.9);
    CHECK(summary["solver_tol"] == 1e-8);
    CHECK(summary["epsilon"] == 1e-3);
    CHECK(summary["agents"][0]["mode"] == "mixed");
    CHECK(summary["agents"][0]["K"] == 2);
    CHECK(summary["per_agent"][0]["total_solves"] == 44);  // 4 + 10 * 4
}

TEST_CASE("missing game file exits with the I/O code and names the path") {
    std::string err;
    CHECK(cli({"run", "--game", "/no/such/game.json", "--agent", "0=level:0", "--agent",
               "1=level:0"},
              nullptr, &err) == 2);
    CHECK_THAT(err, Catch::Matchers::ContainsSubstring("/no/such/game.json"));
}

TEST_CASE("validate reports a bad distribution and exits 1") {
    const fs::path dir = fresh_dir("badmass");
    const fs::path game = dir / "bad.json";
    {
        std::ofstream out(game);
        out << R"({
  "agents": 2,
  "states": ["s0", "s1"],
  "actions": [["a", "b"], ["x"]],
  "discount": 0.9,
  "transitions": [
    {"state": "s0", "joint_action": ["a", "x"], "dist": [["s0", 0.6], ["s1", 0.5]]}
  ],
  "rewards": []
})";
    }
    std::string out;
    CHECK(cli({"validate", game.string()}, &out) == 1);
    CHECK_THAT(out, Catch::Matchers::ContainsSubstring("distribution mass 1.1"));

    std::string err;
    CHECK(cli({"run", "--game", game.string(), "--agent", "0=level:0", "--agent", "1=level:0"},
              nullptr, &err) == 1);
}

TEST_CASE("configuration errors exit with code 3") {
    std::string err;
    SECTION("unknown builtin") {
        CHECK(cli({"validate", "builtin:nope"}, nullptr, &err) == 1);
        CHECK(cli({"run", "--game", "builtin:nope", "--agent", "0=level:0", "--agent", "1=level:0"},
                  nullptr, &err) == 3);
    }
    SECTION("malformed agent spec") {
        CHECK(cli({"run", "--game", "builtin:coordination", "--agent", "0=wizard:3", "--agent",
                   "1=level:0"},
                  nullptr, &err) == 3);
    }
    SECTION("agent count mismatch") {
        CHECK(cli({"run", "--game", "builtin:coordination", "--agent", "0=level:0"}, nullptr,
                  &err) == 3);
    }
    SECTION("fixed level above the ToM depth cap") {
        CHECK(cli({"run", "--game", "builtin:coordination", "--agent", "0=tom:singleton,K=1",
                   "--agent", "1=level:3"},
                  nullptr, &err) == 3);
    }
    SECTION("unknown flag") {
        CHECK(cli({"run", "--game", "builtin:coordination", "--frobnicate"}, nullptr, &err) == 3);
    }
}

TEST_CASE("scripted agents load their table from a policy file") {
    const fs::path dir = fresh_dir("scripted");
    const fs::path policy = dir / "policy.json";
    {
        std::ofstream out(policy);
        out << R"({"agent": 1, "probs": [[0.25, 0.75]]})";
    }
    REQUIRE(cli({"run", "--game", "builtin:matching_pennies", "--agent", "0=tom:singleton,K=1",
                 "--agent", std::string("1=scripted:") + policy.string(), "--rounds", "3",
                 "--out", dir.string()}) == 0);
    const std::string steps = read_file(dir / "steps.csv");
    CHECK_THAT(steps, Catch::Matchers::ContainsSubstring("round,t,state,action_0,action_1,reward_0,reward_1"));
}

TEST_CASE("the config file mirrors the flag schema") {
    const fs::path dir = fresh_dir("config");
    const fs::path config = dir / "experiment.json";
    {
        std::ofstream out(config);
        nlohmann::json doc;
        doc["game"] = "builtin:coordination";
        doc["agents"] = {"0=tom:singleton,K=2", "1=level:1"};
        doc["rounds"] = 4;
        doc["horizon"] = 3;
        doc["seed"] = 99;
        doc["out"] = dir.string();
        out << doc.dump();
    }
    REQUIRE(cli({"run", "--config", config.string()}) == 0);
    const nlohmann::json summary = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(summary["rounds"] == 4);
    CHECK(summary["seed"] == 99);

    // explicit flags win over the file
    const fs::path dir2 = fresh_dir("config_override");
    REQUIRE(cli({"run", "--config", config.string(), "--rounds", "2", "--out", dir2.string()}) == 0);
    const nlohmann::json summary2 = nlohmann::json::parse(read_file(dir2 / "summary.json"));
    CHECK(summary2["rounds"] == 2);
}

TEST_CASE("the shipped game files parse and match their builtins") {
    const fs::path games = LEVELK_GAMES_DIR;
    CHECK(parse_game_spec(read_file(games / "matching_pennies.json")) == matching_pennies());
    CHECK(parse_game_spec(read_file(games / "coordination.json")) == coordination());
    const GameSpec patrol = parse_game_spec(read_file(games / "patrol.json"));
    CHECK(patrol.num_states() == 2);
    CHECK(patrol.defaulted_transition_rows == 3);
    CHECK(validate_game_spec(patrol).ok());
}

TEST_CASE("hierarchy dumps are written on request") {
    const fs::path dir = fresh_dir("dump");
    const fs::path dump = dir / "ladders.json";
    REQUIRE(cli({"run", "--game", "builtin:coordination", "--agent", "0=tom:mixed,K=2", "--agent",
                 "1=level:0", "--rounds", "2", "--out", dir.string(), "--dump-hierarchy",
                 dump.string()}) == 0);
    const nlohmann::json doc = nlohmann::json::parse(read_file(dump));
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 1);
    CHECK(doc[0]["mode"] == "mixed");
    CHECK(doc[0]["levels"].size() == 3);
}
