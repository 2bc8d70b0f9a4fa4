#pragma once

// Command-line front end. Subcommands:
//   run       execute an experiment, writing steps.csv, beliefs.csv and
//             summary.json into the output directory
//   validate  print the validation report of a game file or builtin
// Exit codes: 0 ok, 1 validation failure, 2 I/O failure, 3 bad configuration.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levelk/builtins.hpp"
#include "levelk/game.hpp"
#include "levelk/hierarchy.hpp"
#include "levelk/simulator.hpp"

namespace levelk {

struct ExperimentConfig {
    std::string game;  // path, or builtin:<name>[:WxH]
    std::vector<std::string> agent_specs;
    int rounds = 10;
    int horizon = 5;
    std::uint64_t seed = 0;
    std::optional<double> discount_override;
    double solver_tol = 1e-8;
    double epsilon = 1e-3;
    std::string out_dir = ".";
    std::string hierarchy_dump;  // optional path
};

namespace cli_detail {

struct CliFailure {
    int code;
    std::string message;
};

inline GameSpec load_game_unchecked(const std::string& source) {
    if (source.rfind("builtin:", 0) == 0) {
        std::string rest = source.substr(8);
        std::vector<int> params;
        if (auto colon = rest.find(':'); colon != std::string::npos) {
            const std::string dims = rest.substr(colon + 1);
            rest = rest.substr(0, colon);
            const auto x = dims.find('x');
            if (x == std::string::npos)
                throw CliFailure{3, "builtin parameters must look like WxH, got '" + dims + "'"};
            try {
                params.push_back(std::stoi(dims.substr(0, x)));
                params.push_back(std::stoi(dims.substr(x + 1)));
            } catch (const std::exception&) {
                throw CliFailure{3, "builtin parameters must be integers, got '" + dims + "'"};
            }
        }
        try {
            return builtin_game(rest, params);
        } catch (const GameError& e) {
            throw CliFailure{3, e.what()};
        }
    }
    std::ifstream in(source, std::ios::binary);
    if (!in) throw CliFailure{2, "cannot open game file '" + source + "'"};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_game_spec_unchecked(buffer.str());
    } catch (const GameError& e) {
        throw CliFailure{1, std::string(e.what())};
    }
}

inline GameSpec load_game(const std::string& source) {
    GameSpec g = load_game_unchecked(source);
    const ValidationReport report = validate_game_spec(g);
    if (!report.ok()) throw CliFailure{1, report.errors.front()};
    return g;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

inline AgentConfig parse_agent_spec(const GameSpec& g, const std::string& spec,
                                    const ExperimentConfig& config) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw CliFailure{3, "agent spec '" + spec + "' must look like INDEX=KIND:..."};
    AgentConfig agent;
    try {
        agent.agent = std::stoi(spec.substr(0, eq));
    } catch (const std::exception&) {
        throw CliFailure{3, "agent spec '" + spec + "' has a non-numeric index"};
    }

    const std::vector<std::string> parts = split(spec.substr(eq + 1), ',');
    const std::vector<std::string> kind = split(parts.front(), ':');
    auto bad = [&](const std::string& why) { return CliFailure{3, "agent spec '" + spec + "': " + why}; };

    if (kind.front() == "tom") {
        if (kind.size() != 2 || (kind[1] != "singleton" && kind[1] != "mixed"))
            throw bad("tom needs a mode, tom:singleton or tom:mixed");
        TomAgentConfig tom;
        tom.mode = kind[1] == "singleton" ? HierarchyMode::Singleton : HierarchyMode::Mixed;
        tom.epsilon = config.epsilon;
        for (std::size_t i = 1; i < parts.size(); ++i) {
            const auto kv = split(parts[i], '=');
            if (kv.size() != 2) throw bad("option '" + parts[i] + "' must look like key=value");
            try {
                if (kv[0] == "K") {
                    tom.depth = std::stoi(kv[1]);
                } else if (kv[0] == "prior") {
                    const auto ab = split(kv[1], ':');
                    if (ab.size() != 2) throw bad("prior must look like prior=a:b");
                    tom.prior = GammaParams{std::stod(ab[0]), std::stod(ab[1])};
                } else if (kv[0] == "eps") {
                    tom.epsilon = std::stod(kv[1]);
                } else {
                    throw bad("unknown option '" + kv[0] + "'");
                }
            } catch (const CliFailure&) {
                throw;
            } catch (const std::exception&) {
                throw bad("cannot parse value in '" + parts[i] + "'");
            }
        }
        if (tom.depth < 0) throw bad("K must be nonnegative");
        if (!(tom.prior.a > 0.0) || !(tom.prior.b > 0.0)) throw bad("prior parameters must be positive");
        if (!(tom.epsilon > 0.0 && tom.epsilon < 1.0)) throw bad("eps must lie in (0,1)");
        agent.behavior = tom;
        return agent;
    }
    if (kind.front() == "level") {
        if (kind.size() != 2) throw bad("level needs an index, level:0");
        FixedLevelAgentConfig fixed;
        try {
            fixed.level = std::stoi(kind[1]);
        } catch (const std::exception&) {
            throw bad("level index must be an integer");
        }
        if (fixed.level < 0) throw bad("level must be nonnegative");
        agent.behavior = fixed;
        return agent;
    }
    if (kind.front() == "scripted") {
        if (kind.size() != 2) throw bad("scripted needs a policy file, scripted:policy.json");
        std::ifstream in(kind[1], std::ios::binary);
        if (!in) throw CliFailure{2, "cannot open policy file '" + kind[1] + "'"};
        nlohmann::json doc;
        try {
            std::ostringstream buffer;
            buffer << in.rdbuf();
            doc = nlohmann::json::parse(buffer.str());
        } catch (const nlohmann::json::parse_error& e) {
            throw CliFailure{1, std::string("policy file: ") + e.what()};
        }
        ScriptedAgentConfig scripted;
        try {
            scripted.policy.agent = doc.at("agent").get<int>();
            scripted.policy.probs = doc.at("probs").get<std::vector<std::vector<double>>>();
        } catch (const nlohmann::json::exception& e) {
            throw CliFailure{1, std::string("policy file: ") + e.what()};
        }
        try {
            validate_policy_table(g, scripted.policy);
        } catch (const GameError& e) {
            throw CliFailure{1, std::string("policy file: ") + e.what()};
        }
        agent.behavior = scripted;
        return agent;
    }
    throw bad("unknown kind '" + kind.front() + "' (expected tom, level or scripted)");
}

inline nlohmann::ordered_json agent_json(const AgentConfig& config) {
    nlohmann::ordered_json doc;
    doc["agent"] = config.agent;
    if (const auto* tom = std::get_if<TomAgentConfig>(&config.behavior)) {
        doc["kind"] = "tom";
        doc["mode"] = to_string(tom->mode);
        doc["K"] = tom->depth;
        doc["prior"] = {{"a", tom->prior.a}, {"b", tom->prior.b}};
        doc["epsilon"] = tom->epsilon;
    } else if (const auto* fixed = std::get_if<FixedLevelAgentConfig>(&config.behavior)) {
        doc["kind"] = "level";
        doc["level"] = fixed->level;
    } else {
        doc["kind"] = "scripted";
    }
    return doc;
}

}  // namespace cli_detail

/// Runs one experiment per the config and writes the three output files.
/// Returns the process exit code; failures print one diagnostic line to err.
inline int cmd_run(const ExperimentConfig& config, std::ostream& err) {
    using cli_detail::CliFailure;
    try {
        GameSpec g = cli_detail::load_game(config.game);
        if (config.discount_override) {
            if (!(*config.discount_override >= 0.0 && *config.discount_override < 1.0))
                throw CliFailure{3, "discount must lie in [0,1)"};
            g.discount = *config.discount_override;
        }
        if (config.agent_specs.size() != static_cast<std::size_t>(g.num_agents))
            throw CliFailure{3, "game has " + std::to_string(g.num_agents) + " agents but " +
                                    std::to_string(config.agent_specs.size()) + " --agent specs given"};
        std::vector<AgentConfig> agents;
        for (const std::string& spec : config.agent_specs)
            agents.push_back(cli_detail::parse_agent_spec(g, spec, config));

        ExperimentOptions options;
        options.solver_tol = config.solver_tol;
        ExperimentResult result;
        try {
            result = run_experiment(g, agents, config.rounds, config.horizon, config.seed, options);
        } catch (const std::exception& e) {
            throw CliFailure{3, std::string(e.what())};
        }

        std::error_code ec;
        std::filesystem::create_directories(config.out_dir, ec);
        if (ec) throw CliFailure{2, "cannot create output directory '" + config.out_dir + "'"};
        auto open_out = [&](const char* name) {
            const auto path = std::filesystem::path(config.out_dir) / name;
            std::ofstream out(path, std::ios::binary);
            if (!out) throw CliFailure{2, "cannot write '" + path.string() + "'"};
            return out;
        };
        {
            std::ofstream out = open_out("steps.csv");
            write_steps_csv(out, g, result.trace);
        }
        {
            std::ofstream out = open_out("beliefs.csv");
            write_beliefs_csv(out, g, result.trace);
        }
        {
            nlohmann::ordered_json summary;
            summary["game"] = config.game;
            summary["rounds"] = config.rounds;
            summary["horizon"] = config.horizon;
            summary["seed"] = config.seed;
            summary["discount"] = g.discount;
            summary["solver_tol"] = config.solver_tol;
            summary["epsilon"] = config.epsilon;
            auto agents_json = nlohmann::ordered_json::array();
            for (const AgentConfig& agent : agents) agents_json.push_back(cli_detail::agent_json(agent));
            summary["agents"] = std::move(agents_json);
            auto per_agent = nlohmann::ordered_json::array();
            for (const AgentSummary& s : result.agent_summaries) {
                nlohmann::ordered_json one;
                one["agent"] = s.agent;
                one["mean_discounted_return"] = s.mean_discounted_return;
                one["total_solves"] = s.total_solves;
                per_agent.push_back(std::move(one));
            }
            summary["per_agent"] = std::move(per_agent);
            std::ofstream out = open_out("summary.json");
            out << summary.dump(2) << "\n";
        }
        if (!config.hierarchy_dump.empty()) {
            // one dump per ToM agent, rebuilt at its initial estimate
            nlohmann::ordered_json dumps = nlohmann::ordered_json::array();
            for (const AgentConfig& agent : agents) {
                const auto* tom = std::get_if<TomAgentConfig>(&agent.behavior);
                if (!tom) continue;
                HierarchyOptions hier_options;
                hier_options.solver_tol = config.solver_tol;
                const Hierarchy h =
                    tom->mode == HierarchyMode::Singleton
                        ? build_singleton(g, agent.agent, tom->depth, hier_options)
                        : build_mixed(g, agent.agent, tom->depth, posterior_mean(tom->prior), hier_options);
                dumps.push_back(dump_hierarchy(h, g));
            }
            std::ofstream out(config.hierarchy_dump, std::ios::binary);
            if (!out) throw CliFailure{2, "cannot write '" + config.hierarchy_dump + "'"};
            out << dumps.dump(2) << "\n";
        }
        return 0;
    } catch (const CliFailure& f) {
        err << "error: " << f.message << "\n";
        return f.code;
    }
}

/// Prints the validation report for a game file or builtin.
inline int cmd_validate(const std::string& source, std::ostream& out, std::ostream& err) {
    using cli_detail::CliFailure;
    try {
        const GameSpec g = cli_detail::load_game_unchecked(source);
        const ValidationReport report = validate_game_spec(g);
        for (const std::string& line : report.errors) out << line << "\n";
        out << report.summary_line() << "\n";
        return report.ok() ? 0 : 1;
    } catch (const CliFailure& f) {
        if (f.code == 2) {
            err << "error: " << f.message << "\n";
            return 2;
        }
        out << f.message << "\n";
        return 1;
    }
}

/// Full argument-vector entry point; `args` excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cognitive-hierarchy agents in stochastic games"};
    app.require_subcommand(1);

    ExperimentConfig config;
    CLI::App* run = app.add_subcommand("run", "Run an experiment and write trace files");
    run->add_option("--game", config.game, "Game file path or builtin:<name>[:WxH]");
    run->add_option("--agent", config.agent_specs,
                    "Agent spec INDEX=KIND:..., e.g. 0=tom:singleton,K=2 or 1=level:0");
    run->add_option("--rounds", config.rounds, "Number of rounds")->check(CLI::PositiveNumber);
    run->add_option("--horizon", config.horizon, "Steps per round")->check(CLI::PositiveNumber);
    run->add_option("--seed", config.seed, "RNG seed");
    double discount = 0.0;
    CLI::Option* discount_opt = run->add_option("--discount", discount, "Override the game's discount");
    run->add_option("--tol", config.solver_tol, "Value-iteration tolerance")->check(CLI::PositiveNumber);
    run->add_option("--epsilon", config.epsilon, "Inference smoothing floor for ToM agents");
    run->add_option("--out", config.out_dir, "Output directory (steps.csv, beliefs.csv, summary.json)");
    run->add_option("--dump-hierarchy", config.hierarchy_dump, "Write ToM agents' initial ladders as JSON");
    std::string config_path;
    CLI::Option* config_opt = run->add_option("--config", config_path, "Load the run configuration from JSON");

    std::string validate_source;
    CLI::App* validate = app.add_subcommand("validate", "Validate a game file or builtin");
    validate->add_option("source", validate_source, "Game file path or builtin:<name>[:WxH]")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }

    try {
        if (validate->parsed()) return cmd_validate(validate_source, out, err);

        if (*config_opt) {
            std::ifstream in(config_path, std::ios::binary);
            if (!in) {
                err << "error: cannot open config file '" << config_path << "'\n";
                return 2;
            }
            nlohmann::json doc;
            try {
                std::ostringstream buffer;
                buffer << in.rdbuf();
                doc = nlohmann::json::parse(buffer.str());
            } catch (const nlohmann::json::parse_error& e) {
                err << "error: config file: " << e.what() << "\n";
                return 3;
            }
            try {
                // explicit flags win over config-file values
                if (doc.contains("game") && run->count("--game") == 0)
                    config.game = doc["game"].get<std::string>();
                if (doc.contains("agents") && run->count("--agent") == 0)
                    config.agent_specs = doc["agents"].get<std::vector<std::string>>();
                if (doc.contains("rounds") && run->count("--rounds") == 0)
                    config.rounds = doc["rounds"].get<int>();
                if (doc.contains("horizon") && run->count("--horizon") == 0)
                    config.horizon = doc["horizon"].get<int>();
                if (doc.contains("seed") && run->count("--seed") == 0)
                    config.seed = doc["seed"].get<std::uint64_t>();
                if (doc.contains("discount") && !*discount_opt)
                    config.discount_override = doc["discount"].get<double>();
                if (doc.contains("solver_tol") && run->count("--tol") == 0)
                    config.solver_tol = doc["solver_tol"].get<double>();
                if (doc.contains("epsilon") && run->count("--epsilon") == 0)
                    config.epsilon = doc["epsilon"].get<double>();
                if (doc.contains("out") && run->count("--out") == 0)
                    config.out_dir = doc["out"].get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                err << "error: config file: " << e.what() << "\n";
                return 3;
            }
        }
        if (*discount_opt) config.discount_override = discount;
        if (config.game.empty()) {
            err << "error: no game given\n";
            return 3;
        }
        return cmd_run(config, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace levelk
