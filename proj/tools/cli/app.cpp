#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hitrun/errors.hpp"

namespace hitrun::cli {

namespace {

using Command = int (*)(const ExperimentConfig&, const std::filesystem::path&);

const std::map<std::string, std::pair<Command, const char*>>& commands() {
    static const std::map<std::string, std::pair<Command, const char*>> table = {
        {"sample", {cmd_sample, "run one chain and write its trace"}},
        {"verify", {cmd_verify, "run the lemma and kernel checks and write a pass/fail report"}},
        {"sl", {cmd_sl, "simulate stochastic localization paths"}},
        {"mix", {cmd_mix, "estimate the TV mixing curve from a warm start"}},
        {"conductance", {cmd_conductance, "estimate s-conductance for a halfspace partition"}},
        {"logconcave", {cmd_logconcave, "tabulate the one-dimensional logconcave checks"}},
    };
    return table;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Hit-and-run sampling, stochastic localization and lemma checks", "hitrun"};
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out_dir = ".";
    app.add_option("--config", config_path, "JSON experiment config (defaults apply when omitted)");
    app.add_option("--seed", seed, "master seed; overrides the config");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads; overrides the config")->check(CLI::Range(1u, 1024u));
    app.require_subcommand(1);
    app.fallthrough();
    for (const auto& [name, entry] : commands()) app.add_subcommand(name, entry.second);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    ExperimentConfig config;
    try {
        config = config_path.empty() ? parse_config(json::object()) : load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "hitrun: config error: " << e.what() << "\n";
        return 2;
    }
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const std::filesystem::path out(out_dir);
        std::filesystem::create_directories(out);
        return commands().at(name).first(config, out);
    } catch (const std::exception& e) {
        std::cerr << "hitrun " << name << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace hitrun::cli
