#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "optrx/experiment.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string seed, trials, delta, slices, lmax, alpha, out, format, workers;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config_path, "experiment config file (key = value lines)");
    cmd->add_option("--seed", ov.seed, "master seed (u64); required here or in the config");
    cmd->add_option("--trials", ov.trials, "Monte Carlo trials per sweep point");
    cmd->add_option("--delta", ov.delta, "slice width");
    cmd->add_option("--slices", ov.slices, "slice count (alternative to --delta)");
    cmd->add_option("--lmax", ov.lmax, "control amplitude clamp");
    cmd->add_option("--alpha", ov.alpha, "Renyi order: a number or a schedule file");
    cmd->add_option("--out", ov.out, "output path (default stdout)");
    cmd->add_option("--format", ov.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--workers", ov.workers, "worker threads (never changes results)");
}

// CLI flags are merged by re-parsing them as config lines on top of the file.
optrx::ExperimentConfig build_config(const std::string& kind, const Overrides& ov) {
    std::string text;
    if (!ov.config_path.empty()) {
        std::ifstream in(ov.config_path);
        if (!in) throw optrx::ConfigError("cannot open config file '" + ov.config_path + "'");
        std::string line;
        while (std::getline(in, line)) {
            // drop keys the CLI overrides
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(0, eq);
                key.erase(key.find_last_not_of(" \t") + 1);
                key.erase(0, key.find_first_not_of(" \t"));
                if (key == "experiment") {
                    std::string val = line.substr(eq + 1);
                    const auto hash = val.find('#');
                    if (hash != std::string::npos) val = val.substr(0, hash);
                    val.erase(val.find_last_not_of(" \t\r") + 1);
                    val.erase(0, val.find_first_not_of(" \t"));
                    if (val != kind)
                        throw optrx::ConfigError("config file is for experiment '" + val +
                                                 "' but the subcommand is '" + kind + "'");
                    continue;
                }
                if ((key == "seed" && !ov.seed.empty()) ||
                    (key == "trials" && !ov.trials.empty()) ||
                    (key == "delta" && (!ov.delta.empty() || !ov.slices.empty())) ||
                    (key == "slices" && (!ov.delta.empty() || !ov.slices.empty())) ||
                    (key == "lmax" && !ov.lmax.empty()) ||
                    ((key == "alpha" || key == "alpha_file") && !ov.alpha.empty()) ||
                    (key == "out" && !ov.out.empty()) || (key == "format" && !ov.format.empty()) ||
                    (key == "workers" && !ov.workers.empty())) {
                    continue;
                }
            }
            text += line + "\n";
        }
    }
    text += "experiment = " + kind + "\n";
    if (!ov.seed.empty()) text += "seed = " + ov.seed + "\n";
    if (!ov.trials.empty()) text += "trials = " + ov.trials + "\n";
    if (!ov.delta.empty()) text += "delta = " + ov.delta + "\n";
    if (!ov.slices.empty()) text += "slices = " + ov.slices + "\n";
    if (!ov.lmax.empty()) text += "lmax = " + ov.lmax + "\n";
    if (!ov.alpha.empty()) {
        char* end = nullptr;
        std::strtod(ov.alpha.c_str(), &end);
        const bool numeric = end && *end == '\0';
        text += (numeric ? "alpha = " : "alpha_file = ") + ov.alpha + "\n";
    }
    if (!ov.out.empty()) text += "out = " + ov.out + "\n";
    if (!ov.format.empty()) text += "format = " + ov.format + "\n";
    if (!ov.workers.empty()) text += "workers = " + ov.workers + "\n";
    return optrx::parse_config_text(text);
}

int run(const std::string& kind, const Overrides& ov) {
    const optrx::ExperimentConfig cfg = build_config(kind, ov);
    const optrx::Report report = optrx::run_experiment(cfg);
    const std::string& body = report.body(cfg.format);
    if (cfg.out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(cfg.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write output file '" + cfg.out_path + "'");
        out << body;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-noise-limited optical receiver simulations"};
    app.require_subcommand(1);

    Overrides ov[4];
    const char* names[4] = {"binary-sim", "mary-sim", "capacity", "coded-sim"};
    const char* descs[4] = {"binary Dolinar receiver Monte Carlo",
                            "M-ary Renyi-incremental receiver Monte Carlo",
                            "capacity and photon-efficiency tables",
                            "coded-transmission reception Monte Carlo"};
    CLI::App* subs[4];
    for (int i = 0; i < 4; ++i) {
        subs[i] = app.add_subcommand(names[i], descs[i]);
        add_common_flags(subs[i], ov[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        for (int i = 0; i < 4; ++i)
            if (subs[i]->parsed()) return run(names[i], ov[i]);
        return 2;
    } catch (const optrx::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
