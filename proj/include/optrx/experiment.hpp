#ifndef OPTRX_EXPERIMENT_HPP
#define OPTRX_EXPERIMENT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "optrx/core.hpp"

namespace optrx {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Invalid configuration (CLI exit code 2, as opposed to runtime failures, 3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { BinarySim, MarySim, Capacity, CodedSim };
enum class OutputFormat { Json, Csv };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Capacity;
    bool seed_set = false;  // wall-clock seeding is never allowed; seed is mandatory
    std::uint64_t seed = 0;
    std::size_t trials = 10000;
    unsigned workers = 0;  // 0 = hardware concurrency; never affects results
    OutputFormat format = OutputFormat::Json;
    std::string out_path;  // empty = stdout

    // slice grid: exactly one of n_slices / delta
    std::size_t n_slices = 0;
    double delta = 0.0;
    double l_max = 0.0;  // 0 = default_l_max(ensemble)

    // binary-sim / mary-sim
    std::vector<Amplitude> amplitudes;
    std::vector<double> priors;
    std::vector<double> T_list;

    // mary-sim
    AlphaSchedule alpha;
    SearchConfig search;

    // capacity
    std::vector<double> E_list;
    double target_pie_bits = 0.0;  // 0 = skip the solver section

    // coded-sim
    std::size_t message_count = 0;
    std::size_t block_length = 0;
    std::vector<Amplitude> alphabet;
    std::vector<double> design_dist;
    std::size_t codewords = 0;
    bool per_symbol_mi = false;   // false = Zero policy
    double energy_budget = 0.0;   // optional: validate composition mean photons
};

// Flat key = value configuration text; '#' starts a comment, unknown keys are
// rejected. The schema is documented in the README.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical serialization used for the embedded config hash (FNV-1a 64).
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash_hex(const ExperimentConfig& cfg);

struct Report {
    std::string json;  // complete report object, deterministic formatting
    std::string csv;   // one row per sweep point
    const std::string& body(OutputFormat fmt) const {
        return fmt == OutputFormat::Json ? json : csv;
    }
};

// Deterministic given (config, seed): per-trial streams are derived from the
// trial index and reductions run in index order, so the worker count never
// changes a byte of the report.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace optrx

#endif
