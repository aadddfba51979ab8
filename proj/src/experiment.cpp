#include "optrx/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "optrx/capacity.hpp"
#include "optrx/coded.hpp"
#include "optrx/dolinar.hpp"
#include "optrx/mc.hpp"
#include "optrx/photodetect.hpp"
#include "optrx/renyi.hpp"
#include "optrx/rng.hpp"

namespace optrx {

namespace {

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + s + "'");
    }
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
    try {
        if (s.empty() || s[0] == '-') throw std::invalid_argument("");
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config: '" + key + "' expects a nonnegative integer, got '" + s + "'");
    }
}

// splits a list on commas that are not inside parentheses
std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

Amplitude parse_amplitude(const std::string& tok, const std::string& key) {
    if (!tok.empty() && tok.front() == '(') {
        if (tok.back() != ')') throw ConfigError("config: '" + key + "' has malformed complex entry '" + tok + "'");
        const std::string inner = tok.substr(1, tok.size() - 2);
        const auto comma = inner.find(',');
        if (comma == std::string::npos)
            throw ConfigError("config: '" + key + "' complex entry needs (re, im)");
        return Amplitude{parse_double(trim(inner.substr(0, comma)), key),
                         parse_double(trim(inner.substr(comma + 1)), key)};
    }
    return Amplitude{parse_double(tok, key), 0.0};
}

std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split_list(s)) out.push_back(parse_double(tok, key));
    if (out.empty()) throw ConfigError("config: '" + key + "' expects a nonempty list");
    return out;
}

std::vector<Amplitude> parse_amplitude_list(const std::string& s, const std::string& key) {
    std::vector<Amplitude> out;
    for (const auto& tok : split_list(s)) out.push_back(parse_amplitude(tok, key));
    if (out.empty()) throw ConfigError("config: '" + key + "' expects a nonempty list");
    return out;
}

AlphaSchedule parse_alpha_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open alpha schedule file '" + path + "'");
    std::vector<std::pair<std::size_t, double>> entries;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::size_t slice;
        double a;
        if (!(ls >> slice >> a)) throw ConfigError("config: malformed alpha schedule line '" + line + "'");
        entries.emplace_back(slice, a);
    }
    try {
        return AlphaSchedule(std::move(entries));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: bad alpha schedule: ") + e.what());
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError("config: empty key or value in '" + line + "'");
        if (!kv.emplace(key, value).second) throw ConfigError("config: duplicate key '" + key + "'");
    }

    ExperimentConfig cfg;
    auto take = [&kv](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) return "";
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (const auto v = take("experiment"); !v.empty()) {
        if (v == "binary-sim")
            cfg.kind = ExperimentKind::BinarySim;
        else if (v == "mary-sim")
            cfg.kind = ExperimentKind::MarySim;
        else if (v == "capacity")
            cfg.kind = ExperimentKind::Capacity;
        else if (v == "coded-sim")
            cfg.kind = ExperimentKind::CodedSim;
        else
            throw ConfigError("config: unknown experiment kind '" + v + "'");
    }
    if (const auto v = take("seed"); !v.empty()) {
        cfg.seed = parse_u64(v, "seed");
        cfg.seed_set = true;
    }
    if (const auto v = take("trials"); !v.empty()) cfg.trials = parse_u64(v, "trials");
    if (const auto v = take("workers"); !v.empty()) cfg.workers = static_cast<unsigned>(parse_u64(v, "workers"));
    if (const auto v = take("format"); !v.empty()) {
        if (v == "json")
            cfg.format = OutputFormat::Json;
        else if (v == "csv")
            cfg.format = OutputFormat::Csv;
        else
            throw ConfigError("config: format must be json or csv");
    }
    if (const auto v = take("out"); !v.empty()) cfg.out_path = v;
    if (const auto v = take("slices"); !v.empty()) cfg.n_slices = parse_u64(v, "slices");
    if (const auto v = take("delta"); !v.empty()) cfg.delta = parse_double(v, "delta");
    if (const auto v = take("lmax"); !v.empty()) cfg.l_max = parse_double(v, "lmax");
    if (const auto v = take("amplitudes"); !v.empty()) cfg.amplitudes = parse_amplitude_list(v, "amplitudes");
    if (const auto v = take("priors"); !v.empty()) cfg.priors = parse_double_list(v, "priors");
    if (const auto v = take("T"); !v.empty()) cfg.T_list = {parse_double(v, "T")};
    if (const auto v = take("T_list"); !v.empty()) cfg.T_list = parse_double_list(v, "T_list");
    if (const auto v = take("alpha"); !v.empty()) cfg.alpha = AlphaSchedule(parse_double(v, "alpha"));
    if (const auto v = take("alpha_file"); !v.empty()) cfg.alpha = parse_alpha_file(v);
    if (const auto v = take("grid_points"); !v.empty()) cfg.search.grid_points = parse_u64(v, "grid_points");
    if (const auto v = take("half_width"); !v.empty())
        cfg.search.half_width_multiple = parse_double(v, "half_width");
    if (const auto v = take("refine_iters"); !v.empty())
        cfg.search.refine_iterations = parse_u64(v, "refine_iters");
    if (const auto v = take("tol"); !v.empty()) cfg.search.tolerance = parse_double(v, "tol");
    if (const auto v = take("E_list"); !v.empty()) cfg.E_list = parse_double_list(v, "E_list");
    if (const auto v = take("target_pie_bits"); !v.empty())
        cfg.target_pie_bits = parse_double(v, "target_pie_bits");
    if (const auto v = take("M"); !v.empty()) cfg.message_count = parse_u64(v, "M");
    if (const auto v = take("N"); !v.empty()) cfg.block_length = parse_u64(v, "N");
    if (const auto v = take("alphabet"); !v.empty()) cfg.alphabet = parse_amplitude_list(v, "alphabet");
    if (const auto v = take("design_dist"); !v.empty()) cfg.design_dist = parse_double_list(v, "design_dist");
    if (const auto v = take("codewords"); !v.empty()) cfg.codewords = parse_u64(v, "codewords");
    if (const auto v = take("policy"); !v.empty()) {
        if (v == "zero")
            cfg.per_symbol_mi = false;
        else if (v == "mi")
            cfg.per_symbol_mi = true;
        else
            throw ConfigError("config: policy must be zero or mi");
    }
    if (const auto v = take("energy_budget"); !v.empty())
        cfg.energy_budget = parse_double(v, "energy_budget");

    if (!kv.empty()) throw ConfigError("config: unknown key '" + kv.begin()->first + "'");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::BinarySim: return "binary-sim";
        case ExperimentKind::MarySim: return "mary-sim";
        case ExperimentKind::Capacity: return "capacity";
        case ExperimentKind::CodedSim: return "coded-sim";
    }
    return "?";
}

std::string amplitude_str(Amplitude a) {
    if (a.imag() == 0.0) return format_double(a.real());
    return "(" + format_double(a.real()) + "," + format_double(a.imag()) + ")";
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    return out;
}

}  // namespace

std::string canonical_config(const ExperimentConfig& cfg) {
    std::string s;
    auto put = [&s](const std::string& k, const std::string& v) {
        if (!v.empty()) s += k + "=" + v + "\n";
    };
    put("experiment", kind_name(cfg.kind));
    put("seed", std::to_string(cfg.seed));
    put("trials", std::to_string(cfg.trials));
    put("slices", cfg.n_slices ? std::to_string(cfg.n_slices) : "");
    put("delta", cfg.delta > 0 ? format_double(cfg.delta) : "");
    put("lmax", cfg.l_max > 0 ? format_double(cfg.l_max) : "");
    put("amplitudes", join(cfg.amplitudes, amplitude_str));
    put("priors", join(cfg.priors, format_double));
    put("T_list", join(cfg.T_list, format_double));
    if (cfg.kind == ExperimentKind::MarySim) {
        put("alpha", join(cfg.alpha.entries(), [](const auto& e) {
                 return std::to_string(e.first) + ":" + format_double(e.second);
             }));
        put("grid_points", std::to_string(cfg.search.grid_points));
        put("half_width", format_double(cfg.search.half_width_multiple));
        put("refine_iters", std::to_string(cfg.search.refine_iterations));
        put("tol", format_double(cfg.search.tolerance));
    }
    put("E_list", join(cfg.E_list, format_double));
    put("target_pie_bits", cfg.target_pie_bits > 0 ? format_double(cfg.target_pie_bits) : "");
    put("M", cfg.message_count ? std::to_string(cfg.message_count) : "");
    put("N", cfg.block_length ? std::to_string(cfg.block_length) : "");
    put("alphabet", join(cfg.alphabet, amplitude_str));
    put("design_dist", join(cfg.design_dist, format_double));
    put("codewords", cfg.codewords ? std::to_string(cfg.codewords) : "");
    if (cfg.kind == ExperimentKind::CodedSim) put("policy", cfg.per_symbol_mi ? "mi" : "zero");
    put("energy_budget", cfg.energy_budget > 0 ? format_double(cfg.energy_budget) : "");
    return s;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
    const std::string s = canonical_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

using ordered_json = nlohmann::ordered_json;

void require(bool cond, const std::string& msg) {
    if (!cond) throw ConfigError(msg);
}

void validate_common(const ExperimentConfig& cfg) {
    require(cfg.seed_set, "config: 'seed' is required (wall-clock seeding is not supported)");
    if (cfg.kind == ExperimentKind::BinarySim || cfg.kind == ExperimentKind::MarySim) {
        require(cfg.trials >= 1, "config: trials must be >= 1");
        require(!cfg.T_list.empty(), "config: T or T_list is required");
        for (double T : cfg.T_list) require(T > 0.0, "config: T values must be > 0");
        require((cfg.n_slices > 0) != (cfg.delta > 0.0),
                "config: exactly one of slices / delta is required");
    }
}

std::size_t slices_for(const ExperimentConfig& cfg, double T) {
    if (cfg.n_slices > 0) return cfg.n_slices;
    const auto n = static_cast<std::size_t>(std::llround(T / cfg.delta));
    require(n >= 1, "config: delta larger than T");
    return n;
}

std::size_t draw_hypothesis(const std::vector<double>& priors, Rng& rng) {
    const double u = rng.next_unit();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < priors.size(); ++i) {
        acc += priors[i];
        if (u < acc) return i;
    }
    return priors.size() - 1;
}

ordered_json estimate_json(const McEstimate& e) {
    return ordered_json{{"estimate", e.estimate},
                        {"std_error", e.std_error},
                        {"ci_low", e.ci_low},
                        {"ci_high", e.ci_high},
                        {"n", e.n}};
}

struct CsvBuilder {
    std::string text;
    void comment(const std::string& line) { text += "# " + line + "\n"; }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text += ",";
            text += cells[i];
        }
        text += "\n";
    }
};

Report finish(const ExperimentConfig& cfg, ordered_json results, CsvBuilder csv,
              ordered_json extra = ordered_json::object()) {
    ordered_json doc;
    doc["toolkit_version"] = kToolkitVersion;
    doc["config_hash"] = config_hash_hex(cfg);
    ordered_json cj;
    {
        std::istringstream in(canonical_config(cfg));
        std::string line;
        while (std::getline(in, line)) {
            const auto eq = line.find('=');
            cj[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }
    doc["config"] = std::move(cj);
    for (auto& [k, v] : extra.items()) doc[k] = v;
    doc["results"] = std::move(results);

    Report rep;
    rep.json = doc.dump(2) + "\n";
    rep.csv = csv.text;
    return rep;
}

CsvBuilder csv_header(const ExperimentConfig& cfg, const std::vector<std::string>& cols) {
    CsvBuilder csv;
    csv.comment(std::string("toolkit_version=") + kToolkitVersion);
    csv.comment("config_hash=" + config_hash_hex(cfg));
    csv.row(cols);
    return csv;
}

Report run_binary_sim(const ExperimentConfig& cfg) {
    require(cfg.amplitudes.size() == 2, "config: binary-sim needs exactly 2 amplitudes");
    require(cfg.priors.size() == 2, "config: binary-sim needs exactly 2 priors");

    ordered_json results = ordered_json::array();
    CsvBuilder csv = csv_header(cfg, {"T", "slices", "m", "p_err", "std_error", "ci_low", "ci_high",
                                      "n", "ykl_error"});
    for (std::size_t sweep = 0; sweep < cfg.T_list.size(); ++sweep) {
        const double T = cfg.T_list[sweep];
        const std::size_t n_slices = slices_for(cfg, T);
        const HypothesisEnsemble ens =
            make_constant_ensemble(cfg.amplitudes, cfg.priors, T, n_slices);
        DetectionParams params;
        params.l_max = cfg.l_max;
        params.rng_seed = cfg.seed;
        const DolinarReceiver receiver(ens, params);

        std::vector<unsigned char> err(cfg.trials);
        parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
            Rng rng(derive_seed(cfg.seed, sweep * cfg.trials + t));
            const std::size_t true_h = draw_hypothesis(ens.priors, rng);
            const TrialRecord rec = receiver.simulate_trial(true_h, rng);
            err[t] = rec.decision != true_h ? 1 : 0;
        });
        std::size_t failures = 0;
        for (unsigned char e : err) failures += e;
        const McEstimate est = mc_from_counts(failures, cfg.trials);
        const double m = receiver.trajectory().m.back();
        const double pi_hi = std::max(ens.priors[0], ens.priors[1]);
        const double reference = ykl_error(pi_hi, m);

        ordered_json row;
        row["T"] = T;
        row["slices"] = n_slices;
        row["m"] = m;
        row["p_err"] = estimate_json(est);
        row["ykl_error"] = reference;
        results.push_back(row);
        csv.row({format_double(T), std::to_string(n_slices), format_double(m),
                 format_double(est.estimate), format_double(est.std_error), format_double(est.ci_low),
                 format_double(est.ci_high), std::to_string(est.n), format_double(reference)});
    }
    return finish(cfg, std::move(results), std::move(csv));
}

Report run_mary_sim(const ExperimentConfig& cfg) {
    require(cfg.amplitudes.size() >= 2, "config: mary-sim needs at least 2 amplitudes");
    require(cfg.priors.size() == cfg.amplitudes.size(),
            "config: priors must match the amplitude count");

    ordered_json results = ordered_json::array();
    CsvBuilder csv =
        csv_header(cfg, {"T", "slices", "p_err", "std_error", "ci_low", "ci_high", "n"});
    for (std::size_t sweep = 0; sweep < cfg.T_list.size(); ++sweep) {
        const double T = cfg.T_list[sweep];
        const std::size_t n_slices = slices_for(cfg, T);
        const HypothesisEnsemble ens =
            make_constant_ensemble(cfg.amplitudes, cfg.priors, T, n_slices);
        DetectionParams params;
        params.l_max = cfg.l_max;
        params.rng_seed = cfg.seed;
        const MaryReceiver receiver(ens, RenyiIncremental{cfg.alpha, cfg.search}, params);

        std::vector<unsigned char> err(cfg.trials);
        parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
            Rng rng(derive_seed(cfg.seed, sweep * cfg.trials + t));
            const std::size_t true_h = draw_hypothesis(ens.priors, rng);
            const TrialRecord rec = receiver.simulate_trial(true_h, rng);
            err[t] = rec.decision != true_h ? 1 : 0;
        });
        std::size_t failures = 0;
        for (unsigned char e : err) failures += e;
        const McEstimate est = mc_from_counts(failures, cfg.trials);

        ordered_json row;
        row["T"] = T;
        row["slices"] = n_slices;
        row["p_err"] = estimate_json(est);
        results.push_back(row);
        csv.row({format_double(T), std::to_string(n_slices), format_double(est.estimate),
                 format_double(est.std_error), format_double(est.ci_low), format_double(est.ci_high),
                 std::to_string(est.n)});
    }
    return finish(cfg, std::move(results), std::move(csv));
}

Report run_capacity(const ExperimentConfig& cfg) {
    require(!cfg.E_list.empty(), "config: capacity needs E_list");
    for (double E : cfg.E_list) require(E > 0.0 && E < 1.0, "config: E values must be in (0, 1)");

    ordered_json results = ordered_json::array();
    CsvBuilder csv = csv_header(cfg, {"E", "holevo_nats", "holevo_pie_bits", "dd_nats",
                                      "dd_pie_bits", "dd_p_star", "coherent_pie_bound_nats"});
    constexpr double inv_e = 0.36787944117144233;
    for (double E : cfg.E_list) {
        const double hol = holevo_capacity(E);
        const CapacityResult dd = dd_capacity(E);
        const bool bound_ok = E < inv_e;
        const double bound = bound_ok ? coherent_pie_bound(E) : 0.0;

        ordered_json row;
        row["E"] = E;
        row["holevo_nats"] = hol;
        row["holevo_pie_bits"] = nats_to_bits(hol / E);
        row["dd_nats"] = dd.value;
        row["dd_pie_bits"] = nats_to_bits(dd.pie);
        row["dd_p_star"] = *dd.optimal_param;
        if (bound_ok)
            row["coherent_pie_bound_nats"] = bound;
        else
            row["coherent_pie_bound_nats"] = nullptr;
        results.push_back(row);
        csv.row({format_double(E), format_double(hol), format_double(nats_to_bits(hol / E)),
                 format_double(dd.value), format_double(nats_to_bits(dd.pie)),
                 format_double(*dd.optimal_param), bound_ok ? format_double(bound) : ""});
    }

    ordered_json extra = ordered_json::object();
    if (cfg.target_pie_bits > 0.0) {
        const double target = bits_to_nats(cfg.target_pie_bits);
        const double Eh = solve_energy_for_pie(CapacityCurve::Holevo, target);
        const double Ed = solve_energy_for_pie(CapacityCurve::DirectDetection, target);
        ordered_json sol;
        sol["target_pie_bits"] = cfg.target_pie_bits;
        sol["E_holevo"] = Eh;
        sol["E_dd"] = Ed;
        sol["ratio"] = Eh / Ed;
        extra["pie_solution"] = sol;
        csv.comment("pie_solution: target_bits=" + format_double(cfg.target_pie_bits) +
                    " E_holevo=" + format_double(Eh) + " E_dd=" + format_double(Ed) +
                    " ratio=" + format_double(Eh / Ed));
    }
    return finish(cfg, std::move(results), std::move(csv), std::move(extra));
}

Report run_coded_sim(const ExperimentConfig& cfg) {
    require(cfg.message_count >= 2, "config: coded-sim needs M >= 2");
    require(cfg.block_length >= 1, "config: coded-sim needs N >= 1");
    require(!cfg.alphabet.empty(), "config: coded-sim needs an alphabet");
    require(cfg.design_dist.size() == cfg.alphabet.size(),
            "config: design_dist must match the alphabet");
    require(cfg.codewords >= 1, "config: coded-sim needs codewords >= 1");

    Rng cb_rng(derive_seed(cfg.seed, UINT64_MAX));
    Codebook cb;
    try {
        cb = build_codebook(cfg.message_count, cfg.block_length, cfg.alphabet, cfg.design_dist,
                            cb_rng);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.energy_budget > 0.0)
        require(cb.mean_photon_number() <= cfg.energy_budget * (1.0 + 1e-12),
                "config: codebook mean photon number exceeds the energy budget");

    const ControlPolicy policy =
        cfg.per_symbol_mi ? ControlPolicy{PerSymbolMI{cfg.search}} : ControlPolicy{ZeroControl{}};
    DetectionParams params;
    params.l_max = cfg.l_max;
    params.rng_seed = cfg.seed;

    struct PerCodeword {
        unsigned char err = 0;
        double info_sum = 0.0;
        double info_sq = 0.0;
    };
    std::vector<PerCodeword> rows(cfg.codewords);
    parallel_for(cfg.codewords, cfg.workers, [&](std::size_t j) {
        Rng rng(derive_seed(cfg.seed, j));
        const std::size_t msg = rng.next_below(cb.message_count);
        const CodedReceptionResult r = run_coded_reception(cb, msg, policy, params, rng);
        rows[j].err = r.decoded != msg ? 1 : 0;
        for (const SymbolStep& s : r.trace) {
            rows[j].info_sum += s.info_density;
            rows[j].info_sq += s.info_density * s.info_density;
        }
    });
    std::size_t failures = 0;
    double info_sum = 0.0, info_sq = 0.0;
    for (const PerCodeword& r : rows) {
        failures += r.err;
        info_sum += r.info_sum;
        info_sq += r.info_sq;
    }
    const McEstimate err_est = mc_from_counts(failures, cfg.codewords);
    const auto n_symbols = static_cast<double>(cfg.codewords * cb.block_length);
    const double info_mean = info_sum / n_symbols;
    const double info_var = (info_sq - n_symbols * info_mean * info_mean) / (n_symbols - 1.0);
    const double info_se = std::sqrt(std::max(0.0, info_var) / n_symbols);

    // analytic reference: exact channel MI at the empirical composition, l = 0
    double mi_ref = 0.0;
    {
        double mix = 0.0;
        for (std::size_t x = 0; x < cb.alphabet.size(); ++x) {
            const double px = static_cast<double>(cb.composition[x]) / static_cast<double>(cb.message_count);
            const double t = std::exp(-std::norm(cb.alphabet[x]));
            mix += px * t;
            mi_ref -= px * binary_entropy(t);
        }
        mi_ref += binary_entropy(mix);
    }

    ordered_json row;
    row["codewords"] = cfg.codewords;
    row["block_length"] = cb.block_length;
    row["symbols"] = cfg.codewords * cb.block_length;
    row["decode_error"] = estimate_json(err_est);
    row["info_density_mean"] = info_mean;
    row["info_density_se"] = info_se;
    row["channel_mi_l0"] = mi_ref;
    row["codebook_mean_photons"] = cb.mean_photon_number();
    ordered_json results = ordered_json::array({row});

    CsvBuilder csv = csv_header(cfg, {"codewords", "block_length", "symbols", "decode_error",
                                      "decode_error_se", "info_density_mean", "info_density_se",
                                      "channel_mi_l0", "codebook_mean_photons"});
    csv.row({std::to_string(cfg.codewords), std::to_string(cb.block_length),
             std::to_string(cfg.codewords * cb.block_length), format_double(err_est.estimate),
             format_double(err_est.std_error), format_double(info_mean), format_double(info_se),
             format_double(mi_ref), format_double(cb.mean_photon_number())});
    return finish(cfg, std::move(results), std::move(csv));
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
    validate_common(cfg);
    switch (cfg.kind) {
        case ExperimentKind::BinarySim: return run_binary_sim(cfg);
        case ExperimentKind::MarySim: return run_mary_sim(cfg);
        case ExperimentKind::Capacity: return run_capacity(cfg);
        case ExperimentKind::CodedSim: return run_coded_sim(cfg);
    }
    throw ConfigError("config: unknown experiment kind");
}

}  // namespace optrx
