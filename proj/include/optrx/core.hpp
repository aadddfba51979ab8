#ifndef OPTRX_CORE_HPP
#define OPTRX_CORE_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace optrx {

// Complex field amplitude in units of sqrt(photons per unit time); the click
// rate after mixing with a control l is |S + l|^2.
using Amplitude = std::complex<double>;

// Piecewise-constant complex waveform on a uniform slice grid over [0, T).
struct PiecewiseWaveform {
    double duration = 0.0;               // T > 0
    std::vector<Amplitude> amplitudes;   // one per slice

    std::size_t n_slices() const { return amplitudes.size(); }
    double dt() const { return duration / static_cast<double>(amplitudes.size()); }
};

PiecewiseWaveform make_constant_waveform(Amplitude s, double duration, std::size_t n_slices);

// Integrated photon number: sum_k |S_k|^2 * dt.
double waveform_energy(const PiecewiseWaveform& w);

// M candidate waveforms sharing one slice grid, plus prior probabilities.
struct HypothesisEnsemble {
    std::vector<PiecewiseWaveform> waveforms;
    std::vector<double> priors;

    std::size_t size() const { return waveforms.size(); }
    std::size_t n_slices() const { return waveforms.front().n_slices(); }
    double duration() const { return waveforms.front().duration; }
    double dt() const { return waveforms.front().dt(); }
    double max_abs_amplitude() const;
};

// Validates and normalizes. Priors are renormalized when |sum - 1| <= 1e-9
// and rejected otherwise.
HypothesisEnsemble make_ensemble(const std::vector<std::vector<Amplitude>>& amplitude_lists,
                                 const std::vector<double>& priors, double duration);

// Convenience: constant amplitudes over [0, T).
HypothesisEnsemble make_constant_ensemble(const std::vector<Amplitude>& amplitudes,
                                          const std::vector<double>& priors, double duration,
                                          std::size_t n_slices);

// Probability vector over hypotheses plus the number of slices consumed.
struct Posterior {
    std::vector<double> probs;
    std::size_t slice_index = 0;
};

Posterior make_prior_posterior(const HypothesisEnsemble& ens);

// 1-D/2-D search parameters for the incremental control optimizer.
struct SearchConfig {
    double half_width_multiple = 5.0;  // grid half-width as multiple of the amplitude scale
    std::size_t grid_points = 2001;
    std::size_t refine_iterations = 80;
    double tolerance = 1e-9;           // absolute tolerance on l
    double l_max = 1e12;               // clamp on |l|
};

// alpha as a function of slice index: constant, or a piecewise-constant table
// of (start slice, alpha) entries.
class AlphaSchedule {
public:
    AlphaSchedule() : entries_{{0, 1.0}} {}
    explicit AlphaSchedule(double constant_alpha);
    // entries: (first slice where the value applies, alpha); sorted by slice.
    explicit AlphaSchedule(std::vector<std::pair<std::size_t, double>> entries);

    double at(std::size_t slice) const;
    const std::vector<std::pair<std::size_t, double>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::size_t, double>> entries_;
};

// How the control signal l(t) is chosen.
struct ZeroControl {};                       // direct detection, l == 0
struct DolinarBinary {};                     // flip-flop control from the commitment trajectory
struct RenyiIncremental {                    // per-slice argmin of expected posterior Renyi entropy
    AlphaSchedule alpha_schedule;
    SearchConfig search;
};
struct PerSymbolMI {                         // coded reception, constant l per symbol
    SearchConfig search;
};
using ControlPolicy = std::variant<ZeroControl, DolinarBinary, RenyiIncremental, PerSymbolMI>;

struct DetectionParams {
    double l_max = 0.0;            // clamp on |l|; 0 means "use default_l_max(ens)"
    std::uint64_t rng_seed = 1;
    SearchConfig search;
};

// Default clamp: 1e3 * max amplitude magnitude + 1.
double default_l_max(const HypothesisEnsemble& ens);

// One Monte Carlo run. click_slices is strictly increasing and encodes N(t).
struct TrialRecord {
    std::size_t true_hypothesis = 0;
    std::vector<std::uint32_t> click_slices;
    std::size_t decision = 0;
    Posterior final_posterior;
};

}  // namespace optrx

#endif
