#include "optrx/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace optrx {

namespace {

void require_finite(Amplitude a, const char* what) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw std::invalid_argument(std::string(what) + ": amplitude must be finite");
    }
}

}  // namespace

PiecewiseWaveform make_constant_waveform(Amplitude s, double duration, std::size_t n_slices) {
    require_finite(s, "make_constant_waveform");
    if (duration <= 0.0) throw std::invalid_argument("make_constant_waveform: duration must be > 0");
    if (n_slices == 0) throw std::invalid_argument("make_constant_waveform: need at least one slice");
    return PiecewiseWaveform{duration, std::vector<Amplitude>(n_slices, s)};
}

double waveform_energy(const PiecewiseWaveform& w) {
    double sum = 0.0;
    for (const Amplitude& a : w.amplitudes) sum += std::norm(a);
    return sum * w.dt();
}

double HypothesisEnsemble::max_abs_amplitude() const {
    double m = 0.0;
    for (const auto& w : waveforms)
        for (const Amplitude& a : w.amplitudes) m = std::max(m, std::abs(a));
    return m;
}

HypothesisEnsemble make_ensemble(const std::vector<std::vector<Amplitude>>& amplitude_lists,
                                 const std::vector<double>& priors, double duration) {
    if (amplitude_lists.empty()) throw std::invalid_argument("make_ensemble: need at least one hypothesis");
    if (amplitude_lists.size() != priors.size())
        throw std::invalid_argument("make_ensemble: amplitude lists and priors differ in length");
    if (duration <= 0.0) throw std::invalid_argument("make_ensemble: duration must be > 0");

    const std::size_t n_slices = amplitude_lists.front().size();
    if (n_slices == 0) throw std::invalid_argument("make_ensemble: waveforms need at least one slice");

    HypothesisEnsemble ens;
    ens.waveforms.reserve(amplitude_lists.size());
    for (const auto& amps : amplitude_lists) {
        if (amps.size() != n_slices)
            throw std::invalid_argument("make_ensemble: waveforms must share one slice grid");
        for (const Amplitude& a : amps) require_finite(a, "make_ensemble");
        ens.waveforms.push_back(PiecewiseWaveform{duration, amps});
    }

    double sum = 0.0;
    for (double p : priors) {
        if (!(p >= 0.0)) throw std::invalid_argument("make_ensemble: priors must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("make_ensemble: priors must sum to 1 (within 1e-9)");
    ens.priors = priors;
    for (double& p : ens.priors) p /= sum;
    return ens;
}

HypothesisEnsemble make_constant_ensemble(const std::vector<Amplitude>& amplitudes,
                                          const std::vector<double>& priors, double duration,
                                          std::size_t n_slices) {
    std::vector<std::vector<Amplitude>> lists;
    lists.reserve(amplitudes.size());
    for (Amplitude a : amplitudes) lists.emplace_back(n_slices, a);
    return make_ensemble(lists, priors, duration);
}

Posterior make_prior_posterior(const HypothesisEnsemble& ens) {
    return Posterior{ens.priors, 0};
}

AlphaSchedule::AlphaSchedule(double constant_alpha) : entries_{{0, constant_alpha}} {
    if (!(constant_alpha >= 0.0)) throw std::invalid_argument("AlphaSchedule: alpha must be >= 0");
}

AlphaSchedule::AlphaSchedule(std::vector<std::pair<std::size_t, double>> entries)
    : entries_(std::move(entries)) {
    if (entries_.empty() || entries_.front().first != 0)
        throw std::invalid_argument("AlphaSchedule: table must start at slice 0");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!(entries_[i].second >= 0.0))
            throw std::invalid_argument("AlphaSchedule: alpha must be >= 0");
        if (i > 0 && entries_[i].first <= entries_[i - 1].first)
            throw std::invalid_argument("AlphaSchedule: slice indices must be increasing");
    }
}

double AlphaSchedule::at(std::size_t slice) const {
    double alpha = entries_.front().second;
    for (const auto& [start, a] : entries_) {
        if (start > slice) break;
        alpha = a;
    }
    return alpha;
}

double default_l_max(const HypothesisEnsemble& ens) {
    return 1e3 * ens.max_abs_amplitude() + 1.0;
}

}  // namespace optrx
