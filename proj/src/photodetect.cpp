#include "optrx/photodetect.hpp"

#include <cmath>

namespace optrx {

double slice_click_probability(Amplitude s, Amplitude l, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("slice_click_probability: dt must be > 0");
    return -std::expm1(-std::norm(s + l) * dt);
}

int sample_slice(double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_slice: p must be in [0, 1]");
    return rng.next_unit() < p ? 1 : 0;
}

Posterior bayes_update(const Posterior& post, const HypothesisEnsemble& ens, std::size_t slice_k,
                       Amplitude l, int clicked) {
    if (post.probs.size() != ens.size())
        throw std::invalid_argument("bayes_update: posterior and ensemble sizes differ");
    if (slice_k >= ens.n_slices()) throw std::invalid_argument("bayes_update: slice index out of range");

    const double dt = ens.dt();
    Posterior out;
    out.probs.resize(post.probs.size());
    double total = 0.0;
    for (std::size_t i = 0; i < post.probs.size(); ++i) {
        const double pc = slice_click_probability(ens.waveforms[i].amplitudes[slice_k], l, dt);
        const double like = clicked ? pc : 1.0 - pc;
        out.probs[i] = post.probs[i] * like;
        total += out.probs[i];
    }
    if (total <= 0.0) throw ImpossibleObservation{};
    for (double& p : out.probs) p /= total;
    out.slice_index = slice_k + 1;
    return out;
}

}  // namespace optrx
