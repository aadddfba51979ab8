#ifndef OPTRX_PHOTODETECT_HPP
#define OPTRX_PHOTODETECT_HPP

#include <stdexcept>

#include "optrx/core.hpp"
#include "optrx/rng.hpp"

namespace optrx {

// Thrown when every hypothesis assigns probability zero to an observed
// outcome. Signals a modeling error rather than statistical bad luck.
struct ImpossibleObservation : std::runtime_error {
    ImpossibleObservation() : std::runtime_error("observation has zero likelihood under every hypothesis") {}
};

// P(click in a slice of width dt) = 1 - exp(-|s + l|^2 * dt).
// Exact for the discretized binary-output channel, any dt.
double slice_click_probability(Amplitude s, Amplitude l, double dt);

// One Bernoulli draw; consumes exactly one uniform variate.
int sample_slice(double p, Rng& rng);

// Per-slice Bayes update over the ensemble's hypotheses given a click/no-click
// outcome under control l. Renormalizes explicitly; slice_index advances to
// slice_k + 1.
Posterior bayes_update(const Posterior& post, const HypothesisEnsemble& ens, std::size_t slice_k,
                       Amplitude l, int clicked);

}  // namespace optrx

#endif
