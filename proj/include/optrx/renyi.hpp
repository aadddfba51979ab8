#ifndef OPTRX_RENYI_HPP
#define OPTRX_RENYI_HPP

#include <memory>
#include <span>

#include "optrx/core.hpp"
#include "optrx/rng.hpp"

namespace optrx {

// Renyi entropy of order alpha in nats: (1/(1-alpha)) log sum p^alpha.
// alpha == 1 is computed as the Shannon branch, alpha == inf as -log max p,
// alpha == 0 as log of the support size. Requires a normalized p.
double renyi_entropy(std::span<const double> p, double alpha);

double shannon_entropy(std::span<const double> p);

// Two-outcome expectation of the posterior Renyi entropy after one slice of
// width dt under control l:  sum_y P_Y(y) H_alpha(P_{H|Y=y}).
double expected_posterior_renyi(std::span<const Amplitude> amps, std::span<const double> prior,
                                Amplitude l, double dt, double alpha);

// Ensemble form; the slice is the posterior's slice_index.
double expected_posterior_renyi(const HypothesisEnsemble& ens, const Posterior& post, Amplitude l,
                                double dt, double alpha);

// argmin over l of expected_posterior_renyi: coarse grid then golden-section
// refinement, tie-broken toward smaller |l|, clamped to |l| <= cfg.l_max.
// Real-valued inputs are searched on the real line; complex inputs on a 2-D
// grid with coordinate-wise refinement.
Amplitude optimize_control(std::span<const Amplitude> amps, std::span<const double> prior, double dt,
                           double alpha, const SearchConfig& cfg);

Amplitude optimize_control(const HypothesisEnsemble& ens, const Posterior& post, double dt,
                           double alpha, const SearchConfig& cfg);

namespace detail {
class GridTables;
}

// Per-slice Renyi-incremental receiver. For ensembles whose amplitudes are
// constant across slices the grid click probabilities are precomputed once;
// the search grid is centered using the initial priors and then held fixed,
// so trials are pure functions of (true_h, rng).
class MaryReceiver {
public:
    MaryReceiver(HypothesisEnsemble ens, RenyiIncremental policy, DetectionParams params);
    ~MaryReceiver();
    MaryReceiver(MaryReceiver&&) noexcept;

    TrialRecord simulate_trial(std::size_t true_h, Rng& rng) const;
    const HypothesisEnsemble& ensemble() const { return ens_; }

private:
    HypothesisEnsemble ens_;
    RenyiIncremental policy_;
    SearchConfig cfg_;
    std::unique_ptr<detail::GridTables> tables_;  // set when slices are constant
};

// Per-slice Renyi-incremental receiver: optimize l, observe, Bayes-update.
// Decision is the argmax of the final posterior, ties to the lowest index.
TrialRecord simulate_mary_trial(const HypothesisEnsemble& ens, const RenyiIncremental& policy,
                                const DetectionParams& params, std::size_t true_h, Rng& rng);

}  // namespace optrx

#endif
