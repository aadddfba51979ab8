#ifndef OPTRX_DOLINAR_HPP
#define OPTRX_DOLINAR_HPP

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "optrx/core.hpp"
#include "optrx/rng.hpp"

namespace optrx {

// Minimum average error probability for discriminating two coherent-state
// waveforms with priors (pi0, 1-pi0) separated by m = integral of (S0-S1)^2:
//   P_e = (1 - sqrt(1 - 4 pi0 pi1 e^-m)) / 2.
double ykl_error(double pi0, double m);

// Control maximizing the per-slice mutual information for a binary ensemble,
//   l* = (S0 pi0 - S1 pi1) / (pi1 - pi0).
// Real parts of s0, s1 are used (binary problems reduce to the real axis).
// Throws std::domain_error when pi0 == pi1 (singular); callers fall back to
// the clamped control.
Amplitude optimal_control_binary(Amplitude s0, Amplitude s1, double pi0, double pi1);

// Real-axis reduction of a binary ensemble: per slice, rotate phase space so
// the line through (S0, S1) is horizontal and record the common imaginary
// offset. Click rates become (x_i + u)^2 for a real control u; the physical
// control is (u - i*offset) * e^{i*phase}.
struct BinaryProjection {
    std::vector<double> x0, x1;     // projected real amplitudes per slice
    std::vector<double> offset;     // common imaginary part per slice
    std::vector<double> phase;      // rotation angle per slice

    Amplitude physical_control(std::size_t k, double u) const;
};

BinaryProjection project_binary(const HypothesisEnsemble& ens);

// Commitment ratio g(t) = max(pi0(t), pi1(t)) / min(pi0(t), pi1(t)) tabulated
// at slice boundaries, together with the cumulative distance
// m(t) = integral of (S0 - S1)^2. Click-independent: precomputed per ensemble.
struct CommitmentTrajectory {
    std::vector<double> g;  // size n_slices + 1
    std::vector<double> m;  // size n_slices + 1
};

// Closed-form solution of the commitment-ratio dynamics:
//   g = (1+g0)^2/(2g0) e^m - 1 + (1+g0)/(2g0) sqrt((1+g0)^2 e^{2m} - 4 g0 e^m).
// Requires g0 >= 1 (g0 == 1 is the equal-prior limit, finite for m > 0).
double g_closed_form(double g0, double m);

// One classical RK4 step of dg/dt = dsq * g (g+1)/(g-1) with dsq = (S0-S1)^2
// constant over the step. Requires g > 1.
double g_ode_step(double g, double dsq, double h);

// Tabulates g on the ensemble's slice grid by RK4, one step per slice.
// Requires g(0) = max prior ratio > 1 strictly.
CommitmentTrajectory g_ode_integrate(const HypothesisEnsemble& ens);

// Exact tabulation via the closed form evaluated at the per-slice cumulative
// distance. Valid for g(0) >= 1; this is what the simulator uses.
CommitmentTrajectory g_trajectory(const HypothesisEnsemble& ens);

// Flip-flop control pair evaluated at slice starts:
//   l0 = (S1 - S0 g)/(g - 1),  l1 = (S0 - S1 g)/(g - 1),
// with the active control l0 while N(t) is even and l1 while odd.
// Magnitudes are clamped to l_max.
std::pair<PiecewiseWaveform, PiecewiseWaveform> control_waveforms(const CommitmentTrajectory& traj,
                                                                  const HypothesisEnsemble& ens,
                                                                  double l_max);

// Binary Dolinar receiver with the trajectory, controls and per-slice click
// probabilities precomputed once. Trials are pure given (true_h, rng) and the
// trajectory is never modified by simulation.
class DolinarReceiver {
public:
    DolinarReceiver(HypothesisEnsemble ens, DetectionParams params);

    TrialRecord simulate_trial(std::size_t true_h, Rng& rng) const;

    const CommitmentTrajectory& trajectory() const { return traj_; }
    const HypothesisEnsemble& ensemble() const { return ens_; }
    double l_max() const { return l_max_; }
    // Projected real control active at slice k for the given parity.
    double control_at(std::size_t k, int parity) const {
        return parity == 0 ? u_even_[k] : u_odd_[k];
    }

private:
    HypothesisEnsemble ens_;
    BinaryProjection proj_;
    CommitmentTrajectory traj_;
    double l_max_ = 0.0;
    std::size_t hi_ = 0, lo_ = 1;            // relabeling with prior[hi_] >= prior[lo_]
    std::vector<double> u_even_, u_odd_;     // clamped projected controls per slice
    // click probabilities [hypothesis 0/1 in original labels][parity]
    std::array<std::array<std::vector<double>, 2>, 2> p_click_;
    // log-likelihood increments [hypothesis][parity][clicked]
    std::array<std::array<std::array<std::vector<double>, 2>, 2>, 2> log_like_;
};

// One-shot convenience wrapper around DolinarReceiver.
TrialRecord simulate_dolinar_trial(const HypothesisEnsemble& ens, const DetectionParams& params,
                                   std::size_t true_h, Rng& rng);

}  // namespace optrx

#endif
