#include "optrx/dolinar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace optrx {

double ykl_error(double pi0, double m) {
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw std::invalid_argument("ykl_error: pi0 must be in [0, 1]");
    if (!(m >= 0.0)) throw std::invalid_argument("ykl_error: m must be >= 0");
    const double radicand = std::max(0.0, 1.0 - 4.0 * pi0 * (1.0 - pi0) * std::exp(-m));
    return 0.5 * (1.0 - std::sqrt(radicand));
}

Amplitude optimal_control_binary(Amplitude s0, Amplitude s1, double pi0, double pi1) {
    if (std::abs(pi0 + pi1 - 1.0) > 1e-9)
        throw std::invalid_argument("optimal_control_binary: priors must sum to 1");
    if (pi0 == pi1) throw std::domain_error("optimal_control_binary: singular at equal priors");
    const double x0 = s0.real(), x1 = s1.real();
    return Amplitude{(x0 * pi0 - x1 * pi1) / (pi1 - pi0), 0.0};
}

Amplitude BinaryProjection::physical_control(std::size_t k, double u) const {
    const Amplitude rot{std::cos(phase[k]), std::sin(phase[k])};
    return Amplitude{u, -offset[k]} * rot;
}

BinaryProjection project_binary(const HypothesisEnsemble& ens) {
    if (ens.size() != 2) throw std::invalid_argument("project_binary: binary ensemble required");
    const std::size_t n = ens.n_slices();
    BinaryProjection proj;
    proj.x0.resize(n);
    proj.x1.resize(n);
    proj.offset.resize(n);
    proj.phase.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Amplitude a0 = ens.waveforms[0].amplitudes[k];
        const Amplitude a1 = ens.waveforms[1].amplitudes[k];
        const Amplitude d = a1 - a0;
        const double phi = (d == Amplitude{}) ? 0.0 : std::arg(d);
        const Amplitude rot{std::cos(-phi), std::sin(-phi)};
        const Amplitude b0 = a0 * rot, b1 = a1 * rot;
        proj.x0[k] = b0.real();
        proj.x1[k] = b1.real();
        proj.offset[k] = 0.5 * (b0.imag() + b1.imag());
        proj.phase[k] = phi;
    }
    return proj;
}

double g_closed_form(double g0, double m) {
    if (!(g0 >= 1.0)) throw std::invalid_argument("g_closed_form: g0 must be >= 1");
    if (!(m >= 0.0)) throw std::invalid_argument("g_closed_form: m must be >= 0");
    if (std::isinf(g0)) return g0;
    const double em = std::exp(m);
    // radicand (1+g0)^2 e^{2m} - 4 g0 e^m rewritten without cancellation:
    // e^{2m} [ (1-g0)^2 + 4 g0 (1 - e^{-m}) ].
    const double root = em * std::sqrt((1.0 - g0) * (1.0 - g0) + 4.0 * g0 * (-std::expm1(-m)));
    return (1.0 + g0) * ((1.0 + g0) * em + root) / (2.0 * g0) - 1.0;
}

double g_ode_step(double g, double dsq, double h) {
    if (!(g > 1.0)) throw std::invalid_argument("g_ode_step: g must be > 1");
    if (dsq == 0.0) return g;
    auto f = [dsq](double x) { return dsq * x * (x + 1.0) / (x - 1.0); };
    const double k1 = f(g);
    const double k2 = f(g + 0.5 * h * k1);
    const double k3 = f(g + 0.5 * h * k2);
    const double k4 = f(g + h * k3);
    const double out = g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(out > 1.0)) throw std::logic_error("g_ode_step: trajectory crossed g = 1");
    return out;
}

namespace {

double initial_ratio(const HypothesisEnsemble& ens) {
    const double hi = std::max(ens.priors[0], ens.priors[1]);
    const double lo = std::min(ens.priors[0], ens.priors[1]);
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

std::vector<double> cumulative_distance(const HypothesisEnsemble& ens) {
    const BinaryProjection proj = project_binary(ens);
    const double dt = ens.dt();
    std::vector<double> m(ens.n_slices() + 1, 0.0);
    for (std::size_t k = 0; k < ens.n_slices(); ++k) {
        const double d = proj.x0[k] - proj.x1[k];
        m[k + 1] = m[k] + d * d * dt;
    }
    return m;
}

}  // namespace

CommitmentTrajectory g_ode_integrate(const HypothesisEnsemble& ens) {
    const double g0 = initial_ratio(ens);
    if (!(g0 > 1.0)) throw std::invalid_argument("g_ode_integrate: requires g(0) > 1 strictly");
    CommitmentTrajectory traj;
    traj.m = cumulative_distance(ens);
    traj.g.resize(traj.m.size());
    traj.g[0] = g0;
    const double dt = ens.dt();
    const BinaryProjection proj = project_binary(ens);
    for (std::size_t k = 0; k < ens.n_slices(); ++k) {
        const double d = proj.x0[k] - proj.x1[k];
        traj.g[k + 1] = g_ode_step(traj.g[k], d * d, dt);
    }
    return traj;
}

CommitmentTrajectory g_trajectory(const HypothesisEnsemble& ens) {
    CommitmentTrajectory traj;
    traj.m = cumulative_distance(ens);
    traj.g.resize(traj.m.size());
    const double g0 = initial_ratio(ens);
    for (std::size_t k = 0; k < traj.m.size(); ++k) traj.g[k] = g_closed_form(g0, traj.m[k]);
    return traj;
}

namespace {

// l0 = (S1 - S0 g)/(g-1), l1 = (S0 - S1 g)/(g-1), clamped to |l| <= bound.
// g == inf gives the perfect-nulling limits -S0, -S1.
std::pair<double, double> flip_flop_controls(double x0, double x1, double g, double bound) {
    double l0, l1;
    if (std::isinf(g)) {
        l0 = -x0;
        l1 = -x1;
    } else if (g > 1.0) {
        l0 = (x1 - x0 * g) / (g - 1.0);
        l1 = (x0 - x1 * g) / (g - 1.0);
    } else {
        // equal-prior start: formula diverges; launch from the clamp with the
        // limiting sign
        l0 = (x1 >= x0 ? bound : -bound);
        l1 = -l0;
    }
    l0 = std::clamp(l0, -bound, bound);
    l1 = std::clamp(l1, -bound, bound);
    return {l0, l1};
}

}  // namespace

std::pair<PiecewiseWaveform, PiecewiseWaveform> control_waveforms(const CommitmentTrajectory& traj,
                                                                  const HypothesisEnsemble& ens,
                                                                  double l_max) {
    if (traj.g.size() != ens.n_slices() + 1)
        throw std::invalid_argument("control_waveforms: trajectory does not match the slice grid");
    if (!(l_max > 0.0)) throw std::invalid_argument("control_waveforms: l_max must be > 0");
    const BinaryProjection proj = project_binary(ens);
    PiecewiseWaveform l0{ens.duration(), std::vector<Amplitude>(ens.n_slices())};
    PiecewiseWaveform l1 = l0;
    for (std::size_t k = 0; k < ens.n_slices(); ++k) {
        const double c = proj.offset[k];
        const double ubound = l_max > std::abs(c) ? std::sqrt(l_max * l_max - c * c) : 0.0;
        auto [u0, u1] = flip_flop_controls(proj.x0[k], proj.x1[k], traj.g[k], ubound);
        l0.amplitudes[k] = proj.physical_control(k, u0);
        l1.amplitudes[k] = proj.physical_control(k, u1);
    }
    return {std::move(l0), std::move(l1)};
}

DolinarReceiver::DolinarReceiver(HypothesisEnsemble ens, DetectionParams params) : ens_(std::move(ens)) {
    if (ens_.size() != 2) throw std::invalid_argument("DolinarReceiver: binary ensemble required");
    if (ens_.n_slices() >= UINT32_MAX) throw std::invalid_argument("DolinarReceiver: too many slices");
    l_max_ = params.l_max > 0.0 ? params.l_max : default_l_max(ens_);

    // Relabel so that hypothesis hi_ has the larger prior; the parity decision
    // commits to hi_ on even click counts.
    hi_ = ens_.priors[0] >= ens_.priors[1] ? 0 : 1;
    lo_ = 1 - hi_;

    proj_ = project_binary(ens_);
    // Trajectory in relabeled coordinates: S0 -> hypothesis hi_.
    HypothesisEnsemble relabeled = ens_;
    if (hi_ == 1) {
        std::swap(relabeled.waveforms[0], relabeled.waveforms[1]);
        std::swap(relabeled.priors[0], relabeled.priors[1]);
    }
    traj_ = g_trajectory(relabeled);

    const std::size_t n = ens_.n_slices();
    const double dt = ens_.dt();
    u_even_.resize(n);
    u_odd_.resize(n);
    for (int h = 0; h < 2; ++h)
        for (int par = 0; par < 2; ++par) {
            p_click_[h][par].resize(n);
            log_like_[h][par][0].resize(n);
            log_like_[h][par][1].resize(n);
        }

    for (std::size_t k = 0; k < n; ++k) {
        const double xhi = (hi_ == 0) ? proj_.x0[k] : proj_.x1[k];
        const double xlo = (hi_ == 0) ? proj_.x1[k] : proj_.x0[k];
        const double c = proj_.offset[k];
        const double ubound = l_max_ > std::abs(c) ? std::sqrt(l_max_ * l_max_ - c * c) : 0.0;
        auto [u0, u1] = flip_flop_controls(xhi, xlo, traj_.g[k], ubound);
        u_even_[k] = u0;
        u_odd_[k] = u1;
        const double x[2] = {proj_.x0[k], proj_.x1[k]};
        for (int h = 0; h < 2; ++h)
            for (int par = 0; par < 2; ++par) {
                const double u = par == 0 ? u0 : u1;
                const double rate = (x[h] + u) * (x[h] + u);
                const double p = -std::expm1(-rate * dt);
                p_click_[h][par][k] = p;
                log_like_[h][par][1][k] = std::log(p);
                log_like_[h][par][0][k] = std::log1p(-p);
            }
    }
}

TrialRecord DolinarReceiver::simulate_trial(std::size_t true_h, Rng& rng) const {
    if (true_h > 1) throw std::invalid_argument("simulate_trial: hypothesis index out of range");
    const std::size_t n = ens_.n_slices();
    const double* p_tab[2] = {p_click_[true_h][0].data(), p_click_[true_h][1].data()};

    TrialRecord rec;
    rec.true_hypothesis = true_h;
    int parity = 0;
    double ll0 = 0.0, ll1 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const int clicked = rng.next_unit() < p_tab[parity][k] ? 1 : 0;
        ll0 += log_like_[0][parity][clicked][k];
        ll1 += log_like_[1][parity][clicked][k];
        if (clicked) {
            rec.click_slices.push_back(static_cast<std::uint32_t>(k));
            parity ^= 1;
        }
    }
    rec.decision = (parity == 0) ? hi_ : lo_;

    // True Bayes posterior from the accumulated log-likelihoods.
    const double w0 = std::log(ens_.priors[0]) + ll0;
    const double w1 = std::log(ens_.priors[1]) + ll1;
    const double mx = std::max(w0, w1);
    const double e0 = std::exp(w0 - mx), e1 = std::exp(w1 - mx);
    rec.final_posterior.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
    rec.final_posterior.slice_index = n;
    return rec;
}

TrialRecord simulate_dolinar_trial(const HypothesisEnsemble& ens, const DetectionParams& params,
                                   std::size_t true_h, Rng& rng) {
    return DolinarReceiver(ens, params).simulate_trial(true_h, rng);
}

}  // namespace optrx
