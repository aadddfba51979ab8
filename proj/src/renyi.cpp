#include "optrx/renyi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "optrx/photodetect.hpp"

namespace optrx {

namespace {

// x^a with a fast path for small integer exponents.
double pow_alpha(double x, double a) {
    const double r = std::round(a);
    if (r == a && r >= 0.0 && r <= 512.0) {
        double result = 1.0, base = x;
        auto e = static_cast<unsigned>(r);
        while (e > 0) {
            if (e & 1u) result *= base;
            base *= base;
            e >>= 1u;
        }
        return result;
    }
    return std::pow(x, a);
}

// H_alpha of the distribution w / W for nonnegative weights w with sum W > 0.
// Clamped at zero: entropy is nonnegative, stray rounding must not produce
// tiny negative objectives that confuse argmin tie-breaking.
double renyi_unnormalized(const double* w, std::size_t n, double total, double alpha) {
    if (alpha == 1.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (w[i] > 0.0) s += w[i] * std::log(w[i]);
        return std::max(0.0, std::log(total) - s / total);
    }
    double wmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) wmax = std::max(wmax, w[i]);
    if (std::isinf(alpha)) return std::max(0.0, std::log(total / wmax));
    if (alpha == 0.0) {
        std::size_t support = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (w[i] > 0.0) ++support;
        return std::log(static_cast<double>(support));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += pow_alpha(w[i] / wmax, alpha);
    // log sum (w/W)^alpha = log s + alpha log(wmax / W)
    return std::max(0.0, (std::log(s) + alpha * std::log(wmax / total)) / (1.0 - alpha));
}

struct SliceObjective {
    // scratch reused across evaluations
    std::vector<double> w0, w1;

    double eval(std::span<const Amplitude> amps, std::span<const double> prior, Amplitude l,
                double dt, double alpha) {
        const std::size_t n = amps.size();
        w0.resize(n);
        w1.resize(n);
        double t0 = 0.0, t1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = -std::expm1(-std::norm(amps[i] + l) * dt);
            w1[i] = prior[i] * p;
            w0[i] = prior[i] * (1.0 - p);
            t1 += w1[i];
            t0 += w0[i];
        }
        double obj = 0.0;
        if (t0 > 0.0) obj += t0 * renyi_unnormalized(w0.data(), n, t0, alpha);
        if (t1 > 0.0) obj += t1 * renyi_unnormalized(w1.data(), n, t1, alpha);
        return obj;
    }
};

void validate_distribution(std::span<const double> p) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw std::invalid_argument("probability vector has a negative entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("probability vector is not normalized");
}

}  // namespace

double shannon_entropy(std::span<const double> p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log(x);
    return h;
}

double renyi_entropy(std::span<const double> p, double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("renyi_entropy: alpha must be >= 0");
    validate_distribution(p);
    if (p.empty()) throw std::invalid_argument("renyi_entropy: empty distribution");
    return renyi_unnormalized(p.data(), p.size(), 1.0, alpha);
}

double expected_posterior_renyi(std::span<const Amplitude> amps, std::span<const double> prior,
                                Amplitude l, double dt, double alpha) {
    if (amps.size() != prior.size())
        throw std::invalid_argument("expected_posterior_renyi: size mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("expected_posterior_renyi: dt must be > 0");
    if (!(alpha >= 0.0)) throw std::invalid_argument("expected_posterior_renyi: alpha must be >= 0");
    validate_distribution(prior);
    SliceObjective obj;
    return obj.eval(amps, prior, l, dt, alpha);
}

double expected_posterior_renyi(const HypothesisEnsemble& ens, const Posterior& post, Amplitude l,
                                double dt, double alpha) {
    if (post.slice_index >= ens.n_slices())
        throw std::invalid_argument("expected_posterior_renyi: posterior past the last slice");
    std::vector<Amplitude> amps(ens.size());
    for (std::size_t i = 0; i < ens.size(); ++i) amps[i] = ens.waveforms[i].amplitudes[post.slice_index];
    return expected_posterior_renyi(amps, post.probs, l, dt, alpha);
}

namespace detail {

// Entropy-order dispatch resolved once per optimization call. Terms whose
// ratio to the leading weight is below cutoff contribute less than 2^-60 to
// the power sum and are skipped.
struct AlphaKernel {
    enum class Kind { Shannon, MinEntropy, Hartley, IntPow, RealPow };
    Kind kind = Kind::Shannon;
    double alpha = 1.0;
    unsigned int_exp = 0;
    double cutoff = 0.0;

    static AlphaKernel make(double alpha) {
        AlphaKernel k;
        k.alpha = alpha;
        if (alpha == 1.0) {
            k.kind = Kind::Shannon;
        } else if (std::isinf(alpha)) {
            k.kind = Kind::MinEntropy;
        } else if (alpha == 0.0) {
            k.kind = Kind::Hartley;
        } else {
            const double r = std::round(alpha);
            if (r == alpha && r >= 1.0 && r <= 512.0) {
                k.kind = Kind::IntPow;
                k.int_exp = static_cast<unsigned>(r);
            } else {
                k.kind = Kind::RealPow;
            }
            k.cutoff = std::exp2(-60.0 / alpha);
        }
        return k;
    }
};

inline double pow_uint(double x, unsigned e) {
    double result = 1.0;
    while (e > 0) {
        if (e & 1u) result *= x;
        x *= x;
        e >>= 1u;
    }
    return result;
}

// Grid click probabilities and entropy kernels for a fixed real amplitude set
// and slice width; reused across slices and trials. Entries are laid out
// [grid point * M + hypothesis].
class GridTables {
public:
    GridTables(std::vector<double> xs, double dt, double half_width, std::size_t points)
        : xs_(std::move(xs)), m_(xs_.size()), n_(points), lo_(-half_width) {
        step_ = 2.0 * half_width / static_cast<double>(n_ - 1);
        p_.resize(n_ * m_);
        q_.resize(n_ * m_);
        plp_.resize(n_ * m_);
        qlq_.resize(n_ * m_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double l = l_at(j);
            for (std::size_t i = 0; i < m_; ++i) {
                const double rate = (xs_[i] + l) * (xs_[i] + l);
                const double p = -std::expm1(-rate * dt);
                const double q = 1.0 - p;
                p_[j * m_ + i] = p;
                q_[j * m_ + i] = q;
                plp_[j * m_ + i] = p > 0.0 ? p * std::log(p) : 0.0;
                qlq_[j * m_ + i] = q > 0.0 ? q * std::log(q) : 0.0;
            }
        }
    }

    std::size_t points() const { return n_; }
    double l_at(std::size_t j) const { return lo_ + step_ * static_cast<double>(j); }
    double step() const { return step_; }

    // objective at grid point j; pilnpi = prior_i * log(prior_i), used by the
    // Shannon branch only
    double eval(std::size_t j, const double* prior, const double* pilnpi,
                const AlphaKernel& kernel) const {
        const double* p = &p_[j * m_];
        const double* q = &q_[j * m_];
        double n1 = 0.0, n0 = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            n1 += prior[i] * p[i];
            n0 += prior[i] * q[i];
        }
        if (kernel.kind == AlphaKernel::Kind::Shannon) {
            const double* plp = &plp_[j * m_];
            const double* qlq = &qlq_[j * m_];
            double s1 = 0.0, s0 = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                s1 += pilnpi[i] * p[i] + prior[i] * plp[i];
                s0 += pilnpi[i] * q[i] + prior[i] * qlq[i];
            }
            double obj = 0.0;
            if (n1 > 0.0) obj += std::max(0.0, n1 * std::log(n1) - s1);
            if (n0 > 0.0) obj += std::max(0.0, n0 * std::log(n0) - s0);
            return obj;
        }
        thread_local std::vector<double> w1buf, w0buf;
        w1buf.resize(m_);
        w0buf.resize(m_);
        double w1max = 0.0, w0max = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            w1buf[i] = prior[i] * p[i];
            w0buf[i] = prior[i] * q[i];
            w1max = std::max(w1max, w1buf[i]);
            w0max = std::max(w0max, w0buf[i]);
        }
        double obj = 0.0;
        for (int outcome = 0; outcome < 2; ++outcome) {
            const double* w = outcome ? w1buf.data() : w0buf.data();
            const double total = outcome ? n1 : n0;
            const double wmax = outcome ? w1max : w0max;
            if (!(total > 0.0)) continue;
            switch (kernel.kind) {
                case AlphaKernel::Kind::MinEntropy:
                    obj += std::max(0.0, total * std::log(total / wmax));
                    break;
                case AlphaKernel::Kind::Hartley: {
                    std::size_t support = 0;
                    for (std::size_t i = 0; i < m_; ++i)
                        if (w[i] > 0.0) ++support;
                    obj += total * std::log(static_cast<double>(support));
                    break;
                }
                case AlphaKernel::Kind::IntPow: {
                    const double inv = 1.0 / wmax;
                    double s = 0.0;
                    for (std::size_t i = 0; i < m_; ++i) {
                        const double x = w[i] * inv;
                        if (x > kernel.cutoff) s += pow_uint(x, kernel.int_exp);
                    }
                    obj += std::max(0.0, total * (std::log(s) + kernel.alpha * std::log(wmax / total)) /
                                             (1.0 - kernel.alpha));
                    break;
                }
                case AlphaKernel::Kind::RealPow: {
                    const double inv = 1.0 / wmax;
                    double s = 0.0;
                    for (std::size_t i = 0; i < m_; ++i) {
                        const double x = w[i] * inv;
                        if (x > kernel.cutoff) s += std::pow(x, kernel.alpha);
                    }
                    obj += std::max(0.0, total * (std::log(s) + kernel.alpha * std::log(wmax / total)) /
                                             (1.0 - kernel.alpha));
                    break;
                }
                case AlphaKernel::Kind::Shannon:
                    break;  // handled above
            }
        }
        return obj;
    }

private:
    std::vector<double> xs_;
    std::size_t m_, n_;
    double lo_, step_;
    std::vector<double> p_, q_, plp_, qlq_;
};

}  // namespace detail

namespace {

struct Best {
    double value = std::numeric_limits<double>::infinity();
    Amplitude l{0.0, 0.0};

    void consider(double v, Amplitude cand) {
        if (v < value || (v == value && std::abs(cand) < std::abs(l))) {
            value = v;
            l = cand;
        }
    }
};

// Golden-section minimization over [a, b]; keeps the evaluation budget small
// and deterministic.
template <typename F, typename ToAmp>
void golden_refine(F&& f, double a, double b, std::size_t iterations, double tol, Best& best,
                   ToAmp&& to_amp) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    best.consider(fc, to_amp(c));
    best.consider(fd, to_amp(d));
    for (std::size_t i = 0; i < iterations && (b - a) > tol; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            best.consider(fc, to_amp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            best.consider(fd, to_amp(d));
        }
    }
}

double search_half_width(std::span<const Amplitude> amps, std::span<const double> prior,
                         const SearchConfig& cfg) {
    double max_abs = 0.0;
    Amplitude centroid{0.0, 0.0};
    for (std::size_t i = 0; i < amps.size(); ++i) {
        max_abs = std::max(max_abs, std::abs(amps[i]));
        centroid += prior[i] * amps[i];
    }
    return std::min(cfg.half_width_multiple * (max_abs + std::abs(centroid)), cfg.l_max);
}

Amplitude optimize_with_tables(const detail::GridTables& gt, std::span<const Amplitude> amps,
                               std::span<const double> prior, double dt, double alpha,
                               const SearchConfig& cfg) {
    const detail::AlphaKernel kernel = detail::AlphaKernel::make(alpha);
    std::vector<double> pilnpi;
    if (alpha == 1.0) {
        pilnpi.resize(prior.size());
        for (std::size_t i = 0; i < prior.size(); ++i)
            pilnpi[i] = prior[i] > 0.0 ? prior[i] * std::log(prior[i]) : 0.0;
    }
    std::size_t best_j = 0;
    double best_v = std::numeric_limits<double>::infinity();
    double best_l = 0.0;
    for (std::size_t j = 0; j < gt.points(); ++j) {
        const double v = gt.eval(j, prior.data(), pilnpi.data(), kernel);
        const double l = gt.l_at(j);
        if (v < best_v || (v == best_v && std::abs(l) < std::abs(best_l))) {
            best_v = v;
            best_l = l;
            best_j = j;
        }
    }
    Best best;
    best.consider(best_v, Amplitude{best_l, 0.0});
    SliceObjective scratch;
    const double lo = gt.l_at(best_j > 0 ? best_j - 1 : 0);
    const double hi = gt.l_at(std::min(best_j + 1, gt.points() - 1));
    golden_refine([&](double l) { return scratch.eval(amps, prior, Amplitude{l, 0.0}, dt, alpha); },
                  lo, hi, cfg.refine_iterations, cfg.tolerance, best,
                  [](double l) { return Amplitude{l, 0.0}; });
    if (std::abs(best.l) > cfg.l_max) best.l *= cfg.l_max / std::abs(best.l);
    return best.l;
}

bool all_real(std::span<const Amplitude> amps) {
    for (const Amplitude& a : amps)
        if (a.imag() != 0.0) return false;
    return true;
}

}  // namespace

Amplitude optimize_control(std::span<const Amplitude> amps, std::span<const double> prior, double dt,
                           double alpha, const SearchConfig& cfg) {
    if (amps.empty()) throw std::invalid_argument("optimize_control: empty search set");
    if (cfg.grid_points < 3) throw std::invalid_argument("optimize_control: need at least 3 grid points");
    if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("optimize_control: tolerance must be > 0");
    if (amps.size() == 1) return Amplitude{0.0, 0.0};

    const double w = search_half_width(amps, prior, cfg);
    if (all_real(amps)) {
        std::vector<double> xs(amps.size());
        for (std::size_t i = 0; i < amps.size(); ++i) xs[i] = amps[i].real();
        const detail::GridTables gt(std::move(xs), dt, w, cfg.grid_points);
        return optimize_with_tables(gt, amps, prior, dt, alpha, cfg);
    }

    // complex inputs: 2-D grid of comparable budget, then alternating 1-D
    // refinements
    SliceObjective scratch;
    Best best;
    const auto side = static_cast<std::size_t>(
        std::max<double>(3.0, std::round(std::sqrt(static_cast<double>(cfg.grid_points)))));
    const std::size_t g = side | 1u;  // odd, so the grid contains 0
    const double step = 2.0 * w / static_cast<double>(g - 1);
    for (std::size_t jx = 0; jx < g; ++jx)
        for (std::size_t jy = 0; jy < g; ++jy) {
            const Amplitude l{-w + step * static_cast<double>(jx), -w + step * static_cast<double>(jy)};
            best.consider(scratch.eval(amps, prior, l, dt, alpha), l);
        }
    for (int sweep = 0; sweep < 3; ++sweep) {
        const Amplitude center = best.l;
        golden_refine([&](double re) { return scratch.eval(amps, prior, {re, center.imag()}, dt, alpha); },
                      center.real() - step, center.real() + step, cfg.refine_iterations, cfg.tolerance,
                      best, [&](double re) { return Amplitude{re, center.imag()}; });
        const Amplitude mid = best.l;
        golden_refine([&](double im) { return scratch.eval(amps, prior, {mid.real(), im}, dt, alpha); },
                      mid.imag() - step, mid.imag() + step, cfg.refine_iterations, cfg.tolerance, best,
                      [&](double im) { return Amplitude{mid.real(), im}; });
    }
    if (std::abs(best.l) > cfg.l_max) best.l *= cfg.l_max / std::abs(best.l);
    return best.l;
}

Amplitude optimize_control(const HypothesisEnsemble& ens, const Posterior& post, double dt,
                           double alpha, const SearchConfig& cfg) {
    std::vector<Amplitude> amps(ens.size());
    for (std::size_t i = 0; i < ens.size(); ++i) amps[i] = ens.waveforms[i].amplitudes[post.slice_index];
    return optimize_control(amps, post.probs, dt, alpha, cfg);
}

MaryReceiver::MaryReceiver(HypothesisEnsemble ens, RenyiIncremental policy, DetectionParams params)
    : ens_(std::move(ens)), policy_(std::move(policy)), cfg_(policy_.search) {
    if (ens_.size() < 2) throw std::invalid_argument("MaryReceiver: need at least 2 hypotheses");
    if (cfg_.grid_points < 3) throw std::invalid_argument("MaryReceiver: need at least 3 grid points");
    cfg_.l_max = params.l_max > 0.0 ? params.l_max : default_l_max(ens_);

    bool constant = true;
    for (const auto& w : ens_.waveforms)
        for (const Amplitude& a : w.amplitudes)
            if (a != w.amplitudes.front()) constant = false;
    std::vector<Amplitude> first(ens_.size());
    for (std::size_t i = 0; i < ens_.size(); ++i) first[i] = ens_.waveforms[i].amplitudes.front();
    if (constant && all_real(first)) {
        std::vector<double> xs(first.size());
        for (std::size_t i = 0; i < first.size(); ++i) xs[i] = first[i].real();
        const double w = search_half_width(first, ens_.priors, cfg_);
        tables_ = std::make_unique<detail::GridTables>(std::move(xs), ens_.dt(), w, cfg_.grid_points);
    }
}

MaryReceiver::~MaryReceiver() = default;
MaryReceiver::MaryReceiver(MaryReceiver&&) noexcept = default;

TrialRecord MaryReceiver::simulate_trial(std::size_t true_h, Rng& rng) const {
    if (true_h >= ens_.size()) throw std::invalid_argument("simulate_trial: hypothesis out of range");
    const double dt = ens_.dt();

    std::vector<Amplitude> amps(ens_.size());
    TrialRecord rec;
    rec.true_hypothesis = true_h;
    Posterior post = make_prior_posterior(ens_);
    for (std::size_t k = 0; k < ens_.n_slices(); ++k) {
        const double alpha = policy_.alpha_schedule.at(k);
        for (std::size_t i = 0; i < ens_.size(); ++i) amps[i] = ens_.waveforms[i].amplitudes[k];
        const Amplitude l = tables_ ? optimize_with_tables(*tables_, amps, post.probs, dt, alpha, cfg_)
                                    : optimize_control(amps, post.probs, dt, alpha, cfg_);
        const double p = slice_click_probability(ens_.waveforms[true_h].amplitudes[k], l, dt);
        const int clicked = sample_slice(p, rng);
        if (clicked) rec.click_slices.push_back(static_cast<std::uint32_t>(k));
        post = bayes_update(post, ens_, k, l, clicked);
    }
    rec.final_posterior = post;
    rec.decision = static_cast<std::size_t>(
        std::max_element(post.probs.begin(), post.probs.end()) - post.probs.begin());
    return rec;
}

TrialRecord simulate_mary_trial(const HypothesisEnsemble& ens, const RenyiIncremental& policy,
                                const DetectionParams& params, std::size_t true_h, Rng& rng) {
    return MaryReceiver(ens, policy, params).simulate_trial(true_h, rng);
}

}  // namespace optrx
