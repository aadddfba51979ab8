#include "optrx/capacity.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "optrx/dolinar.hpp"

namespace optrx {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binary_entropy: p must be in [0, 1]");
    return -xlogx(p) - xlogx(1.0 - p);
}

double holevo_capacity(double E) {
    if (!(E >= 0.0)) throw std::invalid_argument("holevo_capacity: E must be >= 0");
    if (E == 0.0) return 0.0;
    return (1.0 + E) * std::log1p(E) - E * std::log(E);
}

double holevo_asymptotic(double E) {
    if (!(E > 0.0 && E < 1.0)) throw std::invalid_argument("holevo_asymptotic: E must be in (0, 1)");
    return E * std::log(1.0 / E) + E;
}

double ook_mutual_information(double E, double p) {
    if (!(E >= 0.0)) throw std::invalid_argument("ook_mutual_information: E must be >= 0");
    if (!(p > 0.0 && p <= 1.0)) {
        if (p == 0.0 && E > 0.0)
            throw std::invalid_argument("ook_mutual_information: p = 0 cannot carry energy");
        throw std::invalid_argument("ook_mutual_information: p must be in (0, 1]");
    }
    const double q = -std::expm1(-E / p);  // click probability for the on pulse
    return binary_entropy(p * q) - p * binary_entropy(q);
}

double ook_duty_heuristic(double E) {
    if (!(E > 0.0 && E < 1.0)) throw std::invalid_argument("ook_duty_heuristic: E must be in (0, 1)");
    return 0.5 * E * std::log(1.0 / E);
}

namespace {

template <typename F>
double golden_max(F&& f, double a, double b, int iterations) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iterations; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

CapacityResult dd_capacity(double E) {
    if (!(E > 0.0 && E < 1.0)) throw std::invalid_argument("dd_capacity: E must be in (0, 1)");
    auto f = [E](double p) { return ook_mutual_information(E, p); };

    // Midpoint-concavity probe on a log-spaced grid; a failure downgrades the
    // golden-section search to an exhaustive grid.
    const double lo = std::nextafter(E, 1.0);
    bool concave = true;
    {
        const int n = 64;
        std::vector<double> ps(n), vs(n);
        for (int i = 0; i < n; ++i) {
            ps[i] = lo * std::pow(1.0 / lo, static_cast<double>(i) / (n - 1));
            vs[i] = f(ps[i]);
        }
        for (int i = 0; i + 2 < n; ++i) {
            const double mid = f(0.5 * (ps[i] + ps[i + 2]));
            if (mid + 1e-12 < 0.5 * (vs[i] + vs[i + 2])) {
                concave = false;
                break;
            }
        }
    }

    double p_star;
    if (concave) {
        p_star = golden_max(f, lo, 1.0, 120);
    } else {
        const int n = 20000;
        double best_v = -1.0;
        p_star = lo;
        for (int i = 0; i < n; ++i) {
            const double p = lo * std::pow(1.0 / lo, static_cast<double>(i) / (n - 1));
            const double v = f(p);
            if (v > best_v) {
                best_v = v;
                p_star = p;
            }
        }
        p_star = golden_max(f, p_star * 0.9, std::min(1.0, p_star * 1.1), 100);
    }

    CapacityResult res;
    res.energy = E;
    res.value = f(p_star);
    res.pie = res.value / E;
    res.optimal_param = p_star;
    return res;
}

double coherent_pie_bound(double E) {
    constexpr double inv_e = 0.36787944117144233;
    if (!(E > 0.0 && E < inv_e)) throw std::invalid_argument("coherent_pie_bound: E must be in (0, 1/e)");
    const double L = std::log(1.0 / E);
    return L - std::log(L);
}

double mi_upper_bound_binary(double pi0, double m) {
    return binary_entropy(pi0) - binary_entropy(ykl_error(pi0, m));
}

double mi_rate_coefficient(double pi0, double lambda0, double lambda1) {
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw std::invalid_argument("mi_rate_coefficient: pi0 in [0, 1]");
    if (!(lambda0 >= 0.0 && lambda1 >= 0.0))
        throw std::invalid_argument("mi_rate_coefficient: rates must be >= 0");
    const double pi1 = 1.0 - pi0;
    return pi0 * xlogx(lambda0) + pi1 * xlogx(lambda1) - xlogx(pi0 * lambda0 + pi1 * lambda1);
}

double binary_channel_mi(double p0, double t0, double t1) {
    if (!(p0 >= 0.0 && p0 <= 1.0 && t0 >= 0.0 && t0 <= 1.0 && t1 >= 0.0 && t1 <= 1.0))
        throw std::invalid_argument("binary_channel_mi: arguments must be probabilities");
    const double p1 = 1.0 - p0;
    return binary_entropy(p0 * t0 + p1 * t1) - p0 * binary_entropy(t0) - p1 * binary_entropy(t1);
}

double binary_slice_mi(double pi0, double s0, double s1, double l, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("binary_slice_mi: dt must be > 0");
    const double t0 = std::exp(-(s0 + l) * (s0 + l) * dt);
    const double t1 = std::exp(-(s1 + l) * (s1 + l) * dt);
    return binary_channel_mi(pi0, t0, t1);
}

double solve_energy_for_pie(const std::function<double(double)>& capacity_nats,
                            double target_pie_nats) {
    constexpr double e_lo = 1e-12;
    const double e_hi = 0.36787944117144233 * (1.0 - 1e-9);
    auto pie = [&](double E) { return capacity_nats(E) / E; };

    // Photon efficiency must decrease over the bracket for bisection to be
    // meaningful; check it rather than assume it.
    {
        const int n = 25;
        double prev = pie(e_lo);
        for (int i = 1; i < n; ++i) {
            const double E = e_lo * std::pow(e_hi / e_lo, static_cast<double>(i) / (n - 1));
            const double cur = pie(E);
            if (!(cur < prev))
                throw std::logic_error("solve_energy_for_pie: photon efficiency is not decreasing");
            prev = cur;
        }
    }

    double lo = e_lo, hi = e_hi;
    if (!(pie(lo) >= target_pie_nats && pie(hi) <= target_pie_nats))
        throw std::invalid_argument("solve_energy_for_pie: target not bracketed on [1e-12, 1/e]");
    while (hi / lo > 1.0 + 1e-6) {
        const double mid = std::sqrt(lo * hi);
        (pie(mid) >= target_pie_nats ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

double solve_energy_for_pie(CapacityCurve curve, double target_pie_nats) {
    switch (curve) {
        case CapacityCurve::Holevo:
            return solve_energy_for_pie([](double E) { return holevo_capacity(E); }, target_pie_nats);
        case CapacityCurve::DirectDetection:
            return solve_energy_for_pie(
                [](double E) { return ook_mutual_information(E, ook_duty_heuristic(E)); },
                target_pie_nats);
    }
    throw std::invalid_argument("solve_energy_for_pie: unknown curve");
}

}  // namespace optrx
