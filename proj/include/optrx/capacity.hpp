#ifndef OPTRX_CAPACITY_HPP
#define OPTRX_CAPACITY_HPP

#include <functional>
#include <optional>

namespace optrx {

inline constexpr double kNatsPerBit = 0.6931471805599453;  // ln 2

inline double nats_to_bits(double nats) { return nats / kNatsPerBit; }
inline double bits_to_nats(double bits) { return bits * kNatsPerBit; }

// x log x with the 0 log 0 := 0 convention.
double xlogx(double x);

// Binary (Bernoulli) entropy in nats.
double binary_entropy(double p);

// Ultimate capacity of the pure-loss channel at mean photon number E per use:
// (1+E) log(1+E) - E log E, nats/use. holevo_capacity(0) == 0 by continuity.
double holevo_capacity(double E);

// Two leading terms E log(1/E) + E; valid on 0 < E < 1.
double holevo_asymptotic(double E);

// On-off-keying mutual information (nats/use) with duty cycle p and mean
// photon number E: H_B(p(1 - e^{-E/p})) - p H_B(1 - e^{-E/p}).
double ook_mutual_information(double E, double p);

// Canonical low-photon duty cycle (E/2) log(1/E).
double ook_duty_heuristic(double E);

struct CapacityResult {
    double energy = 0.0;               // photons per use
    double value = 0.0;                // nats per use
    double pie = 0.0;                  // nats per photon (value / energy)
    std::optional<double> optimal_param;  // e.g. OOK duty cycle p*
};

// Direct-detection capacity restricted to OOK inputs: maximizes
// ook_mutual_information over p in (E, 1]. Concavity of the objective is
// probed first; if it fails, the search falls back to an exhaustive grid.
CapacityResult dd_capacity(double E);

// Two leading terms of the coherent-processing photon-efficiency ceiling,
// log(1/E) - log log(1/E), nats per photon; the additive O(1) constant is not
// pinned down. Requires 0 < E < 1/e.
double coherent_pie_bound(double E);

// Single-symbol upper bound on the binary slice mutual information,
// H_B(pi0) - H_B(P_e^*) with P_e^* the two-state minimum error probability at
// distance m.
double mi_upper_bound_binary(double pi0, double m);

// First-order slice mutual information per unit time at rates (lambda0,
// lambda1): pi0 l0 log l0 + pi1 l1 log l1 - (avg) log(avg).
double mi_rate_coefficient(double pi0, double lambda0, double lambda1);

// Mutual information of the 2x2 channel with rows {t0, 1-t0}, {t1, 1-t1}
// (t = P(Y=0|X)) under input distribution (p0, 1-p0). Nats.
double binary_channel_mi(double p0, double t0, double t1);

// Exact slice MI for a real binary ensemble under control l: the t's are the
// no-click probabilities e^{-(s+l)^2 dt}.
double binary_slice_mi(double pi0, double s0, double s1, double l, double dt);

enum class CapacityCurve {
    Holevo,           // holevo_capacity
    DirectDetection,  // OOK rate at the canonical duty cycle (E/2) log(1/E)
};

// Solves C(E)/E = target_pie by bisection on [1e-12, 1/e] to relative
// tolerance 1e-6. Monotonicity of the photon efficiency over the bracket is
// verified first, not assumed. target in nats/photon.
double solve_energy_for_pie(CapacityCurve curve, double target_pie_nats);

// Generic form for an arbitrary capacity curve (nats/use).
double solve_energy_for_pie(const std::function<double(double)>& capacity_nats,
                            double target_pie_nats);

}  // namespace optrx

#endif
