#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "optrx/dolinar.hpp"

using namespace optrx;

TEST_CASE("ykl_error basics") {
    CHECK(ykl_error(0.5, 0.0) == doctest::Approx(0.5));
    CHECK(ykl_error(1.0, 3.0) == 0.0);
    CHECK(ykl_error(0.0, 3.0) == 0.0);
    CHECK(ykl_error(0.5, std::log(4.0 / 3.0)) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(ykl_error(1.2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ykl_error(0.5, -1.0), std::invalid_argument);
}

TEST_CASE("ykl_error is nonincreasing in m") {
    for (double pi0 : {0.5, 0.6, 0.9, 0.99}) {
        double prev = ykl_error(pi0, 0.0);
        for (double m = 0.1; m < 12.0; m += 0.3) {
            const double cur = ykl_error(pi0, m);
            CHECK(cur <= prev + 1e-15);
            prev = cur;
        }
    }
}

TEST_CASE("optimal control for the worked binary example") {
    const Amplitude l = optimal_control_binary({1.0, 0.0}, {-1.0, 0.0}, 2.0 / 3.0, 1.0 / 3.0);
    CHECK(l.real() == doctest::Approx(-3.0).epsilon(1e-14));
    const double lam0 = std::norm(Amplitude{1.0, 0.0} + l);
    const double lam1 = std::norm(Amplitude{-1.0, 0.0} + l);
    CHECK(lam0 == doctest::Approx(4.0));
    CHECK(lam1 == doctest::Approx(16.0));
    CHECK((2.0 / 3.0) * std::sqrt(lam0) == doctest::Approx(4.0 / 3.0));
    CHECK((1.0 / 3.0) * std::sqrt(lam1) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("optimal control vanishes as the off-hypothesis prior vanishes") {
    const double pi1 = 1e-12;
    const Amplitude l = optimal_control_binary({0.0, 0.0}, {1.5, 0.0}, 1.0 - pi1, pi1);
    CHECK(std::abs(l.real()) < 1e-11);
}

TEST_CASE("optimal control is singular at equal priors") {
    CHECK_THROWS_AS(optimal_control_binary({1.0, 0.0}, {-1.0, 0.0}, 0.5, 0.5), std::domain_error);
}

// Balance identity: pi0 sqrt(lambda0) == pi1 sqrt(lambda1) at the optimum.
TEST_CASE("balance relation holds over random draws") {
    Rng rng(31337);
    for (int rep = 0; rep < 10000; ++rep) {
        double pi0 = 0.05 + 0.9 * rng.next_unit();
        if (std::abs(pi0 - 0.5) < 1e-3) continue;
        const double s0 = 6.0 * rng.next_unit() - 3.0;
        const double s1 = 6.0 * rng.next_unit() - 3.0;
        const Amplitude l = optimal_control_binary({s0, 0.0}, {s1, 0.0}, pi0, 1.0 - pi0);
        const double b0 = pi0 * std::abs(s0 + l.real());
        const double b1 = (1.0 - pi0) * std::abs(s1 + l.real());
        CHECK(std::abs(b0 - b1) <= 1e-12);
    }
}

TEST_CASE("g closed form fixed points and values") {
    CHECK(g_closed_form(2.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g_closed_form(7.5, 0.0) == doctest::Approx(7.5).epsilon(1e-14));
    CHECK(g_closed_form(2.0, std::log(2.0)) == doctest::Approx(6.854101966249685).epsilon(1e-12));
    CHECK_THROWS_AS(g_closed_form(0.9, 1.0), std::invalid_argument);
}

TEST_CASE("P_e consistency between the closed form and the YKL formula") {
    // g0 within ~1e-8 of 1 is excluded: converting g0 to pi0 rounds
    // 4*pi0*pi1 to exactly 1 in doubles and the comparison loses meaning
    for (double g0 : {1.1, 2.0, 3.0, 10.0, 250.0}) {
        const double pi0 = g0 / (1.0 + g0);
        for (double m = 0.0; m <= 10.0; m += 0.37) {
            const double g = g_closed_form(g0, m);
            CHECK(1.0 / (1.0 + g) == doctest::Approx(ykl_error(pi0, m)).epsilon(1e-12));
        }
    }
    // the example pair: g0 = 3, m = 10
    CHECK(1.0 / (1.0 + g_closed_form(3.0, 10.0)) ==
          doctest::Approx(ykl_error(0.75, 10.0)).epsilon(1e-12));
}

TEST_CASE("ODE tabulation agrees with the closed form to 1e-8") {
    // (S0 - S1)^2 == 1 so m(t) == t over [0, 10]
    for (double g0 : {1.1, 2.0, 10.0}) {
        const double pi0 = g0 / (1.0 + g0);
        const auto ens =
            make_constant_ensemble({{0.5, 0.0}, {-0.5, 0.0}}, {pi0, 1.0 - pi0}, 10.0, 200000);
        const CommitmentTrajectory traj = g_ode_integrate(ens);
        for (std::size_t k = 0; k < traj.g.size(); k += 1000) {
            const double exact = g_closed_form(g0, traj.m[k]);
            CHECK(std::abs(traj.g[k] - exact) / exact <= 1e-8);
        }
    }
}

TEST_CASE("ODE tabulation requires g(0) > 1 and keeps flat segments flat") {
    const auto equal =
        make_constant_ensemble({{0.5, 0.0}, {-0.5, 0.0}}, {0.5, 0.5}, 1.0, 10);
    CHECK_THROWS_AS(g_ode_integrate(equal), std::invalid_argument);

    const auto same = make_constant_ensemble({{0.7, 0.0}, {0.7, 0.0}}, {0.6, 0.4}, 1.0, 64);
    const CommitmentTrajectory traj = g_ode_integrate(same);
    for (double g : traj.g) CHECK(g == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("initial ODE slope matches the dynamics") {
    // dg/dt at g0 = 2 with (S0-S1)^2 = 1 is 1 * 2 * 3 / 1 = 6
    const double h = 1e-6;
    const double g1 = g_ode_step(2.0, 1.0, h);
    CHECK((g1 - 2.0) / h == doctest::Approx(6.0).epsilon(1e-4));
}

TEST_CASE("control waveforms for on-off keying match the symbolic form") {
    const double S = 1.3, pi0 = 0.7, T = 1.0;
    const std::size_t n = 100;
    const auto ens = make_constant_ensemble({{0.0, 0.0}, {S, 0.0}}, {pi0, 1.0 - pi0}, T, n);
    const CommitmentTrajectory traj = g_trajectory(ens);
    const auto [l0, l1] = control_waveforms(traj, ens, 1e6);
    for (std::size_t k = 0; k < n; k += 7) {
        const double g = traj.g[k];
        CHECK(l0.amplitudes[k].real() == doctest::Approx(S / (g - 1.0)).epsilon(1e-12));
        CHECK(l1.amplitudes[k].real() == doctest::Approx(-S * g / (g - 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("controls approach perfect nulling as g grows") {
    // large separation drives g -> very large within the window
    const auto ens = make_constant_ensemble({{2.0, 0.0}, {-2.0, 0.0}}, {0.6, 0.4}, 3.0, 3000);
    const CommitmentTrajectory traj = g_trajectory(ens);
    const auto [l0, l1] = control_waveforms(traj, ens, 1e9);
    CHECK(l0.amplitudes.back().real() == doctest::Approx(-2.0).epsilon(1e-3));
    CHECK(l1.amplitudes.back().real() == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("flip-flop control at t = 0 equals the single-slice optimal control") {
    const auto ens =
        make_constant_ensemble({{1.0, 0.0}, {-1.0, 0.0}}, {2.0 / 3.0, 1.0 / 3.0}, 1.0, 10);
    const CommitmentTrajectory traj = g_trajectory(ens);
    const auto [l0, l1] = control_waveforms(traj, ens, 1e6);
    const Amplitude lstar = optimal_control_binary({1.0, 0.0}, {-1.0, 0.0}, 2.0 / 3.0, 1.0 / 3.0);
    CHECK(l0.amplitudes[0].real() == doctest::Approx(lstar.real()).epsilon(1e-12));
}

TEST_CASE("identical waveforms decide by the prior argmax") {
    const auto ens = make_constant_ensemble({{1.0, 0.0}, {1.0, 0.0}}, {0.7, 0.3}, 1.0, 100);
    DetectionParams params;
    params.rng_seed = 5;
    const DolinarReceiver receiver(ens, params);
    for (std::size_t h : {0u, 1u}) {
        Rng rng(11 + h);
        const TrialRecord rec = receiver.simulate_trial(h, rng);
        CHECK(rec.decision == 0);  // argmax prior
        CHECK(rec.click_slices.empty());  // committed hypothesis is nulled exactly
    }
}

TEST_CASE("trials are bit-identical under the same seed") {
    const auto ens =
        make_constant_ensemble({{0.0, 0.0}, {1.0, 0.0}}, {0.6, 0.4}, 1.0, 500);
    DetectionParams params;
    const DolinarReceiver receiver(ens, params);
    Rng r1(42), r2(42);
    const TrialRecord a = receiver.simulate_trial(1, r1);
    const TrialRecord b = receiver.simulate_trial(1, r2);
    CHECK(a.decision == b.decision);
    CHECK(a.click_slices == b.click_slices);
    CHECK(a.final_posterior.probs == b.final_posterior.probs);
}

TEST_CASE("the trajectory is click-independent and never modified by trials") {
    const auto ens =
        make_constant_ensemble({{0.0, 0.0}, {1.0, 0.0}}, {0.6, 0.4}, 1.0, 200);
    DetectionParams params;
    const DolinarReceiver receiver(ens, params);
    const std::vector<double> g_before = receiver.trajectory().g;
    Rng rng(1);
    TrialRecord first = receiver.simulate_trial(1, rng);
    TrialRecord second = receiver.simulate_trial(0, rng);
    CHECK(first.click_slices != second.click_slices);  // different histories
    CHECK(receiver.trajectory().g == g_before);
}

TEST_CASE("relabeling handles a minority-first prior") {
    // priors favour hypothesis 1; decision on no clicks must be 1
    const auto ens = make_constant_ensemble({{1.0, 0.0}, {1.0, 0.0}}, {0.2, 0.8}, 1.0, 50);
    DetectionParams params;
    const DolinarReceiver receiver(ens, params);
    Rng rng(3);
    CHECK(receiver.simulate_trial(0, rng).decision == 1);
}

TEST_CASE("complex binary ensembles reduce to the rotated real problem") {
    // rotate an OOK pair by a phase and offset it; error statistics match the
    // real-axis version trial by trial under the same seed
    const double S = 1.2, pi0 = 0.65;
    const std::size_t n = 2000;
    const auto real_ens = make_constant_ensemble({{0.0, 0.0}, {S, 0.0}}, {pi0, 1.0 - pi0}, 1.0, n);
    const Amplitude rot{std::cos(0.8), std::sin(0.8)};
    const auto cplx_ens = make_constant_ensemble(
        {Amplitude{0.0, 0.4} * rot, (Amplitude{S, 0.4}) * rot}, {pi0, 1.0 - pi0}, 1.0, n);
    DetectionParams params;
    const DolinarReceiver a(real_ens, params), b(cplx_ens, params);
    CHECK(a.trajectory().m.back() == doctest::Approx(b.trajectory().m.back()).epsilon(1e-12));
    int mismatches = 0;
    for (int t = 0; t < 200; ++t) {
        Rng r1(1000 + t), r2(1000 + t);
        const auto ra = a.simulate_trial(t % 2, r1);
        const auto rb = b.simulate_trial(t % 2, r2);
        if (ra.decision != rb.decision || ra.click_slices != rb.click_slices) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("Monte Carlo error approaches the YKL limit") {
    // moderate-size in-test check; the acceptance suite runs the full version
    const double pi0 = 0.7, m = 0.5, T = 1.0;
    const double S = std::sqrt(m / T);
    const std::size_t n_slices = 2000;
    const auto ens = make_constant_ensemble({{0.0, 0.0}, {S, 0.0}}, {pi0, 1.0 - pi0}, T, n_slices);
    DetectionParams params;
    params.l_max = 1e3 * S;
    const DolinarReceiver receiver(ens, params);

    const int trials = 20000;
    int errors = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(77, static_cast<std::uint64_t>(t)));
        const std::size_t true_h = rng.next_unit() < pi0 ? 0 : 1;
        errors += receiver.simulate_trial(true_h, rng).decision != true_h;
    }
    const double p_hat = static_cast<double>(errors) / trials;
    const double target = ykl_error(pi0, m);
    const double se = std::sqrt(target * (1.0 - target) / trials);
    CHECK(std::abs(p_hat - target) <= 4.0 * se + 0.01 * target);
}
