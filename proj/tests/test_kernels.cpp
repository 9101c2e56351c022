#include <doctest.h>

#include <cmath>

#include "bridgewalk/kernels.hpp"
#include "bridgewalk/logspace.hpp"
#include "oracles.hpp"

using namespace bridgewalk;

TEST_SUITE("kernels") {

TEST_CASE("return probabilities match hand values and the enumeration oracle") {
    WalkModel t2 = WalkModel::tree(2);
    ReturnSequence u = return_probabilities(t2, 12);
    CHECK(u.u[0] == 1.0);
    CHECK(u.u[1] == 0.0);
    CHECK(u.u[2] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(u.u[4] == doctest::Approx(5.0 / 27).epsilon(1e-15));

    WalkModel lamp = WalkModel::lamplighter(1);
    ReturnSequence ul = return_probabilities(lamp, 8);
    CHECK(ul.u[2] == doctest::Approx(1.0 / 8).epsilon(1e-15));
    CHECK(ul.u[4] == doctest::Approx(1.0 / 16).epsilon(1e-15));

    for (const WalkModel& m : {WalkModel::tree(2), WalkModel::lattice_simple(1),
                               WalkModel::lattice_jumps({1, 2}), WalkModel::lamplighter(1)}) {
        ReturnSequence seq = return_probabilities(m, 6);
        for (int n = 1; n <= 6; ++n)
            CHECK(seq.u[n] == doctest::Approx(testing::enum_return_probability(m, n)).epsilon(1e-12));
    }
}

TEST_CASE("simple lattice kernels: axis split equals the grid walk and the closed form") {
    // d = 2: u_{2n} = (binom(2n, n) 2^{-2n})^2
    ReturnSequence u2 = return_probabilities(WalkModel::lattice_simple(2), 40);
    double a = 1.0;
    for (int k = 1; 2 * k <= 40; ++k) {
        a *= (2.0 * k - 1) / (2.0 * k);
        CHECK(u2.u[2 * k] == doctest::Approx(a * a).epsilon(1e-12));
    }
    // d = 3 against exhaustive enumeration
    WalkModel z3 = WalkModel::lattice_simple(3);
    ReturnSequence u3 = return_probabilities(z3, 6);
    for (int n = 2; n <= 6; n += 2)
        CHECK(u3.u[n] == doctest::Approx(testing::enum_return_probability(z3, n)).epsilon(1e-12));
}

TEST_CASE("window budgets are enforced") {
    CHECK_THROWS_AS(return_probabilities(WalkModel::tree(2), 5000), Error);
    CHECK_THROWS_AS(return_probabilities(WalkModel::lamplighter(1), 121), Error);
    CHECK_THROWS_AS(return_probabilities(WalkModel::lamplighter(2), 10), Error);
}

TEST_CASE("monte carlo fallback reports standard errors") {
    WalkModel lamp2 = WalkModel::lamplighter(2);
    ReturnSequence u = mc_return_probabilities(lamp2, 6, 20000, 99);
    CHECK(u.monte_carlo);
    CHECK(u.u[0] == 1.0);
    CHECK(u.se[2] > 0.0);
    // u_2 = 1/16 for d = 2: each of the 8 no-flip first moves returns with probability 1/8
    CHECK(std::abs(u.u[2] - 1.0 / 16) <= 5 * u.se[2] + 1e-9);
    ReturnSequence again = mc_return_probabilities(lamp2, 6, 20000, 99);
    CHECK(again.u == u.u);  // deterministic given the seed
}

TEST_CASE("first returns: hand values, renewal consistency, clamp behavior") {
    WalkModel t2 = WalkModel::tree(2);
    ReturnSequence u = return_probabilities(t2, 64);
    FirstReturnSequence f = first_return_probabilities(u);
    CHECK(f.f[2] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(f.f[4] == doctest::Approx(2.0 / 27).epsilon(1e-14));

    ReturnSequence us = return_probabilities(WalkModel::lattice_simple(1), 64);
    FirstReturnSequence fs = first_return_probabilities(us);
    CHECK(fs.f[2] == doctest::Approx(0.5).epsilon(1e-15));

    for (const WalkModel& m : {WalkModel::tree(3), WalkModel::lattice_jumps({1, 2}),
                               WalkModel::lamplighter(1)}) {
        ReturnSequence useq = return_probabilities(m, m.kind() == ModelKind::lamplighter ? 60 : 120);
        FirstReturnSequence fseq = first_return_probabilities(useq);
        // reconvolving f against u reproduces u
        for (int n = 1; n <= useq.nmax(); ++n) {
            double conv = 0.0;
            for (int k = 1; k <= n; ++k) conv += fseq.f[k] * useq.u[n - k];
            CHECK(std::abs(conv - useq.u[n]) <= 1e-12);
            CHECK(fseq.f[n] <= useq.u[n] + 1e-15);
        }
        CHECK(fseq.F_partial.back() <= 1.0 + 1e-12);
        for (int n = 1; n <= useq.nmax(); ++n) CHECK(fseq.F_partial[n] >= fseq.F_partial[n - 1]);
    }

    // an inconsistent return sequence trips the instability guard
    ReturnSequence bogus;
    bogus.period = 2;
    bogus.u = {1.0, 0.0, 0.5, 0.0, 0.1};
    bogus.log_u = {0.0, log_zero, std::log(0.5), log_zero, std::log(0.1)};
    CHECK_THROWS_AS(first_return_probabilities(bogus), Error);
}

TEST_CASE("escape probabilities: recurrent and transient windows") {
    WalkModel t2 = WalkModel::tree(2);
    FirstReturnSequence f = first_return_probabilities(return_probabilities(t2, 400));
    EscapeReport rep = escape_probability(f);
    CHECK(std::abs(rep.truncated - 0.5) <= 1e-6);
    CHECK(rep.stabilized);
    CHECK(rep.tail_fitted);
    CHECK(rep.fit_rho > 1.01);
    CHECK(std::abs(rep.with_tail - 0.5) <= 1e-6);

    FirstReturnSequence fs = first_return_probabilities(
        return_probabilities(WalkModel::lattice_simple(1), 2000));
    EscapeReport rs = escape_probability(fs);
    CHECK(rs.truncated > 0.97);
    CHECK(rs.truncated < 1.0);
    CHECK_FALSE(rs.stabilized);  // partial sums still drifting at 1e-6 resolution
}

TEST_CASE("spectral radius fits") {
    ReturnSequence u = return_probabilities(WalkModel::tree(2), 400);
    SpectralFit fit = spectral_radius_estimate(u, true);
    const double rho_true = 3.0 / (2.0 * std::sqrt(2.0));
    CHECK(std::abs(fit.rho - rho_true) / rho_true < 0.005);
    CHECK(fit.gamma > 1.2);
    CHECK(fit.gamma < 1.8);

    SpectralFit raw = spectral_radius_estimate(u, false);
    CHECK(raw.rho > 1.0);  // crude extrapolation overshoots the subexponential factor

    ReturnSequence us = return_probabilities(WalkModel::lattice_simple(1), 1024);
    SpectralFit flat = spectral_radius_estimate(us, true);
    CHECK(std::abs(flat.rho - 1.0) < 1e-3);

    ReturnSequence u3 = return_probabilities(WalkModel::tree(3), 400);
    SpectralFit fit3 = spectral_radius_estimate(u3, true);
    CHECK(std::abs(fit3.rho - 2.0 / std::sqrt(3.0)) / fit3.rho < 0.005);

    ReturnSequence tiny = return_probabilities(WalkModel::tree(2), 40);
    CHECK_THROWS_AS(spectral_radius_estimate(tiny, true), Error);
}

TEST_CASE("generating values") {
    WalkModel t2 = WalkModel::tree(2);
    ReturnSequence u = return_probabilities(t2, 400);
    FirstReturnSequence f = first_return_probabilities(u);

    SeriesValue f1 = generating_value(f, 1.0, 400);
    CHECK(f1.value == doctest::Approx(f.F_partial[400]).epsilon(1e-14));

    SeriesValue u0 = generating_value(u, 0.0, 400);
    CHECK(u0.value == 1.0);

    const double rho = 3.0 / (2.0 * std::sqrt(2.0));
    SeriesValue frho = generating_value(f, rho, 400, rho);
    CHECK(std::abs(frho.value + frho.tail_bound - 0.75) < 0.02);

    CHECK_THROWS_AS(generating_value(f, 1.2, 400, rho), Error);

    // recurrent walk: evaluation at z = 1 goes through despite fit noise
    FirstReturnSequence fz =
        first_return_probabilities(return_probabilities(WalkModel::lattice_simple(1), 256));
    SeriesValue fz1 = generating_value(fz, 1.0, 256);
    CHECK(fz1.value == doctest::Approx(fz.F_partial[256]).epsilon(1e-14));
}

TEST_CASE("tree closed forms") {
    TreeClosedForms t = tree_closed_forms(2);
    CHECK(t.lambda == doctest::Approx(2.0 / 9).epsilon(1e-15));
    CHECK(t.escape == 0.5);
    CHECK(4.0 * t.lambda * t.rho * t.rho == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.f2k(1) == doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(t.f2k(2) == doctest::Approx(2.0 / 27).epsilon(1e-13));

    std::vector<double> series = t.u_series(8);
    CHECK(series[0] == 1.0);
    CHECK(series[2] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(series[4] == doctest::Approx(5.0 / 27).epsilon(1e-14));
    CHECK(series[3] == 0.0);

    // closed-form series against the probabilistic recursion, several b
    for (int b : {2, 3, 4}) {
        TreeClosedForms tb = tree_closed_forms(b);
        ReturnSequence u = return_probabilities(WalkModel::tree(b), 64);
        FirstReturnSequence f = first_return_probabilities(u);
        std::vector<double> s = tb.u_series(64);
        for (int n = 2; n <= 64; n += 2) {
            CHECK(std::abs(u.u[n] - s[n]) / s[n] < 1e-12);
            CHECK(std::abs(f.f[n] - tb.f2k(n / 2)) / tb.f2k(n / 2) < 1e-12);
        }
    }

    SeriesValue frho = t.first_return_series(t.rho, 20000);
    CHECK(std::abs(frho.value - 0.75) < 0.01);
    CHECK(std::abs(frho.value - 0.75) <= frho.tail_bound);
    CHECK_THROWS_AS(t.first_return_series(t.rho * 1.01, 100), Error);
}

TEST_CASE("moment inequality suite") {
    for (const WalkModel& m : {WalkModel::tree(2), WalkModel::lattice_simple(2)}) {
        ReturnSequence u = return_probabilities(m, 200);
        MomentReport rep = verify_moment_properties(u);
        CHECK(rep.clean());
        CHECK(rep.checks > 1000);
    }
    // supermultiplicativity instance from the computed tree table
    ReturnSequence u = return_probabilities(WalkModel::tree(2), 8);
    CHECK(u.u[4] >= u.u[2] * u.u[2]);

    // adversarial sequence: u_4 > u_2 violates even-monotonicity
    ReturnSequence bad;
    bad.period = 2;
    bad.u = {1.0, 0.0, 0.2, 0.0, 0.6};
    bad.log_u = {0.0, log_zero, std::log(0.2), log_zero, std::log(0.6)};
    MomentReport rep = verify_moment_properties(bad);
    CHECK_FALSE(rep.clean());
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.family == "even-monotone") found = true;
    CHECK(found);
}

TEST_CASE("ratio diagnostics") {
    ReturnSequence u2 = return_probabilities(WalkModel::lattice_simple(2), 400);
    RatioDiagnostics d2 = ratio_diagnostics(u2, 1.0, 0.5);
    CHECK(d2.u2n_over_u4n.back().second == doctest::Approx(2.0).epsilon(0.05));
    CHECK(d2.verdict_ratio_grid.find("bounded") != std::string::npos);

    ReturnSequence ut = return_probabilities(WalkModel::tree(2), 400);
    const double rho = 3.0 / (2.0 * std::sqrt(2.0));
    RatioDiagnostics dt = ratio_diagnostics(ut, rho, 0.5);
    CHECK(dt.verdict_ratio_grid.find("growing") != std::string::npos);
    for (const auto& traj : dt.fixed_r) {
        if (traj.r == 0) {
            for (auto [n, v] : traj.values) CHECK(v == 1.0);
        }
        if (traj.r == 2) {
            CHECK(std::abs(traj.values.back().second - 1.0) < 0.05);
        }
    }
    CHECK_THROWS_AS(ratio_diagnostics(ut, rho, 1.5), Error);
}

}  // TEST_SUITE
