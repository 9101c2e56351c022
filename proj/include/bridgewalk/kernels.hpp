// kernels.hpp — exact return/first-return sequences, escape probabilities,
// spectral radius fits, generating-function values, tree closed forms, and
// the moment/ratio inequality diagnostics.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bridgewalk/walk_model.hpp"

namespace bridgewalk {

// u[n] = probability of being back at the origin after n steps, n = 0..N.
// log_u carries the log-domain companion (-inf where u_n = 0). When the
// sequence comes from Monte Carlo, se holds per-entry standard errors.
struct ReturnSequence {
    std::string model_id;
    int period = 1;
    std::vector<double> u;
    std::vector<double> log_u;
    std::vector<double> se;
    bool monte_carlo = false;

    int nmax() const { return static_cast<int>(u.size()) - 1; }
};

// f[n] = probability that the first return happens at step n (f[0] unused).
// F_partial[k] = sum of f_1..f_k.
struct FirstReturnSequence {
    int period = 1;
    std::vector<double> f;
    std::vector<double> log_f;
    std::vector<double> F_partial;

    int nmax() const { return static_cast<int>(f.size()) - 1; }
};

// Truncated escape probability with an explicitly reported tail estimate.
// The tail is never silently folded into `truncated`; `with_tail` is the
// combined value for callers that want it.
struct EscapeReport {
    double truncated = 0.0;
    double tail_estimate = 0.0;
    double with_tail = 0.0;
    bool stabilized = false;   // partial sums moved < 1e-6 over the last quarter
    bool tail_fitted = false;
    double fit_rho = 0.0;      // fitted geometric base of the f tail (1 = none)
    double fit_gamma = 0.0;    // fitted polynomial exponent of the f tail
};

// Least-squares fit of log u_n over the top half of the window:
//   corrected:   log u_n ~ c - n log(rho) - gamma log(n)
//   uncorrected: rho = u_N^(-1/N) at the last nonzero entry
struct SpectralFit {
    double rho = 1.0;
    double gamma = 0.0;
    double intercept = 0.0;
    bool corrected = true;
    int window_lo = 0;
    int window_hi = 0;
    double max_abs_residual = 0.0;
    bool residuals_monotone = true;  // diagnostic only, never fatal
};

// Truncated power-series value with an explicit tail bound.
struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
    bool tail_conclusive = false;
    double z = 0.0;
    int64_t terms = 0;
};

struct GeneratingSummary {
    SpectralFit rho_fit;
    SeriesValue F_at_rho;
};

// Closed forms for the simple walk on the homogeneous tree of degree b+1,
// obtained from the height chain on Z+ (up b/(b+1), down 1/(b+1)).
struct TreeClosedForms {
    int b = 2;
    double lambda = 0.0;    // b/(b+1)^2
    double escape = 0.0;    // F = 1/b
    double rho = 0.0;       // (b+1)/(2 sqrt b)
    double F_at_rho = 0.0;  // (b+1)/(2b)

    // log of the first-return coefficient at step 2k
    double log_f2k(int64_t k) const;
    double f2k(int64_t k) const;

    // Coefficients of the return generating function U(z) up to z^nmax,
    // expanded independently of any probabilistic recursion.
    std::vector<double> u_series(int nmax) const;

    // Truncated first-return series sum_{2k <= K} f_{2k} z^{2k} with a
    // k^{-3/2}-profile tail bound.
    SeriesValue first_return_series(double z, int64_t K) const;
};

TreeClosedForms tree_closed_forms(int b);

// One violated inequality instance.
struct MomentViolation {
    std::string family;
    int i = 0;
    int j = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct MomentReport {
    std::vector<MomentViolation> violations;
    int64_t checks = 0;

    bool clean() const { return violations.empty(); }
};

struct RatioTrajectory {
    int r = 0;
    std::vector<std::pair<int, double>> values;  // (n, u_{n-r} / (rho^r u_n))
};

struct RatioDiagnostics {
    std::vector<std::pair<int, double>> u2n_over_u4n;  // grid of (n, u_{2n}/u_{4n})
    double sup_u2n_over_u4n = 0.0;
    double sup_shifted_ratio = 0.0;  // sup over r <= (1-eta) n of u_{n-r}/(rho^r u_n)
    std::vector<RatioTrajectory> fixed_r;
    std::string verdict_ratio_grid;
    std::string verdict_shifted;
};

// --- operations -----------------------------------------------------------

// Exact n-step return probabilities. Routes: tree -> height-chain recursion;
// lattice d=1 (any jumps) -> line convolution; lattice simple d>=2 -> exact
// axis decomposition over multinomial step splits; lamplighter d=1 ->
// range-weighted projection identity. Lamplighter d>=2 and windows beyond
// the per-model budget are refused (Monte Carlo must be requested).
ReturnSequence return_probabilities(const WalkModel& model, int nmax);

// Monte Carlo fallback with standard errors (the explicit request).
ReturnSequence mc_return_probabilities(const WalkModel& model, int nmax, int64_t trials, uint64_t seed);

// Renewal deconvolution f_n = u_n - sum_{k<n} f_k u_{n-k}; plain arithmetic
// with a clamp-and-warn floor at -1e-12.
FirstReturnSequence first_return_probabilities(const ReturnSequence& u);

EscapeReport escape_probability(const FirstReturnSequence& f);

SpectralFit spectral_radius_estimate(const ReturnSequence& u, bool corrected = true);

// Truncated generating value sum_{n<=K} coeff_n z^n with a fitted tail bound.
// The return-series overload includes the n = 0 term. Throws divergence when
// z exceeds the fitted (or supplied) radius.
SeriesValue generating_value(const ReturnSequence& u, double z, int64_t K);
SeriesValue generating_value(const FirstReturnSequence& f, double z, int64_t K,
                             std::optional<double> rho_cap = std::nullopt);

// Finite-window checks of the spectral-measure consequences:
//   even-monotone        u_{2n+2} <= u_{2n}
//   odd-dominated        u_{2n+1} <= u_{2n}
//   product-monotone     u_{2r} u_{2n-2r} non-increasing in r on r <= (n-1)/2
//   supermultiplicative  u_{2k+2l} >= u_{2k} u_{2l}
//   ratio-lower-bound    u_{2n+2r}/u_{2n} >= (n/(n+r)) (r/(n+r))^{r/n} u_{2n}^{r/n}
// Comparisons run in log domain with slack 1e-12; violations are data.
MomentReport verify_moment_properties(const ReturnSequence& u);

RatioDiagnostics ratio_diagnostics(const ReturnSequence& u, double rho, double eta);

}  // namespace bridgewalk
