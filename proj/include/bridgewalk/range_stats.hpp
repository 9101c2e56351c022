// range_stats.hpp — range and max-distance statistics of walk paths: exact
// expectation formulas from first-entry/last-exit decompositions and the
// deterministic parallel Monte Carlo harness.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bridgewalk/bridge.hpp"
#include "bridgewalk/kernels.hpp"
#include "bridgewalk/walk_model.hpp"

namespace bridgewalk {

enum class RangeMode { unconditioned, bridge };

inline const char* range_mode_name(RangeMode m) {
    return m == RangeMode::bridge ? "bridge" : "unconditioned";
}

// Monte Carlo summary. mean_range/var_range/ci95 are in units of R_n / n;
// mean_maxdist is the raw mean of D_n = max_k d(S_k) (NaN when the word
// metric is unsupported). Derived from exact integer trial sums, so the
// summary is bit-identical for any worker count.
struct RangeSummary {
    std::string model_id;
    int n = 0;
    RangeMode mode = RangeMode::unconditioned;
    int64_t trials = 0;
    uint64_t seed = 0;
    double mean_range = 0.0;
    double var_range = 0.0;
    double ci95 = 0.0;
    double mean_maxdist = 0.0;
};

// Number of distinct vertices among S_0..S_{n-1} (the final state is
// excluded by definition).
int64_t range_of_path(const WalkModel& model, std::span<const Vertex> states);
int64_t range_of_path(const WalkModel& model, const BridgePath& path);

// max over 0 <= k <= n of the word metric at S_k.
int64_t max_distance_of_path(const WalkModel& model, std::span<const Vertex> states);
int64_t max_distance_of_path(const WalkModel& model, const BridgePath& path);

// E{R_n} = sum_{k=0}^{n-1} (1 - F_k): each vertex is counted at its last
// visit, and the no-return probability at horizon k is 1 - F_k.
double exact_unconditioned_range_mean(const FirstReturnSequence& f, int n);

// E{R_n | S_n = origin} = n + 1 - (1/u_n) sum_{r=1}^{n} (n-r+1) f_r u_{n-r}.
// The last-exit count misses the starting vertex exactly when the walk
// bridges, hence the +1. Ratios u_{n-r}/u_n are taken in log domain. This
// identity is gated by the exhaustive-enumeration oracle in the test suite.
double exact_bridge_range_mean(const ReturnSequence& u, const FirstReturnSequence& f, int n);

// trials independent paths; one splittable stream per trial index.
// max_attempts bounds the lamplighter rejection sampler per trial.
RangeSummary mc_range_experiment(const WalkModel& model, int n, int64_t trials, RangeMode mode,
                                 uint64_t seed, int workers = 0, int64_t max_attempts = 1'000'000);

struct ConvergenceRow {
    int n = 0;
    std::optional<double> exact_mean_over_n;
    std::optional<double> mc_mean_over_n;
    std::optional<double> mc_ci95;
    std::optional<double> gap_to_limit;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::optional<double> limit;
    std::optional<double> fitted_exponent;  // slope of log E{R_n} vs log n when limit is 0
};

// Exact per-n means against a supplied limit (1 - F or 1 - F(rho)); fits the
// growth exponent of the raw mean when the limit is 0 (recurrent collapse).
ConvergenceTable convergence_table(const WalkModel& model, const std::vector<int>& n_grid,
                                   RangeMode mode, std::optional<double> limit);

// least-squares slope of log y against log x
double fitted_loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace bridgewalk
