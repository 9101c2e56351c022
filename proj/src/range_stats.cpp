// range_stats.cpp — path statistics, exact range means, and the MC harness.
#include "bridgewalk/range_stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <thread>
#include <unordered_set>

#include "bridgewalk/logspace.hpp"

namespace bridgewalk {

int64_t range_of_path(const WalkModel& model, std::span<const Vertex> states) {
    if (states.size() < 2) fail(errc::invalid_spec, "range needs a path of length >= 1");
    std::unordered_set<std::string> keys;
    keys.reserve(states.size());
    for (size_t k = 0; k + 1 < states.size(); ++k) keys.insert(model.canonical_key(states[k]));
    return static_cast<int64_t>(keys.size());
}

int64_t range_of_path(const WalkModel& model, const BridgePath& path) {
    return range_of_path(model, std::span<const Vertex>(path.states));
}

int64_t max_distance_of_path(const WalkModel& model, std::span<const Vertex> states) {
    int64_t best = 0;
    for (const Vertex& v : states) best = std::max(best, model.graph_distance(v));
    return best;
}

int64_t max_distance_of_path(const WalkModel& model, const BridgePath& path) {
    return max_distance_of_path(model, std::span<const Vertex>(path.states));
}

double exact_unconditioned_range_mean(const FirstReturnSequence& f, int n) {
    if (n < 1) fail(errc::invalid_spec, "range mean needs n >= 1");
    if (f.nmax() < n - 1) fail(errc::invalid_spec, "first-return sequence too short for this n");
    double mean = 0.0;
    for (int k = 0; k < n; ++k) mean += 1.0 - f.F_partial[k];
    return mean;
}

double exact_bridge_range_mean(const ReturnSequence& u, const FirstReturnSequence& f, int n) {
    if (n < 1) fail(errc::invalid_spec, "range mean needs n >= 1");
    if (u.nmax() < n || f.nmax() < n) fail(errc::invalid_spec, "kernel sequences too short for this n");
    if (n % u.period != 0 || u.u[n] <= 0.0)
        fail(errc::period, "bridge range mean undefined: u_n = 0 at n = " + std::to_string(n));
    double correction = 0.0;
    for (int r = u.period; r <= n; r += u.period) {
        if (f.f[r] <= 0.0) continue;
        double log_term = f.log_f[r] + u.log_u[n - r] - u.log_u[n];
        correction += static_cast<double>(n - r + 1) * std::exp(log_term);
    }
    return static_cast<double>(n) + 1.0 - correction;
}

namespace {

struct TrialSums {
    unsigned __int128 range = 0;
    unsigned __int128 range_sq = 0;
    unsigned __int128 maxdist = 0;
    bool distance_ok = true;

    void add(const TrialSums& o) {
        range += o.range;
        range_sq += o.range_sq;
        maxdist += o.maxdist;
        distance_ok = distance_ok && o.distance_ok;
    }
};

// One trial; integer outputs keep the reduction exact and order-free.
void run_trial(const WalkModel& model, int n, RangeMode mode, uint64_t seed, int64_t trial,
               const BackwardTable* table, const LamplighterBridgeSampler* lamp, TrialSums& sums) {
    SplitRng rng(seed, static_cast<uint64_t>(trial));
    int64_t range = 0, maxdist = 0;
    const bool want_dist = model.distance_supported();
    if (mode == RangeMode::unconditioned) {
        std::unordered_set<std::string> keys;
        keys.reserve(static_cast<size_t>(n));
        Vertex v = model.origin();
        keys.insert(model.canonical_key(v));
        if (want_dist) maxdist = 0;
        for (int k = 1; k <= n; ++k) {
            v = model.random_neighbor(v, rng);
            if (k <= n - 1) keys.insert(model.canonical_key(v));
            if (want_dist) maxdist = std::max(maxdist, model.graph_distance(v));
        }
        range = static_cast<int64_t>(keys.size());
    } else if (model.kind() == ModelKind::lamplighter) {
        LampBridgePath path = lamp->sample(rng);
        range = range_of_path(model, std::span<const Vertex>(path.states));
        if (want_dist) maxdist = max_distance_of_path(model, std::span<const Vertex>(path.states));
    } else {
        BridgePath path = sample_bridge(model, *table, rng);
        range = range_of_path(model, path);
        if (want_dist) maxdist = max_distance_of_path(model, path);
    }
    sums.range += static_cast<unsigned __int128>(range);
    sums.range_sq += static_cast<unsigned __int128>(range) * static_cast<unsigned __int128>(range);
    sums.maxdist += static_cast<unsigned __int128>(maxdist);
    sums.distance_ok = sums.distance_ok && want_dist;
}

}  // namespace

RangeSummary mc_range_experiment(const WalkModel& model, int n, int64_t trials, RangeMode mode,
                                 uint64_t seed, int workers, int64_t max_attempts) {
    if (n < 1) fail(errc::invalid_spec, "experiment needs n >= 1");
    if (trials < 1) fail(errc::invalid_spec, "experiment needs trials >= 1");

    std::unique_ptr<BackwardTable> table;
    std::unique_ptr<LamplighterBridgeSampler> lamp;
    if (mode == RangeMode::bridge) {
        if (model.kind() == ModelKind::lamplighter)
            lamp = std::make_unique<LamplighterBridgeSampler>(
                LamplighterBridgeSampler::build(model.dim(), n, max_attempts));
        else
            table = std::make_unique<BackwardTable>(BackwardTable::build(model, n));
    }

    if (workers <= 0) {
        unsigned hc = std::thread::hardware_concurrency();
        workers = hc == 0 ? 1 : static_cast<int>(hc);
    }
    workers = static_cast<int>(std::min<int64_t>(workers, trials));

    std::vector<TrialSums> per_worker(workers);
    std::atomic<int64_t> next{0};
    auto body = [&](int w) {
        for (;;) {
            int64_t t = next.fetch_add(1);
            if (t >= trials) break;
            run_trial(model, n, mode, seed, t, table.get(), lamp.get(), per_worker[w]);
        }
    };
    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
        for (auto& th : pool) th.join();
    }

    TrialSums total;
    for (const auto& s : per_worker) total.add(s);

    RangeSummary out;
    out.model_id = model.id();
    out.n = n;
    out.mode = mode;
    out.trials = trials;
    out.seed = seed;
    const long double T = static_cast<long double>(trials);
    const long double sum = static_cast<long double>(total.range);
    const long double sumsq = static_cast<long double>(total.range_sq);
    const long double nn = static_cast<long double>(n);
    out.mean_range = static_cast<double>(sum / (T * nn));
    if (trials > 1) {
        long double var_raw = (sumsq - sum * sum / T) / (T - 1.0L);
        out.var_range = static_cast<double>(var_raw / (nn * nn));
        out.ci95 = 1.96 * std::sqrt(out.var_range / static_cast<double>(trials));
    }
    out.mean_maxdist = total.distance_ok
                           ? static_cast<double>(static_cast<long double>(total.maxdist) / T)
                           : std::nan("");
    return out;
}

ConvergenceTable convergence_table(const WalkModel& model, const std::vector<int>& n_grid,
                                   RangeMode mode, std::optional<double> limit) {
    if (n_grid.empty()) fail(errc::invalid_spec, "convergence table needs a nonempty n grid");
    int nmax = *std::max_element(n_grid.begin(), n_grid.end());
    ReturnSequence u = return_probabilities(model, nmax);
    FirstReturnSequence f = first_return_probabilities(u);

    ConvergenceTable table;
    table.limit = limit;
    std::vector<std::pair<double, double>> loglog;
    for (int n : n_grid) {
        ConvergenceRow row;
        row.n = n;
        double mean = mode == RangeMode::bridge ? exact_bridge_range_mean(u, f, n)
                                                : exact_unconditioned_range_mean(f, n);
        row.exact_mean_over_n = mean / n;
        if (limit) row.gap_to_limit = std::abs(mean / n - *limit);
        loglog.emplace_back(static_cast<double>(n), mean);
        table.rows.push_back(row);
    }
    if (limit && *limit == 0.0 && loglog.size() >= 2) table.fitted_exponent = fitted_loglog_slope(loglog);
    return table;
}

double fitted_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) fail(errc::invalid_spec, "slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(points.size());
    for (auto [x, y] : points) {
        double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace bridgewalk
