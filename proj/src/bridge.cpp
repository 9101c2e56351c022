// bridge.cpp — backward conditioning tables, bridge samplers, the exhaustive
// enumeration oracle, and the lamplighter projection machinery.
#include "bridgewalk/bridge.hpp"

#include <algorithm>
#include <cmath>

#include "bridgewalk/logspace.hpp"

namespace bridgewalk {

namespace {

int64_t ipow(int64_t base, int exp) {
    int64_t r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

}  // namespace

// --- BackwardTable ----------------------------------------------------------

BackwardTable BackwardTable::build(const WalkModel& model, int n) {
    if (n < 0) fail(errc::invalid_spec, "backward table needs n >= 0");
    if (model.period() == 2 && n % 2 != 0)
        fail(errc::period, "bridge length " + std::to_string(n) + " is not a multiple of the period 2");

    BackwardTable t;
    t.kind_ = model.kind();
    t.n_ = n;
    t.dim_ = model.dim();
    t.jmax_ = model.max_jump();

    switch (model.kind()) {
        case ModelKind::tree: {
            if (n > 4096) fail(errc::budget, "tree backward table capped at n = 4096");
            const int b = model.branching();
            const double up = static_cast<double>(b) / (b + 1), down = 1.0 / (b + 1);
            // G_m(h) = sum_w P(h, w) G_{m-1}(w) over the height chain:
            // from h >= 1 step down with 1/(b+1) or up with b/(b+1); the root
            // steps up with probability 1. Heights above m cannot reach 0.
            std::vector<std::vector<double>> g(n + 1);
            g[0] = {1.0};
            for (int m = 1; m <= n; ++m) {
                g[m].assign(m + 1, 0.0);
                auto at = [&](int h) { return (h >= 0 && h < static_cast<int>(g[m - 1].size())) ? g[m - 1][h] : 0.0; };
                g[m][0] = at(1);
                for (int h = 1; h <= m; ++h) g[m][h] = down * at(h - 1) + up * at(h + 1);
            }
            t.tree_log_g_.resize(n + 1);
            for (int m = 0; m <= n; ++m) {
                t.tree_log_g_[m].resize(m + 1);
                for (int h = 0; h <= m; ++h) t.tree_log_g_[m][h] = log_from(g[m][h]);
            }
            break;
        }
        case ModelKind::lattice: {
            const int d = model.dim();
            const int64_t reach = static_cast<int64_t>(n) * model.max_jump();
            if ((d == 1 && reach > 4096) || (d == 2 && n > 256) || (d == 3 && n > 48) || d > 3)
                fail(errc::budget, "lattice backward table budget exceeded (d=1: n*jmax <= 4096, d=2: n <= 256, d=3: n <= 48)");
            // forward distributions; G_m(v) = P^m(v, e) = P^m(e, v) by symmetry
            std::vector<std::vector<double>> layers(n + 1);
            auto side = [&](int m) { return 2 * static_cast<int64_t>(m) * model.max_jump() + 1; };
            auto cells = [&](int m) {
                int64_t c = 1;
                for (int i = 0; i < d; ++i) c *= side(m);
                return c;
            };
            layers[0] = {1.0};
            std::vector<int64_t> coord(d), target(d);
            for (int m = 1; m <= n; ++m) {
                const int64_t rp = static_cast<int64_t>(m - 1) * model.max_jump();
                const int64_t rn = static_cast<int64_t>(m) * model.max_jump();
                layers[m].assign(cells(m), 0.0);
                const auto& prev = layers[m - 1];
                for (int64_t idx = 0; idx < static_cast<int64_t>(prev.size()); ++idx) {
                    double mass = prev[idx];
                    if (mass == 0.0) continue;
                    int64_t rem = idx;
                    for (int i = d - 1; i >= 0; --i) {
                        coord[i] = rem % side(m - 1) - rp;
                        rem /= side(m - 1);
                    }
                    for (const auto& s : model.steps()) {
                        int64_t tidx = 0;
                        for (int i = 0; i < d; ++i) {
                            target[i] = coord[i] + s.move[i];
                            tidx = tidx * side(m) + (target[i] + rn);
                        }
                        layers[m][tidx] += mass * s.prob;
                    }
                }
            }
            t.lattice_log_g_.resize(n + 1);
            for (int m = 0; m <= n; ++m) {
                t.lattice_log_g_[m].resize(layers[m].size());
                for (size_t i = 0; i < layers[m].size(); ++i) t.lattice_log_g_[m][i] = log_from(layers[m][i]);
            }
            break;
        }
        case ModelKind::lamplighter:
            fail(errc::unsupported,
                 "no direct backward table for the lamplighter; use the projection bridge sampler");
    }
    return t;
}

double BackwardTable::log_g_height(int m, int h) const {
    if (m < 0 || m > n_) fail(errc::invalid_spec, "backward table index out of range");
    if (h < 0 || h > m) return log_zero;
    return tree_log_g_[m][h];
}

double BackwardTable::log_g(const WalkModel& model, int m, const Vertex& v) const {
    if (m < 0 || m > n_) fail(errc::invalid_spec, "backward table index out of range");
    switch (kind_) {
        case ModelKind::tree:
            return log_g_height(m, static_cast<int>(v.path.size()));
        case ModelKind::lattice: {
            const int64_t r = static_cast<int64_t>(m) * jmax_;
            const int64_t side = 2 * r + 1;
            int64_t idx = 0;
            for (int i = 0; i < dim_; ++i) {
                int64_t c = v.pos[i];
                if (c < -r || c > r) return log_zero;
                idx = idx * side + (c + r);
            }
            return lattice_log_g_[m][idx];
        }
        default:
            fail(errc::internal, "backward table: unsupported kind");
    }
    (void)model;
}

double BackwardTable::log_u(int m) const {
    if (kind_ == ModelKind::tree) return log_g_height(m, 0);
    const int64_t r = static_cast<int64_t>(m) * jmax_;
    const int64_t side = 2 * r + 1;
    int64_t idx = 0;
    for (int i = 0; i < dim_; ++i) idx = idx * side + r;
    return lattice_log_g_[m][idx];
}

// --- conditioned stepping ----------------------------------------------------

std::vector<std::pair<Vertex, double>> bridge_step_distribution(const WalkModel& model,
                                                                const BackwardTable& table,
                                                                const Vertex& v, int k) {
    if (k < 0 || k >= table.n()) fail(errc::invalid_spec, "bridge step index out of range");
    const int m = table.n() - k;
    auto nbrs = model.neighbors(v);
    std::vector<double> logw(nbrs.size(), log_zero);
    double norm = log_zero;
    for (size_t i = 0; i < nbrs.size(); ++i) {
        double lg = table.log_g(model, m - 1, nbrs[i].first);
        if (lg == log_zero) continue;
        logw[i] = std::log(nbrs[i].second) + lg;
        norm = log_add(norm, logw[i]);
    }
    if (norm == log_zero)
        fail(errc::unreachable_state, "no neighbor can reach the origin in the remaining time (is n a period multiple?)");
    std::vector<std::pair<Vertex, double>> out;
    out.reserve(nbrs.size());
    for (size_t i = 0; i < nbrs.size(); ++i) {
        double p = logw[i] == log_zero ? 0.0 : std::exp(logw[i] - norm);
        out.emplace_back(std::move(nbrs[i].first), p);
    }
    return out;
}

BridgePath sample_bridge(const WalkModel& model, const BackwardTable& table, SplitRng& rng) {
    BridgePath path;
    path.model_id = model.id();
    path.n = table.n();
    path.conditioned = true;
    path.states.reserve(path.n + 1);
    Vertex v = model.origin();
    path.states.push_back(v);
    for (int k = 0; k < path.n; ++k) {
        auto dist = bridge_step_distribution(model, table, v, k);
        double u = rng.next_double(), acc = 0.0;
        size_t pick = dist.size() - 1;
        for (size_t i = 0; i < dist.size(); ++i) {
            acc += dist[i].second;
            if (u < acc) {
                pick = i;
                break;
            }
        }
        v = dist[pick].first;
        path.states.push_back(v);
    }
    if (model.canonical_key(v) != model.canonical_key(model.origin()))
        fail(errc::internal, "bridge sample did not land on the origin");
    return path;
}

// --- exhaustive enumeration oracle -------------------------------------------

namespace {

void enumerate_rec(const WalkModel& model, const std::string& ekey, int n, std::vector<Vertex>& stack,
                   double mass, EnumeratedBridges& out) {
    if (static_cast<int>(stack.size()) == n + 1) {
        if (model.canonical_key(stack.back()) == ekey) {
            BridgePath p;
            p.model_id = model.id();
            p.n = n;
            p.conditioned = true;
            p.states = stack;
            out.paths.push_back(std::move(p));
            out.cond_prob.push_back(mass);  // normalized later
            out.total_mass += mass;
        }
        return;
    }
    for (auto& [w, pr] : model.neighbors(stack.back())) {
        stack.push_back(w);
        enumerate_rec(model, ekey, n, stack, mass * pr, out);
        stack.pop_back();
    }
}

}  // namespace

EnumeratedBridges enumerate_bridges(const WalkModel& model, int n) {
    if (n < 1) fail(errc::invalid_spec, "enumeration needs n >= 1");
    if (n > 8 || ipow(model.degree(), n) > 2'000'000)
        fail(errc::budget, "bridge enumeration is capped at degree^n <= 2e6 and n <= 8");
    EnumeratedBridges out;
    out.n = n;
    std::vector<Vertex> stack{model.origin()};
    enumerate_rec(model, model.canonical_key(model.origin()), n, stack, 1.0, out);
    if (out.total_mass > 0.0)
        for (double& c : out.cond_prob) c /= out.total_mass;
    return out;
}

// --- projection range DP ------------------------------------------------------
//
// States of the 1-d simple walk tracked as (width w = max - min, offset of
// min below zero, position within [min, max]). Block of (w+1)^2 entries per
// width; walk visits every site of [min, max], so the range is w + 1.

namespace {

struct RangeDpLayout {
    int nmax;
    std::vector<int64_t> off;  // block offset per width

    explicit RangeDpLayout(int n) : nmax(n), off(n + 2, 0) {
        for (int w = 0; w <= n; ++w) off[w + 1] = off[w] + static_cast<int64_t>(w + 1) * (w + 1);
    }
    int64_t size() const { return off[nmax + 1]; }
    int64_t index(int w, int minoff, int posoff) const {
        return off[w] + static_cast<int64_t>(minoff) * (w + 1) + posoff;
    }
};

}  // namespace

ProjectionCurve projection_range_curve(int nmax) {
    if (nmax < 0) fail(errc::invalid_spec, "projection DP needs nmax >= 0");
    if (nmax > 200) fail(errc::budget, "projection range DP capped at n = 200");
    RangeDpLayout L(nmax);
    std::vector<double> cur(L.size(), 0.0), nxt(L.size(), 0.0);
    cur[L.index(0, 0, 0)] = 1.0;

    ProjectionCurve curve;
    curve.nmax = nmax;
    curve.by_n.resize(nmax + 1);
    curve.lamplighter_u.assign(nmax + 1, 0.0);
    curve.lamplighter_u[0] = 1.0;
    ProjectionRangeTable t0;
    t0.n = 0;
    t0.q.assign(2, 0.0);
    t0.q[1] = 1.0;
    t0.srw_u_n = 1.0;
    curve.by_n[0] = std::move(t0);

    for (int m = 1; m <= nmax; ++m) {
        const int wcap = std::min(m - 1, nmax);  // widths reachable before this step
        for (int w = 0; w <= std::min(m, nmax); ++w) {
            int64_t lo = L.off[w], hi = L.off[w + 1];
            std::fill(nxt.begin() + lo, nxt.begin() + hi, 0.0);
        }
        for (int w = 0; w <= wcap; ++w) {
            for (int minoff = 0; minoff <= w; ++minoff) {
                for (int posoff = 0; posoff <= w; ++posoff) {
                    double mass = cur[L.index(w, minoff, posoff)];
                    if (mass == 0.0) continue;
                    mass *= 0.5;
                    // step right
                    if (posoff == w) {
                        if (w + 1 <= nmax) nxt[L.index(w + 1, minoff, w + 1)] += mass;
                    } else {
                        nxt[L.index(w, minoff, posoff + 1)] += mass;
                    }
                    // step left
                    if (posoff == 0) {
                        if (w + 1 <= nmax) nxt[L.index(w + 1, minoff + 1, 0)] += mass;
                    } else {
                        nxt[L.index(w, minoff, posoff - 1)] += mass;
                    }
                }
            }
        }
        std::swap(cur, nxt);
        // slice at position 0 (posoff == minoff)
        if (m % 2 == 0) {
            ProjectionRangeTable t;
            t.n = m;
            t.q.assign(m + 2, 0.0);
            double lamp_u = 0.0;
            for (int w = 0; w <= std::min(m, nmax); ++w) {
                double qsum = 0.0;
                for (int minoff = 0; minoff <= w; ++minoff) qsum += cur[L.index(w, minoff, minoff)];
                if (qsum != 0.0) {
                    t.q[w + 1] = qsum;
                    t.srw_u_n += qsum;
                    lamp_u += std::ldexp(qsum, -(w + 1));
                }
            }
            curve.lamplighter_u[m] = lamp_u;
            curve.by_n[m] = std::move(t);
        }
    }
    return curve;
}

ProjectionRangeTable projection_range_joint(int n) {
    if (n % 2 != 0) fail(errc::period, "the 1-d simple walk bridge needs even n");
    ProjectionCurve curve = projection_range_curve(n);
    return curve.by_n[n];
}

double lamplighter_projection_denominator(const ProjectionRangeTable& q) {
    double denom = 0.0;
    for (size_t r = 1; r < q.q.size(); ++r) denom += std::ldexp(q.q[r], -static_cast<int>(r));
    return denom;
}

std::vector<double> lamplighter_projection_pmf(const ProjectionRangeTable& q) {
    const double denom = lamplighter_projection_denominator(q);
    std::vector<double> pmf(q.q.size(), 0.0);
    if (denom <= 0.0) return pmf;
    for (size_t r = 1; r < q.q.size(); ++r) pmf[r] = std::ldexp(q.q[r], -static_cast<int>(r)) / denom;
    return pmf;
}

double expected_projection_range(const ProjectionRangeTable& q) {
    double denom = 0.0, num = 0.0;
    for (size_t r = 1; r < q.q.size(); ++r) {
        double w = std::ldexp(q.q[r], -static_cast<int>(r));
        denom += w;
        num += static_cast<double>(r) * w;
    }
    if (denom <= 0.0) fail(errc::internal, "projection table has no mass");
    return num / denom;
}

// --- lamplighter bridge sampler ------------------------------------------------

LamplighterBridgeSampler LamplighterBridgeSampler::build(int dim, int n, int64_t max_attempts,
                                                         bool importance) {
    if (dim != 1)
        fail(errc::unsupported, "exact lamplighter bridge sampling is implemented for d = 1 only");
    if (n % 2 != 0) fail(errc::period, "lamplighter bridges need even n (period 2)");
    LamplighterBridgeSampler s;
    s.n_ = n;
    s.max_attempts_ = max_attempts;
    s.importance_ = importance;
    s.z_model_ = WalkModel::lattice_simple(1);
    s.z_table_ = std::make_shared<BackwardTable>(BackwardTable::build(s.z_model_, n));
    s.q_ = projection_range_joint(n);
    double acc = 0.0;
    for (size_t r = 1; r < s.q_.q.size(); ++r)
        acc += (s.q_.q[r] / s.q_.srw_u_n) * std::ldexp(1.0, -(static_cast<int>(r) - 1));
    s.acceptance_ = acc;
    s.log_lamp_u_ = std::log(lamplighter_projection_denominator(s.q_));
    return s;
}

LampBridgePath LamplighterBridgeSampler::sample(SplitRng& rng) const {
    for (int64_t attempt = 1; attempt <= max_attempts_; ++attempt) {
        BridgePath zpath = sample_bridge(z_model_, *z_table_, rng);
        std::vector<int32_t> y(n_ + 1);
        for (int k = 0; k <= n_; ++k) y[k] = zpath.states[k].pos[0];
        int32_t lo = 0, hi = 0;
        for (int k = 0; k < n_; ++k) {
            lo = std::min(lo, y[k]);
            hi = std::max(hi, y[k]);
        }
        const int range = hi - lo + 1;

        double weight = 1.0;
        if (importance_) {
            weight = std::ldexp(1.0, -(range - 1));
        } else if (rng.next_double() >= std::ldexp(1.0, -(range - 1))) {
            continue;
        }

        // Uniform draw over parity-feasible toggle assignments: per departed
        // site, all departures but the last are fair coins; the last is
        // forced so the site's toggle count is even.
        std::vector<int> last_departure(hi - lo + 1, -1);
        for (int k = 0; k < n_; ++k) last_departure[y[k] - lo] = k;
        std::vector<uint8_t> parity(hi - lo + 1, 0);
        LampBridgePath out;
        out.weight = weight;
        out.attempts = static_cast<int>(attempt);
        out.toggles.resize(n_);
        out.states.reserve(n_ + 1);
        Vertex v;
        v.pos = {0};
        out.states.push_back(v);
        for (int k = 0; k < n_; ++k) {
            const int site = y[k] - lo;
            uint8_t toggle;
            if (k == last_departure[site])
                toggle = parity[site];  // close the parity
            else
                toggle = static_cast<uint8_t>(rng.next_u64() & 1);
            parity[site] ^= toggle;
            out.toggles[k] = toggle;
            if (toggle) {
                // maintain the sorted lit-site list
                auto it = std::lower_bound(v.lamps.begin(), v.lamps.end(), y[k]);
                if (it != v.lamps.end() && *it == y[k])
                    v.lamps.erase(it);
                else
                    v.lamps.insert(it, y[k]);
            }
            v.pos[0] = y[k + 1];
            out.states.push_back(v);
        }
        if (!out.states.back().lamps.empty() || out.states.back().pos[0] != 0)
            fail(errc::internal, "lamplighter bridge did not close at the identity");
        return out;
    }
    fail(errc::starvation,
         "lamplighter bridge rejection sampler exhausted " + std::to_string(max_attempts_) +
             " attempts; switch to importance mode (weights 2^{-range}, self-normalized)");
}

double LamplighterBridgeSampler::path_log_prob(const LampBridgePath& path) const {
    (void)path;
    return -static_cast<double>(n_) * std::log(4.0) - log_lamp_u_;
}

}  // namespace bridgewalk
