// walk_model.cpp — model construction, neighbor laws, keys, metrics, volumes.
#include "bridgewalk/walk_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace bridgewalk {

namespace {

constexpr double kProbTol = 1e-12;

void put_u32(std::string& s, uint32_t v) {
    for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void put_i32(std::string& s, int32_t v) { put_u32(s, static_cast<uint32_t>(v)); }

// Toggle site (d consecutive ints) in a flat sorted site list.
void toggle_site(std::vector<int32_t>& lamps, const int32_t* site, int d) {
    size_t n = lamps.size() / d;
    size_t lo = 0, hi = n;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (std::lexicographical_compare(lamps.begin() + mid * d, lamps.begin() + (mid + 1) * d, site, site + d))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < n && std::equal(lamps.begin() + lo * d, lamps.begin() + (lo + 1) * d, site)) {
        lamps.erase(lamps.begin() + lo * d, lamps.begin() + (lo + 1) * d);
    } else {
        lamps.insert(lamps.begin() + lo * d, site, site + d);
    }
}

// Period of a symmetric lattice walk. The walk has period 1 iff some integer
// combination of the moves sums to zero using an odd number of moves, i.e.
// iff the integer kernel of the move matrix contains a vector with odd
// coordinate sum. Kernel basis via unimodular column reduction of [M; I].
int lattice_period_structural(const std::vector<Step>& steps, int dim) {
    const int m = static_cast<int>(steps.size());
    std::vector<std::vector<long long>> col(m, std::vector<long long>(dim + m, 0));
    for (int j = 0; j < m; ++j) {
        for (int r = 0; r < dim; ++r) col[j][r] = steps[j].move[r];
        col[j][dim + j] = 1;
    }
    int pivot = 0;
    for (int row = 0; row < dim && pivot < m; ++row) {
        int nz = -1;
        for (int j = pivot; j < m; ++j)
            if (col[j][row] != 0) { nz = j; break; }
        if (nz < 0) continue;
        std::swap(col[pivot], col[nz]);
        for (int j = pivot + 1; j < m; ++j) {
            while (col[j][row] != 0) {
                long long q = col[pivot][row] / col[j][row];
                for (int r = 0; r < dim + m; ++r) col[pivot][r] -= q * col[j][r];
                std::swap(col[pivot], col[j]);
            }
        }
        ++pivot;
    }
    for (int j = pivot; j < m; ++j) {
        long long s = 0;
        for (int r = 0; r < m; ++r) s += col[j][dim + r];
        if (s % 2 != 0) return 1;
    }
    return 2;
}

std::string jump_list_id(const std::vector<Step>& steps) {
    // positive magnitudes, ascending
    std::vector<int32_t> mags;
    for (const auto& s : steps)
        if (s.move[0] > 0) mags.push_back(s.move[0]);
    std::sort(mags.begin(), mags.end());
    std::ostringstream os;
    for (size_t i = 0; i < mags.size(); ++i) os << (i ? "-" : "") << mags[i];
    return os.str();
}

}  // namespace

void WalkModel::finalize() {
    // Cross-check the structural period against short-horizon reachability:
    // collect the step counts n <= 6 at which the origin is reachable.
    const std::string ekey = canonical_key(origin());
    std::vector<std::pair<Vertex, double>> nbuf;
    std::unordered_set<std::string> next;
    std::vector<Vertex> front_v{origin()};
    for (int n = 1; n <= 6; ++n) {
        next.clear();
        std::vector<Vertex> next_v;
        for (const Vertex& v : front_v) {
            neighbors(v, nbuf);
            for (auto& [w, p] : nbuf) {
                std::string k = canonical_key(w);
                if (next.insert(k).second) next_v.push_back(w);
            }
        }
        bool returns = next.count(ekey) > 0;
        if (returns && n % period_ != 0)
            fail(errc::internal, "period cross-check failed: return at step " + std::to_string(n) +
                                     " contradicts period " + std::to_string(period_));
        front_v = std::move(next_v);
    }
}

WalkModel WalkModel::tree(int branching) {
    if (branching < 2) fail(errc::invalid_spec, "tree branching must be >= 2");
    if (branching > 255) fail(errc::invalid_spec, "tree branching too large for label keys");
    WalkModel m;
    m.kind_ = ModelKind::tree;
    m.branching_ = branching;
    m.degree_ = branching + 1;
    m.period_ = 2;  // trees have no cycles, every closed walk has even length
    m.jmax_ = 1;
    m.id_ = "tree_b" + std::to_string(branching);
    m.finalize();
    return m;
}

WalkModel WalkModel::lattice(int dim, std::vector<Step> steps) {
    if (dim < 1) fail(errc::invalid_spec, "lattice dimension must be >= 1");
    if (steps.empty()) fail(errc::invalid_spec, "empty jump set");
    double total = 0.0;
    for (const auto& s : steps) {
        if (static_cast<int>(s.move.size()) != dim) fail(errc::invalid_spec, "jump arity does not match dimension");
        if (!(s.prob > 0.0)) fail(errc::invalid_spec, "step probabilities must be strictly positive");
        bool zero = std::all_of(s.move.begin(), s.move.end(), [](int32_t c) { return c == 0; });
        if (zero) fail(errc::invalid_spec, "zero jump not allowed");
        total += s.prob;
    }
    if (std::abs(total - 1.0) > kProbTol) fail(errc::invalid_spec, "step probabilities must sum to 1");
    // Symmetry: each move must occur with the same probability as its inverse.
    for (const auto& s : steps) {
        std::vector<int32_t> inv(s.move.size());
        for (size_t i = 0; i < inv.size(); ++i) inv[i] = -s.move[i];
        double p_inv = 0.0;
        bool found = false;
        for (const auto& t : steps)
            if (t.move == inv) { p_inv += t.prob; found = true; }
        if (!found || std::abs(p_inv - s.prob) > kProbTol)
            fail(errc::symmetry, "step law is not symmetric: move and inverse have unequal probability");
    }
    // duplicate moves would make the neighbor list ill-defined
    for (size_t i = 0; i < steps.size(); ++i)
        for (size_t j = i + 1; j < steps.size(); ++j)
            if (steps[i].move == steps[j].move) fail(errc::invalid_spec, "duplicate jump in step set");

    WalkModel m;
    m.kind_ = ModelKind::lattice;
    m.dim_ = dim;
    m.degree_ = static_cast<int>(steps.size());
    m.steps_ = std::move(steps);
    for (const auto& s : m.steps_)
        for (int32_t c : s.move) m.jmax_ = std::max<int>(m.jmax_, std::abs(c));
    m.period_ = lattice_period_structural(m.steps_, dim);

    m.simple_ = static_cast<int>(m.steps_.size()) == 2 * dim;
    if (m.simple_) {
        for (const auto& s : m.steps_) {
            int nz = 0, mag = 0;
            for (int32_t c : s.move) {
                if (c != 0) ++nz;
                mag = std::max(mag, std::abs(c));
            }
            if (nz != 1 || mag != 1 || std::abs(s.prob - 1.0 / (2 * dim)) > kProbTol) {
                m.simple_ = false;
                break;
            }
        }
    }
    if (m.simple_)
        m.id_ = "lattice_d" + std::to_string(dim) + "_simple";
    else
        m.id_ = "lattice_d" + std::to_string(dim) + "_j" + jump_list_id(m.steps_);
    m.finalize();
    return m;
}

WalkModel WalkModel::lattice_simple(int dim) {
    std::vector<Step> steps;
    for (int i = 0; i < dim; ++i) {
        for (int sgn : {+1, -1}) {
            Step s;
            s.move.assign(dim, 0);
            s.move[i] = sgn;
            s.prob = 1.0 / (2.0 * dim);
            steps.push_back(std::move(s));
        }
    }
    return lattice(dim, std::move(steps));
}

WalkModel WalkModel::lattice_jumps(const std::vector<int>& magnitudes) {
    if (magnitudes.empty()) fail(errc::invalid_spec, "empty jump set");
    for (int j : magnitudes)
        if (j < 1) fail(errc::invalid_spec, "jump magnitudes must be >= 1");
    std::vector<Step> steps;
    const double p = 1.0 / (2.0 * magnitudes.size());
    for (int j : magnitudes)
        for (int sgn : {+1, -1}) steps.push_back(Step{{sgn * j}, p});
    return lattice(1, std::move(steps));
}

WalkModel WalkModel::lamplighter(int dim) {
    if (dim < 1) fail(errc::invalid_spec, "lamplighter dimension must be >= 1");
    WalkModel m;
    m.kind_ = ModelKind::lamplighter;
    m.dim_ = dim;
    m.degree_ = 4 * dim;  // (flip | keep) x (+-e_i)
    m.period_ = 2;        // every move changes the parity of the marker coordinate sum
    m.jmax_ = 1;
    m.id_ = "lamplighter_d" + std::to_string(dim);
    m.finalize();
    return m;
}

Vertex WalkModel::origin() const {
    Vertex v;
    if (kind_ == ModelKind::lattice || kind_ == ModelKind::lamplighter) v.pos.assign(dim_, 0);
    return v;
}

void WalkModel::neighbors(const Vertex& v, std::vector<std::pair<Vertex, double>>& out) const {
    out.clear();
    switch (kind_) {
        case ModelKind::lattice: {
            for (const auto& s : steps_) {
                Vertex w = v;
                for (int i = 0; i < dim_; ++i) w.pos[i] += s.move[i];
                out.emplace_back(std::move(w), s.prob);
            }
            break;
        }
        case ModelKind::tree: {
            const double p = 1.0 / (branching_ + 1);
            if (v.path.empty()) {
                for (int lbl = 0; lbl <= branching_; ++lbl) {
                    Vertex w = v;
                    w.path.push_back(static_cast<uint8_t>(lbl));
                    out.emplace_back(std::move(w), p);
                }
            } else {
                Vertex parent = v;
                parent.path.pop_back();
                out.emplace_back(std::move(parent), p);
                for (int lbl = 0; lbl < branching_; ++lbl) {
                    Vertex w = v;
                    w.path.push_back(static_cast<uint8_t>(lbl));
                    out.emplace_back(std::move(w), p);
                }
            }
            break;
        }
        case ModelKind::lamplighter: {
            const double p = 1.0 / (4.0 * dim_);
            for (int flip = 0; flip < 2; ++flip) {
                for (int i = 0; i < dim_; ++i) {
                    for (int sgn : {+1, -1}) {
                        Vertex w = v;
                        if (flip) toggle_site(w.lamps, v.pos.data(), dim_);
                        w.pos[i] += sgn;
                        out.emplace_back(std::move(w), p);
                    }
                }
            }
            break;
        }
    }
}

std::vector<std::pair<Vertex, double>> WalkModel::neighbors(const Vertex& v) const {
    std::vector<std::pair<Vertex, double>> out;
    neighbors(v, out);
    return out;
}

Vertex WalkModel::random_neighbor(const Vertex& v, SplitRng& rng) const {
    switch (kind_) {
        case ModelKind::lattice: {
            // uniform step sets are the common case; fall back to CDF walk otherwise
            double u = rng.next_double();
            double acc = 0.0;
            for (const auto& s : steps_) {
                acc += s.prob;
                if (u < acc || &s == &steps_.back()) {
                    Vertex w = v;
                    for (int i = 0; i < dim_; ++i) w.pos[i] += s.move[i];
                    return w;
                }
            }
            break;
        }
        case ModelKind::tree: {
            uint64_t c = rng.next_below(static_cast<uint64_t>(branching_ + 1));
            Vertex w = v;
            if (!v.path.empty() && c == static_cast<uint64_t>(branching_))
                w.path.pop_back();
            else
                w.path.push_back(static_cast<uint8_t>(c));
            return w;
        }
        case ModelKind::lamplighter: {
            uint64_t c = rng.next_below(static_cast<uint64_t>(4 * dim_));
            Vertex w = v;
            if (c & 1) toggle_site(w.lamps, v.pos.data(), dim_);
            int axis = static_cast<int>(c >> 2);
            w.pos[axis] += (c & 2) ? 1 : -1;
            return w;
        }
    }
    fail(errc::internal, "random_neighbor: unhandled model kind");
}

std::string WalkModel::canonical_key(const Vertex& v) const {
    std::string s;
    switch (kind_) {
        case ModelKind::lattice:
            s.reserve(1 + 4 * dim_);
            s.push_back(0x01);
            for (int i = 0; i < dim_; ++i) put_i32(s, v.pos[i]);
            break;
        case ModelKind::tree:
            s.reserve(5 + v.path.size());
            s.push_back(0x02);
            put_u32(s, static_cast<uint32_t>(v.path.size()));
            s.append(reinterpret_cast<const char*>(v.path.data()), v.path.size());
            break;
        case ModelKind::lamplighter:
            s.reserve(5 + 4 * (v.lamps.size() + dim_));
            s.push_back(0x03);
            put_u32(s, static_cast<uint32_t>(v.lamps.size() / dim_));
            for (int32_t c : v.lamps) put_i32(s, c);
            for (int i = 0; i < dim_; ++i) put_i32(s, v.pos[i]);
            break;
    }
    return s;
}

std::string key_to_hex(const std::string& key) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(key.size() * 2);
    for (unsigned char c : key) {
        out.push_back(hex[c >> 4]);
        out.push_back(hex[c & 0xf]);
    }
    return out;
}

namespace {

// Word metric on Z2 wr Z. A walk from 0 to y must depart (and may toggle)
// every lit site; on the line the optimum is a left-first or right-first
// sweep over [lo, hi], plus a two-step bounce when the endpoint itself needs
// a toggle but would only be reached on the final arrival.
int64_t lamp_distance_1d(const std::vector<int32_t>& lamps, int64_t y) {
    int64_t lo = std::min<int64_t>(0, y), hi = std::max<int64_t>(0, y);
    for (int32_t s : lamps) {
        lo = std::min<int64_t>(lo, s);
        hi = std::max<int64_t>(hi, s);
    }
    bool lit_y = std::binary_search(lamps.begin(), lamps.end(), static_cast<int32_t>(y));
    int64_t left_first = (0 - lo) + (hi - lo) + (hi - y);
    int64_t right_first = (hi - 0) + (hi - lo) + (y - lo);
    if (lit_y && y == hi) left_first += 2;
    if (lit_y && y == lo) right_first += 2;
    return std::min(left_first, right_first);
}

// One-time gate: the sweep formula must agree with BFS on the whole ball of
// radius 8 before it is trusted.
void validate_lamp_distance_once() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        WalkModel m = WalkModel::lamplighter(1);
        std::unordered_map<std::string, int> dist;
        std::deque<std::pair<Vertex, int>> queue;
        Vertex e = m.origin();
        dist[m.canonical_key(e)] = 0;
        queue.emplace_back(e, 0);
        std::vector<std::pair<Vertex, double>> nbuf;
        while (!queue.empty()) {
            auto [v, dv] = queue.front();
            queue.pop_front();
            int64_t formula = lamp_distance_1d(v.lamps, v.pos[0]);
            if (formula != dv)
                fail(errc::internal, "lamplighter distance formula disagrees with BFS at depth " +
                                         std::to_string(dv));
            if (dv == 8) continue;
            m.neighbors(v, nbuf);
            for (auto& [w, p] : nbuf) {
                std::string k = m.canonical_key(w);
                if (dist.emplace(k, dv + 1).second) queue.emplace_back(w, dv + 1);
            }
        }
    });
}

}  // namespace

bool WalkModel::distance_supported() const {
    return kind_ != ModelKind::lamplighter || dim_ == 1;
}

int64_t WalkModel::graph_distance(const Vertex& v) const {
    switch (kind_) {
        case ModelKind::tree:
            return static_cast<int64_t>(v.path.size());
        case ModelKind::lattice: {
            if (simple_) {
                int64_t d = 0;
                for (int i = 0; i < dim_; ++i) d += std::abs(static_cast<int64_t>(v.pos[i]));
                return d;
            }
            if (dim_ == 1) {
                // BFS over a band wide enough to contain some geodesic: steps
                // commute, so a shortest word can be reordered to stay within
                // jmax of [min(0,x), max(0,x)].
                int64_t x = v.pos[0];
                int64_t half = std::abs(x) + 2 * jmax_ + 1;
                std::vector<int32_t> dist(2 * half + 1, -1);
                std::deque<int64_t> queue;
                dist[half] = 0;
                queue.push_back(0);
                while (!queue.empty()) {
                    int64_t c = queue.front();
                    queue.pop_front();
                    if (c == x) return dist[c + half];
                    for (const auto& s : steps_) {
                        int64_t w = c + s.move[0];
                        if (w < -half || w > half) continue;
                        if (dist[w + half] < 0) {
                            dist[w + half] = dist[c + half] + 1;
                            queue.push_back(w);
                        }
                    }
                }
                fail(errc::internal, "lattice distance: target not reachable inside band");
            }
            // d >= 2 with a custom step set: plain hash BFS.
            std::string target = canonical_key(v);
            std::unordered_map<std::string, int64_t> dist;
            std::deque<Vertex> queue;
            dist[canonical_key(origin())] = 0;
            queue.push_back(origin());
            std::vector<std::pair<Vertex, double>> nbuf;
            while (!queue.empty()) {
                Vertex c = queue.front();
                queue.pop_front();
                std::string ck = canonical_key(c);
                if (ck == target) return dist[ck];
                int64_t dc = dist[ck];
                neighbors(c, nbuf);
                for (auto& [w, p] : nbuf) {
                    std::string k = canonical_key(w);
                    if (dist.emplace(k, dc + 1).second) queue.push_back(w);
                }
                if (dist.size() > 2'000'000)
                    fail(errc::budget, "lattice distance BFS exceeded state budget");
            }
            fail(errc::internal, "lattice distance: unreachable vertex");
        }
        case ModelKind::lamplighter: {
            if (dim_ != 1)
                fail(errc::unsupported_distance,
                     "lamplighter word metric implemented for dimension 1 only");
            validate_lamp_distance_once();
            return lamp_distance_1d(v.lamps, v.pos[0]);
        }
    }
    fail(errc::internal, "graph_distance: unhandled model kind");
}

VolumeCurve WalkModel::ball_volume(int nmax, uint64_t key_cap) const {
    if (nmax < 0) fail(errc::invalid_spec, "ball_volume: nmax must be >= 0");
    VolumeCurve curve;
    std::unordered_set<std::string> seen;
    std::vector<Vertex> frontier{origin()};
    seen.insert(canonical_key(origin()));
    curve.counts.push_back(1);
    std::vector<std::pair<Vertex, double>> nbuf;
    for (int n = 1; n <= nmax; ++n) {
        std::vector<Vertex> next;
        for (const Vertex& v : frontier) {
            neighbors(v, nbuf);
            for (auto& [w, p] : nbuf) {
                std::string k = canonical_key(w);
                if (seen.size() >= key_cap && !seen.count(k))
                    fail(errc::budget, "ball_volume: stored-key cap of " + std::to_string(key_cap) +
                                           " exceeded at radius " + std::to_string(n));
                if (seen.insert(std::move(k)).second) next.push_back(std::move(w));
            }
        }
        frontier = std::move(next);
        curve.counts.push_back(seen.size());
    }
    return curve;
}

WalkModel make_model(const ModelSpec& spec) {
    if (spec.kind == "tree") {
        if (!spec.jumps.empty() || spec.dim != 0)
            fail(errc::invalid_spec, "tree model takes only a branching parameter");
        return WalkModel::tree(spec.b);
    }
    if (spec.kind == "lattice") {
        int dim = spec.dim > 0 ? spec.dim : 1;
        if (!spec.jumps.empty()) {
            if (dim != 1) fail(errc::invalid_spec, "custom jump sets are supported for dimension 1 only");
            return WalkModel::lattice_jumps(spec.jumps);
        }
        return WalkModel::lattice_simple(dim);
    }
    if (spec.kind == "lamplighter") {
        int dim = spec.dim > 0 ? spec.dim : 1;
        return WalkModel::lamplighter(dim);
    }
    fail(errc::invalid_spec, "unknown model kind '" + spec.kind + "'");
}

}  // namespace bridgewalk
