// bridge.hpp — exact bridge sampling by backward conditioning, exhaustive
// small-n bridge enumeration (the correctness oracle), and the lamplighter
// projection machinery: the (position, min, max) range DP of the 1-d simple
// walk, the range-reweighted projection law, and the full lamplighter bridge
// sampler.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bridgewalk/rng.hpp"
#include "bridgewalk/walk_model.hpp"

namespace bridgewalk {

// G_m(v) = probability that a walk started at v sits at the origin after m
// steps, for every remaining time m in [0, n]. Stored in log domain. Trees
// reduce to heights; lattices store the forward distribution grid per m
// (G_m(v) = P^m(origin, v) by step-law symmetry).
class BackwardTable {
public:
    static BackwardTable build(const WalkModel& model, int n);

    int n() const { return n_; }
    ModelKind kind() const { return kind_; }

    double log_g(const WalkModel& model, int m, const Vertex& v) const;
    double log_g_height(int m, int h) const;  // tree fast path
    double log_u(int m) const;                // log G_m(origin)

private:
    BackwardTable() = default;

    ModelKind kind_ = ModelKind::tree;
    int n_ = 0;
    int dim_ = 0;
    int jmax_ = 1;
    std::vector<std::vector<double>> tree_log_g_;     // [m][h], h <= m
    std::vector<std::vector<double>> lattice_log_g_;  // [m][cell], box radius m*jmax
};

struct BridgePath {
    std::string model_id;
    int n = 0;
    bool conditioned = true;
    std::vector<Vertex> states;  // S_0..S_n
};

// Doob-conditioned one-step law at time k: P(step to w) proportional to
// P(v, w) G_{n-k-1}(w), normalized locally in log domain.
std::vector<std::pair<Vertex, double>> bridge_step_distribution(const WalkModel& model,
                                                                const BackwardTable& table,
                                                                const Vertex& v, int k);

BridgePath sample_bridge(const WalkModel& model, const BackwardTable& table, SplitRng& rng);

// Exhaustive enumeration of all n-step paths that return to the origin, with
// exact conditional probabilities. total_mass equals u_n.
struct EnumeratedBridges {
    int n = 0;
    std::vector<BridgePath> paths;
    std::vector<double> cond_prob;
    double total_mass = 0.0;
};

EnumeratedBridges enumerate_bridges(const WalkModel& model, int n);

// Joint law of (bridge event, range) for the n-step simple walk on Z:
// q[r] = P{S_n = 0 and |{S_0..S_{n-1}}| = r}. srw_u_n = sum_r q[r].
struct ProjectionRangeTable {
    int n = 0;
    std::vector<double> q;  // index r = 0..n+1, q[0] unused
    double srw_u_n = 0.0;
};

ProjectionRangeTable projection_range_joint(int n);

// One DP sweep yields the whole curve: per-step q tables for even m <= nmax
// and the lamplighter return probabilities u_m = sum_r 2^{-r} q_m[r].
struct ProjectionCurve {
    int nmax = 0;
    std::vector<ProjectionRangeTable> by_n;  // entry per m = 0..nmax (odd ones empty)
    std::vector<double> lamplighter_u;       // size nmax+1
};

ProjectionCurve projection_range_curve(int nmax);

// P{projection range = r} for the lamplighter bridge: 2^{-r} q_r normalized.
// The normalizer equals the lamplighter return probability u_n.
std::vector<double> lamplighter_projection_pmf(const ProjectionRangeTable& q);
double lamplighter_projection_denominator(const ProjectionRangeTable& q);
double expected_projection_range(const ProjectionRangeTable& q);

struct LampBridgePath {
    std::vector<Vertex> states;    // (lamps, marker) per step
    std::vector<uint8_t> toggles;  // toggle decision per step
    double weight = 1.0;           // 1 for rejection-sampled output
    int attempts = 1;              // proposals consumed (rejection mode)
};

// Exact lamplighter (d = 1) bridge sampler. Proposes exact Z-bridges,
// accepts with probability 2^{-(range-1)}, then draws lamp toggles uniformly
// over the parity-feasible assignments: per visited site with v departures
// the first v-1 toggles are fair coins, the last is forced to even parity.
class LamplighterBridgeSampler {
public:
    static LamplighterBridgeSampler build(int dim, int n, int64_t max_attempts = 1'000'000,
                                          bool importance = false);

    LampBridgePath sample(SplitRng& rng) const;

    int n() const { return n_; }
    double acceptance_probability() const { return acceptance_; }
    const ProjectionRangeTable& range_table() const { return q_; }

    // Exact law of one full output path (used by the enumeration oracle):
    // P(path) = 4^{-n} / u_n with u_n the lamplighter return probability.
    double path_log_prob(const LampBridgePath& path) const;

private:
    LamplighterBridgeSampler() = default;

    int n_ = 0;
    int64_t max_attempts_ = 0;
    bool importance_ = false;
    double acceptance_ = 0.0;
    double log_lamp_u_ = 0.0;
    WalkModel z_model_ = WalkModel::lattice_simple(1);
    std::shared_ptr<const BackwardTable> z_table_;
    ProjectionRangeTable q_;
};

}  // namespace bridgewalk
