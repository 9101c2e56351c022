// walk_model.hpp — walk families behind one abstraction: integer lattices with
// symmetric jump sets, homogeneous trees, and lamplighter groups Z2 wr Z^d.
//
// Every model exposes weighted neighbor enumeration, a canonical byte key per
// vertex, the word metric to the origin (where supported), the walk period,
// and exact ball volumes. Models are immutable after construction and safe to
// share across threads; all operations are pure functions of (model, inputs).
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bridgewalk/errors.hpp"
#include "bridgewalk/rng.hpp"

namespace bridgewalk {

enum class ModelKind { lattice, tree, lamplighter };

// Model-specific state. Only the fields for the owning kind are populated:
//   lattice      pos (d coordinates)
//   tree         path (edge labels from the root; reduced by construction:
//                child labels never encode the parent move, parents pop)
//   lamplighter  pos (marker, d coordinates) + lamps (lit sites, each d
//                coordinates, flattened and kept sorted lexicographically)
struct Vertex {
    std::vector<int32_t> pos;
    std::vector<uint8_t> path;
    std::vector<int32_t> lamps;
};

// One signed jump of a lattice step law.
struct Step {
    std::vector<int32_t> move;
    double prob = 0.0;
};

// counts[n] = number of distinct vertices reachable in <= n steps
struct VolumeCurve {
    std::vector<uint64_t> counts;
};

// Parsed model description (CLI / config surface).
struct ModelSpec {
    std::string kind;        // "tree" | "lattice" | "lamplighter"
    int b = 0;               // tree branching
    int dim = 0;             // lattice / lamplighter dimension
    std::vector<int> jumps;  // lattice jump magnitudes (dim 1 only)
};

class WalkModel {
public:
    static WalkModel tree(int branching);
    static WalkModel lattice_simple(int dim);
    // Symmetric jump law on Z: the moves are +-j for each magnitude, uniform.
    static WalkModel lattice_jumps(const std::vector<int>& magnitudes);
    // General symmetric lattice law; rejects asymmetric or empty step sets.
    static WalkModel lattice(int dim, std::vector<Step> steps);
    static WalkModel lamplighter(int dim);

    ModelKind kind() const { return kind_; }
    int dim() const { return dim_; }
    int branching() const { return branching_; }
    int degree() const { return degree_; }
    int period() const { return period_; }
    int max_jump() const { return jmax_; }
    bool simple() const { return simple_; }
    const std::vector<Step>& steps() const { return steps_; }
    const std::string& id() const { return id_; }

    Vertex origin() const;

    // Weighted neighbors; probabilities are positive and sum to 1.
    void neighbors(const Vertex& v, std::vector<std::pair<Vertex, double>>& out) const;
    std::vector<std::pair<Vertex, double>> neighbors(const Vertex& v) const;

    // One unconditioned step.
    Vertex random_neighbor(const Vertex& v, SplitRng& rng) const;

    // Canonical byte key; key equality <=> vertex equality, stable across
    // runs and platforms. Layout (all integers little-endian):
    //   lattice      0x01, then d int32 coordinates
    //   tree         0x02, uint32 label count, then one byte per label
    //   lamplighter  0x03, uint32 lamp count, lamp sites (d int32 each,
    //                sorted), then the marker (d int32)
    std::string canonical_key(const Vertex& v) const;

    // Word metric from v to the origin. Supported exactly for lattices (any
    // d), trees, and the lamplighter with d = 1.
    int64_t graph_distance(const Vertex& v) const;
    bool distance_supported() const;

    // Exact BFS ball volumes up to nmax; errors beyond the stored-key cap.
    VolumeCurve ball_volume(int nmax, uint64_t key_cap = 20'000'000) const;

private:
    WalkModel() = default;
    void finalize();

    ModelKind kind_ = ModelKind::lattice;
    int dim_ = 0;
    int branching_ = 0;
    int degree_ = 0;
    int period_ = 0;
    int jmax_ = 0;
    bool simple_ = false;
    std::vector<Step> steps_;
    std::string id_;
};

WalkModel make_model(const ModelSpec& spec);

inline bool vertex_equal(const WalkModel& m, const Vertex& a, const Vertex& b) {
    return m.canonical_key(a) == m.canonical_key(b);
}

std::string key_to_hex(const std::string& key);

}  // namespace bridgewalk
