#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "upg/multigraph.hpp"

namespace upg {

// A combinatorial embedding: one cyclic permutation of the incident darts per
// vertex. Stored as successor/predecessor arrays indexed by dart id.
class RotationSystem {
  public:
    // orders[v] lists the darts at v in cyclic order (starting point is
    // irrelevant). Must cover exactly the darts at v for every vertex.
    RotationSystem(MultiGraph graph, const std::vector<std::vector<Dart>>& orders);

    const MultiGraph& graph() const { return graph_; }
    Dart next(Dart d) const { return next_[d]; }
    Dart prev(Dart d) const { return prev_[d]; }

    // Cyclic order at v written out starting from the smallest dart id.
    std::vector<Dart> order_at(Vertex v) const;
    std::vector<std::vector<Dart>> all_orders() const;

    // Mirror image: every cyclic permutation reversed.
    RotationSystem inverted() const;

    bool operator==(const RotationSystem& other) const;
    bool operator!=(const RotationSystem& other) const { return !(*this == other); }

  private:
    MultiGraph graph_;
    std::vector<Dart> next_;
    std::vector<Dart> prev_;
};

// Closed walks of darts; every dart of the graph lies on exactly one walk.
struct FaceSet {
    std::vector<std::vector<Dart>> faces;

    int total_darts() const;
    std::vector<int> lengths_sorted() const;
};

// Partitions the darts into face walks. After traversing dart d into its head
// vertex v, the walk continues with the successor of twin(d) in the rotation
// at v. Deterministic: scan starts at the smallest unvisited dart.
FaceSet trace_faces(const RotationSystem& rs);

// Euler-characteristic genus (2 - V + E - F) / 2 of a connected graph's
// embedding. The embedding is planar iff this is 0. An edgeless single vertex
// counts one face.
int genus(const RotationSystem& rs);

// Re-orders each parallel bundle by an independent uniform permutation of its
// edges, applied at both endpoints consistently, so a planar embedding stays
// planar. Requires each bundle's darts to sit consecutively in both endpoint
// rotations. Deterministic given the seed.
RotationSystem randomize_bundles(const RotationSystem& rs, std::uint64_t seed);

// Number of rotation systems of g: product over vertices of (degree - 1)!.
std::uint64_t count_rotation_systems(const MultiGraph& g);

// Calls fn once per rotation system of g, in a fixed deterministic order.
void enumerate_rotations(const MultiGraph& g,
                         const std::function<void(const RotationSystem&)>& fn);

} // namespace upg
