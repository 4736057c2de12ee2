#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "upg/error.hpp"

namespace upg {

using Vertex = int;
using Edge = int;
using Dart = int;

// Undirected multigraph with dense 0-based vertex and edge ids. Parallel
// edges are allowed, self-loops are rejected at construction. Edge e owns
// darts 2e and 2e+1; dart 2e is anchored at the first endpoint passed in,
// dart 2e+1 at the second. Immutable once built.
class MultiGraph {
public:
    MultiGraph() = default;
    MultiGraph(int num_vertices, std::vector<std::pair<Vertex, Vertex>> edges);

    int num_vertices() const { return num_vertices_; }
    int num_edges() const { return static_cast<int>(endpoints_.size()); }
    int num_darts() const { return 2 * num_edges(); }

    std::pair<Vertex, Vertex> endpoints(Edge e) const { return endpoints_[e]; }

    static Edge dart_edge(Dart d) { return d >> 1; }
    static Dart twin(Dart d) { return d ^ 1; }
    static Dart dart(Edge e, int side) { return 2 * e + side; }

    // Vertex the dart is anchored at (the endpoint it leaves).
    Vertex dart_vertex(Dart d) const {
        auto [u, v] = endpoints_[dart_edge(d)];
        return (d & 1) ? v : u;
    }

    // Vertex at the far end of the dart.
    Vertex dart_head(Dart d) const { return dart_vertex(twin(d)); }

    Vertex other_endpoint(Edge e, Vertex v) const {
        auto [a, b] = endpoints_[e];
        return v == a ? b : a;
    }

    // The dart of e anchored at v (v must be an endpoint of e).
    Dart dart_at(Edge e, Vertex v) const {
        return endpoints_[e].first == v ? dart(e, 0) : dart(e, 1);
    }

    // Darts anchored at v, sorted ascending. Parallel edges appear once per copy.
    const std::vector<Dart>& darts_at(Vertex v) const { return incidence_[v]; }

    int degree(Vertex v) const { return static_cast<int>(incidence_[v].size()); }

    // Groups of parallel edges (same unordered endpoint pair), each group
    // sorted by edge id; groups ordered by (min endpoint, max endpoint).
    // Singleton groups are included.
    std::vector<std::vector<Edge>> bundles() const;

    bool is_simple() const;

    bool same_endpoints(Edge a, Edge b) const;

private:
    int num_vertices_ = 0;
    std::vector<std::pair<Vertex, Vertex>> endpoints_;
    std::vector<std::vector<Dart>> incidence_;
};

// Subgraph extraction result: the extracted graph plus id maps back into the
// parent graph. dist is only populated by ball().
struct Subgraph {
    MultiGraph graph;
    std::vector<Vertex> vertex_to_parent;
    std::vector<Edge> edge_to_parent;
    std::vector<int> dist;    // distance from the ball center, per local vertex
    Vertex root_local = -1;   // local id of the ball center
};

struct BlockCut {
    // Each block is a list of parent edge ids; bridges form their own
    // single-edge blocks. Blocks are ordered by smallest contained edge id.
    std::vector<std::vector<Edge>> blocks;
    std::vector<Vertex> cutvertices; // sorted ascending
};

// BFS distances from source; unreachable vertices get -1.
std::vector<int> bfs_distances(const MultiGraph& g, Vertex source);

bool is_connected(const MultiGraph& g);

// Induced subgraph on the given vertices (all edges with both endpoints inside).
Subgraph induced_subgraph(const MultiGraph& g, const std::vector<Vertex>& vertices);

// Induced ball of radius r around x, with the distance map filled in.
Subgraph ball(const MultiGraph& g, Vertex x, int r);

// Simple graph on the same vertex set joining u,v iff their distance in g
// lies in [1, R].
MultiGraph r_closure(const MultiGraph& g, int R);

// Block-cut decomposition of a connected multigraph.
BlockCut blocks_and_cutvertices(const MultiGraph& g);

// Whether the simplification of g is k-connected (k in {1,2,3}): at least
// k+1 vertices and no separating vertex set of size < k. Single-deletion
// sweep with articulation detection; guarded to 10^4 vertices.
bool is_k_connected(const MultiGraph& g, int k);

// Multigraph biconnectivity in the cycle sense: connected, no cutvertex,
// at least 2 edges, minimum degree 2. Accepts 2-vertex multilinks, which
// is_k_connected(g, 2) deliberately does not.
bool is_biconnected_multi(const MultiGraph& g);

// Collapses parallel bundles to single edges. The representative edge of
// each bundle is its smallest edge id; edge_to_parent maps simple edge ->
// representative parent edge. Vertex ids are preserved.
Subgraph simplify(const MultiGraph& g);

} // namespace upg
