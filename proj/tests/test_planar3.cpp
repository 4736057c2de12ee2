#include <algorithm>
#include <set>

#include "doctest.h"
#include "graphs.hpp"
#include "testutil.hpp"
#include "upg/planar3.hpp"
#include "upg/rng.hpp"

using namespace upg;
using namespace testgraphs;

namespace {

bool bundle_consecutive(const RotationSystem& rs) {
    const MultiGraph& g = rs.graph();
    for (const auto& bundle : g.bundles()) {
        if (bundle.size() < 2) continue;
        auto [a, b] = g.endpoints(bundle.front());
        for (Vertex v : {a, b}) {
            std::set<Dart> run;
            for (Edge e : bundle) run.insert(g.dart_at(e, v));
            if (run.size() == static_cast<size_t>(g.degree(v))) continue;
            int entries = 0;
            for (Dart d : run)
                if (!run.count(rs.prev(d))) entries++;
            if (entries != 1) return false;
        }
    }
    return true;
}

// Prunes leaves, suppresses degree-2 vertices, and drops isolated vertices,
// turning a subdivision back into its branch graph.
MultiGraph suppress_subdivision(const MultiGraph& g) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Edge e = 0; e < g.num_edges(); ++e) edges.push_back(g.endpoints(e));
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> deg(g.num_vertices(), 0);
        for (auto [u, v] : edges) {
            deg[u]++;
            deg[v]++;
        }
        for (Vertex v = 0; v < g.num_vertices() && !changed; ++v) {
            if (deg[v] == 1) {
                for (size_t i = 0; i < edges.size(); ++i)
                    if (edges[i].first == v || edges[i].second == v) {
                        edges.erase(edges.begin() + i);
                        changed = true;
                        break;
                    }
            } else if (deg[v] == 2) {
                std::vector<size_t> inc;
                for (size_t i = 0; i < edges.size(); ++i)
                    if (edges[i].first == v || edges[i].second == v) inc.push_back(i);
                Vertex u = edges[inc[0]].first == v ? edges[inc[0]].second : edges[inc[0]].first;
                Vertex w = edges[inc[1]].first == v ? edges[inc[1]].second : edges[inc[1]].first;
                if (u == w) continue;
                edges[inc[0]] = {u, w};
                edges.erase(edges.begin() + inc[1]);
                changed = true;
            }
        }
    }
    std::vector<int> local(g.num_vertices(), -1);
    int next_id = 0;
    for (auto [u, v] : edges) {
        if (local[u] < 0) local[u] = next_id++;
        if (local[v] < 0) local[v] = next_id++;
    }
    std::vector<std::pair<Vertex, Vertex>> relabeled;
    for (auto [u, v] : edges) relabeled.push_back({local[u], local[v]});
    return MultiGraph(next_id, relabeled);
}

void check_kuratowski_witness(const MultiGraph& g, const std::vector<Edge>& witness) {
    REQUIRE(!witness.empty());
    std::vector<int> local(g.num_vertices(), -1);
    int next_id = 0;
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Edge e : witness) {
        auto [u, v] = g.endpoints(e);
        if (local[u] < 0) local[u] = next_id++;
        if (local[v] < 0) local[v] = next_id++;
        edges.push_back({local[u], local[v]});
    }
    MultiGraph branch = suppress_subdivision(MultiGraph(next_id, edges));
    bool k5 = testutil::reference_isomorphic(branch, complete_graph(5));
    bool k33 = testutil::reference_isomorphic(branch, complete_bipartite(3, 3));
    CHECK((k5 || k33));
}

MultiGraph with_duplicated_edges(const MultiGraph& g, int copies, Rng& rng) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Edge e = 0; e < g.num_edges(); ++e) edges.push_back(g.endpoints(e));
    for (int i = 0; i < copies; ++i)
        edges.push_back(g.endpoints(static_cast<Edge>(rng.below(g.num_edges()))));
    return MultiGraph(g.num_vertices(), edges);
}

} // namespace

TEST_CASE("planar embedding of K4 has four triangular faces") {
    EmbeddingResult res = planar_embed(complete_graph(4));
    REQUIRE(res.planar);
    CHECK(res.witness.empty());
    CHECK(genus(res.rs) == 0);
    CHECK(trace_faces(res.rs).lengths_sorted() == std::vector<int>{3, 3, 3, 3});
}

TEST_CASE("planar embedding of the octahedron has eight triangular faces") {
    EmbeddingResult res = planar_embed(octahedron());
    REQUIRE(res.planar);
    CHECK(genus(res.rs) == 0);
    CHECK(trace_faces(res.rs).lengths_sorted() ==
          std::vector<int>{3, 3, 3, 3, 3, 3, 3, 3});
}

TEST_CASE("K5 and K3,3 are rejected with subdivision witnesses") {
    for (const MultiGraph& g : {complete_graph(5), complete_bipartite(3, 3)}) {
        EmbeddingResult res = planar_embed(g);
        CHECK_FALSE(res.planar);
        CHECK(genus(res.rs) >= 1);
        check_kuratowski_witness(g, res.witness);
    }
}

TEST_CASE("a K5 subdivision buried in a larger planar shell is still caught") {
    // K5 with every edge subdivided once, plus a pendant path.
    std::vector<std::pair<Vertex, Vertex>> edges;
    int next_id = 5;
    for (int u = 0; u < 5; ++u)
        for (int v = u + 1; v < 5; ++v) {
            edges.push_back({u, next_id});
            edges.push_back({next_id, v});
            next_id++;
        }
    edges.push_back({0, next_id++});
    edges.push_back({next_id - 1, next_id});
    next_id++;
    MultiGraph g(next_id, edges);
    EmbeddingResult res = planar_embed(g);
    CHECK_FALSE(res.planar);
    check_kuratowski_witness(g, res.witness);
}

TEST_CASE("planar embedding is deterministic") {
    for (const MultiGraph& g : {wheel(6), cube(), icosahedron()}) {
        EmbeddingResult a = planar_embed(g);
        EmbeddingResult b = planar_embed(g);
        REQUIRE(a.planar);
        CHECK(a.rs == b.rs);
    }
}

TEST_CASE("embedding keeps parallel bundles consecutive at genus zero") {
    Rng rng(41);
    for (const MultiGraph& base :
         {wheel(5), prism(), cube(), grid_patch(3, 4), two_triangles_shared_edge()}) {
        for (int copies = 1; copies <= 4; ++copies) {
            MultiGraph g = with_duplicated_edges(base, copies, rng);
            EmbeddingResult res = planar_embed(g);
            REQUIRE(res.planar);
            CHECK(genus(res.rs) == 0);
            CHECK(bundle_consecutive(res.rs));
        }
    }
}

TEST_CASE("small-graph sweep: planar inputs embed at genus zero, the rest carry witnesses") {
    // Exhaustive over all connected graphs on at most 6 vertices; strided
    // subsample of the 7-vertex masks to bound runtime.
    for (int n = 1; n <= 7; ++n) {
        std::vector<std::pair<int, int>> pairs;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) pairs.push_back({u, v});
        long long num_masks = 1ll << pairs.size();
        long long stride = n < 7 ? 1 : 8;
        int planar_seen = 0, nonplanar_seen = 0;
        for (long long mask = 0; mask < num_masks; mask += stride) {
            // Bitmask connectivity prefilter.
            std::array<unsigned, 8> adj{};
            for (size_t i = 0; i < pairs.size(); ++i)
                if (mask >> i & 1) {
                    adj[pairs[i].first] |= 1u << pairs[i].second;
                    adj[pairs[i].second] |= 1u << pairs[i].first;
                }
            unsigned reach = 1, frontier = 1;
            while (frontier) {
                unsigned next = 0;
                for (int v = 0; v < n; ++v)
                    if (frontier >> v & 1) next |= adj[v];
                frontier = next & ~reach;
                reach |= next;
            }
            if (reach != (1u << n) - 1) continue;

            std::vector<std::pair<Vertex, Vertex>> edges;
            for (size_t i = 0; i < pairs.size(); ++i)
                if (mask >> i & 1) edges.push_back(pairs[i]);
            MultiGraph g(n, edges);
            EmbeddingResult res = planar_embed(g);
            if (res.planar) {
                planar_seen++;
                REQUIRE(genus(res.rs) == 0);
                REQUIRE(res.witness.empty());
            } else {
                nonplanar_seen++;
                REQUIRE(!res.witness.empty());
                REQUIRE(genus(res.rs) >= 1);
            }
        }
        if (n >= 5) CHECK(nonplanar_seen > 0);
        CHECK(planar_seen > 0);
    }
}

TEST_CASE("whitney uniqueness holds for small 3-connected planar graphs") {
    CHECK(whitney_check(complete_graph(4)));
    CHECK(whitney_check(prism()));
    CHECK(whitney_check(cube()));
    // Parallel copies are ignored: the simplification is what counts.
    MultiGraph doubled(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {0, 1}});
    CHECK(whitney_check(doubled));
}

TEST_CASE("whitney_check enforces its preconditions") {
    try {
        whitney_check(cycle_graph(5));
        FAIL_CHECK("expected an error for a non-3-connected graph");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::invalid_argument);
    }
    try {
        whitney_check(wheel(9));
        FAIL_CHECK("expected the enumeration guard to fire");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::guard_exceeded);
    }
}

TEST_CASE("uniform embedding flips a fair chirality coin") {
    MultiGraph g = complete_graph(4);
    RotationSystem base = planar_embed(g).rs;
    RotationSystem mirror = base.inverted();
    int flipped = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        RotationSystem rs = uniform_planar_embedding(g, seed);
        bool is_base = rs == base;
        bool is_mirror = rs == mirror;
        REQUIRE((is_base || is_mirror));
        if (is_mirror) flipped++;
    }
    CHECK(flipped >= 900);
    CHECK(flipped <= 1100);
    CHECK(uniform_planar_embedding(g, 123) == uniform_planar_embedding(g, 123));
}

TEST_CASE("uniform embedding randomizes bundles and stays planar") {
    // Prism with one edge tripled.
    MultiGraph g(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {0, 3}, {1, 4}, {2, 5},
                     {0, 1}, {0, 1}});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RotationSystem rs = uniform_planar_embedding(g, seed);
        CHECK(genus(rs) == 0);
        CHECK(bundle_consecutive(rs));
    }
}

TEST_CASE("uniform embedding rejects non-3-connected input") {
    try {
        uniform_planar_embedding(cycle_graph(5), 1);
        FAIL_CHECK("expected an error for a non-3-connected graph");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::invalid_argument);
    }
}
