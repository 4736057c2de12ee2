#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "graphs.hpp"
#include "testutil.hpp"
#include "upg/io.hpp"
#include "upg/rng.hpp"
#include "upg/rotation.hpp"

using namespace upg;
using namespace testgraphs;

namespace {

// Independent face counter: builds the successor permutation straight from the
// raw cyclic orders, composes it with the twin involution as explicit arrays,
// and counts orbits of the composite permutation.
int oracle_face_count(const MultiGraph& g, const std::vector<std::vector<Dart>>& orders) {
    int nd = g.num_darts();
    std::vector<int> succ(nd, -1);
    for (const auto& cyc : orders)
        for (size_t i = 0; i < cyc.size(); ++i) succ[cyc[i]] = cyc[(i + 1) % cyc.size()];
    std::vector<int> phi(nd);
    for (Dart d = 0; d < nd; ++d) phi[d] = succ[d ^ 1];
    std::vector<bool> done(nd, false);
    int orbits = 0;
    for (Dart d = 0; d < nd; ++d) {
        if (done[d]) continue;
        orbits++;
        int x = d;
        while (!done[x]) {
            done[x] = true;
            x = phi[x];
        }
    }
    return orbits;
}

int oracle_genus(const MultiGraph& g, const std::vector<std::vector<Dart>>& orders) {
    int faces = g.num_edges() == 0 ? 1 : oracle_face_count(g, orders);
    return (2 - g.num_vertices() + g.num_edges() - faces) / 2;
}

// Canonical representative of a cyclic dart sequence: rotated so the smallest
// dart comes first.
std::vector<Dart> canonical_cycle(std::vector<Dart> walk) {
    auto it = std::min_element(walk.begin(), walk.end());
    std::rotate(walk.begin(), it, walk.end());
    return walk;
}

RotationSystem random_rotation(const MultiGraph& g, Rng& rng) {
    std::vector<std::vector<Dart>> orders(g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        orders[v] = g.darts_at(v);
        rng.shuffle(orders[v]);
    }
    return RotationSystem(g, orders);
}

} // namespace

TEST_CASE("triangle has one rotation system with two triangular faces") {
    MultiGraph g = cycle_graph(3);
    CHECK(count_rotation_systems(g) == 1);
    int seen = 0;
    enumerate_rotations(g, [&](const RotationSystem& rs) {
        seen++;
        FaceSet fs = trace_faces(rs);
        CHECK(fs.lengths_sorted() == std::vector<int>{3, 3});
        CHECK(genus(rs) == 0);
        CHECK(oracle_face_count(g, rs.all_orders()) == 2);
    });
    CHECK(seen == 1);
}

TEST_CASE("a bundle of two parallel edges bounds two bigons") {
    MultiGraph g = multilink(2);
    enumerate_rotations(g, [&](const RotationSystem& rs) {
        CHECK(trace_faces(rs).lengths_sorted() == std::vector<int>{2, 2});
        CHECK(genus(rs) == 0);
    });
}

TEST_CASE("edgeless single vertex counts one face and genus zero") {
    MultiGraph g(1, {});
    RotationSystem rs(g, {{}});
    CHECK(trace_faces(rs).faces.empty());
    CHECK(genus(rs) == 0);
}

TEST_CASE("K4: sixteen rotation systems, exactly two planar, mutual mirror images") {
    MultiGraph g = complete_graph(4);
    CHECK(count_rotation_systems(g) == 16);
    std::vector<RotationSystem> planar;
    std::map<int, int> genus_histogram;
    int total = 0;
    enumerate_rotations(g, [&](const RotationSystem& rs) {
        total++;
        int gen = genus(rs);
        genus_histogram[gen]++;
        CHECK(static_cast<int>(trace_faces(rs).faces.size()) ==
              oracle_face_count(g, rs.all_orders()));
        if (gen == 0) {
            planar.push_back(rs);
            CHECK(trace_faces(rs).lengths_sorted() == std::vector<int>{3, 3, 3, 3});
        }
    });
    CHECK(total == 16);
    CHECK(genus_histogram[0] == 2);
    CHECK(genus_histogram[1] == 14);
    REQUIRE(planar.size() == 2);
    CHECK(planar[1] == planar[0].inverted());
    CHECK(planar[0] == planar[1].inverted());
    CHECK_FALSE(planar[0] == planar[1]);
}

TEST_CASE("K5 has no genus-zero rotation system") {
    MultiGraph g = complete_graph(5);
    CHECK(count_rotation_systems(g) == 7776);
    int total = 0;
    enumerate_rotations(g, [&](const RotationSystem& rs) {
        total++;
        int gen = genus(rs);
        CHECK(gen >= 1);
        CHECK(gen <= 3);
    });
    CHECK(total == 7776);
}

TEST_CASE("inversion is the identity on graphs of max degree two") {
    Rng rng(5);
    for (const MultiGraph& g : {path_graph(4), cycle_graph(5), multilink(2)}) {
        RotationSystem rs = random_rotation(g, rng);
        CHECK(rs.inverted() == rs);
    }
}

TEST_CASE("inversion properties on random rotation systems") {
    Rng rng(31);
    int checked = 0;
    while (checked < 100) {
        MultiGraph g = testutil::random_multigraph(2 + static_cast<int>(rng.below(6)),
                                                   1 + static_cast<int>(rng.below(10)), rng);
        if (!is_connected(g)) continue;
        checked++;
        RotationSystem rs = random_rotation(g, rng);
        RotationSystem inv = rs.inverted();
        CHECK(genus(inv) == genus(rs));
        CHECK(inv.inverted() == rs);

        FaceSet fs = trace_faces(rs);
        FaceSet fi = trace_faces(inv);
        CHECK(fs.lengths_sorted() == fi.lengths_sorted());
        // Each face of the mirror image is a reversed, twin-mapped face.
        std::set<std::vector<Dart>> mirrored;
        for (auto walk : fs.faces) {
            std::reverse(walk.begin(), walk.end());
            for (Dart& d : walk) d = MultiGraph::twin(d);
            mirrored.insert(canonical_cycle(walk));
        }
        for (const auto& walk : fi.faces) CHECK(mirrored.count(canonical_cycle(walk)) == 1);

        // Dart conservation and the Euler bound.
        CHECK(fs.total_darts() == g.num_darts());
        CHECK(genus(rs) >= 0);
        CHECK(genus(rs) <= (g.num_edges() - g.num_vertices() + 1) / 2);
    }
}

TEST_CASE("face tracing matches orbit counting on every small connected multigraph") {
    // All connected multigraphs with 2..6 vertices and at most 5 edges, over
    // every one of their rotation systems.
    long long systems_checked = 0;
    for (int n = 2; n <= 6; ++n) {
        std::vector<std::pair<int, int>> pairs;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) pairs.push_back({u, v});
        for (int m = n - 1; m <= 5; ++m) {
            // Nondecreasing index tuples = multisets of endpoint pairs.
            std::vector<int> pick(m, 0);
            while (true) {
                std::vector<std::pair<int, int>> edges;
                for (int idx : pick) edges.push_back(pairs[idx]);
                MultiGraph g(n, edges);
                if (testutil::reference_connected(g)) {
                    enumerate_rotations(g, [&](const RotationSystem& rs) {
                        systems_checked++;
                        int traced = static_cast<int>(trace_faces(rs).faces.size());
                        CHECK(traced == oracle_face_count(g, rs.all_orders()));
                        CHECK(genus(rs) == oracle_genus(g, rs.all_orders()));
                    });
                }
                int pos = m - 1;
                while (pos >= 0 && pick[pos] == static_cast<int>(pairs.size()) - 1) pos--;
                if (pos < 0) break;
                pick[pos]++;
                for (int j = pos + 1; j < m; ++j) pick[j] = pick[pos];
            }
        }
    }
    CHECK(systems_checked > 1000);
}

TEST_CASE("genus rejects disconnected graphs") {
    MultiGraph g(4, {{0, 1}, {2, 3}});
    RotationSystem rs(g, {{0}, {1}, {2}, {3}});
    try {
        genus(rs);
        FAIL_CHECK("expected an error for disconnected input");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::invalid_argument);
    }
}

TEST_CASE("bundle randomization leaves simple graphs unchanged") {
    Rng rng(13);
    MultiGraph g = prism();
    RotationSystem rs = random_rotation(g, rng);
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) CHECK(randomize_bundles(rs, seed) == rs);
}

TEST_CASE("bundle randomization on a triple bundle stays planar and hits both orders") {
    MultiGraph g = multilink(3);
    RotationSystem rs(g, {{0, 2, 4}, {1, 5, 3}});
    REQUIRE(genus(rs) == 0);
    std::set<std::vector<Dart>> outcomes;
    for (std::uint64_t seed = 0; seed < 24; ++seed) {
        RotationSystem out = randomize_bundles(rs, seed);
        CHECK(genus(out) == 0);
        outcomes.insert(out.order_at(0));
    }
    // Two cyclic orders exist on three darts; the uniform relabeling reaches both.
    CHECK(outcomes.size() == 2);
}

TEST_CASE("bundle randomization is deterministic in the seed") {
    MultiGraph g = multilink(3);
    RotationSystem rs(g, {{0, 2, 4}, {1, 5, 3}});
    RotationSystem a = randomize_bundles(rs, 77);
    RotationSystem b = randomize_bundles(rs, 77);
    CHECK(a == b);
    std::ostringstream wa, wb;
    write_rotation(wa, a);
    write_rotation(wb, b);
    CHECK(wa.str() == wb.str());
}

TEST_CASE("bundle randomization handles mixed edge orientations") {
    MultiGraph g(2, {{0, 1}, {1, 0}});
    RotationSystem rs(g, {{0, 3}, {1, 2}});
    REQUIRE(genus(rs) == 0);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        RotationSystem out = randomize_bundles(rs, seed);
        CHECK(genus(out) == 0);
    }
}

TEST_CASE("bundle randomization rejects split bundles") {
    MultiGraph g(4, {{0, 1}, {0, 1}, {0, 2}, {0, 3}});
    // At vertex 0 the bundle darts 0 and 2 are separated on both sides.
    RotationSystem rs(g, {{0, 4, 2, 6}, {1, 3}, {5}, {7}});
    try {
        randomize_bundles(rs, 1);
        FAIL_CHECK("expected an error for a split bundle");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::invalid_argument);
    }
}

TEST_CASE("rotation system construction rejects bad orders") {
    MultiGraph g = cycle_graph(3);
    CHECK_THROWS_AS(RotationSystem(g, {{0, 5}, {1, 2}, {3, 4}, {}}), Error);
    CHECK_THROWS_AS(RotationSystem(g, {{0, 0}, {1, 2}, {3, 4}}), Error);
    CHECK_THROWS_AS(RotationSystem(g, {{0}, {1, 2, 5}, {3, 4}}), Error);
}

TEST_CASE("rotation file round-trip is bit-exact") {
    MultiGraph g = complete_graph(4);
    std::vector<RotationSystem> planar;
    enumerate_rotations(g, [&](const RotationSystem& rs) {
        if (genus(rs) == 0) planar.push_back(rs);
    });
    REQUIRE(!planar.empty());
    std::ostringstream first;
    write_rotation(first, planar[0]);
    std::istringstream in(first.str());
    RotationSystem back = read_rotation(in);
    CHECK(back == planar[0]);
    std::ostringstream second;
    write_rotation(second, back);
    CHECK(first.str() == second.str());
}

TEST_CASE("rotation reader accepts shuffled lines and rotated starts") {
    std::istringstream in(
        "graph 3\ne 0 0 1\ne 1 1 2\ne 2 0 2\n"
        "r 2: 5 3\n# comment\nr 0: 4 0\n\nr 1: 1 2\n");
    RotationSystem rs = read_rotation(in);
    CHECK(rs.order_at(0) == std::vector<Dart>{0, 4});
    CHECK(genus(rs) == 0);
}

TEST_CASE("rotation reader failures carry the parse error code") {
    auto expect_parse_error = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_rotation(in);
            FAIL_CHECK("expected parse error for: " << text);
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::parse);
        }
    };
    std::string graph = "graph 3\ne 0 0 1\ne 1 1 2\ne 2 0 2\n";
    expect_parse_error(graph);
    expect_parse_error(graph + "r 0: 0 4\nr 1: 1 2\n");
    expect_parse_error(graph + "r 0: 0 4\nr 0: 0 4\nr 1: 1 2\nr 2: 4 5\n");
    expect_parse_error(graph + "r 0: 0 4\nr 1: 1 2\nr 2: 4 9\n");
    expect_parse_error(graph + "r 0: 0 4\nr 1: 1 2\nr 2: 4 x\n");
    expect_parse_error(graph + "r 0: 0 4\nr 1: 1 2\nr 3: 4 5\n");
    expect_parse_error(graph + "r 0 0 4\nr 1: 1 2\nr 2: 4 5\n");
    expect_parse_error(graph + "r 0: 0 1\nr 1: 2 4\nr 2: 3 5\n");
}
