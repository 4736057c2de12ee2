#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "upg/amalgam_embed.hpp"
#include "upg/enddecomp.hpp"
#include "upg/error.hpp"
#include "upg/multigraph.hpp"
#include "upg/rng.hpp"

using namespace upg;

namespace {

using i64 = std::int64_t;

// Independent BFS built from endpoint pairs only; returns -1 for unreachable.
std::vector<int> brute_bfs(const MultiGraph& g, const std::vector<char>& removed, Vertex src) {
    std::vector<std::vector<Vertex>> adj(g.num_vertices());
    for (Edge e = 0; e < g.num_edges(); ++e) {
        if (!removed.empty() && removed[e]) continue;
        auto [u, v] = g.endpoints(e);
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<int> dist(g.num_vertices(), -1);
    dist[src] = 0;
    std::deque<Vertex> q{src};
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop_front();
        for (Vertex v : adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    return dist;
}

std::vector<std::vector<Edge>> edge_lists(const std::vector<CutSet>& cuts) {
    std::vector<std::vector<Edge>> out;
    for (const auto& c : cuts) out.push_back(c.edges);
    return out;
}

// Reference enumeration: try every subset of, at most f_max, surviving edges
// incident to the radius ball, and keep those whose removal leaves exactly
// two components reaching escape distance, with the subset equal to the set
// of surviving edges joining those two components.
std::vector<std::vector<Edge>> brute_min_endcuts(const MultiGraph& g,
                                                 const std::vector<char>& removed, Vertex center,
                                                 int radius, int f_max, int h_esc) {
    std::vector<int> dist = brute_bfs(g, removed, center);
    std::vector<Edge> pool;
    for (Edge e = 0; e < g.num_edges(); ++e) {
        if (!removed.empty() && removed[e]) continue;
        auto [u, v] = g.endpoints(e);
        bool iu = dist[u] >= 0 && dist[u] <= radius;
        bool iv = dist[v] >= 0 && dist[v] <= radius;
        if (iu || iv) pool.push_back(e);
    }
    std::vector<std::vector<Edge>> found;
    std::vector<char> mask(removed.empty() ? std::vector<char>(g.num_edges(), 0) : removed);
    std::vector<Edge> cur;
    auto test_subset = [&]() {
        for (Edge e : cur) mask[e] = 1;
        // Components of the center's component after removing the subset.
        std::vector<int> comp(g.num_vertices(), -1);
        std::vector<char> escapes;
        for (Vertex s = 0; s < g.num_vertices(); ++s) {
            if (dist[s] < 0 || comp[s] >= 0) continue;
            int c = static_cast<int>(escapes.size());
            escapes.push_back(0);
            std::vector<int> d2 = brute_bfs(g, mask, s);
            for (Vertex v = 0; v < g.num_vertices(); ++v)
                if (d2[v] >= 0 && dist[v] >= 0) {
                    comp[v] = c;
                    if (dist[v] >= h_esc) escapes[c] = 1;
                }
        }
        int n_escaping = static_cast<int>(std::count(escapes.begin(), escapes.end(), 1));
        bool ok = n_escaping == 2;
        int c1 = -1, c2 = -1;
        for (int c = 0; c < static_cast<int>(escapes.size()); ++c)
            if (escapes[c]) (c1 < 0 ? c1 : c2) = c;
        for (size_t i = 0; i < cur.size() && ok; ++i) {
            auto [u, v] = g.endpoints(cur[i]);
            ok = (comp[u] == c1 && comp[v] == c2) || (comp[u] == c2 && comp[v] == c1);
        }
        // No other surviving edge may join the two escaping components.
        for (Edge e = 0; e < g.num_edges() && ok; ++e) {
            if (mask[e]) continue;
            auto [u, v] = g.endpoints(e);
            if (comp[u] < 0) continue;
            ok = !((comp[u] == c1 && comp[v] == c2) || (comp[u] == c2 && comp[v] == c1));
        }
        if (ok) found.push_back(cur);
        for (Edge e : cur) mask[e] = 0;
    };
    std::function<void(size_t, int)> choose = [&](size_t start, int left) {
        if (left == 0) {
            test_subset();
            return;
        }
        for (size_t i = start; i + left <= pool.size(); ++i) {
            cur.push_back(pool[i]);
            choose(i + 1, left - 1);
            cur.pop_back();
        }
    };
    for (int k = 1; k <= std::min<int>(f_max, static_cast<int>(pool.size())); ++k) choose(0, k);
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return found;
}

Edge find_edge(const MultiGraph& g, Vertex u, Vertex v) {
    for (Edge e = 0; e < g.num_edges(); ++e) {
        auto [a, b] = g.endpoints(e);
        if ((a == u && b == v) || (a == v && b == u)) return e;
    }
    REQUIRE(false);
    return -1;
}

// Hub 0 joined to `sats` tails; each tail head is attached by `bundle`
// parallel edges and continues as a path of `tail` vertices.
MultiGraph star_of_tails(int sats, int bundle, int tail) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (int i = 0; i < sats; ++i) {
        Vertex s0 = 1 + tail * i;
        for (int b = 0; b < bundle; ++b) edges.push_back({0, s0});
        for (int j = 0; j + 1 < tail; ++j) edges.push_back({s0 + j, s0 + j + 1});
    }
    return MultiGraph(1 + sats * tail, edges);
}

int ball_count(const Window& w, int r) {
    return static_cast<int>(std::count_if(w.dist.begin(), w.dist.end(),
                                          [&](int d) { return d <= r; }));
}

} // namespace

TEST_CASE("oracles: registry, determinism and local structure") {
    auto names = oracle_names();
    REQUIRE(names.size() == 7);
    CHECK_THROWS_WITH_AS(make_oracle("moebius", 1), doctest::Contains("unknown oracle"), Error);
    try {
        make_oracle("moebius", 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unknown_oracle);
    }
    for (const auto& name : names) {
        CAPTURE(name);
        auto orc = make_oracle(name, 42);
        CHECK(orc->name() == name);
        CHECK(orc->seed() == 42);
        Window w = explore(*orc, 4);
        for (Vertex v = 0; v < w.graph.num_vertices(); ++v) {
            std::vector<i64> nb = orc->neighbors(w.ids[v]);
            std::set<i64> uniq(nb.begin(), nb.end());
            CHECK(uniq.size() == nb.size());
            CHECK(uniq.count(w.ids[v]) == 0);
            for (i64 n : nb) {
                std::vector<i64> back = orc->neighbors(n);
                CHECK(std::count(back.begin(), back.end(), w.ids[v]) == 1);
            }
            CHECK_FALSE(orc->vertex_name(w.ids[v]).empty());
        }
        // Seeded labels: in [0,1), reproducible, and salt-sensitive.
        auto again = make_oracle(name, 42);
        bool salt_varies = false;
        for (Vertex v = 0; v < std::min(10, w.graph.num_vertices()); ++v) {
            double l0 = orc->label(w.ids[v], 7);
            CHECK(l0 >= 0.0);
            CHECK(l0 < 1.0);
            CHECK(again->label(w.ids[v], 7) == l0);
            if (orc->label(w.ids[v], 8) != l0) salt_varies = true;
        }
        CHECK(salt_varies);
    }
}

TEST_CASE("oracles: degrees, distances and ball growth") {
    auto deg_check = [](const std::string& name, int horizon,
                        const std::function<int(i64, int)>& expected_deg) {
        auto orc = make_oracle(name, 3);
        Window w = explore(*orc, horizon);
        for (Vertex v = 0; v < w.graph.num_vertices(); ++v) {
            if (w.dist[v] >= horizon) continue; // rim vertices miss outside edges
            CAPTURE(name);
            CAPTURE(w.ids[v]);
            CHECK(static_cast<int>(w.graph.darts_at(v).size()) ==
                  expected_deg(w.ids[v], w.dist[v]));
        }
    };
    deg_check("path", 5, [](i64, int) { return 2; });
    deg_check("ladder", 5, [](i64, int) { return 3; });
    deg_check("grid", 5, [](i64, int) { return 4; });
    deg_check("tree3", 5, [](i64, int) { return 3; });
    deg_check("treexedge", 5, [](i64, int) { return 4; });
    deg_check("freeprod-triangle", 5, [](i64, int) { return 4; });
    deg_check("halfplane-tri", 5, [](i64 v, int) {
        auto y = static_cast<std::int32_t>(static_cast<std::uint64_t>(v) & 0xffffffffu);
        return y == 0 ? 4 : 6;
    });

    // Frozen ball sizes.
    {
        Window w = explore(*make_oracle("path", 1), 5);
        for (int r = 0; r <= 5; ++r) CHECK(ball_count(w, r) == 2 * r + 1);
    }
    {
        Window w = explore(*make_oracle("ladder", 1), 5);
        CHECK(ball_count(w, 0) == 1);
        for (int r = 1; r <= 5; ++r) CHECK(ball_count(w, r) == 4 * r);
    }
    {
        Window w = explore(*make_oracle("grid", 1), 5);
        for (int r = 0; r <= 5; ++r) CHECK(ball_count(w, r) == 2 * r * r + 2 * r + 1);
    }
    {
        Window w = explore(*make_oracle("tree3", 1), 5);
        for (int r = 0; r <= 5; ++r) CHECK(ball_count(w, r) == 3 * (1 << r) - 2);
    }
    {
        Window w = explore(*make_oracle("treexedge", 1), 5);
        CHECK(ball_count(w, 0) == 1);
        for (int r = 1; r <= 5; ++r) CHECK(ball_count(w, r) == 9 * (1 << (r - 1)) - 4);
    }
    {
        Window w = explore(*make_oracle("freeprod-triangle", 1), 5);
        for (int r = 0; r <= 5; ++r) CHECK(ball_count(w, r) == (1 << (r + 2)) - 3);
        // Distance equals the number of packed syllables.
        for (Vertex v = 0; v < w.graph.num_vertices(); ++v) {
            int syll = 0;
            for (i64 id = w.ids[v]; id > 0; id /= 5) ++syll;
            CHECK(w.dist[v] == syll);
        }
    }
    {
        Window w = explore(*make_oracle("halfplane-tri", 1), 5);
        for (int r = 0; r <= 5; ++r) {
            int expect = 0;
            for (int x = -r; x <= r; ++x)
                for (int y = 0; y <= r; ++y)
                    if ((std::abs(x) + std::abs(y) + std::abs(x + y)) / 2 <= r) ++expect;
            CHECK(ball_count(w, r) == expect);
        }
    }

    // Vertex names at a few known ids.
    auto fp = make_oracle("freeprod-triangle", 1);
    CHECK(fp->vertex_name(0) == "e");
    CHECK(fp->vertex_name(1) == "a");
    CHECK(fp->vertex_name(1 * 5 + 3) == "ab");
    CHECK(fp->vertex_name(2 * 5 + 4) == "AB");
    CHECK(make_oracle("tree3", 1)->vertex_name(0) == "o");
    CHECK(make_oracle("path", 1)->vertex_name(-3) == "-3");
}

TEST_CASE("oracles: window graphs are planar where they should be") {
    for (const auto& [name, horizon] : std::vector<std::pair<std::string, int>>{
             {"ladder", 4}, {"grid", 3}, {"halfplane-tri", 3}, {"freeprod-triangle", 3},
             {"treexedge", 3}}) {
        CAPTURE(name);
        Window w = explore(*make_oracle(name, 9), horizon);
        RotationSystem rs = embed_graph(w.graph, 5);
        CHECK(genus(rs) == 0);
    }
    for (const auto& name : {"path", "tree3"}) {
        Window w = explore(*make_oracle(name, 9), 4);
        CHECK(w.graph.num_edges() == w.graph.num_vertices() - 1);
    }
}

TEST_CASE("explore: shape, determinism and guard") {
    auto orc = make_oracle("path", 5);
    Window w = explore(*orc, 3);
    CHECK(w.graph.num_vertices() == 7);
    CHECK(w.graph.num_edges() == 6);
    CHECK(w.horizon == 3);
    CHECK(w.ids[0] == 0);
    CHECK(w.dist[0] == 0);
    for (Vertex v = 0; v < 7; ++v) CHECK(w.index.at(w.ids[v]) == v);
    for (Edge e = 0; e < w.graph.num_edges(); ++e) {
        auto [u, v] = w.graph.endpoints(e);
        CHECK(std::abs(w.dist[u] - w.dist[v]) == 1);
        CHECK(std::abs(w.ids[u] - w.ids[v]) == 1);
    }
    Window w2 = explore(*orc, 3);
    CHECK(w2.ids == w.ids);
    CHECK(w2.dist == w.dist);

    Window w0 = explore(*orc, 0);
    CHECK(w0.graph.num_vertices() == 1);
    CHECK(w0.graph.num_edges() == 0);

    auto grid = make_oracle("grid", 5);
    CHECK_THROWS_WITH_AS(explore(*grid, 20, 100), doctest::Contains("vertex budget"), Error);
    try {
        explore(*grid, 20, 100);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::guard_exceeded);
    }
}

TEST_CASE("escape cuts: two-sided line, frozen counts and reference agreement") {
    Window w = explore(*make_oracle("path", 7), 8);
    std::vector<char> removed(w.graph.num_edges(), 0);

    auto cuts1 = enumerate_min_endcuts(w.graph, removed, 0, 1, 2, 4);
    CHECK(cuts1.size() == 4);
    for (const auto& c : cuts1) {
        CHECK(c.edges.size() == 1);
        CHECK(c.center == 0);
        CHECK(c.radius == 1);
    }
    CHECK(edge_lists(cuts1) == brute_min_endcuts(w.graph, removed, 0, 1, 2, 4));

    auto cuts2 = enumerate_min_endcuts(w.graph, removed, 0, 2, 2, 4);
    CHECK(cuts2.size() == 6);
    for (const auto& c : cuts2) CHECK(c.edges.size() == 1);
    CHECK(edge_lists(cuts2) == brute_min_endcuts(w.graph, removed, 0, 2, 2, 4));

    // Off-center, and after an existing removal that shortens one side.
    Vertex three = w.index.at(3);
    CHECK(edge_lists(enumerate_min_endcuts(w.graph, removed, three, 1, 2, 4)) ==
          brute_min_endcuts(w.graph, removed, three, 1, 2, 4));
    removed[find_edge(w.graph, w.index.at(2), three)] = 1;
    CHECK(edge_lists(enumerate_min_endcuts(w.graph, removed, 0, 1, 2, 4)) ==
          brute_min_endcuts(w.graph, removed, 0, 1, 2, 4));

    // Isolated center: no surviving incident edges, no cuts.
    std::vector<char> iso(w.graph.num_edges(), 0);
    iso[find_edge(w.graph, 0, w.index.at(1))] = 1;
    iso[find_edge(w.graph, 0, w.index.at(-1))] = 1;
    CHECK(enumerate_min_endcuts(w.graph, iso, 0, 1, 2, 4).empty());
}

TEST_CASE("escape cuts: ladder needs rung-aligned rail pairs") {
    Window w = explore(*make_oracle("ladder", 7), 8);
    std::vector<char> removed(w.graph.num_edges(), 0);
    auto cuts = enumerate_min_endcuts(w.graph, removed, 0, 1, 2, 4);
    CHECK(cuts.size() == 2);
    std::set<Edge> used;
    for (const auto& c : cuts) {
        REQUIRE(c.edges.size() == 2);
        for (Edge e : c.edges) {
            used.insert(e);
            auto [u, v] = w.graph.endpoints(e);
            // Rails connect the two column positions; rungs never qualify.
            CHECK(std::abs((w.ids[u] >> 1) - (w.ids[v] >> 1)) == 1);
        }
    }
    CHECK(used.size() == 4);
    CHECK(edge_lists(cuts) == brute_min_endcuts(w.graph, removed, 0, 1, 2, 4));

    // The pair {left rail gap, right rail gap} of one aligned column:
    Edge a0 = find_edge(w.graph, w.index.at(-2), w.index.at(0)); // (-1,0)-(0,0)
    Edge a1 = find_edge(w.graph, w.index.at(-1), w.index.at(1)); // (-1,1)-(0,1)
    std::vector<Edge> left_pair{std::min(a0, a1), std::max(a0, a1)};
    auto lists = edge_lists(cuts);
    CHECK(std::count(lists.begin(), lists.end(), left_pair) == 1);
}

TEST_CASE("escape cuts: one-ended graphs admit none") {
    for (const auto& name : {"grid", "halfplane-tri"}) {
        CAPTURE(name);
        Window w = explore(*make_oracle(name, 7), 7);
        std::vector<char> removed(w.graph.num_edges(), 0);
        for (int radius : {1, 2}) {
            auto cuts = enumerate_min_endcuts(w.graph, removed, 0, radius, 3, 4);
            CHECK(cuts.empty());
            CHECK(brute_min_endcuts(w.graph, removed, 0, radius, 3, 4).empty());
        }
    }
}

TEST_CASE("escape cuts: every ball edge separates the 3-regular tree") {
    Window w = explore(*make_oracle("tree3", 7), 6);
    std::vector<char> removed(w.graph.num_edges(), 0);
    auto cuts = enumerate_min_endcuts(w.graph, removed, 0, 1, 2, 3);
    CHECK(cuts.size() == 9);
    for (const auto& c : cuts) CHECK(c.edges.size() == 1);
    CHECK(edge_lists(cuts) == brute_min_endcuts(w.graph, removed, 0, 1, 2, 3));

    Vertex off = w.index.at(3 * 2 + 1); // a depth-2 vertex
    CHECK(w.dist[off] == 2);
    CHECK(edge_lists(enumerate_min_endcuts(w.graph, removed, off, 1, 2, 3)) ==
          brute_min_endcuts(w.graph, removed, off, 1, 2, 3));
}

TEST_CASE("escape cuts: triangle-product free product has ten radius-1 pairs") {
    Window w = explore(*make_oracle("freeprod-triangle", 7), 8);
    std::vector<char> removed(w.graph.num_edges(), 0);
    auto cuts = enumerate_min_endcuts(w.graph, removed, 0, 1, 2, 4);
    CHECK(cuts.size() == 10);
    for (const auto& c : cuts) CHECK(c.edges.size() == 2);
    CHECK(edge_lists(cuts) == brute_min_endcuts(w.graph, removed, 0, 1, 2, 4));
}

TEST_CASE("escape cuts: random degraded ladders match the reference") {
    Window w = explore(*make_oracle("ladder", 3), 8);
    Rng rng(2024);
    int nonempty = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<char> removed(w.graph.num_edges(), 0);
        for (Edge e = 0; e < w.graph.num_edges(); ++e)
            if (rng.below(6) == 0) removed[e] = 1;
        Vertex center = 0;
        do {
            center = static_cast<Vertex>(rng.below(w.graph.num_vertices()));
        } while (w.dist[center] > 3);
        int radius = 1 + static_cast<int>(rng.below(2));
        auto got = edge_lists(enumerate_min_endcuts(w.graph, removed, center, radius, 2, 4));
        auto want = brute_min_endcuts(w.graph, removed, center, radius, 2, 4);
        CAPTURE(trial);
        CHECK(got == want);
        if (!got.empty()) ++nonempty;
    }
    CHECK(nonempty >= 5);
}

TEST_CASE("escape cuts: star hubs exercise the bipartition strategy") {
    // Eight tails, each attached by a 5-fold bundle: 48 candidate edges force
    // the component-split enumeration.
    MultiGraph g = star_of_tails(8, 5, 4);
    std::vector<char> removed(g.num_edges(), 0);
    auto cuts = enumerate_min_endcuts(g, removed, 0, 1, 6, 3);
    REQUIRE(cuts.size() == 16);
    for (int i = 0; i < 8; ++i) {
        CHECK(cuts[i].edges == std::vector<Edge>{static_cast<Edge>(8 * i + 5)});
        std::vector<Edge> bundle;
        for (int b = 0; b < 5; ++b) bundle.push_back(static_cast<Edge>(8 * i + b));
        CHECK(cuts[8 + i].edges == bundle);
    }

    // A small sibling is still brute-checkable.
    MultiGraph s = star_of_tails(3, 2, 4);
    std::vector<char> none(s.num_edges(), 0);
    auto small_cuts = edge_lists(enumerate_min_endcuts(s, none, 0, 1, 4, 3));
    CHECK(small_cuts.size() == 6);
    CHECK(small_cuts == brute_min_endcuts(s, none, 0, 1, 4, 3));
}

TEST_CASE("escape cuts: guard and argument validation") {
    MultiGraph big = star_of_tails(22, 1, 4);
    std::vector<char> none(big.num_edges(), 0);
    CHECK_THROWS_WITH_AS(enumerate_min_endcuts(big, none, 0, 1, 6, 3),
                         doctest::Contains("search space too large"), Error);
    try {
        enumerate_min_endcuts(big, none, 0, 1, 6, 3);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::guard_exceeded);
    }

    MultiGraph p(3, {{0, 1}, {1, 2}});
    std::vector<char> z(2, 0);
    CHECK_THROWS_WITH_AS(enumerate_min_endcuts(p, z, 0, 1, 2, 1),
                         doctest::Contains("escape radius"), Error);
    CHECK_THROWS_WITH_AS(enumerate_min_endcuts(p, z, 0, 0, 2, 4),
                         doctest::Contains("positive"), Error);
    CHECK_THROWS_WITH_AS(enumerate_min_endcuts(p, z, 5, 1, 2, 4),
                         doctest::Contains("out of range"), Error);
    CHECK_THROWS_WITH_AS(enumerate_min_endcuts(p, {1}, 0, 1, 2, 4),
                         doctest::Contains("mismatch"), Error);
}

TEST_CASE("label maxima: frozen path cases") {
    MultiGraph p(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    std::vector<char> none(4, 0);
    std::vector<double> labels{0.1, 0.5, 0.3, 0.9, 0.2};
    CHECK(local_label_maxima(p, none, labels, 1, {}) == std::vector<Vertex>{1, 3});
    CHECK(local_label_maxima(p, none, labels, 2, {}) == std::vector<Vertex>{3});
    CHECK(local_label_maxima(p, none, labels, 0, {}) ==
          std::vector<Vertex>{0, 1, 2, 3, 4});

    // Ties are not strict maxima.
    std::vector<double> tied{0.5, 0.5, 0.1, 0.9, 0.2};
    CHECK(local_label_maxima(p, none, tied, 1, {}) == std::vector<Vertex>{3});

    // A removed edge splits the competition.
    std::vector<char> cut{0, 1, 0, 0};
    CHECK(local_label_maxima(p, cut, labels, 2, {}) == std::vector<Vertex>{1, 3});

    // Ineligible vertices cannot win but still beat their neighbors.
    CHECK(local_label_maxima(p, none, labels, 1, {0, 1, 0, 0, 0}) ==
          std::vector<Vertex>{1});
    CHECK(local_label_maxima(p, none, labels, 1, {1, 0, 0, 0, 0}).empty());

    CHECK_THROWS_WITH_AS(local_label_maxima(p, none, {0.1}, 1, {}),
                         doctest::Contains("labels size"), Error);
}

TEST_CASE("label maxima: randomized agreement with direct check") {
    Window w = explore(*make_oracle("ladder", 13), 6);
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<char> removed(w.graph.num_edges(), 0);
        for (Edge e = 0; e < w.graph.num_edges(); ++e)
            if (rng.below(5) == 0) removed[e] = 1;
        std::vector<double> labels(w.graph.num_vertices());
        for (auto& l : labels) l = rng.uniform();
        int radius = static_cast<int>(rng.below(4));
        auto got = local_label_maxima(w.graph, removed, labels, radius, {});
        std::vector<Vertex> want;
        for (Vertex v = 0; v < w.graph.num_vertices(); ++v) {
            std::vector<int> dist = brute_bfs(w.graph, removed, v);
            bool ok = true;
            for (Vertex u = 0; u < w.graph.num_vertices() && ok; ++u)
                if (u != v && dist[u] >= 0 && dist[u] <= radius && labels[u] >= labels[v])
                    ok = false;
            if (ok) want.push_back(v);
        }
        CAPTURE(trial);
        CHECK(got == want);
    }
}

TEST_CASE("factor graph: components, multi-links and forest detection") {
    MultiGraph c6(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});

    // Nothing removed: one component, no links.
    std::vector<char> none(6, 0);
    FactorGraph fg0 = factor_graph(c6, none);
    CHECK(fg0.num_components == 1);
    CHECK(fg0.links.empty());
    CHECK(fg0.is_forest);
    CHECK(is_decomposing(c6, none));

    // A removed edge inside one component is fine (a cycle opened once).
    std::vector<char> one{1, 0, 0, 0, 0, 0};
    FactorGraph fg1 = factor_graph(c6, one);
    CHECK(fg1.num_components == 1);
    CHECK(fg1.links.empty());
    CHECK(is_decomposing(c6, one));

    // Two removals opposite each other: two components, one collapsed link
    // carrying both edges; still tree-like.
    std::vector<char> two{1, 0, 0, 1, 0, 0};
    FactorGraph fg2 = factor_graph(c6, two);
    CHECK(fg2.num_components == 2);
    CHECK(fg2.component_of == std::vector<int>{0, 1, 1, 1, 0, 0});
    REQUIRE(fg2.links.size() == 1);
    CHECK(fg2.links[0] == std::pair<int, int>{0, 1});
    CHECK(fg2.link_edges[0] == std::vector<Edge>{0, 3});
    CHECK(fg2.is_forest);

    // Alternating removals: three components in a triangle of links.
    std::vector<char> three{1, 0, 1, 0, 1, 0};
    FactorGraph fg3 = factor_graph(c6, three);
    CHECK(fg3.num_components == 3);
    CHECK(fg3.links.size() == 3);
    CHECK_FALSE(fg3.is_forest);
    CHECK_FALSE(is_decomposing(c6, three));

    // Parallel bundle: removing any number of strands never breaks the test.
    MultiGraph banana(2, {{0, 1}, {0, 1}, {0, 1}});
    CHECK(is_decomposing(banana, {1, 1, 0}));
    CHECK(is_decomposing(banana, {1, 1, 1}));
    FactorGraph fgb = factor_graph(banana, {1, 1, 1});
    CHECK(fgb.num_components == 2);
    REQUIRE(fgb.links.size() == 1);
    CHECK(fgb.link_edges[0] == std::vector<Edge>{0, 1, 2});
}

TEST_CASE("stage schedule: frozen transitive-window values") {
    // Two-sided line: every complete 2-ball has five vertices.
    Window path = explore(*make_oracle("path", 21), 8);
    StageSchedule s1 = estimate_schedule(path, 1, 999);
    CHECK(s1.radius == 1);
    CHECK(s1.log2_steps == 6);
    CHECK(s1.rate_bound == 1.0 / 6.0);
    CHECK(s1.reshuffles == 4);

    StageSchedule s2 = estimate_schedule(path, 2, 5);
    CHECK(s2.log2_steps == 10);
    CHECK(s2.reshuffles == 14);

    // Square lattice: 2-balls have 13 vertices.
    Window grid = explore(*make_oracle("grid", 21), 6);
    StageSchedule g1 = estimate_schedule(grid, 1, 7);
    CHECK(g1.log2_steps == 14);
    CHECK(g1.reshuffles == 10);

    // 3-regular tree: 2-balls have 10 vertices.
    Window tree = explore(*make_oracle("tree3", 21), 6);
    StageSchedule t1 = estimate_schedule(tree, 1, 7);
    CHECK(t1.log2_steps == 11);
    CHECK(t1.reshuffles == 8);

    // Reduced sampling still works and is deterministic.
    CHECK(estimate_schedule(path, 1, 999, 5).log2_steps == 6);

    Window tiny = explore(*make_oracle("path", 21), 3);
    CHECK_THROWS_WITH_AS(estimate_schedule(tiny, 2, 1),
                         doctest::Contains("too small"), Error);
    try {
        estimate_schedule(tiny, 2, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::horizon_exhausted);
    }
}

TEST_CASE("run stage: the square lattice never loses an edge") {
    auto orc = make_oracle("grid", 31);
    Window w = explore(*orc, 10);
    std::vector<char> removed(w.graph.num_edges(), 0);
    StageSchedule s = estimate_schedule(w, 1, 4);
    StageReport rep = run_stage(w, removed, *orc, s, 3, 4, 4);
    CHECK(rep.edges_removed == 0);
    CHECK(rep.rounds == s.reshuffles);
    CHECK(std::count(removed.begin(), removed.end(), 1) == 0);
}

TEST_CASE("run stage: line removals stay tree-like and deterministic") {
    auto orc = make_oracle("path", 11);
    Window w = explore(*orc, 12);
    std::vector<char> removed(w.graph.num_edges(), 0);
    StageSchedule s = estimate_schedule(w, 1, 11);
    StageReport rep = run_stage(w, removed, *orc, s, 2, 4, 11);
    CHECK(rep.edges_removed >= 1);
    CHECK(rep.edges_removed == std::count(removed.begin(), removed.end(), 1));
    CHECK(is_decomposing(w.graph, removed));
    FactorGraph fg = factor_graph(w.graph, removed);
    for (const auto& edges : fg.link_edges) CHECK(edges.size() == 1);

    std::vector<char> removed2(w.graph.num_edges(), 0);
    StageReport rep2 = run_stage(w, removed2, *orc, s, 2, 4, 11);
    CHECK(removed2 == removed);
    CHECK(rep2.edges_removed == rep.edges_removed);
    CHECK(rep2.productive_steps == rep.productive_steps);

    CHECK_THROWS_WITH_AS(run_stage(w, removed, *orc, s, 2, 16, 11),
                         doctest::Contains("horizon too small"), Error);
}

TEST_CASE("decompose: frozen one-ended and tree-like behaviors") {
    DecomposeParams params;
    params.horizon = 10;
    params.r_max = 2;
    params.f_max = 3;
    params.h_esc = 4;

    // Square lattice: nothing to cut, a single survivor component.
    DecomposeResult grid = decompose(*make_oracle("grid", 3), params, 12);
    CHECK(grid.removed ==
          std::vector<char>(grid.window.graph.num_edges(), 0));
    CHECK(grid.factor.num_components == 1);
    CHECK(grid.factor.links.empty());
    REQUIRE(grid.components.size() == 1);
    CHECK(grid.components[0].size == grid.window.graph.num_vertices());
    CHECK(grid.components[0].escape_directions == 1);

    // 3-regular tree: many single-edge cuts, all links simple.
    DecomposeParams tp;
    tp.horizon = 6;
    tp.r_max = 2;
    tp.f_max = 2;
    tp.h_esc = 3;
    DecomposeResult tree = decompose(*make_oracle("tree3", 3), tp, 12);
    CHECK(tree.stages.size() == 2);
    long long total = 0;
    for (const auto& st : tree.stages) total += st.edges_removed;
    CHECK(total >= 1);
    CHECK(total == std::count(tree.removed.begin(), tree.removed.end(), 1));
    CHECK(tree.factor.is_forest);
    for (const auto& edges : tree.factor.link_edges) CHECK(edges.size() == 1);

    DecomposeResult tree_b = decompose(*make_oracle("tree3", 3), tp, 12);
    CHECK(tree_b.removed == tree.removed);
}

TEST_CASE("decompose: two-ended and many-ended windows break apart") {
    DecomposeParams lp;
    lp.horizon = 12;
    lp.r_max = 1;
    lp.f_max = 2;
    lp.h_esc = 4;
    DecomposeResult ladder = decompose(*make_oracle("ladder", 5), lp, 21);
    CHECK(ladder.stages.at(0).edges_removed >= 2);
    CHECK(ladder.factor.is_forest);
    CHECK(is_decomposing(ladder.window.graph, ladder.removed));

    DecomposeParams fp;
    fp.horizon = 6;
    fp.r_max = 1;
    fp.f_max = 2;
    fp.h_esc = 3;
    DecomposeResult free_prod = decompose(*make_oracle("freeprod-triangle", 5), fp, 21);
    CHECK(free_prod.stages.at(0).edges_removed >= 2);
    CHECK(free_prod.factor.is_forest);

    CHECK_THROWS_WITH_AS(decompose(*make_oracle("path", 5),
                                   DecomposeParams{.horizon = 10, .r_max = 0}, 1),
                         doctest::Contains("at least one stage"), Error);
}

TEST_CASE("component classification: shell pieces count escape directions") {
    // Unbroken two-sided line: one component escaping both ways.
    Window path = explore(*make_oracle("path", 9), 6);
    std::vector<char> none(path.graph.num_edges(), 0);
    auto cls = classify_components(path, none, 2);
    REQUIRE(cls.size() == 1);
    CHECK(cls[0].size == 13);
    CHECK(cls[0].escape_directions == 2);

    // Broken at the origin: two one-way components.
    std::vector<char> broken(path.graph.num_edges(), 0);
    broken[find_edge(path.graph, path.index.at(0), path.index.at(1))] = 1;
    auto cls2 = classify_components(path, broken, 2);
    REQUIRE(cls2.size() == 2);
    CHECK(cls2[0].size == 7);
    CHECK(cls2[1].size == 6);
    CHECK(cls2[0].escape_directions == 1);
    CHECK(cls2[1].escape_directions == 1);

    // One-ended lattice: a single direction.
    Window grid = explore(*make_oracle("grid", 9), 4);
    std::vector<char> gnone(grid.graph.num_edges(), 0);
    auto gcls = classify_components(grid, gnone, 2);
    REQUIRE(gcls.size() == 1);
    CHECK(gcls[0].escape_directions == 1);

    // 3-regular tree at depth 4, shell 2: twelve outward subtree pieces.
    Window tree = explore(*make_oracle("tree3", 9), 4);
    std::vector<char> tnone(tree.graph.num_edges(), 0);
    auto tcls = classify_components(tree, tnone, 2);
    REQUIRE(tcls.size() == 1);
    CHECK(tcls[0].escape_directions == 12);
}
