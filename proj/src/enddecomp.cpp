#include "upg/enddecomp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

#include "upg/error.hpp"
#include "upg/rng.hpp"

namespace upg {

double GraphOracle::label(std::int64_t v, std::uint64_t salt) const {
    return unit_double(mix(seed_, salt, static_cast<std::uint64_t>(v)));
}

namespace {

using i64 = std::int64_t;

// ---------------------------------------------------------------- oracles

class PathOracle final : public GraphOracle {
  public:
    explicit PathOracle(std::uint64_t seed) : GraphOracle(seed) {}
    std::string name() const override { return "path"; }
    i64 origin() const override { return 0; }
    std::vector<i64> neighbors(i64 v) const override { return {v - 1, v + 1}; }
    std::string vertex_name(i64 v) const override { return std::to_string(v); }
};

class LadderOracle final : public GraphOracle {
  public:
    explicit LadderOracle(std::uint64_t seed) : GraphOracle(seed) {}
    std::string name() const override { return "ladder"; }
    i64 origin() const override { return 0; }
    std::vector<i64> neighbors(i64 v) const override {
        auto [x, s] = decode(v);
        return {encode(x - 1, s), encode(x + 1, s), encode(x, 1 - s)};
    }
    std::string vertex_name(i64 v) const override {
        auto [x, s] = decode(v);
        return "(" + std::to_string(x) + "," + std::to_string(s) + ")";
    }

  private:
    static i64 encode(i64 x, i64 s) { return 2 * x + s; }
    static std::pair<i64, i64> decode(i64 v) {
        i64 s = ((v % 2) + 2) % 2;
        return {(v - s) / 2, s};
    }
};

i64 pack_xy(i64 x, i64 y) {
    return static_cast<i64>((static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
                            static_cast<std::uint32_t>(y));
}
std::pair<i64, i64> unpack_xy(i64 v) {
    auto u = static_cast<std::uint64_t>(v);
    return {static_cast<std::int32_t>(u >> 32), static_cast<std::int32_t>(u & 0xffffffffu)};
}

class GridOracle final : public GraphOracle {
  public:
    explicit GridOracle(std::uint64_t seed) : GraphOracle(seed) {}
    std::string name() const override { return "grid"; }
    i64 origin() const override { return pack_xy(0, 0); }
    std::vector<i64> neighbors(i64 v) const override {
        auto [x, y] = unpack_xy(v);
        return {pack_xy(x - 1, y), pack_xy(x + 1, y), pack_xy(x, y - 1), pack_xy(x, y + 1)};
    }
    std::string vertex_name(i64 v) const override {
        auto [x, y] = unpack_xy(v);
        return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
    }
};

// 3-regular tree. The root is id 0; every other vertex is 3t + c with t >= 1
// and c in {0,1,2}: c names the root branch and the bits of t below its
// leading 1 give the path inside the branch's binary tree.
class Tree3Oracle final : public GraphOracle {
  public:
    explicit Tree3Oracle(std::uint64_t seed) : GraphOracle(seed) {}
    std::string name() const override { return "tree3"; }
    i64 origin() const override { return 0; }
    std::vector<i64> neighbors(i64 v) const override {
        if (v == 0) return {3, 4, 5};
        i64 t = v / 3, c = v % 3;
        i64 parent = t == 1 ? 0 : 3 * (t / 2) + c;
        return {parent, 3 * (2 * t) + c, 3 * (2 * t + 1) + c};
    }
    std::string vertex_name(i64 v) const override {
        if (v == 0) return "o";
        i64 t = v / 3, c = v % 3;
        std::string bits;
        while (t > 1) {
            bits += static_cast<char>('0' + (t & 1));
            t >>= 1;
        }
        std::reverse(bits.begin(), bits.end());
        return std::to_string(c) + "/" + bits;
    }
};

class TreeXEdgeOracle final : public GraphOracle {
  public:
    explicit TreeXEdgeOracle(std::uint64_t seed) : GraphOracle(seed), tree_(seed) {}
    std::string name() const override { return "treexedge"; }
    i64 origin() const override { return 0; }
    std::vector<i64> neighbors(i64 v) const override {
        i64 s = v & 1, t = v >> 1;
        std::vector<i64> out;
        for (i64 n : tree_.neighbors(t)) out.push_back((n << 1) | s);
        out.push_back((t << 1) | (1 - s));
        return out;
    }
    std::string vertex_name(i64 v) const override {
        return "(" + tree_.vertex_name(v >> 1) + "," + std::to_string(v & 1) + ")";
    }

  private:
    Tree3Oracle tree_;
};

// Cayley graph of the free product of two cyclic groups of order 3, with all
// four non-identity generator powers as edges: a tree of triangles, 4-regular,
// with infinitely many ends. Vertices are alternating-syllable words packed
// base 5 (digits 1,2 = first letter's exponents; 3,4 = second letter's).
class FreeProdTriangleOracle final : public GraphOracle {
  public:
    explicit FreeProdTriangleOracle(std::uint64_t seed) : GraphOracle(seed) {}
    std::string name() const override { return "freeprod-triangle"; }
    i64 origin() const override { return 0; }
    std::vector<i64> neighbors(i64 v) const override {
        std::vector<i64> out;
        for (int letter = 0; letter < 2; ++letter)
            for (int exp = 1; exp <= 2; ++exp) out.push_back(step(v, letter, exp));
        return out;
    }
    std::string vertex_name(i64 v) const override {
        if (v == 0) return "e";
        std::string w;
        while (v > 0) {
            int d = static_cast<int>(v % 5);
            w += d == 1 ? 'a' : d == 2 ? 'A' : d == 3 ? 'b' : 'B';
            v /= 5;
        }
        std::reverse(w.begin(), w.end());
        return w;
    }

  private:
    // Right-multiply the word by letter^exp and renormalize.
    static i64 step(i64 v, int letter, int exp) {
        int last = static_cast<int>(v % 5);
        int last_letter = last == 0 ? -1 : (last - 1) / 2;
        if (last_letter != letter) return v * 5 + (2 * letter + exp);
        int last_exp = last - 2 * letter;
        int merged = (last_exp + exp) % 3;
        if (merged == 0) return v / 5;
        return (v / 5) * 5 + (2 * letter + merged);
    }
};

class HalfPlaneTriOracle final : public GraphOracle {
  public:
    explicit HalfPlaneTriOracle(std::uint64_t seed) : GraphOracle(seed) {}
    std::string name() const override { return "halfplane-tri"; }
    i64 origin() const override { return pack_xy(0, 0); }
    std::vector<i64> neighbors(i64 v) const override {
        auto [x, y] = unpack_xy(v);
        std::vector<i64> out;
        const i64 cand[6][2] = {{x - 1, y},     {x + 1, y},     {x, y - 1},
                                {x, y + 1},     {x + 1, y - 1}, {x - 1, y + 1}};
        for (const auto& c : cand)
            if (c[1] >= 0) out.push_back(pack_xy(c[0], c[1]));
        return out;
    }
    std::string vertex_name(i64 v) const override {
        auto [x, y] = unpack_xy(v);
        return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
    }
};

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

// Bounded BFS in g minus the removed edges. dist[v] = -1 beyond the depth.
std::vector<int> bounded_bfs(const MultiGraph& g, const std::vector<char>& removed,
                             Vertex source, int depth) {
    std::vector<int> dist(g.num_vertices(), -1);
    dist[source] = 0;
    std::deque<Vertex> queue{source};
    while (!queue.empty()) {
        Vertex u = queue.front();
        queue.pop_front();
        if (dist[u] == depth) continue;
        for (Dart d : g.darts_at(u)) {
            if (!removed.empty() && removed[MultiGraph::dart_edge(d)]) continue;
            Vertex v = g.dart_head(d);
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

} // namespace

std::vector<std::string> oracle_names() {
    return {"path", "ladder", "grid", "tree3", "treexedge", "freeprod-triangle",
            "halfplane-tri"};
}

std::unique_ptr<GraphOracle> make_oracle(const std::string& name, std::uint64_t seed) {
    if (name == "path") return std::make_unique<PathOracle>(seed);
    if (name == "ladder") return std::make_unique<LadderOracle>(seed);
    if (name == "grid") return std::make_unique<GridOracle>(seed);
    if (name == "tree3") return std::make_unique<Tree3Oracle>(seed);
    if (name == "treexedge") return std::make_unique<TreeXEdgeOracle>(seed);
    if (name == "freeprod-triangle") return std::make_unique<FreeProdTriangleOracle>(seed);
    if (name == "halfplane-tri") return std::make_unique<HalfPlaneTriOracle>(seed);
    fail(ErrorCode::unknown_oracle, "unknown oracle '" + name + "'");
}

Window explore(const GraphOracle& oracle, int horizon, std::size_t max_vertices) {
    require(horizon >= 0, ErrorCode::invalid_argument, "horizon must be nonnegative");
    Window w;
    w.horizon = horizon;
    w.ids.push_back(oracle.origin());
    w.index[oracle.origin()] = 0;
    w.dist.push_back(0);
    for (std::size_t qi = 0; qi < w.ids.size(); ++qi) {
        if (w.dist[qi] == horizon) continue;
        for (i64 n : oracle.neighbors(w.ids[qi])) {
            if (w.index.count(n)) continue;
            require(w.ids.size() < max_vertices, ErrorCode::guard_exceeded,
                    "window exceeds the vertex budget");
            w.index[n] = static_cast<Vertex>(w.ids.size());
            w.ids.push_back(n);
            w.dist.push_back(w.dist[qi] + 1);
        }
    }
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex u = 0; u < static_cast<Vertex>(w.ids.size()); ++u) {
        for (i64 n : oracle.neighbors(w.ids[u])) {
            auto it = w.index.find(n);
            if (it != w.index.end() && it->second > u) edges.push_back({u, it->second});
        }
    }
    w.graph = MultiGraph(static_cast<int>(w.ids.size()), edges);
    return w;
}

std::vector<CutSet> enumerate_min_endcuts(const MultiGraph& g, const std::vector<char>& removed,
                                          Vertex center, int radius, int f_max, int h_esc) {
    require(center >= 0 && center < g.num_vertices(), ErrorCode::invalid_argument,
            "cut center out of range");
    require(radius >= 1 && f_max >= 1, ErrorCode::invalid_argument,
            "cut radius and size cap must be positive");
    require(h_esc > radius, ErrorCode::invalid_argument,
            "escape radius must exceed the cut radius");
    require(removed.empty() || removed.size() == static_cast<size_t>(g.num_edges()),
            ErrorCode::invalid_argument, "removed mask size mismatch");

    std::vector<int> dist_x = bounded_bfs(g, removed, center, h_esc);
    auto in_ball = [&](Vertex v) { return dist_x[v] >= 0 && dist_x[v] <= radius; };

    // Candidate pool: surviving edges incident to the ball.
    std::vector<Edge> ball_edges;
    for (Edge e = 0; e < g.num_edges(); ++e) {
        if (!removed.empty() && removed[e]) continue;
        auto [u, v] = g.endpoints(e);
        if (in_ball(u) || in_ball(v)) ball_edges.push_back(e);
    }
    if (ball_edges.empty()) return {};

    // Fragments: components of the current graph minus the ball edges,
    // discovered from the ball edges' endpoints. Every component of the
    // center's graph component meets an endpoint, so this covers it.
    std::vector<char> cut_mask(g.num_edges(), 0);
    for (Edge e : ball_edges) cut_mask[e] = 1;
    std::vector<int> frag(g.num_vertices(), -1);
    std::vector<char> frag_escapes;
    std::deque<Vertex> queue;
    for (Edge e : ball_edges) {
        auto [eu, ev] = g.endpoints(e);
        for (Vertex seed : {eu, ev}) {
            if (frag[seed] >= 0) continue;
            int id = static_cast<int>(frag_escapes.size());
            frag_escapes.push_back(0);
            frag[seed] = id;
            queue.push_back(seed);
            while (!queue.empty()) {
                Vertex u = queue.front();
                queue.pop_front();
                if (dist_x[u] < 0 || dist_x[u] >= h_esc) frag_escapes[id] = 1;
                for (Dart d : g.darts_at(u)) {
                    Edge de = MultiGraph::dart_edge(d);
                    if (cut_mask[de] || (!removed.empty() && removed[de])) continue;
                    Vertex v = g.dart_head(d);
                    if (frag[v] < 0) {
                        frag[v] = id;
                        queue.push_back(v);
                    }
                }
            }
        }
    }
    int nq = static_cast<int>(frag_escapes.size());

    // A valid cut leaves exactly two escaping sides, each containing at
    // least one escaping fragment; with fewer than two escaping fragments
    // (one-ended windows like the grid) no cut exists, and skipping the
    // subset search keeps the guard out of reach regardless of f_max.
    int escaping = static_cast<int>(
        std::count(frag_escapes.begin(), frag_escapes.end(), static_cast<char>(1)));
    if (escaping < 2) return {};

    // Candidates joining two distinct fragments; edges inside one fragment
    // can never separate anything.
    struct Cand {
        Edge edge;
        int qa, qb;
    };
    std::vector<Cand> cand;
    for (Edge e : ball_edges) {
        auto [u, v] = g.endpoints(e);
        if (frag[u] != frag[v]) cand.push_back({e, frag[u], frag[v]});
    }
    int m = static_cast<int>(cand.size());
    if (m == 0) return {};

    const long long guard = 2000000;
    long long n_subsets = 0;
    {
        // Sum of binomial coefficients C(m, 1..f_max), capped.
        long long binom = 1;
        for (int k = 1; k <= std::min(f_max, m); ++k) {
            binom = binom * (m - k + 1) / k;
            n_subsets += binom;
            if (n_subsets > 4 * guard) break;
        }
    }
    long long n_bipart = nq <= 1 ? std::numeric_limits<long long>::max()
                                 : (nq - 1 >= 42 ? std::numeric_limits<long long>::max()
                                                 : (1LL << (nq - 1)));
    require(std::min(n_subsets, n_bipart) <= guard, ErrorCode::guard_exceeded,
            "escape-cut search space too large (" + std::to_string(n_subsets) + " subsets, " +
                std::to_string(n_bipart) + " bipartitions)");

    // Validates one candidate subset against the characterization: exactly
    // two escaping components, and the subset is exactly the set of edges
    // between them.
    std::vector<char> in_f(m, 0);
    auto check = [&](const std::vector<int>& f) -> bool {
        Dsu dsu(nq);
        for (int i : f) in_f[i] = 1;
        for (int i = 0; i < m; ++i)
            if (!in_f[i]) dsu.unite(cand[i].qa, cand[i].qb);
        int r1 = -1, r2 = -1;
        bool ok = true;
        for (int q = 0; q < nq && ok; ++q) {
            if (!frag_escapes[q]) continue;
            int r = dsu.find(q);
            if (r == r1 || r == r2) continue;
            if (r1 < 0)
                r1 = r;
            else if (r2 < 0)
                r2 = r;
            else
                ok = false;
        }
        ok = ok && r2 >= 0;
        for (size_t j = 0; j < f.size() && ok; ++j) {
            int ra = dsu.find(cand[f[j]].qa);
            int rb = dsu.find(cand[f[j]].qb);
            ok = (ra == r1 && rb == r2) || (ra == r2 && rb == r1);
        }
        for (int i : f) in_f[i] = 0;
        return ok;
    };

    std::vector<CutSet> out;
    auto emit = [&](const std::vector<int>& f) {
        CutSet cut;
        cut.center = center;
        cut.radius = radius;
        for (int i : f) cut.edges.push_back(cand[i].edge);
        std::sort(cut.edges.begin(), cut.edges.end());
        out.push_back(std::move(cut));
    };

    if (n_subsets <= guard && n_subsets <= n_bipart) {
        for (int k = 1; k <= std::min(f_max, m); ++k) {
            std::vector<int> idx(k);
            std::iota(idx.begin(), idx.end(), 0);
            while (true) {
                if (check(idx)) emit(idx);
                int pos = k - 1;
                while (pos >= 0 && idx[pos] == m - k + pos) --pos;
                if (pos < 0) break;
                ++idx[pos];
                for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    } else {
        std::set<std::vector<int>> seen;
        for (long long mask = 1; mask < (1LL << (nq - 1)); ++mask) {
            auto side = [&](int q) { return q == 0 ? 0 : static_cast<int>((mask >> (q - 1)) & 1); };
            std::vector<int> f;
            for (int i = 0; i < m && static_cast<int>(f.size()) <= f_max; ++i)
                if (side(cand[i].qa) != side(cand[i].qb)) f.push_back(i);
            if (f.empty() || static_cast<int>(f.size()) > f_max) continue;
            if (!seen.insert(f).second) continue;
            if (check(f)) emit(f);
        }
        std::sort(out.begin(), out.end(), [](const CutSet& a, const CutSet& b) {
            if (a.edges.size() != b.edges.size()) return a.edges.size() < b.edges.size();
            return a.edges < b.edges;
        });
    }
    return out;
}

std::vector<Vertex> local_label_maxima(const MultiGraph& g, const std::vector<char>& removed,
                                       const std::vector<double>& labels, int radius,
                                       const std::vector<char>& eligible) {
    require(labels.size() == static_cast<size_t>(g.num_vertices()), ErrorCode::invalid_argument,
            "labels size mismatch");
    require(eligible.empty() || eligible.size() == static_cast<size_t>(g.num_vertices()),
            ErrorCode::invalid_argument, "eligibility size mismatch");
    require(radius >= 0, ErrorCode::invalid_argument, "radius must be nonnegative");
    std::vector<Vertex> out;
    // Shared scratch distance array, reset via the touched list so each
    // candidate costs only its own ball.
    std::vector<int> dist(g.num_vertices(), -1);
    std::vector<Vertex> queue;
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        if (!eligible.empty() && !eligible[v]) continue;
        bool is_max = true;
        queue.assign(1, v);
        dist[v] = 0;
        for (std::size_t head = 0; head < queue.size() && is_max; ++head) {
            Vertex u = queue[head];
            if (u != v && labels[u] >= labels[v]) is_max = false;
            if (dist[u] == radius) continue;
            for (Dart d : g.darts_at(u)) {
                if (!removed.empty() && removed[MultiGraph::dart_edge(d)]) continue;
                Vertex t = g.dart_head(d);
                if (dist[t] < 0) {
                    dist[t] = dist[u] + 1;
                    queue.push_back(t);
                }
            }
        }
        for (Vertex t : queue) dist[t] = -1;
        if (is_max) out.push_back(v);
    }
    return out;
}

FactorGraph factor_graph(const MultiGraph& g, const std::vector<char>& removed) {
    require(removed.empty() || removed.size() == static_cast<size_t>(g.num_edges()),
            ErrorCode::invalid_argument, "removed mask size mismatch");
    FactorGraph fg;
    fg.component_of.assign(g.num_vertices(), -1);
    std::deque<Vertex> queue;
    for (Vertex s = 0; s < g.num_vertices(); ++s) {
        if (fg.component_of[s] >= 0) continue;
        int c = fg.num_components++;
        fg.component_of[s] = c;
        queue.push_back(s);
        while (!queue.empty()) {
            Vertex u = queue.front();
            queue.pop_front();
            for (Dart d : g.darts_at(u)) {
                if (!removed.empty() && removed[MultiGraph::dart_edge(d)]) continue;
                Vertex v = g.dart_head(d);
                if (fg.component_of[v] < 0) {
                    fg.component_of[v] = c;
                    queue.push_back(v);
                }
            }
        }
    }
    std::map<std::pair<int, int>, std::vector<Edge>> by_pair;
    if (!removed.empty()) {
        for (Edge e = 0; e < g.num_edges(); ++e) {
            if (!removed[e]) continue;
            auto [u, v] = g.endpoints(e);
            int a = fg.component_of[u], b = fg.component_of[v];
            if (a == b) continue;
            by_pair[{std::min(a, b), std::max(a, b)}].push_back(e);
        }
    }
    Dsu dsu(fg.num_components);
    fg.is_forest = true;
    for (auto& [pair, edges] : by_pair) {
        fg.links.push_back(pair);
        fg.link_edges.push_back(std::move(edges));
        if (!dsu.unite(pair.first, pair.second)) fg.is_forest = false;
    }
    return fg;
}

bool is_decomposing(const MultiGraph& g, const std::vector<char>& removed) {
    return factor_graph(g, removed).is_forest;
}

StageSchedule estimate_schedule(const Window& w, int radius, std::uint64_t seed, int samples) {
    require(radius >= 1, ErrorCode::invalid_argument, "stage radius must be positive");
    require(samples >= 1, ErrorCode::invalid_argument, "need at least one sample");
    std::vector<Vertex> roots;
    for (Vertex v = 0; v < w.graph.num_vertices(); ++v)
        if (w.dist[v] <= w.horizon - 2 * radius) roots.push_back(v);
    require(!roots.empty(), ErrorCode::horizon_exhausted,
            "window too small to sample complete 2R-balls");
    Rng rng(mix(seed, 0x5c4edULL, static_cast<std::uint64_t>(radius)));
    std::vector<int> sizes(samples);
    std::vector<char> no_removed;
    for (int i = 0; i < samples; ++i) {
        Vertex root = roots[rng.below(roots.size())];
        std::vector<int> dist = bounded_bfs(w.graph, no_removed, root, 2 * radius);
        sizes[i] = static_cast<int>(std::count_if(dist.begin(), dist.end(),
                                                  [](int d) { return d >= 0; }));
    }
    std::sort(sizes.begin(), sizes.end());
    // Smallest k with P(ball size < k) >= 1 - 2^-R, read off the order
    // statistics; the step budget is then 2^k.
    double target = 1.0 - std::ldexp(1.0, -radius);
    int c_min = static_cast<int>(std::ceil(target * samples));
    c_min = std::min(std::max(c_min, 1), samples);
    int k = sizes[c_min - 1] + 1;
    k = std::max(k, 2);

    StageSchedule s;
    s.radius = radius;
    s.log2_steps = k;
    s.rate_bound = 1.0 / k;
    double denom = -std::log2(1.0 - s.rate_bound);
    s.reshuffles = std::max(1, static_cast<int>(std::ceil(radius / denom)));
    return s;
}

StageReport run_stage(const Window& w, std::vector<char>& removed, const GraphOracle& oracle,
                      const StageSchedule& schedule, int f_max, int h_esc,
                      std::uint64_t seed, bool verify) {
    const MultiGraph& g = w.graph;
    require(removed.size() == static_cast<size_t>(g.num_edges()), ErrorCode::invalid_argument,
            "removed mask size mismatch");
    int radius = schedule.radius;
    int elig_radius = w.horizon - radius - h_esc;
    require(elig_radius >= 0, ErrorCode::horizon_exhausted,
            "window horizon too small for this stage's escape radius");
    std::vector<char> eligible(g.num_vertices(), 0);
    for (Vertex v = 0; v < g.num_vertices(); ++v)
        if (w.dist[v] <= elig_radius) eligible[v] = 1;

    StageReport report;
    report.schedule = schedule;
    report.h_esc = h_esc;
    Rng rng(mix(seed, 0xdeca0ULL, static_cast<std::uint64_t>(radius)));
    long long step_cap = schedule.log2_steps >= 62
                             ? std::numeric_limits<long long>::max()
                             : (1LL << schedule.log2_steps);

    // Incrementally maintained component labels and the list of removed
    // edges, used to decide which cuts keep the factor graph a forest.
    FactorGraph initial = factor_graph(g, removed);
    std::vector<int> comp_of = std::move(initial.component_of);
    int next_comp = initial.num_components;
    std::vector<Edge> removed_list;
    for (Edge e = 0; e < g.num_edges(); ++e)
        if (removed[e]) removed_list.push_back(e);

    std::vector<int> stamp(g.num_vertices(), 0);
    int cur_stamp = 0;
    std::vector<Vertex> side_queue;
    // Marks (with the current stamp) the vertices on the first cut edge's
    // tail side once the cut is taken out.
    auto split_side = [&](const std::vector<Edge>& cut_edges) {
        for (Edge e : cut_edges) removed[e] = 1;
        ++cur_stamp;
        side_queue.clear();
        Vertex s = g.endpoints(cut_edges[0]).first;
        stamp[s] = cur_stamp;
        side_queue.push_back(s);
        for (std::size_t head = 0; head < side_queue.size(); ++head) {
            for (Dart d : g.darts_at(side_queue[head])) {
                if (removed[MultiGraph::dart_edge(d)]) continue;
                Vertex t = g.dart_head(d);
                if (stamp[t] != cur_stamp) {
                    stamp[t] = cur_stamp;
                    side_queue.push_back(t);
                }
            }
        }
        for (Edge e : cut_edges) removed[e] = 0;
    };
    // Splitting a component is forest-safe unless some neighboring
    // component already holds removed edges into both halves of the split;
    // removed edges joining the halves merely thicken the new link.
    auto keeps_forest = [&](const CutSet& cut, int kcomp,
                            const std::vector<Edge>& old_incident) {
        if (old_incident.empty()) return true;
        split_side(cut.edges);
        std::map<int, int> touched_side;
        for (Edge e : old_incident) {
            auto [u, v] = g.endpoints(e);
            bool ku = comp_of[u] == kcomp, kv = comp_of[v] == kcomp;
            if (ku == kv) continue;
            Vertex w = ku ? u : v;
            int other = comp_of[ku ? v : u];
            int side = stamp[w] == cur_stamp ? 1 : 2;
            auto [it, fresh] = touched_side.try_emplace(other, side);
            if (!fresh && it->second != side) return false;
        }
        return true;
    };

    // Only labels within 2R of an eligible vertex can influence maximality,
    // and such vertices sit within elig_radius + 2R of the origin; labels
    // farther out are never read, so they stay zero.
    int label_radius = elig_radius + 2 * radius;
    std::vector<double> labels(g.num_vertices(), 0.0);
    // Cut enumeration is a pure function of the surviving-edge set, so a
    // vertex whose enumeration came back empty stays cut-free until the next
    // removal anywhere in the window. Skipping those repeats draws no
    // randomness, so results are identical, just cheaper; without this a
    // cut-free window (grid) pays the full enumeration in every round.
    std::vector<char> no_cuts(g.num_vertices(), 0);
    for (int round = 0; round < schedule.reshuffles; ++round) {
        std::uint64_t salt = mix(seed, static_cast<std::uint64_t>(radius),
                                 static_cast<std::uint64_t>(round));
        for (Vertex v = 0; v < g.num_vertices(); ++v)
            if (w.dist[v] <= label_radius) labels[v] = oracle.label(w.ids[v], salt);
        std::vector<Vertex> maxima =
            local_label_maxima(g, removed, labels, 2 * radius, eligible);
        ++report.rounds;
        for (long long step = 0; step < step_cap; ++step) {
            bool productive = false;
            for (Vertex x : maxima) {
                if (no_cuts[x]) continue;
                std::vector<CutSet> cuts =
                    enumerate_min_endcuts(g, removed, x, radius, f_max, h_esc);
                if (cuts.empty()) {
                    no_cuts[x] = 1;
                    continue;
                }
                int kcomp = comp_of[x];
                std::vector<Edge> old_incident;
                for (Edge e : removed_list) {
                    auto [u, v] = g.endpoints(e);
                    if (comp_of[u] == kcomp || comp_of[v] == kcomp)
                        old_incident.push_back(e);
                }
                std::vector<const CutSet*> safe;
                for (const CutSet& c : cuts)
                    if (keeps_forest(c, kcomp, old_incident)) safe.push_back(&c);
                if (safe.empty()) continue;
                const CutSet& pick = *safe[rng.below(safe.size())];
                split_side(pick.edges);
                for (Edge e : pick.edges) {
                    require(!removed[e], ErrorCode::invalid_argument,
                            "internal: chosen cuts overlap");
                    removed[e] = 1;
                    removed_list.push_back(e);
                }
                for (Vertex v : side_queue) comp_of[v] = next_comp;
                ++next_comp;
                std::fill(no_cuts.begin(), no_cuts.end(), 0);
                report.edges_removed += static_cast<long long>(pick.edges.size());
                productive = true;
                if (verify)
                    require(is_decomposing(g, removed), ErrorCode::invalid_argument,
                            "internal: removal broke the tree-like invariant");
            }
            // Fixed point: nothing was removed, so every remaining step of
            // this round would repeat the same empty enumerations and draw
            // no randomness. Skipping them is exactly equivalent.
            if (!productive) break;
            ++report.productive_steps;
        }
    }
    return report;
}

std::vector<ComponentClass> classify_components(const Window& w,
                                                const std::vector<char>& removed, int shell) {
    require(shell >= 1, ErrorCode::invalid_argument, "shell depth must be positive");
    const MultiGraph& g = w.graph;
    FactorGraph fg = factor_graph(g, removed);
    std::vector<ComponentClass> out(fg.num_components);
    for (Vertex v = 0; v < g.num_vertices(); ++v) ++out[fg.component_of[v]].size;

    auto in_shell = [&](Vertex v) { return w.dist[v] > w.horizon - shell; };
    std::vector<char> visited(g.num_vertices(), 0);
    std::deque<Vertex> queue;
    for (Vertex s = 0; s < g.num_vertices(); ++s) {
        if (!in_shell(s) || visited[s]) continue;
        bool reaches_rim = false;
        visited[s] = 1;
        queue.push_back(s);
        while (!queue.empty()) {
            Vertex u = queue.front();
            queue.pop_front();
            if (w.dist[u] == w.horizon) reaches_rim = true;
            for (Dart d : g.darts_at(u)) {
                if (!removed.empty() && removed[MultiGraph::dart_edge(d)]) continue;
                Vertex v = g.dart_head(d);
                if (!in_shell(v) || visited[v]) continue;
                visited[v] = 1;
                queue.push_back(v);
            }
        }
        if (reaches_rim) ++out[fg.component_of[s]].escape_directions;
    }
    return out;
}

DecomposeResult decompose(const GraphOracle& oracle, const DecomposeParams& params,
                          std::uint64_t seed) {
    require(params.r_max >= 1, ErrorCode::invalid_argument, "need at least one stage");
    require(params.f_max >= 1, ErrorCode::invalid_argument, "cut size cap must be positive");
    DecomposeResult res;
    res.window = explore(oracle, params.horizon);
    res.removed.assign(res.window.graph.num_edges(), 0);
    int last_h = 16;
    for (int radius = 1; radius <= params.r_max; ++radius) {
        int h_esc = params.h_esc > 0 ? params.h_esc : std::max(4 * radius, 16);
        last_h = h_esc;
        StageSchedule schedule = estimate_schedule(res.window, radius, seed);
        res.stages.push_back(run_stage(res.window, res.removed, oracle, schedule,
                                       params.f_max, h_esc, seed,
                                       params.verify_each_step));
    }
    // The final stage can only refine pieces holding a vertex within
    // horizon - r_max - h_esc of the origin; pieces rooted past that are
    // frozen and live at window distance > horizon - (r_max + h_esc + 1).
    // A shell that deep contains them whole, so an intact outward branch
    // counts as one escape direction instead of one per rim fan.
    res.components = classify_components(res.window, res.removed,
                                         params.r_max + last_h + 1);
    res.factor = factor_graph(res.window.graph, res.removed);
    require(res.factor.is_forest, ErrorCode::invalid_argument,
            "internal: final state is not tree-like");
    return res;
}

} // namespace upg
