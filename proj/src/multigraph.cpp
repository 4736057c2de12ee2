#include "upg/multigraph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <string>

namespace upg {

MultiGraph::MultiGraph(int num_vertices, std::vector<std::pair<Vertex, Vertex>> edges)
    : num_vertices_(num_vertices), endpoints_(std::move(edges)) {
    require(num_vertices >= 0, ErrorCode::invalid_argument, "negative vertex count");
    incidence_.assign(num_vertices_, {});
    for (Edge e = 0; e < num_edges(); ++e) {
        auto [u, v] = endpoints_[e];
        require(u >= 0 && u < num_vertices_ && v >= 0 && v < num_vertices_,
                ErrorCode::invalid_argument,
                "edge " + std::to_string(e) + " has an endpoint out of range");
        require(u != v, ErrorCode::invalid_argument,
                "self-loop rejected at edge " + std::to_string(e));
        incidence_[u].push_back(dart(e, 0));
        incidence_[v].push_back(dart(e, 1));
    }
    // Incidence lists are built in edge order, so they are already sorted.
}

std::vector<std::vector<Edge>> MultiGraph::bundles() const {
    std::map<std::pair<Vertex, Vertex>, std::vector<Edge>> groups;
    for (Edge e = 0; e < num_edges(); ++e) {
        auto [u, v] = endpoints_[e];
        groups[{std::min(u, v), std::max(u, v)}].push_back(e);
    }
    std::vector<std::vector<Edge>> out;
    out.reserve(groups.size());
    for (auto& [key, group] : groups) out.push_back(std::move(group));
    return out;
}

bool MultiGraph::is_simple() const {
    for (const auto& group : bundles())
        if (group.size() > 1) return false;
    return true;
}

bool MultiGraph::same_endpoints(Edge a, Edge b) const {
    auto [au, av] = endpoints_[a];
    auto [bu, bv] = endpoints_[b];
    return (au == bu && av == bv) || (au == bv && av == bu);
}

std::vector<int> bfs_distances(const MultiGraph& g, Vertex source) {
    require(source >= 0 && source < g.num_vertices(), ErrorCode::invalid_argument,
            "bfs source out of range");
    std::vector<int> dist(g.num_vertices(), -1);
    std::queue<Vertex> queue;
    dist[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
        Vertex v = queue.front();
        queue.pop();
        for (Dart d : g.darts_at(v)) {
            Vertex w = g.dart_head(d);
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push(w);
            }
        }
    }
    return dist;
}

bool is_connected(const MultiGraph& g) {
    if (g.num_vertices() <= 1) return true;
    auto dist = bfs_distances(g, 0);
    return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

Subgraph induced_subgraph(const MultiGraph& g, const std::vector<Vertex>& vertices) {
    std::vector<int> local(g.num_vertices(), -1);
    for (size_t i = 0; i < vertices.size(); ++i) {
        Vertex v = vertices[i];
        require(v >= 0 && v < g.num_vertices(), ErrorCode::invalid_argument,
                "subgraph vertex out of range");
        require(local[v] < 0, ErrorCode::invalid_argument, "duplicate subgraph vertex");
        local[v] = static_cast<int>(i);
    }
    Subgraph out;
    out.vertex_to_parent = vertices;
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Edge e = 0; e < g.num_edges(); ++e) {
        auto [u, v] = g.endpoints(e);
        if (local[u] >= 0 && local[v] >= 0) {
            edges.emplace_back(local[u], local[v]);
            out.edge_to_parent.push_back(e);
        }
    }
    out.graph = MultiGraph(static_cast<int>(vertices.size()), std::move(edges));
    return out;
}

Subgraph ball(const MultiGraph& g, Vertex x, int r) {
    require(r >= 0, ErrorCode::invalid_argument, "negative ball radius");
    auto dist = bfs_distances(g, x);
    std::vector<Vertex> inside;
    for (Vertex v = 0; v < g.num_vertices(); ++v)
        if (dist[v] >= 0 && dist[v] <= r) inside.push_back(v);
    Subgraph out = induced_subgraph(g, inside);
    out.dist.resize(inside.size());
    for (size_t i = 0; i < inside.size(); ++i) {
        out.dist[i] = dist[inside[i]];
        if (inside[i] == x) out.root_local = static_cast<int>(i);
    }
    return out;
}

MultiGraph r_closure(const MultiGraph& g, int R) {
    require(R >= 1, ErrorCode::invalid_argument, "closure radius must be >= 1");
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        auto dist = bfs_distances(g, v);
        for (Vertex w = v + 1; w < g.num_vertices(); ++w)
            if (dist[w] >= 1 && dist[w] <= R) edges.emplace_back(v, w);
    }
    return MultiGraph(g.num_vertices(), std::move(edges));
}

namespace {

// Iterative lowpoint DFS; emits biconnected components off an edge stack.
struct BlockFinder {
    const MultiGraph& g;
    std::vector<int> number, lowpoint;
    std::vector<bool> is_cut, edge_seen;
    std::vector<Edge> edge_stack;
    std::vector<std::vector<Edge>> blocks;
    int counter = 0;

    explicit BlockFinder(const MultiGraph& graph)
        : g(graph),
          number(graph.num_vertices(), -1),
          lowpoint(graph.num_vertices(), 0),
          is_cut(graph.num_vertices(), false),
          edge_seen(graph.num_edges(), false) {}

    void pop_block(size_t base) {
        std::vector<Edge> block(edge_stack.begin() + static_cast<ptrdiff_t>(base),
                                edge_stack.end());
        edge_stack.resize(base);
        std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
    }

    void run(Vertex root) {
        struct Frame {
            Vertex v;
            size_t next = 0;
            int children = 0;
            // Edge stack height just before the tree edge into v was pushed;
            // everything at or above it belongs to v's biconnected component
            // through its parent. Unused for the root.
            size_t edge_base = 0;
        };
        std::vector<Frame> stack;
        number[root] = counter++;
        lowpoint[root] = number[root];
        stack.push_back({root});
        while (!stack.empty()) {
            Vertex v = stack.back().v;
            if (stack.back().next < g.darts_at(v).size()) {
                Dart d = g.darts_at(v)[stack.back().next++];
                Edge e = MultiGraph::dart_edge(d);
                if (edge_seen[e]) continue;
                edge_seen[e] = true;
                Vertex w = g.dart_head(d);
                if (number[w] < 0) {
                    stack.back().children++;
                    size_t base = edge_stack.size();
                    edge_stack.push_back(e);
                    number[w] = counter++;
                    lowpoint[w] = number[w];
                    stack.push_back({w, 0, 0, base});
                } else {
                    // Back edge to an ancestor (parallel edges to the parent
                    // land here too and correctly certify a cycle).
                    edge_stack.push_back(e);
                    lowpoint[v] = std::min(lowpoint[v], number[w]);
                }
            } else {
                Frame finished = stack.back();
                stack.pop_back();
                if (stack.empty()) {
                    if (finished.children >= 2) is_cut[v] = true;
                    continue;
                }
                Vertex p = stack.back().v;
                lowpoint[p] = std::min(lowpoint[p], lowpoint[v]);
                if (lowpoint[v] >= number[p]) {
                    if (stack.size() > 1) is_cut[p] = true;
                    pop_block(finished.edge_base);
                }
            }
        }
    }
};

} // namespace

BlockCut blocks_and_cutvertices(const MultiGraph& g) {
    require(g.num_vertices() >= 1, ErrorCode::invalid_argument, "empty graph");
    require(is_connected(g), ErrorCode::invalid_argument,
            "blocks_and_cutvertices requires a connected graph");
    BlockFinder finder(g);
    finder.run(0);
    BlockCut out;
    out.blocks = std::move(finder.blocks);
    std::sort(out.blocks.begin(), out.blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (Vertex v = 0; v < g.num_vertices(); ++v)
        if (finder.is_cut[v]) out.cutvertices.push_back(v);
    return out;
}

namespace {

// True iff the subgraph induced by the alive vertices is connected and has
// no articulation vertex. An entering tree dart is skipped by exact id, so
// parallel edges back to the DFS parent still count as back edges.
bool alive_part_biconnected(const MultiGraph& g, const std::vector<bool>& alive) {
    Vertex root = -1;
    int alive_count = 0;
    for (Vertex v = 0; v < g.num_vertices(); ++v)
        if (alive[v]) {
            alive_count++;
            if (root < 0) root = v;
        }
    if (alive_count <= 1) return true;

    struct Frame {
        Vertex v;
        std::size_t idx;
        Dart skip; // dart leading back along the entering tree edge
    };
    std::vector<int> disc(g.num_vertices(), -1);
    std::vector<int> low(g.num_vertices(), 0);
    std::vector<Frame> stack;
    int timer = 0;
    int visited = 1;
    int root_children = 0;
    disc[root] = low[root] = timer++;
    stack.push_back({root, 0, -1});
    while (!stack.empty()) {
        Frame& f = stack.back();
        const std::vector<Dart>& darts = g.darts_at(f.v);
        if (f.idx == darts.size()) {
            Vertex child = f.v;
            stack.pop_back();
            if (stack.empty()) break;
            Vertex parent = stack.back().v;
            low[parent] = std::min(low[parent], low[child]);
            if (parent == root) {
                if (++root_children >= 2) return false;
            } else if (low[child] >= disc[parent]) {
                return false;
            }
            continue;
        }
        Dart d = darts[f.idx++];
        if (d == f.skip) continue;
        Vertex w = g.dart_head(d);
        if (!alive[w]) continue;
        if (disc[w] < 0) {
            disc[w] = low[w] = timer++;
            visited++;
            stack.push_back({w, 0, MultiGraph::twin(d)});
        } else {
            low[f.v] = std::min(low[f.v], disc[w]);
        }
    }
    return visited == alive_count;
}

} // namespace

bool is_k_connected(const MultiGraph& g, int k) {
    require(k >= 1 && k <= 3, ErrorCode::invalid_argument, "k must be 1, 2 or 3");
    require(g.num_vertices() <= 10000, ErrorCode::guard_exceeded,
            "is_k_connected guarded to 10^4 vertices");
    Subgraph simple = simplify(g);
    const MultiGraph& s = simple.graph;
    if (s.num_vertices() < k + 1) return false;
    if (!is_connected(s)) return false;
    if (k == 1) return true;
    std::vector<bool> alive(s.num_vertices(), true);
    if (!alive_part_biconnected(s, alive)) return false;
    if (k == 2) return true;
    // 3-connectivity: no single deletion may leave an articulation vertex.
    for (Vertex u = 0; u < s.num_vertices(); ++u) {
        alive[u] = false;
        bool ok = alive_part_biconnected(s, alive);
        alive[u] = true;
        if (!ok) return false;
    }
    return true;
}

bool is_biconnected_multi(const MultiGraph& g) {
    if (g.num_vertices() < 2 || g.num_edges() < 2) return false;
    if (!is_connected(g)) return false;
    for (Vertex v = 0; v < g.num_vertices(); ++v)
        if (g.degree(v) < 2) return false;
    BlockCut bc = blocks_and_cutvertices(g);
    return bc.cutvertices.empty();
}

Subgraph simplify(const MultiGraph& g) {
    Subgraph out;
    out.vertex_to_parent.resize(g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) out.vertex_to_parent[v] = v;
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const auto& group : g.bundles()) {
        edges.push_back(g.endpoints(group.front()));
        out.edge_to_parent.push_back(group.front());
    }
    out.graph = MultiGraph(g.num_vertices(), std::move(edges));
    return out;
}

} // namespace upg
