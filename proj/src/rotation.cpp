#include "upg/rotation.hpp"

#include <algorithm>

#include "upg/error.hpp"
#include "upg/rng.hpp"

namespace upg {

RotationSystem::RotationSystem(MultiGraph graph, const std::vector<std::vector<Dart>>& orders)
    : graph_(std::move(graph)) {
    require(static_cast<int>(orders.size()) == graph_.num_vertices(), ErrorCode::invalid_argument,
            "rotation orders must cover every vertex");
    next_.assign(graph_.num_darts(), -1);
    prev_.assign(graph_.num_darts(), -1);
    for (Vertex v = 0; v < graph_.num_vertices(); ++v) {
        std::vector<Dart> sorted = orders[v];
        std::sort(sorted.begin(), sorted.end());
        require(sorted == graph_.darts_at(v), ErrorCode::invalid_argument,
                "rotation at vertex " + std::to_string(v) +
                    " does not list exactly the incident darts");
        const std::vector<Dart>& cyc = orders[v];
        for (size_t i = 0; i < cyc.size(); ++i) {
            Dart d = cyc[i];
            Dart nd = cyc[(i + 1) % cyc.size()];
            next_[d] = nd;
            prev_[nd] = d;
        }
    }
}

std::vector<Dart> RotationSystem::order_at(Vertex v) const {
    const std::vector<Dart>& darts = graph_.darts_at(v);
    if (darts.empty()) return {};
    std::vector<Dart> out;
    out.reserve(darts.size());
    Dart d = darts[0];
    do {
        out.push_back(d);
        d = next_[d];
    } while (d != darts[0]);
    return out;
}

std::vector<std::vector<Dart>> RotationSystem::all_orders() const {
    std::vector<std::vector<Dart>> orders(graph_.num_vertices());
    for (Vertex v = 0; v < graph_.num_vertices(); ++v) orders[v] = order_at(v);
    return orders;
}

RotationSystem RotationSystem::inverted() const {
    RotationSystem out(*this);
    std::swap(out.next_, out.prev_);
    return out;
}

bool RotationSystem::operator==(const RotationSystem& other) const {
    if (graph_.num_vertices() != other.graph_.num_vertices()) return false;
    if (graph_.num_edges() != other.graph_.num_edges()) return false;
    for (Edge e = 0; e < graph_.num_edges(); ++e)
        if (graph_.endpoints(e) != other.graph_.endpoints(e)) return false;
    return next_ == other.next_;
}

int FaceSet::total_darts() const {
    int total = 0;
    for (const auto& f : faces) total += static_cast<int>(f.size());
    return total;
}

std::vector<int> FaceSet::lengths_sorted() const {
    std::vector<int> lens;
    lens.reserve(faces.size());
    for (const auto& f : faces) lens.push_back(static_cast<int>(f.size()));
    std::sort(lens.begin(), lens.end());
    return lens;
}

FaceSet trace_faces(const RotationSystem& rs) {
    const MultiGraph& g = rs.graph();
    FaceSet out;
    std::vector<bool> visited(g.num_darts(), false);
    for (Dart start = 0; start < g.num_darts(); ++start) {
        if (visited[start]) continue;
        std::vector<Dart> walk;
        Dart d = start;
        do {
            visited[d] = true;
            walk.push_back(d);
            d = rs.next(MultiGraph::twin(d));
        } while (d != start);
        out.faces.push_back(std::move(walk));
    }
    return out;
}

int genus(const RotationSystem& rs) {
    const MultiGraph& g = rs.graph();
    require(is_connected(g), ErrorCode::invalid_argument,
            "genus requires a connected graph; split components first");
    int faces = static_cast<int>(trace_faces(rs).faces.size());
    if (g.num_edges() == 0) faces = 1;
    int euler = 2 - g.num_vertices() + g.num_edges() - faces;
    require(euler >= 0 && euler % 2 == 0, ErrorCode::invalid_argument,
            "malformed rotation system: Euler characteristic is not an even nonneg integer");
    return euler / 2;
}

namespace {

Dart dart_of_edge_at(const MultiGraph& g, Edge e, Vertex v) {
    return g.endpoints(e).first == v ? MultiGraph::dart(e, 0) : MultiGraph::dart(e, 1);
}

void require_consecutive(const RotationSystem& rs, Vertex v, const std::vector<Dart>& run) {
    const MultiGraph& g = rs.graph();
    if (run.size() == static_cast<size_t>(g.degree(v))) return;
    std::vector<bool> in_run(g.num_darts(), false);
    for (Dart d : run) in_run[d] = true;
    int entry_points = 0;
    for (Dart d : run)
        if (!in_run[rs.prev(d)]) entry_points++;
    require(entry_points == 1, ErrorCode::invalid_argument,
            "parallel bundle is not consecutive in the rotation at vertex " + std::to_string(v));
}

} // namespace

RotationSystem randomize_bundles(const RotationSystem& rs, std::uint64_t seed) {
    const MultiGraph& g = rs.graph();
    std::vector<Dart> relabel(g.num_darts());
    for (Dart d = 0; d < g.num_darts(); ++d) relabel[d] = d;

    for (const std::vector<Edge>& bundle : g.bundles()) {
        if (bundle.size() < 2) continue;
        auto [a, b] = g.endpoints(bundle[0]);
        std::vector<Dart> run_a, run_b;
        for (Edge e : bundle) {
            run_a.push_back(dart_of_edge_at(g, e, a));
            run_b.push_back(dart_of_edge_at(g, e, b));
        }
        require_consecutive(rs, a, run_a);
        require_consecutive(rs, b, run_b);

        Rng rng(mix(seed, static_cast<std::uint64_t>(bundle[0])));
        std::vector<Edge> target = bundle;
        rng.shuffle(target);
        for (size_t i = 0; i < bundle.size(); ++i) {
            relabel[dart_of_edge_at(g, bundle[i], a)] = dart_of_edge_at(g, target[i], a);
            relabel[dart_of_edge_at(g, bundle[i], b)] = dart_of_edge_at(g, target[i], b);
        }
    }

    std::vector<std::vector<Dart>> orders(g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        for (Dart d : rs.order_at(v)) orders[v].push_back(relabel[d]);
    }
    return RotationSystem(g, orders);
}

std::uint64_t count_rotation_systems(const MultiGraph& g) {
    std::uint64_t total = 1;
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        int deg = g.degree(v);
        for (int k = 2; k < deg; ++k) {
            std::uint64_t factor = static_cast<std::uint64_t>(k);
            require(total <= UINT64_MAX / factor, ErrorCode::guard_exceeded,
                    "rotation system count overflows 64 bits");
            total *= factor;
        }
    }
    return total;
}

void enumerate_rotations(const MultiGraph& g,
                         const std::function<void(const RotationSystem&)>& fn) {
    int n = g.num_vertices();
    std::vector<Dart> heads(n, -1);
    std::vector<std::vector<Dart>> tails(n);
    for (Vertex v = 0; v < n; ++v) {
        const std::vector<Dart>& darts = g.darts_at(v);
        if (darts.empty()) continue;
        heads[v] = darts[0];
        tails[v].assign(darts.begin() + 1, darts.end());
    }
    while (true) {
        std::vector<std::vector<Dart>> orders(n);
        for (Vertex v = 0; v < n; ++v) {
            if (heads[v] < 0) continue;
            orders[v].push_back(heads[v]);
            orders[v].insert(orders[v].end(), tails[v].begin(), tails[v].end());
        }
        fn(RotationSystem(g, orders));
        int v = n - 1;
        while (v >= 0 && !std::next_permutation(tails[v].begin(), tails[v].end())) v--;
        if (v < 0) return;
    }
}

} // namespace upg
