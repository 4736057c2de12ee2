#include "upg/planar3.hpp"

#include <algorithm>
#include <map>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

#include "upg/error.hpp"
#include "upg/rng.hpp"

namespace upg {

namespace {

using BoostGraph =
    boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, boost::no_property,
                          boost::property<boost::edge_index_t, int>>;
using BoostEdge = boost::graph_traits<BoostGraph>::edge_descriptor;

RotationSystem sorted_rotation(const MultiGraph& g) {
    std::vector<std::vector<Dart>> orders(g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) orders[v] = g.darts_at(v);
    return RotationSystem(g, orders);
}

} // namespace

EmbeddingResult planar_embed(const MultiGraph& g) {
    require(is_connected(g), ErrorCode::invalid_argument,
            "planar_embed requires a connected graph");
    Subgraph simple = simplify(g);
    const MultiGraph& s = simple.graph;

    BoostGraph bg(s.num_vertices());
    for (Edge e = 0; e < s.num_edges(); ++e) {
        auto [u, v] = s.endpoints(e);
        boost::add_edge(u, v, e, bg);
    }
    std::vector<std::vector<BoostEdge>> embedding(s.num_vertices());
    std::vector<BoostEdge> kuratowski;
    bool planar = boost::boyer_myrvold_planarity_test(
        boost::boyer_myrvold_params::graph = bg,
        boost::boyer_myrvold_params::embedding = boost::make_iterator_property_map(
            embedding.begin(), boost::get(boost::vertex_index, bg)),
        boost::boyer_myrvold_params::kuratowski_subgraph = std::back_inserter(kuratowski));

    if (!planar) {
        std::vector<Edge> witness;
        for (BoostEdge be : kuratowski)
            witness.push_back(simple.edge_to_parent[boost::get(boost::edge_index, bg, be)]);
        std::sort(witness.begin(), witness.end());
        witness.erase(std::unique(witness.begin(), witness.end()), witness.end());
        return EmbeddingResult{false, sorted_rotation(g), std::move(witness)};
    }

    // Expand each simple edge back into its parallel bundle: ascending edge
    // ids at the smaller endpoint, descending at the larger, so consecutive
    // copies bound bigons and the genus stays 0.
    auto bundles = g.bundles();
    std::map<Edge, const std::vector<Edge>*> bundle_of_rep;
    for (const auto& bundle : bundles) bundle_of_rep[bundle.front()] = &bundle;

    std::vector<std::vector<Dart>> orders(g.num_vertices());
    for (Vertex v = 0; v < s.num_vertices(); ++v) {
        for (BoostEdge be : embedding[v]) {
            Edge rep = simple.edge_to_parent[boost::get(boost::edge_index, bg, be)];
            const std::vector<Edge>& bundle = *bundle_of_rep.at(rep);
            auto [a, b] = g.endpoints(rep);
            if (v == std::min(a, b)) {
                for (auto it = bundle.begin(); it != bundle.end(); ++it)
                    orders[v].push_back(g.dart_at(*it, v));
            } else {
                for (auto it = bundle.rbegin(); it != bundle.rend(); ++it)
                    orders[v].push_back(g.dart_at(*it, v));
            }
        }
    }
    return EmbeddingResult{true, RotationSystem(g, orders), {}};
}

bool whitney_check(const MultiGraph& g) {
    Subgraph simple = simplify(g);
    const MultiGraph& s = simple.graph;
    require(s.num_vertices() <= 8 || s.num_edges() <= 14, ErrorCode::guard_exceeded,
            "whitney_check guarded to graphs with at most 8 vertices or 14 edges");
    require(is_k_connected(s, 3), ErrorCode::invalid_argument,
            "whitney_check requires a 3-connected simplification");
    std::vector<RotationSystem> zero_genus;
    enumerate_rotations(s, [&](const RotationSystem& rs) {
        if (genus(rs) == 0) zero_genus.push_back(rs);
    });
    return zero_genus.size() == 2 && zero_genus[0] == zero_genus[1].inverted();
}

RotationSystem detail::uniform_planar_embedding_unchecked(const MultiGraph& g,
                                                          std::uint64_t seed) {
    EmbeddingResult result = planar_embed(g);
    require(result.planar, ErrorCode::not_planar, "graph is not planar");
    Rng rng(seed);
    RotationSystem rs = rng.coin() ? result.rs.inverted() : result.rs;
    return randomize_bundles(rs, rng.next());
}

RotationSystem uniform_planar_embedding(const MultiGraph& g, std::uint64_t seed) {
    require(is_k_connected(g, 3), ErrorCode::invalid_argument,
            "uniform_planar_embedding requires a 3-connected simplification");
    return detail::uniform_planar_embedding_unchecked(g, seed);
}

} // namespace upg
