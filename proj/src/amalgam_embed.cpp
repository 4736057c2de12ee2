#include "upg/amalgam_embed.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "upg/error.hpp"
#include "upg/planar3.hpp"
#include "upg/rng.hpp"

namespace upg {

namespace {

// Cyclic order at the anchor vertex of `start`, beginning with `start`.
std::vector<Dart> order_from(const RotationSystem& rs, Dart start) {
    std::vector<Dart> out;
    Dart d = start;
    do {
        out.push_back(d);
        d = rs.next(d);
    } while (d != start);
    return out;
}

} // namespace

RotationSystem merge_embeddings(const RotationSystem& pa, const RotationSystem& pb,
                                const AmalgamSpec& spec) {
    const MultiGraph& a = pa.graph();
    const MultiGraph& b = pb.graph();
    require(genus(pa) == 0, ErrorCode::not_planar, "first rotation system is not planar");
    require(genus(pb) == 0, ErrorCode::not_planar, "second rotation system is not planar");
    AmalgamResult am = edge_amalgam(a, b, spec);

    auto map_dart_a = [&](Dart d) {
        Edge fe = am.edge_map_a[MultiGraph::dart_edge(d)];
        return am.graph.dart_at(fe, am.vertex_map_a[a.dart_vertex(d)]);
    };
    auto map_dart_b = [&](Dart d) {
        Edge fe = am.edge_map_b[MultiGraph::dart_edge(d)];
        return am.graph.dart_at(fe, am.vertex_map_b[b.dart_vertex(d)]);
    };

    std::vector<std::vector<Dart>> orders(am.graph.num_vertices());
    for (Vertex v = 0; v < a.num_vertices(); ++v) {
        if (v == spec.tail_a || v == spec.head_a) continue;
        for (Dart d : pa.order_at(v)) orders[am.vertex_map_a[v]].push_back(map_dart_a(d));
    }
    for (Vertex v = 0; v < b.num_vertices(); ++v) {
        if (v == spec.tail_b || v == spec.head_b) continue;
        for (Dart d : pb.order_at(v)) orders[am.vertex_map_b[v]].push_back(map_dart_b(d));
    }
    for (int side = 0; side < 2; ++side) {
        Vertex va = side ? spec.head_a : spec.tail_a;
        Vertex vb = side ? spec.head_b : spec.tail_b;
        std::vector<Dart>& out = orders[am.vertex_map_a[va]];
        std::vector<Dart> la = order_from(pa, a.dart_at(spec.edge_a, va));
        for (size_t i = 1; i < la.size(); ++i) out.push_back(map_dart_a(la[i]));
        std::vector<Dart> lb = order_from(pb, b.dart_at(spec.edge_b, vb));
        for (size_t i = 1; i < lb.size(); ++i) out.push_back(map_dart_b(lb[i]));
    }
    RotationSystem merged(am.graph, orders);
    require(genus(merged) == 0, ErrorCode::invalid_argument,
            "internal: amalgamated embedding lost planarity");
    return merged;
}

std::vector<Dart> sigma_v(const std::vector<std::vector<Dart>>& block_orders,
                          std::uint64_t seed) {
    require(!block_orders.empty(), ErrorCode::invalid_argument,
            "sigma_v needs at least one block");
    for (const auto& lst : block_orders)
        require(!lst.empty(), ErrorCode::invalid_argument, "sigma_v block with no darts");
    Rng rng(seed);
    int k = static_cast<int>(block_orders.size());
    std::vector<std::vector<Dart>> rotated(k);
    for (int i = 0; i < k; ++i) {
        const auto& src = block_orders[i];
        size_t start = static_cast<size_t>(rng.below(src.size()));
        for (size_t j = 0; j < src.size(); ++j)
            rotated[i].push_back(src[(start + j) % src.size()]);
    }
    // Uniform cyclic order of the blocks: pin block 0, permute the rest.
    std::vector<int> rest(k - 1);
    std::iota(rest.begin(), rest.end(), 1);
    rng.shuffle(rest);
    std::vector<Dart> out = std::move(rotated[0]);
    for (int i : rest) out.insert(out.end(), rotated[i].begin(), rotated[i].end());
    return out;
}

namespace {

RotationSystem embed_single_block(const BlockNode& node, std::uint64_t sub_seed) {
    const MultiGraph& g = node.graph;
    switch (node.kind) {
        case BlockKind::cycle: {
            // Degree-2 vertices have a unique cyclic order.
            std::vector<std::vector<Dart>> orders(g.num_vertices());
            for (Vertex v = 0; v < g.num_vertices(); ++v) orders[v] = g.darts_at(v);
            return RotationSystem(g, orders);
        }
        case BlockKind::multilink: {
            Rng rng(sub_seed);
            std::vector<Edge> cyc(g.num_edges());
            std::iota(cyc.begin(), cyc.end(), 0);
            // Uniform cyclic order of the parallel edges: pin edge 0.
            std::vector<Edge> rest(cyc.begin() + 1, cyc.end());
            rng.shuffle(rest);
            std::copy(rest.begin(), rest.end(), cyc.begin() + 1);
            std::vector<std::vector<Dart>> orders(2);
            for (Edge e : cyc) orders[0].push_back(g.dart_at(e, 0));
            for (auto it = cyc.rbegin(); it != cyc.rend(); ++it)
                orders[1].push_back(g.dart_at(*it, 1));
            return RotationSystem(g, orders);
        }
        case BlockKind::three_connected:
            return detail::uniform_planar_embedding_unchecked(g, sub_seed);
    }
    fail(ErrorCode::invalid_argument, "unknown block kind");
}

RotationSystem fold_embeddings(const ThreeBlockTree& tree, std::uint64_t seed,
                               const std::vector<int>& link_order) {
    ReconstructResult rec = reconstruct(tree, link_order); // validates tree + order

    int nb = static_cast<int>(tree.blocks.size());
    std::vector<long long> offset(nb, 0);
    for (int i = 1; i < nb; ++i) offset[i] = offset[i - 1] + tree.blocks[i - 1].graph.num_darts();
    auto virt_tag = [&](int bi, Dart d) { return -(1 + offset[bi] + d); };

    std::vector<int> comp_of(nb);
    std::iota(comp_of.begin(), comp_of.end(), 0);
    std::vector<std::vector<int>> comp_blocks(nb);
    std::vector<std::map<Vertex, std::vector<long long>>> comp_orders(nb);
    for (int i = 0; i < nb; ++i) {
        comp_blocks[i] = {i};
        const BlockNode& node = tree.blocks[i];
        RotationSystem pi = embed_single_block(node, mix(seed, 0xb10c0de5ULL, i));
        for (Vertex lv = 0; lv < node.graph.num_vertices(); ++lv) {
            std::vector<long long> lst;
            for (Dart d : pi.order_at(lv)) {
                Edge le = MultiGraph::dart_edge(d);
                if (node.is_virtual(le)) {
                    lst.push_back(virt_tag(i, d));
                } else {
                    Edge fe = rec.edge_maps[i][le];
                    lst.push_back(rec.graph.dart_at(fe, rec.vertex_maps[i][lv]));
                }
            }
            comp_orders[i][rec.vertex_maps[i][lv]] = std::move(lst);
        }
    }

    // Cut both glue darts and concatenate the remainders, each starting just
    // past its deleted dart.
    auto splice = [](const std::vector<long long>& la, long long taga,
                     const std::vector<long long>& lb, long long tagb) {
        auto ita = std::find(la.begin(), la.end(), taga);
        auto itb = std::find(lb.begin(), lb.end(), tagb);
        require(ita != la.end() && itb != lb.end(), ErrorCode::invalid_argument,
                "internal: glue dart missing from its rotation");
        std::vector<long long> out;
        out.insert(out.end(), ita + 1, la.end());
        out.insert(out.end(), la.begin(), ita);
        out.insert(out.end(), itb + 1, lb.end());
        out.insert(out.end(), lb.begin(), itb);
        return out;
    };

    for (int li : link_order) {
        const TreeLink& l = tree.links[li];
        int ca = comp_of[l.block_a];
        int cb = comp_of[l.block_b];
        require(ca != cb, ErrorCode::invalid_argument, "internal: link joins one component");
        long long tag_ta = virt_tag(l.block_a, tree.blocks[l.block_a].graph.dart_at(l.edge_a, l.tail_a));
        long long tag_ha = virt_tag(l.block_a, tree.blocks[l.block_a].graph.dart_at(l.edge_a, l.head_a));
        long long tag_tb = virt_tag(l.block_b, tree.blocks[l.block_b].graph.dart_at(l.edge_b, l.tail_b));
        long long tag_hb = virt_tag(l.block_b, tree.blocks[l.block_b].graph.dart_at(l.edge_b, l.head_b));
        Vertex f_tail = rec.vertex_maps[l.block_a][l.tail_a];
        Vertex f_head = rec.vertex_maps[l.block_a][l.head_a];
        require(rec.vertex_maps[l.block_b][l.tail_b] == f_tail &&
                    rec.vertex_maps[l.block_b][l.head_b] == f_head,
                ErrorCode::invalid_argument, "internal: link endpoints disagree");
        comp_orders[ca][f_tail] =
            splice(comp_orders[ca][f_tail], tag_ta, comp_orders[cb][f_tail], tag_tb);
        comp_orders[ca][f_head] =
            splice(comp_orders[ca][f_head], tag_ha, comp_orders[cb][f_head], tag_hb);
        for (auto& [fv, lst] : comp_orders[cb]) {
            if (fv == f_tail || fv == f_head) continue;
            comp_orders[ca][fv] = std::move(lst);
        }
        comp_orders[cb].clear();
        for (int bi : comp_blocks[cb]) comp_of[bi] = ca;
        comp_blocks[ca].insert(comp_blocks[ca].end(), comp_blocks[cb].begin(),
                               comp_blocks[cb].end());
        comp_blocks[cb].clear();
    }

    int root = comp_of[0];
    require(comp_orders[root].size() == static_cast<size_t>(rec.graph.num_vertices()),
            ErrorCode::invalid_argument, "internal: fold left vertices behind");
    std::vector<std::vector<Dart>> orders(rec.graph.num_vertices());
    for (const auto& [fv, lst] : comp_orders[root]) {
        for (long long t : lst) {
            require(t >= 0, ErrorCode::invalid_argument,
                    "internal: unconsumed virtual dart after fold");
            orders[fv].push_back(static_cast<Dart>(t));
        }
    }
    RotationSystem rs(rec.graph, orders);
    require(genus(rs) == 0, ErrorCode::invalid_argument,
            "internal: folded embedding lost planarity");
    return rs;
}

} // namespace

RotationSystem embed_block_tree(const ThreeBlockTree& tree, std::uint64_t seed,
                                const std::vector<int>& link_order) {
    return fold_embeddings(tree, seed, link_order);
}

RotationSystem embed_block_tree(const ThreeBlockTree& tree, std::uint64_t seed) {
    // Deterministic fold order: BFS over the links from block 0. The result
    // does not depend on this choice; it only pins the execution path.
    std::vector<std::vector<int>> adj(tree.blocks.size());
    for (size_t li = 0; li < tree.links.size(); ++li) {
        adj[tree.links[li].block_a].push_back(static_cast<int>(li));
        adj[tree.links[li].block_b].push_back(static_cast<int>(li));
    }
    std::vector<int> order;
    std::vector<bool> seen(tree.blocks.size(), false);
    std::vector<int> queue{0};
    if (!tree.blocks.empty()) seen[0] = true;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int block = queue[qi];
        for (int li : adj[block]) {
            const TreeLink& l = tree.links[li];
            int other = l.block_a == block ? l.block_b : l.block_a;
            if (seen[other]) continue;
            seen[other] = true;
            order.push_back(li);
            queue.push_back(other);
        }
    }
    return fold_embeddings(tree, seed, order);
}

RotationSystem embed_graph(const MultiGraph& g, std::uint64_t seed) {
    require(g.num_vertices() >= 1, ErrorCode::invalid_argument,
            "embed_graph needs at least one vertex");
    require(is_connected(g), ErrorCode::invalid_argument,
            "embed_graph requires a connected graph");
    EmbeddingResult pre = planar_embed(g);
    if (!pre.planar) {
        std::string msg = "graph is not planar; obstruction edges:";
        for (Edge e : pre.witness) {
            msg += ' ';
            msg += std::to_string(e);
        }
        fail(ErrorCode::not_planar, msg);
    }

    BlockCut bc = blocks_and_cutvertices(g);
    std::vector<std::vector<std::vector<Dart>>> at_vertex(g.num_vertices());
    for (size_t bi = 0; bi < bc.blocks.size(); ++bi) {
        std::vector<Edge> edges = bc.blocks[bi];
        std::sort(edges.begin(), edges.end());
        std::vector<Vertex> verts;
        for (Edge e : edges) {
            auto [u, v] = g.endpoints(e);
            verts.push_back(u);
            verts.push_back(v);
        }
        std::sort(verts.begin(), verts.end());
        verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
        std::vector<int> local(g.num_vertices(), -1);
        for (size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<int>(i);
        std::vector<std::pair<Vertex, Vertex>> local_edges;
        for (Edge e : edges) {
            auto [u, v] = g.endpoints(e);
            local_edges.push_back({local[u], local[v]});
        }
        MultiGraph lg(static_cast<int>(verts.size()), local_edges);

        auto push_order = [&](Vertex lv, const std::vector<Dart>& local_order) {
            std::vector<Dart> parent;
            for (Dart d : local_order)
                parent.push_back(g.dart_at(edges[MultiGraph::dart_edge(d)], verts[lv]));
            at_vertex[verts[lv]].push_back(std::move(parent));
        };

        if (lg.num_edges() < 3) {
            // Bridges and 2-edge blocks: all degrees are <= 2, so the
            // rotation is unique.
            for (Vertex lv = 0; lv < lg.num_vertices(); ++lv) push_order(lv, lg.darts_at(lv));
        } else {
            ThreeBlockTree tree = decompose_3blocks(lg);
            ReconstructResult rc = reconstruct(tree);
            RotationSystem rs = embed_block_tree(tree, mix(seed, 0xb10cULL, bi));
            std::vector<Vertex> to_local_v(rc.graph.num_vertices(), -1);
            std::vector<Edge> to_local_e(rc.graph.num_edges(), -1);
            for (size_t t = 0; t < tree.blocks.size(); ++t) {
                const BlockNode& node = tree.blocks[t];
                for (Vertex x = 0; x < node.graph.num_vertices(); ++x)
                    to_local_v[rc.vertex_maps[t][x]] = node.vertex_ids[x];
                for (Edge e = 0; e < node.graph.num_edges(); ++e)
                    if (!node.is_virtual(e)) to_local_e[rc.edge_maps[t][e]] = node.real_edge_ids[e];
            }
            for (Vertex fv = 0; fv < rc.graph.num_vertices(); ++fv) {
                Vertex lv = to_local_v[fv];
                std::vector<Dart> local_order;
                for (Dart fd : rs.order_at(fv))
                    local_order.push_back(lg.dart_at(to_local_e[MultiGraph::dart_edge(fd)], lv));
                push_order(lv, local_order);
            }
        }
    }

    std::vector<std::vector<Dart>> orders(g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        auto& lists = at_vertex[v];
        if (lists.empty()) continue;
        if (lists.size() == 1)
            orders[v] = std::move(lists[0]);
        else
            orders[v] = sigma_v(lists, mix(seed, 0xcc07b10cULL, v));
    }
    RotationSystem rs(g, orders);
    require(genus(rs) == 0, ErrorCode::invalid_argument,
            "internal: assembled embedding lost planarity");
    return rs;
}

} // namespace upg
