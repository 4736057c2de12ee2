#include "upg/blocktree.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "upg/error.hpp"
#include "upg/rng.hpp"

namespace upg {

std::string to_string(BlockKind kind) {
    switch (kind) {
        case BlockKind::cycle: return "cycle";
        case BlockKind::multilink: return "multilink";
        case BlockKind::three_connected: return "three_connected";
    }
    fail(ErrorCode::invalid_argument, "unknown block kind");
}

BlockKind block_kind_from_string(const std::string& word) {
    if (word == "cycle") return BlockKind::cycle;
    if (word == "multilink") return BlockKind::multilink;
    if (word == "three_connected") return BlockKind::three_connected;
    fail(ErrorCode::parse, "unknown block kind '" + word + "'");
}

namespace {

bool is_cycle_graph(const MultiGraph& g) {
    if (g.num_vertices() < 2 || g.num_vertices() != g.num_edges()) return false;
    for (Vertex v = 0; v < g.num_vertices(); ++v)
        if (g.degree(v) != 2) return false;
    return is_connected(g);
}

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

} // namespace

void validate(const ThreeBlockTree& tree) {
    require(!tree.blocks.empty(), ErrorCode::invalid_argument, "3-block tree has no blocks");
    for (size_t i = 0; i < tree.blocks.size(); ++i) {
        const BlockNode& b = tree.blocks[i];
        const std::string where = "block " + std::to_string(i);
        require(static_cast<int>(b.vertex_ids.size()) == b.graph.num_vertices(),
                ErrorCode::invalid_argument, where + ": vertex id vector size mismatch");
        require(static_cast<int>(b.real_edge_ids.size()) == b.graph.num_edges(),
                ErrorCode::invalid_argument, where + ": edge id vector size mismatch");
        require(b.graph.num_edges() >= 3, ErrorCode::invalid_argument,
                where + ": blocks need at least 3 edges");
        switch (b.kind) {
            case BlockKind::cycle:
                require(is_cycle_graph(b.graph), ErrorCode::invalid_argument,
                        where + ": tagged cycle but not a single cycle");
                break;
            case BlockKind::multilink:
                require(b.graph.num_vertices() == 2, ErrorCode::invalid_argument,
                        where + ": tagged multilink but not on exactly two vertices");
                break;
            case BlockKind::three_connected:
                require(b.graph.is_simple() && is_k_connected(b.graph, 3),
                        ErrorCode::invalid_argument,
                        where + ": tagged three_connected but fails the 3-connectivity check");
                break;
        }
    }

    int nb = static_cast<int>(tree.blocks.size());
    std::vector<std::vector<bool>> matched(nb);
    for (int i = 0; i < nb; ++i) matched[i].assign(tree.blocks[i].graph.num_edges(), false);
    Dsu dsu(nb);
    for (const TreeLink& l : tree.links) {
        require(l.block_a >= 0 && l.block_a < nb && l.block_b >= 0 && l.block_b < nb &&
                    l.block_a != l.block_b,
                ErrorCode::invalid_argument, "link references invalid blocks");
        const BlockNode& a = tree.blocks[l.block_a];
        const BlockNode& b = tree.blocks[l.block_b];
        require(l.edge_a >= 0 && l.edge_a < a.graph.num_edges() && l.edge_b >= 0 &&
                    l.edge_b < b.graph.num_edges(),
                ErrorCode::invalid_argument, "link references invalid edges");
        require(!matched[l.block_a][l.edge_a] && !matched[l.block_b][l.edge_b],
                ErrorCode::invalid_argument, "edge matched by more than one link");
        matched[l.block_a][l.edge_a] = matched[l.block_b][l.edge_b] = true;
        require(a.is_virtual(l.edge_a) && b.is_virtual(l.edge_b), ErrorCode::invalid_argument,
                "link matches a non-virtual edge");
        auto ea = a.graph.endpoints(l.edge_a);
        require((l.tail_a == ea.first && l.head_a == ea.second) ||
                    (l.tail_a == ea.second && l.head_a == ea.first),
                ErrorCode::invalid_argument, "link orientation does not match edge endpoints");
        auto eb = b.graph.endpoints(l.edge_b);
        require((l.tail_b == eb.first && l.head_b == eb.second) ||
                    (l.tail_b == eb.second && l.head_b == eb.first),
                ErrorCode::invalid_argument, "link orientation does not match edge endpoints");
        require(!(a.kind == BlockKind::cycle && b.kind == BlockKind::cycle),
                ErrorCode::invalid_argument, "two cycles may not be adjacent");
        require(!(a.kind == BlockKind::multilink && b.kind == BlockKind::multilink),
                ErrorCode::invalid_argument, "two multilinks may not be adjacent");
        require(dsu.unite(l.block_a, l.block_b), ErrorCode::invalid_argument,
                "links contain a cycle");
    }
    require(tree.links.size() + 1 == tree.blocks.size(), ErrorCode::invalid_argument,
            "links do not form a spanning tree");
    for (int i = 0; i < nb; ++i)
        for (Edge e = 0; e < tree.blocks[i].graph.num_edges(); ++e)
            require(matched[i][e] == tree.blocks[i].is_virtual(e), ErrorCode::invalid_argument,
                    "virtual edges and link matches disagree");
}

AmalgamResult edge_amalgam(const MultiGraph& a, const MultiGraph& b, const AmalgamSpec& spec) {
    require(spec.edge_a >= 0 && spec.edge_a < a.num_edges(), ErrorCode::invalid_argument,
            "amalgam edge_a out of range");
    require(spec.edge_b >= 0 && spec.edge_b < b.num_edges(), ErrorCode::invalid_argument,
            "amalgam edge_b out of range");
    auto ea = a.endpoints(spec.edge_a);
    require((spec.tail_a == ea.first && spec.head_a == ea.second) ||
                (spec.tail_a == ea.second && spec.head_a == ea.first),
            ErrorCode::invalid_argument, "amalgam orientation does not match edge_a");
    auto eb = b.endpoints(spec.edge_b);
    require((spec.tail_b == eb.first && spec.head_b == eb.second) ||
                (spec.tail_b == eb.second && spec.head_b == eb.first),
            ErrorCode::invalid_argument, "amalgam orientation does not match edge_b");

    AmalgamResult out;
    out.vertex_map_a.resize(a.num_vertices());
    std::iota(out.vertex_map_a.begin(), out.vertex_map_a.end(), 0);
    out.vertex_map_b.assign(b.num_vertices(), -1);
    out.vertex_map_b[spec.tail_b] = spec.tail_a;
    out.vertex_map_b[spec.head_b] = spec.head_a;
    int next_vertex = a.num_vertices();
    for (Vertex v = 0; v < b.num_vertices(); ++v)
        if (out.vertex_map_b[v] < 0) out.vertex_map_b[v] = next_vertex++;

    std::vector<std::pair<Vertex, Vertex>> edges;
    out.edge_map_a.assign(a.num_edges(), -1);
    out.edge_map_b.assign(b.num_edges(), -1);
    for (Edge e = 0; e < a.num_edges(); ++e) {
        if (e == spec.edge_a) continue;
        out.edge_map_a[e] = static_cast<Edge>(edges.size());
        edges.push_back(a.endpoints(e));
    }
    for (Edge e = 0; e < b.num_edges(); ++e) {
        if (e == spec.edge_b) continue;
        out.edge_map_b[e] = static_cast<Edge>(edges.size());
        auto [u, v] = b.endpoints(e);
        edges.push_back({out.vertex_map_b[u], out.vertex_map_b[v]});
    }
    out.graph = MultiGraph(next_vertex, edges);
    return out;
}

ReconstructResult reconstruct(const ThreeBlockTree& tree) {
    std::vector<int> order(tree.links.size());
    std::iota(order.begin(), order.end(), 0);
    return reconstruct(tree, order);
}

ReconstructResult reconstruct(const ThreeBlockTree& tree, const std::vector<int>& link_order) {
    validate(tree);
    {
        std::vector<int> sorted = link_order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> expect(tree.links.size());
        std::iota(expect.begin(), expect.end(), 0);
        require(sorted == expect, ErrorCode::invalid_argument,
                "link_order must be a permutation of the link indices");
    }

    int nb = static_cast<int>(tree.blocks.size());
    ReconstructResult out;
    out.vertex_maps.resize(nb);
    out.edge_maps.resize(nb);
    std::vector<MultiGraph> comp_graph(nb);
    std::vector<std::vector<int>> comp_blocks(nb);
    std::vector<int> comp_of(nb);
    for (int i = 0; i < nb; ++i) {
        comp_graph[i] = tree.blocks[i].graph;
        comp_blocks[i] = {i};
        comp_of[i] = i;
        out.vertex_maps[i].resize(tree.blocks[i].graph.num_vertices());
        std::iota(out.vertex_maps[i].begin(), out.vertex_maps[i].end(), 0);
        out.edge_maps[i].resize(tree.blocks[i].graph.num_edges());
        std::iota(out.edge_maps[i].begin(), out.edge_maps[i].end(), 0);
    }

    int root = 0;
    for (int li : link_order) {
        const TreeLink& l = tree.links[li];
        int ca = comp_of[l.block_a];
        int cb = comp_of[l.block_b];
        AmalgamSpec spec;
        spec.edge_a = out.edge_maps[l.block_a][l.edge_a];
        spec.tail_a = out.vertex_maps[l.block_a][l.tail_a];
        spec.head_a = out.vertex_maps[l.block_a][l.head_a];
        spec.edge_b = out.edge_maps[l.block_b][l.edge_b];
        spec.tail_b = out.vertex_maps[l.block_b][l.tail_b];
        spec.head_b = out.vertex_maps[l.block_b][l.head_b];
        AmalgamResult merged = edge_amalgam(comp_graph[ca], comp_graph[cb], spec);
        for (int bi : comp_blocks[ca]) {
            for (Vertex& v : out.vertex_maps[bi]) v = merged.vertex_map_a[v];
            for (Edge& e : out.edge_maps[bi])
                if (e >= 0) e = merged.edge_map_a[e];
        }
        for (int bi : comp_blocks[cb]) {
            for (Vertex& v : out.vertex_maps[bi]) v = merged.vertex_map_b[v];
            for (Edge& e : out.edge_maps[bi])
                if (e >= 0) e = merged.edge_map_b[e];
            comp_of[bi] = ca;
        }
        comp_graph[ca] = std::move(merged.graph);
        comp_blocks[ca].insert(comp_blocks[ca].end(), comp_blocks[cb].begin(),
                               comp_blocks[cb].end());
        comp_blocks[cb].clear();
        root = ca;
    }
    MultiGraph folded = std::move(comp_graph[comp_of[root]]);

    // Canonical relabeling: vertices ordered by their smallest (block, local)
    // preimage, edges by their unique (block, local) preimage.
    std::vector<std::pair<int, int>> vertex_key(folded.num_vertices(),
                                                {nb, 1 << 30});
    std::vector<std::pair<int, int>> edge_key(folded.num_edges(), {nb, 1 << 30});
    for (int bi = 0; bi < nb; ++bi) {
        for (Vertex v = 0; v < static_cast<int>(out.vertex_maps[bi].size()); ++v)
            vertex_key[out.vertex_maps[bi][v]] =
                std::min(vertex_key[out.vertex_maps[bi][v]], {bi, v});
        for (Edge e = 0; e < static_cast<int>(out.edge_maps[bi].size()); ++e)
            if (out.edge_maps[bi][e] >= 0) edge_key[out.edge_maps[bi][e]] = {bi, e};
    }
    std::vector<int> vperm(folded.num_vertices());
    std::iota(vperm.begin(), vperm.end(), 0);
    std::sort(vperm.begin(), vperm.end(),
              [&](int x, int y) { return vertex_key[x] < vertex_key[y]; });
    std::vector<int> vnew(folded.num_vertices());
    for (int rank = 0; rank < folded.num_vertices(); ++rank) vnew[vperm[rank]] = rank;
    std::vector<int> eperm(folded.num_edges());
    std::iota(eperm.begin(), eperm.end(), 0);
    std::sort(eperm.begin(), eperm.end(),
              [&](int x, int y) { return edge_key[x] < edge_key[y]; });
    std::vector<int> enew(folded.num_edges());
    for (int rank = 0; rank < folded.num_edges(); ++rank) enew[eperm[rank]] = rank;

    std::vector<std::pair<Vertex, Vertex>> edges(folded.num_edges());
    for (Edge e = 0; e < folded.num_edges(); ++e) {
        auto [u, v] = folded.endpoints(e);
        Vertex nu = vnew[u], nv = vnew[v];
        edges[enew[e]] = {std::min(nu, nv), std::max(nu, nv)};
    }
    out.graph = MultiGraph(folded.num_vertices(), edges);
    for (int bi = 0; bi < nb; ++bi) {
        for (Vertex& v : out.vertex_maps[bi]) v = vnew[v];
        for (Edge& e : out.edge_maps[bi])
            if (e >= 0) e = enew[e];
    }
    return out;
}

bool order_invariance_check(const ThreeBlockTree& tree, int trials, std::uint64_t seed) {
    ReconstructResult base = reconstruct(tree);
    Rng rng(seed);
    std::vector<int> order(tree.links.size());
    std::iota(order.begin(), order.end(), 0);
    for (int t = 0; t < trials; ++t) {
        rng.shuffle(order);
        ReconstructResult trial = reconstruct(tree, order);
        if (trial.graph.num_vertices() != base.graph.num_vertices()) return false;
        if (trial.graph.num_edges() != base.graph.num_edges()) return false;
        for (Edge e = 0; e < base.graph.num_edges(); ++e)
            if (trial.graph.endpoints(e) != base.graph.endpoints(e)) return false;
        if (trial.vertex_maps != base.vertex_maps || trial.edge_maps != base.edge_maps)
            return false;
    }
    return true;
}

namespace {

struct LabeledGraph {
    MultiGraph graph;
    std::vector<Vertex> vertex_ids;
    std::vector<long long> labels;
};

struct RawBlock {
    BlockKind kind;
    LabeledGraph lg;
};

void decompose_rec(LabeledGraph lg, long long& next_label, std::vector<RawBlock>& out);

void split_at_pair(const LabeledGraph& lg, Vertex u, Vertex v, const std::vector<int>& comp,
                   int num_comps, long long& next_label, std::vector<RawBlock>& out) {
    const MultiGraph& g = lg.graph;
    std::vector<long long> direct_labels;
    for (Edge e = 0; e < g.num_edges(); ++e) {
        auto [p, q] = g.endpoints(e);
        if ((p == u && q == v) || (p == v && q == u)) direct_labels.push_back(lg.labels[e]);
    }

    std::vector<std::vector<Vertex>> members(num_comps);
    for (Vertex w = 0; w < g.num_vertices(); ++w)
        if (comp[w] >= 0) members[comp[w]].push_back(w);
    std::sort(members.begin(), members.end(),
              [&](const std::vector<Vertex>& x, const std::vector<Vertex>& y) {
                  Vertex mx = lg.vertex_ids[x[0]], my = lg.vertex_ids[y[0]];
                  for (Vertex w : x) mx = std::min(mx, lg.vertex_ids[w]);
                  for (Vertex w : y) my = std::min(my, lg.vertex_ids[w]);
                  return mx < my;
              });

    bool make_bond = num_comps + static_cast<int>(direct_labels.size()) >= 3;
    std::vector<long long> part_labels(num_comps);
    if (make_bond) {
        for (int c = 0; c < num_comps; ++c) part_labels[c] = next_label++;
        Vertex ou = lg.vertex_ids[u], ov = lg.vertex_ids[v];
        LabeledGraph bond;
        bond.vertex_ids = {std::min(ou, ov), std::max(ou, ov)};
        std::vector<std::pair<Vertex, Vertex>> bond_edges;
        for (long long lab : direct_labels) {
            bond_edges.push_back({0, 1});
            bond.labels.push_back(lab);
        }
        for (long long lab : part_labels) {
            bond_edges.push_back({0, 1});
            bond.labels.push_back(lab);
        }
        bond.graph = MultiGraph(2, bond_edges);
        out.push_back({BlockKind::multilink, std::move(bond)});
    } else {
        long long shared = next_label++;
        part_labels.assign(num_comps, shared);
    }

    for (int c = 0; c < num_comps; ++c) {
        std::vector<Vertex> locals = members[c];
        locals.push_back(u);
        locals.push_back(v);
        std::sort(locals.begin(), locals.end(),
                  [&](Vertex x, Vertex y) { return lg.vertex_ids[x] < lg.vertex_ids[y]; });
        std::vector<int> to_part(g.num_vertices(), -1);
        LabeledGraph part;
        for (size_t i = 0; i < locals.size(); ++i) {
            to_part[locals[i]] = static_cast<int>(i);
            part.vertex_ids.push_back(lg.vertex_ids[locals[i]]);
        }
        std::vector<std::pair<Vertex, Vertex>> part_edges;
        for (Edge e = 0; e < g.num_edges(); ++e) {
            auto [p, q] = g.endpoints(e);
            if ((p == u && q == v) || (p == v && q == u)) continue;
            if (to_part[p] < 0 || to_part[q] < 0) continue;
            part_edges.push_back({to_part[p], to_part[q]});
            part.labels.push_back(lg.labels[e]);
        }
        part_edges.push_back({to_part[u], to_part[v]});
        part.labels.push_back(part_labels[c]);
        part.graph = MultiGraph(static_cast<int>(locals.size()), part_edges);
        decompose_rec(std::move(part), next_label, out);
    }
}

void decompose_rec(LabeledGraph lg, long long& next_label, std::vector<RawBlock>& out) {
    const MultiGraph& g = lg.graph;
    if (g.num_vertices() == 2) {
        out.push_back({BlockKind::multilink, std::move(lg)});
        return;
    }
    if (is_cycle_graph(g)) {
        out.push_back({BlockKind::cycle, std::move(lg)});
        return;
    }

    for (const auto& bundle : g.bundles()) {
        if (bundle.size() < 2) continue;
        auto [a, b] = g.endpoints(bundle.front());
        long long lab = next_label++;
        Vertex oa = lg.vertex_ids[a], ob = lg.vertex_ids[b];
        LabeledGraph bond;
        bond.vertex_ids = {std::min(oa, ob), std::max(oa, ob)};
        std::vector<std::pair<Vertex, Vertex>> bond_edges;
        for (Edge e : bundle) {
            bond_edges.push_back({0, 1});
            bond.labels.push_back(lg.labels[e]);
        }
        bond_edges.push_back({0, 1});
        bond.labels.push_back(lab);
        bond.graph = MultiGraph(2, bond_edges);
        out.push_back({BlockKind::multilink, std::move(bond)});

        std::vector<bool> drop(g.num_edges(), false);
        for (Edge e : bundle) drop[e] = true;
        LabeledGraph rest;
        rest.vertex_ids = lg.vertex_ids;
        std::vector<std::pair<Vertex, Vertex>> rest_edges;
        for (Edge e = 0; e < g.num_edges(); ++e) {
            if (drop[e]) continue;
            rest_edges.push_back(g.endpoints(e));
            rest.labels.push_back(lg.labels[e]);
        }
        rest_edges.push_back({a, b});
        rest.labels.push_back(lab);
        rest.graph = MultiGraph(g.num_vertices(), rest_edges);
        decompose_rec(std::move(rest), next_label, out);
        return;
    }

    if (is_k_connected(g, 3)) {
        out.push_back({BlockKind::three_connected, std::move(lg)});
        return;
    }

    std::vector<Vertex> by_id(g.num_vertices());
    std::iota(by_id.begin(), by_id.end(), 0);
    std::sort(by_id.begin(), by_id.end(),
              [&](Vertex x, Vertex y) { return lg.vertex_ids[x] < lg.vertex_ids[y]; });
    for (size_t i = 0; i < by_id.size(); ++i) {
        for (size_t j = i + 1; j < by_id.size(); ++j) {
            Vertex u = by_id[i], v = by_id[j];
            std::vector<int> comp(g.num_vertices(), -1);
            int num_comps = 0;
            for (Vertex start = 0; start < g.num_vertices(); ++start) {
                if (start == u || start == v || comp[start] >= 0) continue;
                std::vector<Vertex> queue{start};
                comp[start] = num_comps;
                while (!queue.empty()) {
                    Vertex w = queue.back();
                    queue.pop_back();
                    for (Dart d : g.darts_at(w)) {
                        Vertex x = g.dart_head(d);
                        if (x == u || x == v || comp[x] >= 0) continue;
                        comp[x] = num_comps;
                        queue.push_back(x);
                    }
                }
                num_comps++;
            }
            if (num_comps >= 2) {
                split_at_pair(lg, u, v, comp, num_comps, next_label, out);
                return;
            }
        }
    }
    fail(ErrorCode::invalid_argument, "no separation pair in a non-3-connected graph");
}

LabeledGraph glue_over_label(const LabeledGraph& a, const LabeledGraph& b, long long lab) {
    std::vector<Vertex> ids = a.vertex_ids;
    ids.insert(ids.end(), b.vertex_ids.begin(), b.vertex_ids.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto local_of = [&](Vertex orig) {
        return static_cast<int>(std::lower_bound(ids.begin(), ids.end(), orig) - ids.begin());
    };
    LabeledGraph out;
    out.vertex_ids = ids;
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const LabeledGraph* side : {&a, &b}) {
        for (Edge e = 0; e < side->graph.num_edges(); ++e) {
            if (side->labels[e] == lab) continue;
            auto [p, q] = side->graph.endpoints(e);
            edges.push_back({local_of(side->vertex_ids[p]), local_of(side->vertex_ids[q])});
            out.labels.push_back(side->labels[e]);
        }
    }
    out.graph = MultiGraph(static_cast<int>(ids.size()), edges);
    return out;
}

std::vector<RawBlock> merge_same_kind(std::vector<RawBlock> blocks) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<long long, std::vector<std::pair<int, Edge>>> occurrences;
        for (size_t i = 0; i < blocks.size(); ++i)
            for (Edge e = 0; e < blocks[i].lg.graph.num_edges(); ++e)
                occurrences[blocks[i].lg.labels[e]].push_back({static_cast<int>(i), e});
        for (const auto& [lab, occ] : occurrences) {
            if (occ.size() != 2) continue;
            int i = occ[0].first, j = occ[1].first;
            if (i == j) continue;
            if (blocks[i].kind != blocks[j].kind) continue;
            if (blocks[i].kind == BlockKind::three_connected) continue;
            LabeledGraph merged = glue_over_label(blocks[i].lg, blocks[j].lg, lab);
            BlockKind kind =
                merged.graph.num_vertices() == 2 ? BlockKind::multilink : BlockKind::cycle;
            require(kind == BlockKind::multilink || is_cycle_graph(merged.graph),
                    ErrorCode::invalid_argument, "internal: merged cycles do not form a cycle");
            blocks[i] = {kind, std::move(merged)};
            blocks.erase(blocks.begin() + j);
            changed = true;
            break;
        }
    }
    return blocks;
}

ThreeBlockTree build_tree(std::vector<RawBlock> raw, long long num_real) {
    int nb = static_cast<int>(raw.size());

    std::vector<int> order(nb);
    std::iota(order.begin(), order.end(), 0);
    auto key_of = [&](int i) {
        const RawBlock& b = raw[i];
        std::vector<long long> reals;
        for (long long lab : b.lg.labels)
            if (lab < num_real) reals.push_back(lab);
        std::sort(reals.begin(), reals.end());
        std::vector<Vertex> verts = b.lg.vertex_ids;
        std::sort(verts.begin(), verts.end());
        return std::make_tuple(static_cast<int>(b.kind), reals, verts,
                               b.lg.graph.num_edges(), b.lg.graph.num_vertices());
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return key_of(x) < key_of(y); });
    std::vector<RawBlock> sorted;
    for (int idx : order) sorted.push_back(std::move(raw[idx]));

    // Partner block per virtual label, in sorted order.
    std::map<long long, std::vector<int>> label_blocks;
    for (int i = 0; i < nb; ++i)
        for (long long lab : sorted[i].lg.labels)
            if (lab >= num_real) label_blocks[lab].push_back(i);

    ThreeBlockTree tree;
    std::map<long long, std::vector<std::tuple<int, Edge, Vertex, Vertex>>> link_ends;
    for (int i = 0; i < nb; ++i) {
        const RawBlock& rb = sorted[i];
        const MultiGraph& g = rb.lg.graph;
        std::vector<Vertex> vorder(g.num_vertices());
        std::iota(vorder.begin(), vorder.end(), 0);
        std::sort(vorder.begin(), vorder.end(), [&](Vertex x, Vertex y) {
            return rb.lg.vertex_ids[x] < rb.lg.vertex_ids[y];
        });
        std::vector<int> vnew(g.num_vertices());
        for (int rank = 0; rank < g.num_vertices(); ++rank) vnew[vorder[rank]] = rank;

        std::vector<Edge> eorder(g.num_edges());
        std::iota(eorder.begin(), eorder.end(), 0);
        auto edge_key = [&](Edge e) {
            long long lab = rb.lg.labels[e];
            if (lab < num_real) return std::make_pair(0, lab);
            const auto& pair = label_blocks.at(lab);
            long long partner = pair[0] == i ? pair[1] : pair[0];
            return std::make_pair(1, partner);
        };
        std::sort(eorder.begin(), eorder.end(),
                  [&](Edge x, Edge y) { return edge_key(x) < edge_key(y); });

        BlockNode node;
        node.kind = rb.kind;
        for (Vertex v : vorder) node.vertex_ids.push_back(rb.lg.vertex_ids[v]);
        std::vector<std::pair<Vertex, Vertex>> edges;
        for (size_t rank = 0; rank < eorder.size(); ++rank) {
            Edge e = eorder[rank];
            auto [p, q] = g.endpoints(e);
            Vertex np = vnew[p], nq = vnew[q];
            edges.push_back({std::min(np, nq), std::max(np, nq)});
            long long lab = rb.lg.labels[e];
            node.real_edge_ids.push_back(lab < num_real ? static_cast<Edge>(lab) : -1);
            if (lab >= num_real) {
                Vertex tail = np, head = nq;
                if (node.vertex_ids[head] < node.vertex_ids[tail]) std::swap(tail, head);
                link_ends[lab].push_back({i, static_cast<Edge>(rank), tail, head});
            }
        }
        node.graph = MultiGraph(g.num_vertices(), edges);
        tree.blocks.push_back(std::move(node));
    }

    for (const auto& [lab, ends] : link_ends) {
        require(ends.size() == 2, ErrorCode::invalid_argument,
                "internal: virtual label not matched exactly twice");
        auto [ba, ea, ta, ha] = ends[0];
        auto [bb, eb, tb, hb] = ends[1];
        TreeLink link;
        link.block_a = ba;
        link.block_b = bb;
        link.edge_a = ea;
        link.edge_b = eb;
        link.tail_a = ta;
        link.head_a = ha;
        link.tail_b = tb;
        link.head_b = hb;
        tree.links.push_back(link);
    }
    std::sort(tree.links.begin(), tree.links.end(), [](const TreeLink& x, const TreeLink& y) {
        return std::make_tuple(x.block_a, x.block_b, x.edge_a) <
               std::make_tuple(y.block_a, y.block_b, y.edge_a);
    });
    return tree;
}

} // namespace

ThreeBlockTree decompose_3blocks(const MultiGraph& g) {
    require(g.num_edges() >= 3, ErrorCode::invalid_argument,
            "decompose_3blocks requires at least 3 edges");
    require(is_biconnected_multi(g), ErrorCode::not_biconnected,
            "decompose_3blocks requires a 2-connected graph");
    LabeledGraph root;
    root.graph = g;
    root.vertex_ids.resize(g.num_vertices());
    std::iota(root.vertex_ids.begin(), root.vertex_ids.end(), 0);
    root.labels.resize(g.num_edges());
    std::iota(root.labels.begin(), root.labels.end(), 0);

    std::vector<RawBlock> raw;
    long long next_label = g.num_edges();
    decompose_rec(std::move(root), next_label, raw);
    raw = merge_same_kind(std::move(raw));
    ThreeBlockTree tree = build_tree(std::move(raw), g.num_edges());
    validate(tree);
    return tree;
}

} // namespace upg
