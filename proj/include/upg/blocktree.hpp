#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "upg/multigraph.hpp"

namespace upg {

enum class BlockKind { cycle, multilink, three_connected };

std::string to_string(BlockKind kind);
BlockKind block_kind_from_string(const std::string& word);

// One node of a 3-block tree. The block graph uses local dense ids; the two
// id vectors tie it back to the decomposed graph. A virtual edge (real id -1)
// is a placeholder matched with a partner edge in an adjacent block.
struct BlockNode {
    BlockKind kind;
    MultiGraph graph;
    std::vector<Vertex> vertex_ids;
    std::vector<Edge> real_edge_ids;

    bool is_virtual(Edge e) const { return real_edge_ids[e] < 0; }
    int num_virtual() const {
        int k = 0;
        for (Edge e = 0; e < graph.num_edges(); ++e)
            if (is_virtual(e)) k++;
        return k;
    }
};

// Matches virtual edge edge_a of block_a with edge_b of block_b, gluing
// tail to tail and head to head when the tree is reconstructed.
struct TreeLink {
    int block_a = -1;
    int block_b = -1;
    Edge edge_a = -1;
    Edge edge_b = -1;
    Vertex tail_a = -1;
    Vertex head_a = -1;
    Vertex tail_b = -1;
    Vertex head_b = -1;
};

struct ThreeBlockTree {
    std::vector<BlockNode> blocks;
    std::vector<TreeLink> links;
};

// Enforces the structural invariants: every block is a cycle, multilink or
// simple 3-connected graph with >= 3 edges and a matching kind tag; links form
// a tree, match exactly the virtual edges (once each) with valid oriented
// endpoints, and never join two cycles or two multilinks.
void validate(const ThreeBlockTree& tree);

struct AmalgamSpec {
    Edge edge_a = -1;
    Vertex tail_a = -1;
    Vertex head_a = -1;
    Edge edge_b = -1;
    Vertex tail_b = -1;
    Vertex head_b = -1;
};

struct AmalgamResult {
    MultiGraph graph;
    std::vector<Vertex> vertex_map_a;
    std::vector<Vertex> vertex_map_b;
    std::vector<Edge> edge_map_a;  // -1 for the glued edge
    std::vector<Edge> edge_map_b;
};

// Disjoint union of a and b with tail_b merged onto tail_a, head_b onto
// head_a, and both chosen edges deleted. a keeps its vertex ids.
AmalgamResult edge_amalgam(const MultiGraph& a, const MultiGraph& b, const AmalgamSpec& spec);

struct ReconstructResult {
    MultiGraph graph;
    std::vector<std::vector<Vertex>> vertex_maps;  // per block: local -> result
    std::vector<std::vector<Edge>> edge_maps;      // per block: local -> result, -1 if deleted
};

// Folds edge_amalgam over the links (stored order, or the given permutation of
// link indices) and relabels the result canonically, so the output does not
// depend on the fold order.
ReconstructResult reconstruct(const ThreeBlockTree& tree);
ReconstructResult reconstruct(const ThreeBlockTree& tree, const std::vector<int>& link_order);

// Reconstructs along `trials` uniformly shuffled link orders and reports
// whether every result is identical.
bool order_invariance_check(const ThreeBlockTree& tree, int trials, std::uint64_t seed);

// Tutte decomposition of a 2-connected multigraph with >= 3 edges into the
// unique tree of cycles, multilinks and 3-connected blocks (no two cycles
// and no two multilinks adjacent). Original vertex and edge ids are carried
// in the id vectors; output is canonical.
ThreeBlockTree decompose_3blocks(const MultiGraph& g);

} // namespace upg
