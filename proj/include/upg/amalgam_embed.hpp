#pragma once

#include <cstdint>
#include <vector>

#include "upg/blocktree.hpp"
#include "upg/rotation.hpp"

namespace upg {

// Splices two planar rotation systems across an edge amalgam: both glue
// edges are deleted, and at each merged endpoint the two cyclic orders are
// concatenated starting just past the deleted darts. All other vertices keep
// their rotations. The result lives on edge_amalgam(a, b, spec).graph and has
// genus 0 whenever both inputs do; non-planar inputs are rejected.
RotationSystem merge_embeddings(const RotationSystem& pa, const RotationSystem& pb,
                                const AmalgamSpec& spec);

// Cutvertex assembly. Each entry of block_orders is the cyclic dart order of
// one block around the shared vertex. Picks a uniform starting dart within
// every block, then a uniform cyclic order of the blocks, and concatenates.
// Deterministic given the seed; rejects an empty block list.
std::vector<Dart> sigma_v(const std::vector<std::vector<Dart>>& block_orders,
                          std::uint64_t seed);

// Embeds every block of a valid 3-block tree and folds merge_embeddings over
// the links. Cycle blocks get their unique rotation, multilink blocks a
// uniform cyclic order of their parallel edges (reversed at the second
// endpoint), 3-connected blocks a uniform planar embedding (coin-flip
// chirality). The result lives on reconstruct(tree).graph, has genus 0, and
// does not depend on the fold order. pre: tree is valid, as produced by
// decompose_3blocks or read_blocktree; errors if a 3-connected block is not
// planar.
RotationSystem embed_block_tree(const ThreeBlockTree& tree, std::uint64_t seed);
RotationSystem embed_block_tree(const ThreeBlockTree& tree, std::uint64_t seed,
                                const std::vector<int>& link_order);

// Uniformized planar embedding of a connected planar multigraph: block-cut
// decomposition, the 3-block pipeline per 2-connected block (blocks with
// fewer than 3 edges are embedded directly), and sigma_v assembly around
// cutvertices. Errors with the obstruction edge list if g is not planar.
RotationSystem embed_graph(const MultiGraph& g, std::uint64_t seed);

} // namespace upg
