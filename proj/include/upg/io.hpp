#pragma once

#include <iosfwd>
#include <string>

#include "upg/blocktree.hpp"
#include "upg/multigraph.hpp"
#include "upg/rotation.hpp"

namespace upg {

// Line-oriented text formats. Blank lines and lines starting with '#' are
// ignored on input. All writers emit canonical output that reads back
// bit-exactly.
//
// Graph format:
//   graph <num_vertices>
//   e <edge_id> <u> <v>
// Edge ids must be exactly 0..m-1 (any order); repeated endpoint pairs are
// parallel edges. Vertex ids are 0-based.

MultiGraph read_graph(std::istream& in);
MultiGraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const MultiGraph& g);
void write_graph_file(const std::string& path, const MultiGraph& g);

// Rotation format: a graph block followed by one line per vertex
//   r <v>: <dart_id> <dart_id> ...
// listing the cyclic order of darts at v. Writers start each line at the
// smallest dart id; readers accept any starting point and line order but
// require exactly one r-line per vertex.

RotationSystem read_rotation(std::istream& in);
RotationSystem read_rotation_file(const std::string& path);
void write_rotation(std::ostream& out, const RotationSystem& rs);
void write_rotation_file(const std::string& path, const RotationSystem& rs);

// 3-block tree format:
//   blocktree <num_blocks> <num_links>
//   block <id> <kind> <num_vertices> <num_edges>
//   bv <block_id> <local_vertex> <parent_vertex>
//   be <block_id> <edge_id> <u> <v> <parent_edge|-1>
//   tlink <block_a> <block_b> <edge_a> <tail_a> <head_a> <edge_b> <tail_b> <head_b>
// Kinds are cycle / multilink / three_connected; parent edge -1 marks a
// virtual edge. A block's `block` line must precede its bv/be lines; beyond
// that, body lines may appear in any order. Readers validate the assembled
// tree.

ThreeBlockTree read_blocktree(std::istream& in);
ThreeBlockTree read_blocktree_file(const std::string& path);
void write_blocktree(std::ostream& out, const ThreeBlockTree& tree);
void write_blocktree_file(const std::string& path, const ThreeBlockTree& tree);

} // namespace upg
