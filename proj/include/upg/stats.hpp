#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "upg/enddecomp.hpp"
#include "upg/multigraph.hpp"

namespace upg {

// Edge weight sent from x to y. For the transport identity to be meaningful
// the value should depend only on the doubly-rooted isomorphism class of
// (g, x, y); that is the caller's responsibility and is spot-checked in the
// tests, not enforced. Values must be nonnegative and finite.
struct TransportFunction {
    std::function<double(const MultiGraph&, Vertex, Vertex)> eval;
    // When set, every value must be an exact integer and the two transport
    // sums are accumulated in 64-bit integers, so the check is exact.
    bool integer_valued = false;
    std::string name; // empty for ad-hoc functions
};

// Named builtin transport functions:
//   adjacency       m(x,y), the number of parallel edges joining x and y
//   degree-weighted deg(x) * m(x,y)
//   ball-size       |B(x,2)| when 1 <= d(x,y) <= 2, else 0
// Throws ErrorCode::invalid_argument for unknown names.
TransportFunction builtin_transport(const std::string& name);

// Builtin names, sorted.
std::vector<std::string> transport_names();

struct MtpReport {
    double lhs = 0.0;  // average over roots o of sum_x f(g, o, x)
    double rhs = 0.0;  // average over roots o of sum_x f(g, x, o)
    bool equal = false;
    bool exact = false; // true when the comparison was done in integers
};

// Evaluates both transport sums over all ordered vertex pairs with the root
// averaged uniformly. For integer-valued f the comparison is exact; otherwise
// equality means |lhs - rhs| <= 1e-12. Throws on negative, non-finite, or
// (when declared integer-valued) non-integer values.
MtpReport mtp_check(const MultiGraph& g, const TransportFunction& f);

// Canonical byte code of the radius-r ball around `root`: two rooted balls
// receive equal codes iff they are isomorphic by a root-preserving map that
// respects edge multiplicities. The code is the lexicographically least
// encoding over all root-first vertex orders, so it is an isomorphism
// invariant by construction. Throws ErrorCode::guard_exceeded when the ball
// has more than 2048 vertices and ErrorCode::invalid_argument when a
// parallel bundle is too thick to encode (>= 64) or the radius exceeds 255.
std::string rooted_ball_code(const MultiGraph& g, Vertex root, int radius);

// Empirical law of the canonical r-ball code at a sampled root.
struct EmpiricalBallDistribution {
    int radius = 0;
    long long sample_size = 0;
    std::map<std::string, long long> counts; // canonical code -> occurrences
};

// Finite graphs: n_samples = 0 sweeps every vertex exactly once (the exact
// law under a uniform root); n_samples > 0 draws that many uniform roots
// with replacement, deterministically from the seed.
EmpiricalBallDistribution sample_balls(const MultiGraph& g, int radius, long long n_samples,
                                       std::uint64_t seed);

// Oracles designate their own origin, so the rooted law is a point mass at
// the origin's r-ball; the code is computed from a breadth-first window and
// recorded with multiplicity max(n_samples, 1). The window exploration guard
// is forwarded.
EmpiricalBallDistribution sample_balls(const GraphOracle& oracle, int radius,
                                       long long n_samples = 1,
                                       std::size_t max_vertices = 5000000);

// Total variation distance between two empirical ball distributions of the
// same radius: half the sum over codes of |p(code) - q(code)|. The numerator
// is accumulated in integers and divided once, so results like (2r)/n are
// bit-exact. Throws on radius mismatch or empty distributions.
double tv_distance(const EmpiricalBallDistribution& p, const EmpiricalBallDistribution& q);

// Text form: a `balls r=<r> n=<n>` header followed by one `<code_hex> <count>`
// line per code, in byte-lexicographic code order. parse accepts blank lines
// and '#' comments and validates that the counts sum to the header's n.
std::string format_ball_distribution(const EmpiricalBallDistribution& d);
EmpiricalBallDistribution parse_ball_distribution(const std::string& text);

// Uniform spanning tree of a connected multigraph by loop-erased random
// walks grown from vertex 0, with steps uniform over darts (so parallel
// edges weight the walk proportionally). Deterministic per seed; the edge
// ids are returned sorted. Throws ErrorCode::invalid_argument when the graph
// is disconnected.
std::vector<Edge> wilson_ust(const MultiGraph& g, std::uint64_t seed);

// Spanning tree assembled along a tree-like partition: each part (values of
// part_of must cover 0..k-1, each part connected) contributes a uniform
// spanning tree of its induced subgraph, and each adjacent pair of parts
// contributes one uniformly chosen crossing edge. Requires the quotient of
// the parts under the crossing edges to be a tree. Deterministic per seed
// with independent sub-streams per part and per part pair.
std::vector<Edge> assemble_spanning_tree(const MultiGraph& g, const std::vector<int>& part_of,
                                         std::uint64_t seed);

// Rooted similarity scale: 2^-k for the smallest k <= r_max at which the
// radius-k balls around the two roots stop being rooted-isomorphic, and 0
// when they agree at every radius checked (indistinguishable at this
// resolution). Radius-0 balls always agree, so the result is at most 1/2.
double local_distance(const MultiGraph& a, Vertex root_a, const MultiGraph& b, Vertex root_b,
                      int r_max);

} // namespace upg
