#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "upg/multigraph.hpp"

namespace upg {

// Read-only adjacency oracle for an infinite, locally finite graph. Vertex
// ids are opaque 64-bit values; queries are pure functions of the id, so
// answers never change across calls. Each oracle also carries a seed from
// which per-vertex uniform [0,1] labels are derived on demand.
class GraphOracle {
  public:
    virtual ~GraphOracle() = default;

    virtual std::string name() const = 0;
    virtual std::int64_t origin() const = 0;
    // Distinct neighbor ids of v; symmetric (u lists v iff v lists u) and
    // free of self-adjacency. An edge is identified by its unordered id pair.
    virtual std::vector<std::int64_t> neighbors(std::int64_t v) const = 0;
    // Human-readable coordinates for reports.
    virtual std::string vertex_name(std::int64_t v) const = 0;

    // Uniform [0,1] label of v, deterministic per (oracle seed, salt, v) and
    // independent across vertices. Distinct salts give fresh labels.
    double label(std::int64_t v, std::uint64_t salt) const;
    std::uint64_t seed() const { return seed_; }

  protected:
    explicit GraphOracle(std::uint64_t seed) : seed_(seed) {}

  private:
    std::uint64_t seed_;
};

// Known oracle names, in the order reported by the CLI.
std::vector<std::string> oracle_names();

// Factory. Throws ErrorCode::unknown_oracle for unrecognized names.
std::unique_ptr<GraphOracle> make_oracle(const std::string& name, std::uint64_t seed);

// A finite exploration of the oracle out to graph distance `horizon` from
// the origin. Window vertex 0 is the origin; vertices are numbered in BFS
// discovery order and edges appear once, with both endpoints inside the
// window.
struct Window {
    MultiGraph graph{0, {}};
    std::vector<std::int64_t> ids;       // window vertex -> oracle id
    std::map<std::int64_t, Vertex> index; // oracle id -> window vertex
    std::vector<int> dist;               // BFS distance from the origin
    int horizon = 0;
};

// Breadth-first exploration. Throws ErrorCode::guard_exceeded if the window
// would exceed `max_vertices`.
Window explore(const GraphOracle& oracle, int horizon, std::size_t max_vertices = 5000000);

// A finite edge set whose removal splits the graph near `center` into two
// parts that both escape to distance `h_esc`.
struct CutSet {
    std::vector<Edge> edges; // window edge ids, ascending
    Vertex center = -1;
    int radius = 0;
};

// All minimal escape cuts around `center` in the current graph (g minus the
// removed edges). Candidate edges are those incident to the radius-R ball
// around the center; a cut qualifies when the graph minus the cut has
// exactly two components containing a vertex at distance >= h_esc from the
// center (measured in the current graph), and the cut is precisely the set
// of surviving edges between those two components. That characterization
// makes each cut inclusion-minimal. Results are ordered by size, then
// lexicographically by edge ids.
//
// The caller must ensure the window is complete out to distance
// h_esc + radius around the center, or escape classification may be wrong.
// Throws ErrorCode::guard_exceeded when the search space is too large.
std::vector<CutSet> enumerate_min_endcuts(const MultiGraph& g, const std::vector<char>& removed,
                                          Vertex center, int radius, int f_max, int h_esc);

// Vertices whose label strictly exceeds every other label within graph
// distance `radius` in the current graph, restricted to eligible vertices
// (labels of ineligible vertices still compete). The result is an
// independent set in the radius-closure. Pass an empty eligibility vector to
// mark every vertex eligible.
std::vector<Vertex> local_label_maxima(const MultiGraph& g, const std::vector<char>& removed,
                                       const std::vector<double>& labels, int radius,
                                       const std::vector<char>& eligible);

// Components of g minus the removed edges, plus the graph they induce: one
// link per unordered component pair joined by at least one removed edge.
struct FactorGraph {
    std::vector<int> component_of;             // per vertex
    int num_components = 0;
    std::vector<std::pair<int, int>> links;    // unique component pairs, a < b
    std::vector<std::vector<Edge>> link_edges; // removed edges realizing each link
    bool is_forest = false;                    // links acyclic as a simple graph
};

FactorGraph factor_graph(const MultiGraph& g, const std::vector<char>& removed);

// True iff the factor graph of g by the removed edge set is a forest, i.e.
// the removal is tree-like.
bool is_decomposing(const MultiGraph& g, const std::vector<char>& removed);

// Parameters of one removal stage. Step counts are powers of two and stored as
// exponents; a stage runs `reshuffles` rounds of up to 2^log2_steps removal
// steps each (rounds stop early at a fixed point, which changes nothing).
struct StageSchedule {
    int radius = 1;           // R
    int log2_steps = 1;       // steps per round = 2^log2_steps
    double rate_bound = 0.5;  // 1 / log2_steps
    int reshuffles = 1;
};

// Chooses the stage schedule from window ball statistics: 2^log2_steps is
// the smallest power of two such that, over `samples` roots drawn uniformly
// from the part of the window whose 2R-ball is complete, the 2R-ball has
// fewer than log2_steps vertices with probability at least 1 - 2^-R.
// reshuffles = ceil(-R / log2(1 - rate_bound)).
StageSchedule estimate_schedule(const Window& w, int radius, std::uint64_t seed,
                                int samples = 500);

struct StageReport {
    StageSchedule schedule;
    int h_esc = 0;
    long long edges_removed = 0;
    int rounds = 0;
    long long productive_steps = 0;
};

// Runs one stage in place: `reshuffles` rounds, each drawing fresh labels,
// picking the local label maxima over the eligible region (origin distance
// <= horizon - R - h_esc), and repeatedly removing one uniformly chosen
// minimal escape cut per maximum until the round's step budget or a fixed
// point. The uniform choice ranges over the cuts whose removal keeps the
// factor graph a forest; a cut is excluded when some other component
// already holds removed edges into both halves of the split it would make,
// since removing it would thread a cycle through those links. Cuts chosen
// within one step are edge-disjoint. When `verify` is set, the tree-like
// invariant is additionally re-checked after every removal.
// Throws ErrorCode::horizon_exhausted if the eligible region is empty.
StageReport run_stage(const Window& w, std::vector<char>& removed, const GraphOracle& oracle,
                      const StageSchedule& schedule, int f_max, int h_esc,
                      std::uint64_t seed, bool verify = true);

struct ComponentClass {
    int size = 0;
    // Number of connected pieces of the component's outer shell (origin
    // distance > horizon - shell depth) that reach the window rim. 0 means
    // the component is finite well inside the window.
    int escape_directions = 0;
};

// Classifies the components of the window minus the removed edges using the
// outer shell of depth `shell`.
std::vector<ComponentClass> classify_components(const Window& w,
                                                const std::vector<char>& removed, int shell);

struct DecomposeParams {
    int horizon = 20;
    int r_max = 3;
    // 3 covers the minimal end-cuts of every builtin oracle (all have cuts
    // of at most 2 edges) while keeping radius-3 cut enumeration fast and
    // within the search guard on grid-like windows.
    int f_max = 3;
    int h_esc = 0; // 0: per-stage default max(4R, 16)
    bool verify_each_step = true;
};

struct DecomposeResult {
    Window window;
    std::vector<char> removed;
    std::vector<StageReport> stages;
    std::vector<ComponentClass> components;
    FactorGraph factor;
};

// Full staged run: stages R = 1..r_max with schedules estimated from the
// window, followed by component classification and the factor-forest check.
DecomposeResult decompose(const GraphOracle& oracle, const DecomposeParams& params,
                          std::uint64_t seed);

} // namespace upg
