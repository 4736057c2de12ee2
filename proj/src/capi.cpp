#include "upg.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "upg/amalgam_embed.hpp"
#include "upg/blocktree.hpp"
#include "upg/enddecomp.hpp"
#include "upg/error.hpp"
#include "upg/io.hpp"
#include "upg/multigraph.hpp"
#include "upg/rng.hpp"
#include "upg/rotation.hpp"
#include "upg/stats.hpp"

struct upg_graph {
    upg::MultiGraph g;
};

struct upg_rotation {
    upg::RotationSystem rs;
};

struct upg_blocktree {
    upg::ThreeBlockTree tree;
};

struct upg_balldist {
    upg::EmpiricalBallDistribution d;
};

namespace {

thread_local std::string t_error;

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return UPG_OK;
    } catch (const upg::Error& e) {
        t_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        t_error = e.what();
        return UPG_ERR_INVALID_ARGUMENT;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require_arg(bool ok) {
    upg::require(ok, upg::ErrorCode::invalid_argument, "null argument");
}

// Reconstruction fidelity: the block id maps must carry the rebuilt graph
// onto the input with a consistent vertex bijection and every real edge
// recovered exactly once with matching endpoints.
bool roundtrip_matches(const upg::MultiGraph& g, const upg::ThreeBlockTree& tree,
                       const upg::ReconstructResult& rec) {
    using upg::Edge;
    using upg::Vertex;
    if (rec.graph.num_vertices() != g.num_vertices() || rec.graph.num_edges() != g.num_edges())
        return false;
    std::vector<Vertex> to_orig(rec.graph.num_vertices(), -1);
    for (std::size_t b = 0; b < tree.blocks.size(); ++b) {
        const upg::BlockNode& node = tree.blocks[b];
        for (Vertex lv = 0; lv < node.graph.num_vertices(); ++lv) {
            Vertex rv = rec.vertex_maps[b][lv];
            if (rv < 0 || rv >= rec.graph.num_vertices()) return false;
            if (to_orig[rv] == -1) to_orig[rv] = node.vertex_ids[lv];
            if (to_orig[rv] != node.vertex_ids[lv]) return false;
        }
    }
    std::vector<char> orig_seen(g.num_vertices(), 0);
    for (Vertex rv = 0; rv < rec.graph.num_vertices(); ++rv) {
        if (to_orig[rv] < 0 || to_orig[rv] >= g.num_vertices() || orig_seen[to_orig[rv]])
            return false;
        orig_seen[to_orig[rv]] = 1;
    }
    auto sorted_pair = [](std::pair<Vertex, Vertex> p) {
        if (p.first > p.second) std::swap(p.first, p.second);
        return p;
    };
    std::vector<char> orig_edge_seen(g.num_edges(), 0);
    for (std::size_t b = 0; b < tree.blocks.size(); ++b) {
        const upg::BlockNode& node = tree.blocks[b];
        for (Edge le = 0; le < node.graph.num_edges(); ++le) {
            Edge re = rec.edge_maps[b][le];
            if (node.is_virtual(le)) {
                if (re != -1) return false;
                continue;
            }
            Edge orig = node.real_edge_ids[le];
            if (re < 0 || orig < 0 || orig >= g.num_edges() || orig_edge_seen[orig])
                return false;
            orig_edge_seen[orig] = 1;
            auto [ru, rv] = rec.graph.endpoints(re);
            if (sorted_pair({to_orig[ru], to_orig[rv]}) != sorted_pair(g.endpoints(orig)))
                return false;
        }
    }
    for (Edge e = 0; e < g.num_edges(); ++e)
        if (!orig_edge_seen[e]) return false;
    return true;
}

std::string decompose_report(const std::string& oracle_name, uint64_t oracle_seed,
                             uint64_t run_seed, const upg::DecomposeParams& params,
                             const upg::DecomposeResult& result) {
    std::ostringstream out;
    out << "decompose oracle=" << oracle_name << " oracle_seed=" << oracle_seed
        << " seed=" << run_seed << " horizon=" << params.horizon << " r_max=" << params.r_max
        << " f_max=" << params.f_max << " h_esc=";
    if (params.h_esc > 0)
        out << params.h_esc;
    else
        out << "default";
    out << "\n";
    out << "window vertices=" << result.window.graph.num_vertices()
        << " edges=" << result.window.graph.num_edges() << "\n";
    for (const upg::StageReport& stage : result.stages)
        out << "stage r=" << stage.schedule.radius << " h_esc=" << stage.h_esc
            << " log2_steps=" << stage.schedule.log2_steps
            << " reshuffles=" << stage.schedule.reshuffles << " rounds=" << stage.rounds
            << " steps=" << stage.productive_steps << " removed=" << stage.edges_removed
            << "\n";
    std::map<std::pair<int, int>, long long> classes;
    for (const upg::ComponentClass& c : result.components)
        ++classes[{c.size, c.escape_directions}];
    out << "components total=" << result.components.size() << "\n";
    for (const auto& [key, count] : classes)
        out << "class size=" << key.first << " escapes=" << key.second << " count=" << count
            << "\n";
    out << "factor forest=" << (result.factor.is_forest ? "yes" : "no")
        << " links=" << result.factor.links.size() << "\n";
    for (std::size_t i = 0; i < result.factor.links.size(); ++i) {
        out << "link " << result.factor.links[i].first << " " << result.factor.links[i].second
            << " edges=";
        const auto& edges = result.factor.link_edges[i];
        for (std::size_t k = 0; k < edges.size(); ++k) {
            if (k > 0) out << ",";
            out << edges[k];
        }
        out << "\n";
    }
    return out.str();
}

} // namespace

extern "C" {

const char* upg_error_message(void) { return t_error.c_str(); }

void upg_string_free(char* text) { std::free(text); }

void upg_ints_free(int* values) { std::free(values); }

int upg_graph_parse(const char* text, upg_graph** out) {
    return guarded([&] {
        require_arg(text != nullptr && out != nullptr);
        std::istringstream in(text);
        *out = new upg_graph{upg::read_graph(in)};
    });
}

int upg_graph_format(const upg_graph* graph, char** out_text) {
    return guarded([&] {
        require_arg(graph != nullptr && out_text != nullptr);
        std::ostringstream out;
        upg::write_graph(out, graph->g);
        *out_text = dup_string(out.str());
    });
}

int upg_graph_counts(const upg_graph* graph, int* num_vertices, int* num_edges) {
    return guarded([&] {
        require_arg(graph != nullptr);
        if (num_vertices != nullptr) *num_vertices = graph->g.num_vertices();
        if (num_edges != nullptr) *num_edges = graph->g.num_edges();
    });
}

void upg_graph_free(upg_graph* graph) { delete graph; }

int upg_embed(const upg_graph* graph, uint64_t seed, int chirality, upg_rotation** out) {
    return guarded([&] {
        require_arg(graph != nullptr && out != nullptr);
        upg::require(chirality == 0 || chirality == 1, upg::ErrorCode::invalid_argument,
                     "chirality must be 0 (coin) or 1 (canonical)");
        upg::RotationSystem rs = upg::embed_graph(graph->g, seed);
        upg::RotationSystem mirror = rs.inverted();
        if (chirality == 1) {
            if (mirror.all_orders() < rs.all_orders()) rs = std::move(mirror);
        } else {
            if (upg::Rng(upg::mix(seed, 0xc01fULL)).coin()) rs = std::move(mirror);
        }
        *out = new upg_rotation{std::move(rs)};
    });
}

int upg_rotation_format(const upg_rotation* rotation, char** out_text) {
    return guarded([&] {
        require_arg(rotation != nullptr && out_text != nullptr);
        std::ostringstream out;
        upg::write_rotation(out, rotation->rs);
        *out_text = dup_string(out.str());
    });
}

int upg_rotation_genus(const upg_rotation* rotation, int* genus_out, int* faces_out) {
    return guarded([&] {
        require_arg(rotation != nullptr);
        if (genus_out != nullptr) *genus_out = upg::genus(rotation->rs);
        if (faces_out != nullptr)
            *faces_out = static_cast<int>(upg::trace_faces(rotation->rs).faces.size());
    });
}

void upg_rotation_free(upg_rotation* rotation) { delete rotation; }

int upg_blocktree_build(const upg_graph* graph, upg_blocktree** out) {
    return guarded([&] {
        require_arg(graph != nullptr && out != nullptr);
        *out = new upg_blocktree{upg::decompose_3blocks(graph->g)};
    });
}

int upg_blocktree_format(const upg_blocktree* tree, char** out_text) {
    return guarded([&] {
        require_arg(tree != nullptr && out_text != nullptr);
        std::ostringstream out;
        upg::write_blocktree(out, tree->tree);
        *out_text = dup_string(out.str());
    });
}

int upg_blocktree_counts(const upg_blocktree* tree, int* num_blocks, int* num_links) {
    return guarded([&] {
        require_arg(tree != nullptr);
        if (num_blocks != nullptr) *num_blocks = static_cast<int>(tree->tree.blocks.size());
        if (num_links != nullptr) *num_links = static_cast<int>(tree->tree.links.size());
    });
}

int upg_blocktree_roundtrip(const upg_graph* graph, int* ok) {
    return guarded([&] {
        require_arg(graph != nullptr && ok != nullptr);
        upg::ThreeBlockTree tree = upg::decompose_3blocks(graph->g);
        upg::ReconstructResult rec = upg::reconstruct(tree);
        *ok = roundtrip_matches(graph->g, tree, rec) ? 1 : 0;
    });
}

void upg_blocktree_free(upg_blocktree* tree) { delete tree; }

int upg_oracle_names(char** out_text) {
    return guarded([&] {
        require_arg(out_text != nullptr);
        std::string joined;
        for (const std::string& name : upg::oracle_names()) {
            joined += name;
            joined += '\n';
        }
        *out_text = dup_string(joined);
    });
}

int upg_decompose(const char* oracle_name, uint64_t oracle_seed, uint64_t run_seed,
                  int horizon, int r_max, int f_max, int h_esc, char** out_report,
                  upg_decompose_summary* out_summary) {
    return guarded([&] {
        require_arg(oracle_name != nullptr);
        auto oracle = upg::make_oracle(oracle_name, oracle_seed);
        upg::DecomposeParams params;
        params.horizon = horizon;
        params.r_max = r_max;
        params.f_max = f_max;
        params.h_esc = h_esc;
        upg::DecomposeResult result = upg::decompose(*oracle, params, run_seed);
        if (out_summary != nullptr) {
            upg_decompose_summary s{};
            s.window_vertices = result.window.graph.num_vertices();
            s.window_edges = result.window.graph.num_edges();
            for (const upg::StageReport& stage : result.stages)
                s.edges_removed += stage.edges_removed;
            s.factor_is_forest = result.factor.is_forest ? 1 : 0;
            s.components = static_cast<int64_t>(result.components.size());
            for (const upg::ComponentClass& c : result.components) {
                if (c.escape_directions == 0)
                    ++s.components_finite;
                else if (c.escape_directions == 1)
                    ++s.components_one_escape;
                else
                    ++s.components_multi_escape;
            }
            *out_summary = s;
        }
        if (out_report != nullptr)
            *out_report =
                dup_string(decompose_report(oracle_name, oracle_seed, run_seed, params, result));
    });
}

int upg_transport_names(char** out_text) {
    return guarded([&] {
        require_arg(out_text != nullptr);
        std::string joined;
        for (const std::string& name : upg::transport_names()) {
            joined += name;
            joined += '\n';
        }
        *out_text = dup_string(joined);
    });
}

int upg_mtp_check(const upg_graph* graph, const char* transport_name, double* lhs, double* rhs,
                  int* equal) {
    return guarded([&] {
        require_arg(graph != nullptr && transport_name != nullptr);
        upg::MtpReport report = upg::mtp_check(graph->g, upg::builtin_transport(transport_name));
        if (lhs != nullptr) *lhs = report.lhs;
        if (rhs != nullptr) *rhs = report.rhs;
        if (equal != nullptr) *equal = report.equal ? 1 : 0;
    });
}

int upg_sample_balls(const upg_graph* graph, int radius, int64_t n_samples, uint64_t seed,
                     upg_balldist** out) {
    return guarded([&] {
        require_arg(graph != nullptr && out != nullptr);
        *out = new upg_balldist{upg::sample_balls(graph->g, radius, n_samples, seed)};
    });
}

int upg_sample_balls_oracle(const char* oracle_name, uint64_t oracle_seed, int radius,
                            int64_t n_samples, upg_balldist** out) {
    return guarded([&] {
        require_arg(oracle_name != nullptr && out != nullptr);
        auto oracle = upg::make_oracle(oracle_name, oracle_seed);
        *out = new upg_balldist{upg::sample_balls(*oracle, radius, n_samples)};
    });
}

int upg_balldist_parse(const char* text, upg_balldist** out) {
    return guarded([&] {
        require_arg(text != nullptr && out != nullptr);
        *out = new upg_balldist{upg::parse_ball_distribution(text)};
    });
}

int upg_balldist_format(const upg_balldist* dist, char** out_text) {
    return guarded([&] {
        require_arg(dist != nullptr && out_text != nullptr);
        *out_text = dup_string(upg::format_ball_distribution(dist->d));
    });
}

int upg_tv_distance(const upg_balldist* p, const upg_balldist* q, double* out) {
    return guarded([&] {
        require_arg(p != nullptr && q != nullptr && out != nullptr);
        *out = upg::tv_distance(p->d, q->d);
    });
}

void upg_balldist_free(upg_balldist* dist) { delete dist; }

int upg_wilson_ust(const upg_graph* graph, uint64_t seed, int** out_edges, int* out_count) {
    return guarded([&] {
        require_arg(graph != nullptr && out_edges != nullptr && out_count != nullptr);
        std::vector<upg::Edge> tree = upg::wilson_ust(graph->g, seed);
        int* edges = static_cast<int*>(std::malloc(sizeof(int) * std::max<std::size_t>(tree.size(), 1)));
        upg::require(edges != nullptr, upg::ErrorCode::invalid_argument, "allocation failed");
        if (!tree.empty()) std::memcpy(edges, tree.data(), sizeof(int) * tree.size());
        *out_edges = edges;
        *out_count = static_cast<int>(tree.size());
    });
}

} // extern "C"
