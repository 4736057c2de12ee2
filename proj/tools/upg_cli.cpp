// Command-line front end over the shared-library C API: planar embeddings,
// 3-block trees, staged end decompositions over infinite-graph oracles, and
// ball/transport/spanning-tree statistics. Exit codes: 0 success, 2 usage or
// input parse failure (including unknown oracles), 3 non-planar input,
// 4 input not 2-connected, 5 exhausted exploration horizon, 1 anything else.
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "upg.h"

namespace {

int map_exit(int code) {
    switch (code) {
        case UPG_OK:
            return 0;
        case UPG_ERR_PARSE:
        case UPG_ERR_UNKNOWN_ORACLE:
            return 2;
        case UPG_ERR_NOT_PLANAR:
            return 3;
        case UPG_ERR_NOT_BICONNECTED:
            return 4;
        case UPG_ERR_HORIZON_EXHAUSTED:
            return 5;
        default:
            return 1;
    }
}

// Fails the command with the library's message when `code` is an error.
#define TRY(call)                                              \
    do {                                                       \
        int rc_ = (call);                                      \
        if (rc_ != UPG_OK) {                                   \
            std::cerr << "error: " << upg_error_message()      \
                      << "\n";                                 \
            return map_exit(rc_);                              \
        }                                                      \
    } while (0)

struct GraphDel {
    void operator()(upg_graph* p) const { upg_graph_free(p); }
};
struct RotationDel {
    void operator()(upg_rotation* p) const { upg_rotation_free(p); }
};
struct BlocktreeDel {
    void operator()(upg_blocktree* p) const { upg_blocktree_free(p); }
};
struct BalldistDel {
    void operator()(upg_balldist* p) const { upg_balldist_free(p); }
};
using GraphPtr = std::unique_ptr<upg_graph, GraphDel>;
using RotationPtr = std::unique_ptr<upg_rotation, RotationDel>;
using BlocktreePtr = std::unique_ptr<upg_blocktree, BlocktreeDel>;
using BalldistPtr = std::unique_ptr<upg_balldist, BalldistDel>;

std::string take_string(char* raw) {
    std::string out = raw != nullptr ? raw : "";
    upg_string_free(raw);
    return out;
}

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

// Writes to the path, or to stdout when the path is empty.
int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return 1;
    }
    return 0;
}

int parse_graph_file(const std::string& path, GraphPtr& out) {
    std::string text;
    if (!read_file(path, text)) {
        std::cerr << "error: cannot read '" << path << "'\n";
        return 1;
    }
    upg_graph* g = nullptr;
    int rc = upg_graph_parse(text.c_str(), &g);
    if (rc != UPG_OK) {
        std::cerr << "error: " << path << ": " << upg_error_message() << "\n";
        return map_exit(rc);
    }
    out.reset(g);
    return 0;
}

// Integer-valued doubles print as integers, everything else to 12
// significant digits.
std::string fmt_num(double v) {
    long long r = static_cast<long long>(v);
    if (v == static_cast<double>(r)) return std::to_string(r);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// splitmix64 finalizer, used to derive independent per-run seeds in batch
// sweeps.
std::uint64_t sub_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int run_embed(const std::string& input, std::uint64_t seed, const std::string& chirality,
              const std::string& out_path) {
    GraphPtr g;
    if (int rc = parse_graph_file(input, g)) return rc;
    upg_rotation* raw = nullptr;
    TRY(upg_embed(g.get(), seed, chirality == "fix" ? 1 : 0, &raw));
    RotationPtr rot(raw);
    int genus_val = 0, faces = 0;
    TRY(upg_rotation_genus(rot.get(), &genus_val, &faces));
    std::cout << "genus=" << genus_val << " faces=" << faces << "\n";
    char* text = nullptr;
    TRY(upg_rotation_format(rot.get(), &text));
    return emit(take_string(text), out_path);
}

int run_blocktree(const std::string& input, bool roundtrip, const std::string& out_path) {
    GraphPtr g;
    if (int rc = parse_graph_file(input, g)) return rc;
    upg_blocktree* raw = nullptr;
    TRY(upg_blocktree_build(g.get(), &raw));
    BlocktreePtr tree(raw);
    int blocks = 0, links = 0;
    TRY(upg_blocktree_counts(tree.get(), &blocks, &links));
    std::cout << "blocks=" << blocks << " links=" << links << "\n";
    int rc_final = 0;
    if (roundtrip) {
        int ok = 0;
        TRY(upg_blocktree_roundtrip(g.get(), &ok));
        std::cout << "roundtrip=" << (ok ? "OK" : "FAIL") << "\n";
        if (!ok) rc_final = 1;
    }
    char* text = nullptr;
    TRY(upg_blocktree_format(tree.get(), &text));
    int rc_emit = emit(take_string(text), out_path);
    return rc_emit != 0 ? rc_emit : rc_final;
}

int run_decompose(const std::string& oracle, std::uint64_t seed, int horizon, int r_max,
                  int f_max, int h_esc, int batch, const std::string& out_path) {
    if (batch <= 0) {
        char* report = nullptr;
        TRY(upg_decompose(oracle.c_str(), seed, sub_seed(seed, 0x5eedULL), horizon, r_max,
                          f_max, h_esc, &report, nullptr));
        return emit(take_string(report), out_path);
    }
    std::ostringstream out;
    long long forest_ok = 0, tame = 0;
    for (int i = 0; i < batch; ++i) {
        std::uint64_t oracle_seed = sub_seed(seed, 2 * static_cast<std::uint64_t>(i));
        std::uint64_t run_seed = sub_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1);
        upg_decompose_summary s{};
        TRY(upg_decompose(oracle.c_str(), oracle_seed, run_seed, horizon, r_max, f_max, h_esc,
                          nullptr, &s));
        bool run_tame = s.components_multi_escape == 0;
        forest_ok += s.factor_is_forest;
        tame += run_tame;
        out << "run i=" << i << " removed=" << s.edges_removed
            << " forest=" << (s.factor_is_forest ? "yes" : "no") << " components=" << s.components
            << " finite=" << s.components_finite << " one=" << s.components_one_escape
            << " multi=" << s.components_multi_escape << " tame=" << (run_tame ? "yes" : "no")
            << "\n";
    }
    out << "batch oracle=" << oracle << " runs=" << batch << " forest_ok=" << forest_ok
        << " tame=" << tame << "\n";
    return emit(out.str(), out_path);
}

int run_stats_mtp(const std::string& input, const std::string& transport) {
    GraphPtr g;
    if (int rc = parse_graph_file(input, g)) return rc;
    double lhs = 0, rhs = 0;
    int equal = 0;
    TRY(upg_mtp_check(g.get(), transport.c_str(), &lhs, &rhs, &equal));
    std::cout << "lhs=" << fmt_num(lhs) << " rhs=" << fmt_num(rhs)
              << " equal=" << (equal ? "yes" : "no") << "\n";
    return 0;
}

int run_stats_balls(const std::string& input, const std::string& oracle, int radius,
                    long long samples, std::uint64_t seed, const std::string& out_path) {
    if (input.empty() == oracle.empty()) {
        std::cerr << "error: pass exactly one of --input and --oracle\n";
        return 2;
    }
    upg_balldist* raw = nullptr;
    if (!input.empty()) {
        GraphPtr g;
        if (int rc = parse_graph_file(input, g)) return rc;
        TRY(upg_sample_balls(g.get(), radius, samples, seed, &raw));
    } else {
        TRY(upg_sample_balls_oracle(oracle.c_str(), seed, radius, samples, &raw));
    }
    BalldistPtr dist(raw);
    char* text = nullptr;
    TRY(upg_balldist_format(dist.get(), &text));
    return emit(take_string(text), out_path);
}

int run_stats_tv(const std::string& p_path, const std::string& q_path) {
    BalldistPtr dists[2];
    const std::string* paths[2] = {&p_path, &q_path};
    for (int i = 0; i < 2; ++i) {
        std::string text;
        if (!read_file(*paths[i], text)) {
            std::cerr << "error: cannot read '" << *paths[i] << "'\n";
            return 1;
        }
        upg_balldist* raw = nullptr;
        int rc = upg_balldist_parse(text.c_str(), &raw);
        if (rc != UPG_OK) {
            std::cerr << "error: " << *paths[i] << ": " << upg_error_message() << "\n";
            return map_exit(rc);
        }
        dists[i].reset(raw);
    }
    double tv = 0;
    TRY(upg_tv_distance(dists[0].get(), dists[1].get(), &tv));
    std::cout << "tv=" << fmt_num(tv) << "\n";
    return 0;
}

int run_stats_ust(const std::string& input, std::uint64_t seed, long long samples,
                  const std::string& out_path) {
    GraphPtr g;
    if (int rc = parse_graph_file(input, g)) return rc;
    if (samples <= 1) {
        int* edges = nullptr;
        int count = 0;
        TRY(upg_wilson_ust(g.get(), seed, &edges, &count));
        std::ostringstream out;
        out << "tree";
        for (int i = 0; i < count; ++i) out << " " << edges[i];
        out << "\n";
        upg_ints_free(edges);
        return emit(out.str(), out_path);
    }
    std::map<std::vector<int>, long long> freq;
    for (long long i = 0; i < samples; ++i) {
        int* edges = nullptr;
        int count = 0;
        TRY(upg_wilson_ust(g.get(), sub_seed(seed, static_cast<std::uint64_t>(i)), &edges,
                           &count));
        freq[std::vector<int>(edges, edges + count)]++;
        upg_ints_free(edges);
    }
    std::ostringstream out;
    out << "ust samples=" << samples << " trees=" << freq.size() << "\n";
    for (const auto& [tree, count] : freq) {
        for (std::size_t i = 0; i < tree.size(); ++i) {
            if (i > 0) out << ",";
            out << tree[i];
        }
        out << " " << count << "\n";
    }
    return emit(out.str(), out_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar embeddings, 3-block trees, end decompositions and ball statistics"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out_path;
    app.add_option("--seed", seed, "seed for every randomized choice (default 0)");
    app.add_option("--out", out_path, "write the main output to this file instead of stdout");

    std::string embed_input, chirality = "coin";
    auto* embed = app.add_subcommand("embed", "embed a planar multigraph");
    embed->fallthrough();
    embed->add_option("--input", embed_input, "graph file")->required();
    embed->add_option("--chirality", chirality, "coin: seeded mirror flip; fix: canonical mirror")
        ->check(CLI::IsMember({"coin", "fix"}));

    std::string bt_input;
    bool roundtrip = false;
    auto* blocktree = app.add_subcommand("blocktree", "3-block tree of a 2-connected multigraph");
    blocktree->fallthrough();
    blocktree->add_option("--input", bt_input, "graph file")->required();
    blocktree->add_flag("--roundtrip", roundtrip, "reconstruct and verify against the input");

    std::string dec_oracle;
    int horizon = 12, r_max = 3, f_max = 3, h_esc = 4, batch = 0;
    auto* decompose = app.add_subcommand("decompose", "staged end decomposition of an oracle window");
    decompose->fallthrough();
    decompose->add_option("--oracle", dec_oracle, "oracle name")->required();
    decompose->add_option("--horizon", horizon, "exploration radius (default 12)");
    decompose->add_option("--r-max", r_max, "last stage radius (default 3)");
    decompose->add_option("--f-max", f_max, "largest cut size (default 3)");
    decompose->add_option("--h-esc", h_esc,
                          "escape distance (default 4; 0 = per-stage heuristic, which needs a "
                          "horizon of at least r-max + 16)");
    decompose->add_option("--batch", batch, "summarize this many independently seeded runs");

    auto* stats = app.add_subcommand("stats", "unimodularity statistics");
    stats->fallthrough();
    stats->require_subcommand(1);

    std::string mtp_input, transport = "adjacency";
    auto* mtp = stats->add_subcommand("mtp", "mass transport balance check");
    mtp->fallthrough();
    mtp->add_option("--input", mtp_input, "graph file")->required();
    mtp->add_option("--f", transport, "builtin transport function (default adjacency)")
        ->check(CLI::IsMember({"adjacency", "ball-size", "degree-weighted"}));

    std::string balls_input, balls_oracle;
    int radius = 2;
    long long ball_samples = 0;
    auto* balls = stats->add_subcommand("balls", "empirical rooted ball distribution");
    balls->fallthrough();
    balls->add_option("--input", balls_input, "graph file (sweeps all roots when --samples 0)");
    balls->add_option("--oracle", balls_oracle, "oracle name (point mass at the origin ball)");
    balls->add_option("--radius", radius, "ball radius (default 2)");
    balls->add_option("--samples", ball_samples, "sample count (default 0 = exact sweep)");

    std::string tv_p, tv_q;
    auto* tv = stats->add_subcommand("tv", "total variation distance between ball files");
    tv->fallthrough();
    tv->add_option("--p", tv_p, "first ball distribution file")->required();
    tv->add_option("--q", tv_q, "second ball distribution file")->required();

    std::string ust_input;
    long long ust_samples = 1;
    auto* ust = stats->add_subcommand("ust", "uniform spanning trees");
    ust->fallthrough();
    ust->add_option("--input", ust_input, "graph file")->required();
    ust->add_option("--samples", ust_samples, "1: print one tree; >1: frequency table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (app.got_subcommand(embed)) return run_embed(embed_input, seed, chirality, out_path);
    if (app.got_subcommand(blocktree)) return run_blocktree(bt_input, roundtrip, out_path);
    if (app.got_subcommand(decompose))
        return run_decompose(dec_oracle, seed, horizon, r_max, f_max, h_esc, batch, out_path);
    if (stats->got_subcommand(mtp)) return run_stats_mtp(mtp_input, transport);
    if (stats->got_subcommand(balls))
        return run_stats_balls(balls_input, balls_oracle, radius, ball_samples, seed, out_path);
    if (stats->got_subcommand(tv)) return run_stats_tv(tv_p, tv_q);
    if (stats->got_subcommand(ust)) return run_stats_ust(ust_input, seed, ust_samples, out_path);
    std::cerr << "error: no command\n";
    return 2;
}
