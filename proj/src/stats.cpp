#include "upg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "upg/error.hpp"
#include "upg/rng.hpp"

namespace upg {

namespace {

// Parallel bundles thicker than this cannot be encoded in one code byte.
constexpr int kMultLimit = 64;

int multiplicity(const MultiGraph& g, Vertex x, Vertex y) {
    int m = 0;
    for (Dart d : g.darts_at(x))
        if (g.dart_head(d) == y) ++m;
    return m;
}

void check_transport_value(double v) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::invalid_argument,
            "transport values must be nonnegative and finite");
}

// Finds the lexicographically least byte stream over all vertex orders that
// start at the root. Position i contributes its distance from the root
// followed by (kMultLimit - multiplicity) against each earlier vertex, so
// orders that stay close to the root and to already-placed vertices sort
// first and the best-so-far prefix prunes most of the search.
class CanonicalSearch {
  public:
    CanonicalSearch(int n, const std::vector<std::uint8_t>& mult, const std::vector<int>& dist,
                    int root)
        : n_(n), mult_(mult), dist_(dist) {
        used_.assign(n_, 0);
        used_[root] = 1;
        placed_.push_back(root);
    }

    std::vector<std::uint8_t> run() {
        dfs();
        return std::move(best_);
    }

  private:
    void dfs() {
        int i = static_cast<int>(placed_.size());
        if (i == n_) {
            if (!have_best_ ||
                std::memcmp(cur_.data(), best_.data(), cur_.size()) < 0) {
                best_ = cur_;
                have_best_ = true;
            }
            return;
        }
        std::vector<std::pair<std::vector<std::uint8_t>, int>> cands;
        cands.reserve(n_ - i);
        for (int c = 0; c < n_; ++c) {
            if (used_[c]) continue;
            std::vector<std::uint8_t> seg;
            seg.reserve(i + 1);
            seg.push_back(static_cast<std::uint8_t>(dist_[c]));
            for (int j = 0; j < i; ++j)
                seg.push_back(static_cast<std::uint8_t>(kMultLimit - mult_[placed_[j] * n_ + c]));
            cands.emplace_back(std::move(seg), c);
        }
        std::sort(cands.begin(), cands.end());
        std::size_t base = cur_.size();
        for (auto& [seg, c] : cands) {
            cur_.resize(base);
            cur_.insert(cur_.end(), seg.begin(), seg.end());
            // Candidates are sorted, so once the stream exceeds the best
            // known prefix every later candidate would too.
            if (have_best_ && std::memcmp(cur_.data(), best_.data(), cur_.size()) > 0) break;
            used_[c] = 1;
            placed_.push_back(c);
            dfs();
            placed_.pop_back();
            used_[c] = 0;
        }
        cur_.resize(base);
    }

    int n_;
    const std::vector<std::uint8_t>& mult_;
    const std::vector<int>& dist_;
    std::vector<char> used_;
    std::vector<int> placed_;
    std::vector<std::uint8_t> cur_, best_;
    bool have_best_ = false;
};

std::string to_hex(const std::string& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * bytes.size());
    for (unsigned char b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 15]);
    }
    return out;
}

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string from_hex(const std::string& hex) {
    require(!hex.empty() && hex.size() % 2 == 0, ErrorCode::parse,
            "ball code is not valid hex");
    std::string out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]), lo = hex_nibble(hex[i + 1]);
        require(hi >= 0 && lo >= 0, ErrorCode::parse, "ball code is not valid hex");
        out.push_back(static_cast<char>((hi << 4) | lo));
    }
    return out;
}

struct Dsu {
    std::vector<int> parent;

    explicit Dsu(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }

    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

} // namespace

TransportFunction builtin_transport(const std::string& name) {
    TransportFunction f;
    f.integer_valued = true;
    f.name = name;
    if (name == "adjacency") {
        f.eval = [](const MultiGraph& g, Vertex x, Vertex y) {
            return static_cast<double>(multiplicity(g, x, y));
        };
    } else if (name == "degree-weighted") {
        f.eval = [](const MultiGraph& g, Vertex x, Vertex y) {
            return static_cast<double>(g.degree(x)) * multiplicity(g, x, y);
        };
    } else if (name == "ball-size") {
        f.eval = [](const MultiGraph& g, Vertex x, Vertex y) {
            auto dist = bfs_distances(g, x);
            if (dist[y] < 1 || dist[y] > 2) return 0.0;
            long long size = 0;
            for (int d : dist)
                if (d >= 0 && d <= 2) ++size;
            return static_cast<double>(size);
        };
    } else {
        fail(ErrorCode::invalid_argument, "unknown transport function '" + name + "'");
    }
    return f;
}

std::vector<std::string> transport_names() {
    return {"adjacency", "ball-size", "degree-weighted"};
}

MtpReport mtp_check(const MultiGraph& g, const TransportFunction& f) {
    require(g.num_vertices() >= 1, ErrorCode::invalid_argument,
            "transport check needs a nonempty graph");
    require(static_cast<bool>(f.eval), ErrorCode::invalid_argument,
            "transport function has no evaluator");
    int n = g.num_vertices();
    MtpReport report;
    if (f.integer_valued) {
        long long lhs = 0, rhs = 0;
        for (Vertex o = 0; o < n; ++o)
            for (Vertex x = 0; x < n; ++x) {
                double out = f.eval(g, o, x);
                double in = f.eval(g, x, o);
                check_transport_value(out);
                check_transport_value(in);
                long long out_i = std::llround(out), in_i = std::llround(in);
                require(out == static_cast<double>(out_i) && in == static_cast<double>(in_i),
                        ErrorCode::invalid_argument,
                        "integer-valued transport function returned a fraction");
                lhs += out_i;
                rhs += in_i;
            }
        report.lhs = static_cast<double>(lhs) / n;
        report.rhs = static_cast<double>(rhs) / n;
        report.equal = (lhs == rhs);
        report.exact = true;
    } else {
        double lhs = 0.0, rhs = 0.0;
        for (Vertex o = 0; o < n; ++o)
            for (Vertex x = 0; x < n; ++x) {
                double out = f.eval(g, o, x);
                double in = f.eval(g, x, o);
                check_transport_value(out);
                check_transport_value(in);
                lhs += out;
                rhs += in;
            }
        report.lhs = lhs / n;
        report.rhs = rhs / n;
        report.equal = std::fabs(report.lhs - report.rhs) <= 1e-12;
        report.exact = false;
    }
    return report;
}

std::string rooted_ball_code(const MultiGraph& g, Vertex root, int radius) {
    require(root >= 0 && root < g.num_vertices(), ErrorCode::invalid_argument,
            "ball root out of range");
    require(radius >= 0 && radius <= 255, ErrorCode::invalid_argument,
            "ball radius must lie in [0, 255]");
    Subgraph b = ball(g, root, radius);
    int n = b.graph.num_vertices();
    require(n <= 2048, ErrorCode::guard_exceeded, "ball too large to canonicalize");
    std::vector<std::uint8_t> mult(static_cast<std::size_t>(n) * n, 0);
    for (Edge e = 0; e < b.graph.num_edges(); ++e) {
        auto [u, v] = b.graph.endpoints(e);
        std::uint8_t m = ++mult[static_cast<std::size_t>(u) * n + v];
        mult[static_cast<std::size_t>(v) * n + u] = m;
        require(m < kMultLimit, ErrorCode::invalid_argument,
                "parallel bundle too thick to encode in ball codes");
    }
    CanonicalSearch search(n, mult, b.dist, b.root_local);
    std::vector<std::uint8_t> stream = search.run();
    std::string code;
    code.reserve(4 + stream.size());
    for (int shift = 24; shift >= 0; shift -= 8)
        code.push_back(static_cast<char>((n >> shift) & 0xff));
    code.append(stream.begin(), stream.end());
    return code;
}

EmpiricalBallDistribution sample_balls(const MultiGraph& g, int radius, long long n_samples,
                                       std::uint64_t seed) {
    require(g.num_vertices() >= 1, ErrorCode::invalid_argument,
            "ball sampling needs a nonempty graph");
    require(n_samples >= 0, ErrorCode::invalid_argument, "negative sample count");
    EmpiricalBallDistribution out;
    out.radius = radius;
    int n = g.num_vertices();
    if (n_samples == 0) {
        for (Vertex v = 0; v < n; ++v) ++out.counts[rooted_ball_code(g, v, radius)];
        out.sample_size = n;
    } else {
        std::vector<std::string> memo(n);
        Rng rng(seed);
        for (long long i = 0; i < n_samples; ++i) {
            Vertex v = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(n)));
            if (memo[v].empty()) memo[v] = rooted_ball_code(g, v, radius);
            ++out.counts[memo[v]];
        }
        out.sample_size = n_samples;
    }
    return out;
}

EmpiricalBallDistribution sample_balls(const GraphOracle& oracle, int radius,
                                       long long n_samples, std::size_t max_vertices) {
    require(radius >= 0, ErrorCode::invalid_argument, "negative ball radius");
    require(n_samples >= 0, ErrorCode::invalid_argument, "negative sample count");
    Window w = explore(oracle, radius, max_vertices);
    EmpiricalBallDistribution out;
    out.radius = radius;
    out.sample_size = std::max<long long>(n_samples, 1);
    out.counts[rooted_ball_code(w.graph, 0, radius)] = out.sample_size;
    return out;
}

double tv_distance(const EmpiricalBallDistribution& p, const EmpiricalBallDistribution& q) {
    require(p.radius == q.radius, ErrorCode::invalid_argument,
            "ball distributions have different radii");
    require(p.sample_size > 0 && q.sample_size > 0, ErrorCode::invalid_argument,
            "ball distribution is empty");
    long long np = p.sample_size, nq = q.sample_size;
    long long num = 0;
    auto ip = p.counts.begin();
    auto iq = q.counts.begin();
    while (ip != p.counts.end() || iq != q.counts.end()) {
        long long pc = 0, qc = 0;
        if (iq == q.counts.end() || (ip != p.counts.end() && ip->first < iq->first)) {
            pc = (ip++)->second;
        } else if (ip == p.counts.end() || iq->first < ip->first) {
            qc = (iq++)->second;
        } else {
            pc = (ip++)->second;
            qc = (iq++)->second;
        }
        num += std::llabs(pc * nq - qc * np);
    }
    return static_cast<double>(num) / static_cast<double>(2 * np * nq);
}

std::string format_ball_distribution(const EmpiricalBallDistribution& d) {
    std::ostringstream out;
    out << "balls r=" << d.radius << " n=" << d.sample_size << "\n";
    for (const auto& [code, count] : d.counts) out << to_hex(code) << " " << count << "\n";
    return out.str();
}

EmpiricalBallDistribution parse_ball_distribution(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    EmpiricalBallDistribution d;
    long long total = 0;
    while (std::getline(in, line)) {
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream fields(line);
        if (!have_header) {
            std::string word, rfield, nfield, extra;
            fields >> word >> rfield >> nfield;
            require(word == "balls" && rfield.rfind("r=", 0) == 0 && nfield.rfind("n=", 0) == 0 &&
                        !(fields >> extra),
                    ErrorCode::parse, "malformed ball distribution header");
            try {
                d.radius = std::stoi(rfield.substr(2));
                d.sample_size = std::stoll(nfield.substr(2));
            } catch (const std::exception&) {
                fail(ErrorCode::parse, "malformed ball distribution header");
            }
            require(d.radius >= 0 && d.sample_size >= 1, ErrorCode::parse,
                    "malformed ball distribution header");
            have_header = true;
            continue;
        }
        std::string hex, extra;
        long long count = 0;
        require(static_cast<bool>(fields >> hex >> count) && !(fields >> extra),
                ErrorCode::parse, "malformed ball distribution line");
        require(count >= 1, ErrorCode::parse, "nonpositive ball count");
        std::string code = from_hex(hex);
        require(d.counts.emplace(code, count).second, ErrorCode::parse,
                "duplicate ball code line");
        total += count;
    }
    require(have_header, ErrorCode::parse, "missing ball distribution header");
    require(total == d.sample_size, ErrorCode::parse,
            "ball counts do not sum to the header size");
    return d;
}

std::vector<Edge> wilson_ust(const MultiGraph& g, std::uint64_t seed) {
    int n = g.num_vertices();
    require(n >= 1, ErrorCode::invalid_argument, "spanning tree of an empty graph");
    require(is_connected(g), ErrorCode::invalid_argument,
            "spanning tree requires a connected graph");
    std::vector<char> in_tree(n, 0);
    in_tree[0] = 1;
    std::vector<Edge> via_edge(n, -1);
    std::vector<Vertex> via_next(n, -1);
    Rng rng(seed);
    std::vector<Edge> tree;
    tree.reserve(n - 1);
    for (Vertex s = 1; s < n; ++s) {
        Vertex u = s;
        while (!in_tree[u]) {
            const auto& darts = g.darts_at(u);
            Dart d = darts[rng.below(darts.size())];
            via_edge[u] = MultiGraph::dart_edge(d);
            via_next[u] = g.dart_head(d);
            u = via_next[u];
        }
        u = s;
        while (!in_tree[u]) {
            in_tree[u] = 1;
            tree.push_back(via_edge[u]);
            u = via_next[u];
        }
    }
    std::sort(tree.begin(), tree.end());
    return tree;
}

std::vector<Edge> assemble_spanning_tree(const MultiGraph& g, const std::vector<int>& part_of,
                                         std::uint64_t seed) {
    int n = g.num_vertices();
    require(n >= 1, ErrorCode::invalid_argument, "partition of an empty graph");
    require(static_cast<int>(part_of.size()) == n, ErrorCode::invalid_argument,
            "partition size does not match the vertex count");
    int parts = 0;
    for (Vertex v = 0; v < n; ++v) {
        require(part_of[v] >= 0, ErrorCode::invalid_argument, "negative part id");
        parts = std::max(parts, part_of[v] + 1);
    }
    std::vector<std::vector<Vertex>> members(parts);
    for (Vertex v = 0; v < n; ++v) members[part_of[v]].push_back(v);
    std::vector<Edge> result;
    result.reserve(n - 1);
    for (int p = 0; p < parts; ++p) {
        require(!members[p].empty(), ErrorCode::invalid_argument,
                "part ids must cover 0..k-1 with no empty part");
        Subgraph sub = induced_subgraph(g, members[p]);
        require(is_connected(sub.graph), ErrorCode::invalid_argument,
                "part " + std::to_string(p) + " is not connected");
        for (Edge e : wilson_ust(sub.graph, mix(seed, 0x7e55ULL, static_cast<std::uint64_t>(p))))
            result.push_back(sub.edge_to_parent[e]);
    }
    std::map<std::pair<int, int>, std::vector<Edge>> cross;
    for (Edge e = 0; e < g.num_edges(); ++e) {
        auto [u, v] = g.endpoints(e);
        int a = part_of[u], b = part_of[v];
        if (a != b) cross[{std::min(a, b), std::max(a, b)}].push_back(e);
    }
    Dsu dsu(parts);
    bool tree_like = static_cast<int>(cross.size()) == parts - 1;
    for (const auto& [link, edges] : cross) {
        if (!tree_like) break;
        tree_like = dsu.unite(link.first, link.second);
        if (!tree_like) break;
        Rng pick(mix(seed, 0xedceULL, static_cast<std::uint64_t>(link.first),
                     static_cast<std::uint64_t>(link.second)));
        result.push_back(edges[pick.below(edges.size())]);
    }
    require(tree_like, ErrorCode::invalid_argument,
            "the parts do not form a tree-like decomposition");
    std::sort(result.begin(), result.end());
    Dsu span(n);
    bool acyclic = static_cast<int>(result.size()) == n - 1;
    for (Edge e : result) {
        if (!acyclic) break;
        auto [u, v] = g.endpoints(e);
        acyclic = span.unite(u, v);
    }
    require(acyclic, ErrorCode::invalid_argument,
            "internal: assembled edges do not form a spanning tree");
    return result;
}

double local_distance(const MultiGraph& a, Vertex root_a, const MultiGraph& b, Vertex root_b,
                      int r_max) {
    require(root_a >= 0 && root_a < a.num_vertices() && root_b >= 0 &&
                root_b < b.num_vertices(),
            ErrorCode::invalid_argument, "ball root out of range");
    require(r_max >= 0, ErrorCode::invalid_argument, "negative radius limit");
    for (int k = 1; k <= r_max; ++k)
        if (rooted_ball_code(a, root_a, k) != rooted_ball_code(b, root_b, k))
            return std::ldexp(1.0, -k);
    return 0.0;
}

} // namespace upg
