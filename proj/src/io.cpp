#include "upg/io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace upg {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
    fail(ErrorCode::parse, "line " + std::to_string(line) + ": " + what);
}

// Yields non-empty, non-comment lines along with their 1-based line numbers.
struct LineReader {
    std::istream& in;
    int line_no = 0;

    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in, raw)) {
            line_no++;
            size_t start = raw.find_first_not_of(" \t\r");
            if (start == std::string::npos) continue;
            if (raw[start] == '#') continue;
            out = raw.substr(start);
            return true;
        }
        return false;
    }
};

long long parse_int(std::istringstream& ss, int line, const std::string& what) {
    long long value;
    if (!(ss >> value)) parse_fail(line, "expected " + what);
    return value;
}

void expect_end(std::istringstream& ss, int line) {
    std::string extra;
    if (ss >> extra) parse_fail(line, "trailing token '" + extra + "'");
}

// Reads the `graph` header and the run of `e` lines. If stop_line is given,
// the first line that is not an `e` line is stored there for the caller;
// otherwise such a line is a parse error.
MultiGraph read_graph_block(LineReader& reader, std::string* stop_line) {
    std::string line;
    if (!reader.next(line)) fail(ErrorCode::parse, "empty graph input");
    std::istringstream header(line);
    std::string tag;
    header >> tag;
    if (tag != "graph") parse_fail(reader.line_no, "expected 'graph <num_vertices>'");
    long long n = parse_int(header, reader.line_no, "vertex count");
    expect_end(header, reader.line_no);
    if (n < 0 || n > 100000000) parse_fail(reader.line_no, "vertex count out of range");

    std::vector<std::pair<Vertex, Vertex>> endpoints;
    std::vector<bool> seen;
    while (reader.next(line)) {
        std::istringstream ss(line);
        ss >> tag;
        if (tag != "e") {
            if (stop_line) {
                *stop_line = line;
                break;
            }
            parse_fail(reader.line_no, "expected 'e <edge_id> <u> <v>'");
        }
        long long id = parse_int(ss, reader.line_no, "edge id");
        long long u = parse_int(ss, reader.line_no, "endpoint");
        long long v = parse_int(ss, reader.line_no, "endpoint");
        expect_end(ss, reader.line_no);
        if (id < 0) parse_fail(reader.line_no, "negative edge id");
        if (u < 0 || u >= n || v < 0 || v >= n)
            parse_fail(reader.line_no, "endpoint out of range");
        if (u == v) parse_fail(reader.line_no, "self-loop");
        if (id >= static_cast<long long>(seen.size())) {
            seen.resize(id + 1, false);
            endpoints.resize(id + 1, {-1, -1});
        }
        if (seen[id]) parse_fail(reader.line_no, "duplicate edge id " + std::to_string(id));
        seen[id] = true;
        endpoints[id] = {static_cast<Vertex>(u), static_cast<Vertex>(v)};
    }
    for (size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            fail(ErrorCode::parse, "edge ids are not dense: missing id " + std::to_string(i));
    return MultiGraph(static_cast<int>(n), std::move(endpoints));
}

} // namespace

MultiGraph read_graph(std::istream& in) {
    LineReader reader{in};
    return read_graph_block(reader, nullptr);
}

MultiGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, "cannot open " + path);
    return read_graph(in);
}

void write_graph(std::ostream& out, const MultiGraph& g) {
    out << "graph " << g.num_vertices() << "\n";
    for (Edge e = 0; e < g.num_edges(); ++e) {
        auto [u, v] = g.endpoints(e);
        out << "e " << e << " " << u << " " << v << "\n";
    }
}

void write_graph_file(const std::string& path, const MultiGraph& g) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::io, "cannot open " + path + " for writing");
    write_graph(out, g);
    out.flush();
    require(out.good(), ErrorCode::io, "write failed for " + path);
}

RotationSystem read_rotation(std::istream& in) {
    LineReader reader{in};
    std::string pending;
    MultiGraph g = read_graph_block(reader, &pending);
    std::vector<std::vector<Dart>> orders(g.num_vertices());
    std::vector<bool> seen(g.num_vertices(), false);

    std::string line = pending;
    bool carried = !pending.empty();
    while (carried || reader.next(line)) {
        carried = false;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag != "r") parse_fail(reader.line_no, "expected 'r <v>: <dart ids>'");
        std::string vtok;
        if (!(ss >> vtok) || vtok.size() < 2 || vtok.back() != ':')
            parse_fail(reader.line_no, "expected '<v>:' after 'r'");
        vtok.pop_back();
        long long v = -1;
        size_t used = 0;
        try {
            v = std::stoll(vtok, &used);
        } catch (...) {
            parse_fail(reader.line_no, "bad vertex id '" + vtok + "'");
        }
        if (used != vtok.size()) parse_fail(reader.line_no, "bad vertex id '" + vtok + "'");
        if (v < 0 || v >= g.num_vertices())
            parse_fail(reader.line_no, "vertex id out of range");
        if (seen[v])
            parse_fail(reader.line_no, "duplicate rotation line for vertex " + std::to_string(v));
        seen[v] = true;
        long long d;
        while (ss >> d) {
            if (d < 0 || d >= g.num_darts()) parse_fail(reader.line_no, "dart id out of range");
            orders[v].push_back(static_cast<Dart>(d));
        }
        if (ss.fail() && !ss.eof()) parse_fail(reader.line_no, "expected a dart id");
    }
    for (Vertex v = 0; v < g.num_vertices(); ++v)
        if (!seen[v])
            fail(ErrorCode::parse, "missing rotation line for vertex " + std::to_string(v));
    try {
        return RotationSystem(std::move(g), orders);
    } catch (const Error& err) {
        fail(ErrorCode::parse, std::string("invalid rotation: ") + err.what());
    }
}

RotationSystem read_rotation_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, "cannot open " + path);
    return read_rotation(in);
}

void write_rotation(std::ostream& out, const RotationSystem& rs) {
    write_graph(out, rs.graph());
    for (Vertex v = 0; v < rs.graph().num_vertices(); ++v) {
        out << "r " << v << ":";
        for (Dart d : rs.order_at(v)) out << " " << d;
        out << "\n";
    }
}

void write_rotation_file(const std::string& path, const RotationSystem& rs) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::io, "cannot open " + path + " for writing");
    write_rotation(out, rs);
    out.flush();
    require(out.good(), ErrorCode::io, "write failed for " + path);
}

ThreeBlockTree read_blocktree(std::istream& in) {
    LineReader reader{in};
    std::string line;
    if (!reader.next(line)) fail(ErrorCode::parse, "empty 3-block tree input");
    std::istringstream header(line);
    std::string tag;
    header >> tag;
    if (tag != "blocktree")
        parse_fail(reader.line_no, "expected 'blocktree <num_blocks> <num_links>'");
    long long nb = parse_int(header, reader.line_no, "block count");
    long long nl = parse_int(header, reader.line_no, "link count");
    expect_end(header, reader.line_no);
    if (nb < 1 || nb > 1000000) parse_fail(reader.line_no, "block count out of range");
    if (nl < 0 || nl > 1000000) parse_fail(reader.line_no, "link count out of range");

    struct RawBlock {
        bool declared = false;
        BlockKind kind = BlockKind::cycle;
        long long nv = 0, ne = 0;
        std::vector<Vertex> vertex_ids;
        std::vector<bool> vertex_seen;
        std::vector<std::pair<Vertex, Vertex>> endpoints;
        std::vector<Edge> real_edge_ids;
        std::vector<bool> edge_seen;
    };
    std::vector<RawBlock> blocks(nb);
    std::vector<TreeLink> links;

    auto block_at = [&](long long id, int line_no) -> RawBlock& {
        if (id < 0 || id >= nb) parse_fail(line_no, "block id out of range");
        RawBlock& b = blocks[id];
        if (!b.declared) parse_fail(line_no, "block " + std::to_string(id) + " not declared yet");
        return b;
    };

    while (reader.next(line)) {
        std::istringstream ss(line);
        ss >> tag;
        if (tag == "block") {
            long long id = parse_int(ss, reader.line_no, "block id");
            std::string kind_word;
            if (!(ss >> kind_word)) parse_fail(reader.line_no, "expected block kind");
            long long nv = parse_int(ss, reader.line_no, "vertex count");
            long long ne = parse_int(ss, reader.line_no, "edge count");
            expect_end(ss, reader.line_no);
            if (id < 0 || id >= nb) parse_fail(reader.line_no, "block id out of range");
            if (blocks[id].declared)
                parse_fail(reader.line_no, "duplicate block " + std::to_string(id));
            if (nv < 2 || nv > 100000000) parse_fail(reader.line_no, "vertex count out of range");
            if (ne < 0 || ne > 100000000) parse_fail(reader.line_no, "edge count out of range");
            RawBlock& b = blocks[id];
            b.declared = true;
            try {
                b.kind = block_kind_from_string(kind_word);
            } catch (const Error& err) {
                parse_fail(reader.line_no, err.what());
            }
            b.nv = nv;
            b.ne = ne;
            b.vertex_ids.assign(nv, -1);
            b.vertex_seen.assign(nv, false);
            b.endpoints.assign(ne, {-1, -1});
            b.real_edge_ids.assign(ne, -1);
            b.edge_seen.assign(ne, false);
        } else if (tag == "bv") {
            long long id = parse_int(ss, reader.line_no, "block id");
            long long local = parse_int(ss, reader.line_no, "local vertex");
            long long orig = parse_int(ss, reader.line_no, "parent vertex");
            expect_end(ss, reader.line_no);
            RawBlock& b = block_at(id, reader.line_no);
            if (local < 0 || local >= b.nv) parse_fail(reader.line_no, "local vertex out of range");
            if (orig < 0) parse_fail(reader.line_no, "negative parent vertex");
            if (b.vertex_seen[local])
                parse_fail(reader.line_no, "duplicate vertex " + std::to_string(local));
            b.vertex_seen[local] = true;
            b.vertex_ids[local] = static_cast<Vertex>(orig);
        } else if (tag == "be") {
            long long id = parse_int(ss, reader.line_no, "block id");
            long long eid = parse_int(ss, reader.line_no, "edge id");
            long long u = parse_int(ss, reader.line_no, "endpoint");
            long long v = parse_int(ss, reader.line_no, "endpoint");
            long long real = parse_int(ss, reader.line_no, "parent edge id");
            expect_end(ss, reader.line_no);
            RawBlock& b = block_at(id, reader.line_no);
            if (eid < 0 || eid >= b.ne) parse_fail(reader.line_no, "edge id out of range");
            if (u < 0 || u >= b.nv || v < 0 || v >= b.nv)
                parse_fail(reader.line_no, "endpoint out of range");
            if (real < -1) parse_fail(reader.line_no, "bad parent edge id");
            if (b.edge_seen[eid])
                parse_fail(reader.line_no, "duplicate edge " + std::to_string(eid));
            b.edge_seen[eid] = true;
            b.endpoints[eid] = {static_cast<Vertex>(u), static_cast<Vertex>(v)};
            b.real_edge_ids[eid] = static_cast<Edge>(real);
        } else if (tag == "tlink") {
            TreeLink l;
            l.block_a = static_cast<int>(parse_int(ss, reader.line_no, "block id"));
            l.block_b = static_cast<int>(parse_int(ss, reader.line_no, "block id"));
            l.edge_a = static_cast<Edge>(parse_int(ss, reader.line_no, "edge id"));
            l.tail_a = static_cast<Vertex>(parse_int(ss, reader.line_no, "tail"));
            l.head_a = static_cast<Vertex>(parse_int(ss, reader.line_no, "head"));
            l.edge_b = static_cast<Edge>(parse_int(ss, reader.line_no, "edge id"));
            l.tail_b = static_cast<Vertex>(parse_int(ss, reader.line_no, "tail"));
            l.head_b = static_cast<Vertex>(parse_int(ss, reader.line_no, "head"));
            expect_end(ss, reader.line_no);
            links.push_back(l);
        } else {
            parse_fail(reader.line_no, "unknown tag '" + tag + "'");
        }
    }

    ThreeBlockTree tree;
    for (long long id = 0; id < nb; ++id) {
        const RawBlock& b = blocks[id];
        if (!b.declared) fail(ErrorCode::parse, "block " + std::to_string(id) + " never declared");
        for (long long v = 0; v < b.nv; ++v)
            if (!b.vertex_seen[v])
                fail(ErrorCode::parse, "block " + std::to_string(id) + ": missing vertex " +
                                           std::to_string(v));
        for (long long e = 0; e < b.ne; ++e)
            if (!b.edge_seen[e])
                fail(ErrorCode::parse,
                     "block " + std::to_string(id) + ": missing edge " + std::to_string(e));
        BlockNode node;
        node.kind = b.kind;
        node.vertex_ids = b.vertex_ids;
        node.real_edge_ids = b.real_edge_ids;
        try {
            node.graph = MultiGraph(static_cast<int>(b.nv), b.endpoints);
        } catch (const Error& err) {
            fail(ErrorCode::parse,
                 "block " + std::to_string(id) + ": " + std::string(err.what()));
        }
        tree.blocks.push_back(std::move(node));
    }
    if (static_cast<long long>(links.size()) != nl)
        fail(ErrorCode::parse, "expected " + std::to_string(nl) + " links, found " +
                                   std::to_string(links.size()));
    tree.links = std::move(links);
    try {
        validate(tree);
    } catch (const Error& err) {
        fail(ErrorCode::parse, std::string("invalid 3-block tree: ") + err.what());
    }
    return tree;
}

ThreeBlockTree read_blocktree_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, "cannot open " + path);
    return read_blocktree(in);
}

void write_blocktree(std::ostream& out, const ThreeBlockTree& tree) {
    out << "blocktree " << tree.blocks.size() << " " << tree.links.size() << "\n";
    for (size_t i = 0; i < tree.blocks.size(); ++i) {
        const BlockNode& b = tree.blocks[i];
        out << "block " << i << " " << to_string(b.kind) << " " << b.graph.num_vertices()
            << " " << b.graph.num_edges() << "\n";
        for (Vertex v = 0; v < b.graph.num_vertices(); ++v)
            out << "bv " << i << " " << v << " " << b.vertex_ids[v] << "\n";
        for (Edge e = 0; e < b.graph.num_edges(); ++e) {
            auto [u, v] = b.graph.endpoints(e);
            out << "be " << i << " " << e << " " << u << " " << v << " " << b.real_edge_ids[e]
                << "\n";
        }
    }
    for (const TreeLink& l : tree.links)
        out << "tlink " << l.block_a << " " << l.block_b << " " << l.edge_a << " " << l.tail_a
            << " " << l.head_a << " " << l.edge_b << " " << l.tail_b << " " << l.head_b << "\n";
}

void write_blocktree_file(const std::string& path, const ThreeBlockTree& tree) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::io, "cannot open " + path + " for writing");
    write_blocktree(out, tree);
    out.flush();
    require(out.good(), ErrorCode::io, "write failed for " + path);
}

} // namespace upg
