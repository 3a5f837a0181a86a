#include "lqp/codec.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "lqp/errors.hpp"

namespace lqp {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

std::string ring_json(const Ring& ring) {
    ordered_json j;
    switch (ring.kind()) {
    case RingKind::GF2: j["kind"] = "gf2"; break;
    case RingKind::ModQ:
        j["kind"] = "modq";
        j["q"] = ring.modulus();
        break;
    case RingKind::BoundedInt:
        j["kind"] = "int";
        j["B"] = ring.bound();
        break;
    }
    return j.dump();
}

namespace {

void emit_node(const ProtocolTree& pi, NodeId id, std::vector<std::string>& lines, std::size_t& next) {
    const auto self = next++;
    const auto slot = lines.size();
    lines.emplace_back();
    ordered_json j;
    if (pi.is_leaf(id)) {
        j["output"] = std::get<Leaf>(pi.node(id)).output;
    } else {
        const auto& in = pi.internal(id);
        j["matrix"] = in.matrix.to_rows();
        j["children"] = ordered_json::object();
        for (const auto& [key, c] : in.children) {
            j["children"][measurement_key(key)] = next;
            emit_node(pi, c, lines, next);
        }
    }
    lines[slot] = "    \"" + std::to_string(self) + "\": " + j.dump();
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

[[noreturn]] void fail_at(const std::string& path, const std::string& msg) {
    throw ParseError("protocol file: " + path + ": " + msg);
}

const json& field(const json& obj, const char* name, const std::string& path) {
    if (!obj.is_object()) fail_at(path, "expected an object");
    auto it = obj.find(name);
    if (it == obj.end()) fail_at(path, std::string("missing field '") + name + "'");
    return *it;
}

std::int64_t as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail_at(path, "expected an integer");
    return v.get<std::int64_t>();
}

std::size_t as_count(const json& v, const std::string& path) {
    const auto x = as_int(v, path);
    if (x < 0) fail_at(path, "expected a non-negative integer");
    return static_cast<std::size_t>(x);
}

Ring parse_ring(const json& j) {
    const auto& kind = field(j, "kind", "ring");
    if (!kind.is_string()) fail_at("ring.kind", "expected a string");
    const auto k = kind.get<std::string>();
    try {
        if (k == "gf2") return Ring::gf2();
        if (k == "modq") return Ring::mod_q(as_int(field(j, "q", "ring"), "ring.q"));
        if (k == "int") return Ring::bounded_int(as_int(field(j, "B", "ring"), "ring.B"));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail_at("ring", e.what());
    }
    fail_at("ring.kind", "unknown ring kind '" + k + "'");
}

struct RawNode {
    const json* body = nullptr;
    std::string path;
};

class Builder {
public:
    Builder(const std::unordered_map<std::string, RawNode>& raw, ProtocolTree& out) : raw_(raw), out_(out) {}

    NodeId build(const std::string& id, std::size_t depth = 0) {
        if (depth > 4096) fail_at("nodes." + id, "tree is deeper than 4096 levels");
        auto it = raw_.find(id);
        if (it == raw_.end()) fail_at("nodes", "reference to undefined node '" + id + "'");
        if (!visited_.insert(id).second) fail_at("nodes." + id, "node is referenced more than once");
        const auto& body = *it->second.body;
        const auto& path = it->second.path;
        if (!body.is_object()) fail_at(path, "expected an object");
        if (body.contains("output")) {
            if (body.contains("matrix") || body.contains("children"))
                fail_at(path, "a node is either a leaf or internal, not both");
            return out_.add_leaf(as_count(body["output"], path + ".output"));
        }
        const auto& rows_j = field(body, "matrix", path);
        if (!rows_j.is_array()) fail_at(path + ".matrix", "expected an array of rows");
        std::vector<std::vector<std::int64_t>> rows;
        for (std::size_t i = 0; i < rows_j.size(); ++i) {
            const auto rp = path + ".matrix[" + std::to_string(i) + "]";
            if (!rows_j[i].is_array()) fail_at(rp, "expected an array");
            if (rows_j[i].size() != out_.n())
                fail_at(rp, "row has " + std::to_string(rows_j[i].size()) + " entries, expected n = " +
                                std::to_string(out_.n()));
            std::vector<std::int64_t> row;
            for (std::size_t c = 0; c < rows_j[i].size(); ++c)
                row.push_back(as_int(rows_j[i][c], rp + "[" + std::to_string(c) + "]"));
            rows.push_back(std::move(row));
        }
        QueryMatrix a;
        try {
            a = QueryMatrix::from_rows(out_.ring(), out_.n(), rows);
        } catch (const Error& e) {
            fail_at(path + ".matrix", e.what());
        }
        const auto& ch = field(body, "children", path);
        if (!ch.is_object()) fail_at(path + ".children", "expected an object");
        std::vector<std::pair<Measurement, std::string>> kids;
        for (auto e = ch.begin(); e != ch.end(); ++e) {
            const auto cp = path + ".children[\"" + e.key() + "\"]";
            Measurement key;
            try {
                key = parse_measurement_key(e.key());
            } catch (const Error& ex) {
                fail_at(cp, ex.what());
            }
            if (key.size() != a.rows())
                fail_at(cp, "label has " + std::to_string(key.size()) + " values, matrix has " +
                                std::to_string(a.rows()) + " rows");
            if (measurement_key(key) != e.key()) fail_at(cp, "label is not in canonical form");
            kids.emplace_back(std::move(key), std::to_string(as_count(e.value(), cp)));
        }
        std::sort(kids.begin(), kids.end());
        for (std::size_t i = 1; i < kids.size(); ++i)
            if (kids[i].first == kids[i - 1].first) fail_at(path + ".children", "duplicate edge label");
        const auto self = out_.add_internal(std::move(a));
        for (auto& [key, child] : kids) {
            const auto c = build(child, depth + 1);
            out_.add_child(self, std::move(key), c);
        }
        return self;
    }

    std::size_t visited() const { return visited_.size(); }

private:
    const std::unordered_map<std::string, RawNode>& raw_;
    ProtocolTree& out_;
    std::set<std::string> visited_;
};

}  // namespace

std::string write_protocol(const ProtocolTree& pi) {
    std::vector<std::string> lines;
    std::size_t next = 0;
    emit_node(pi, pi.root(), lines, next);
    std::ostringstream os;
    os << "{\n";
    os << "  \"ring\": " << ring_json(pi.ring()) << ",\n";
    os << "  \"n\": " << pi.n() << ",\n";
    os << "  \"rounds\": " << pi.rounds() << ",\n";
    os << "  \"root\": 0,\n";
    os << "  \"nodes\": {\n";
    for (std::size_t i = 0; i < lines.size(); ++i) os << lines[i] << (i + 1 < lines.size() ? ",\n" : "\n");
    os << "  }\n";
    os << "}\n";
    return os.str();
}

ProtocolTree read_protocol(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string what = e.what();
        if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
        throw ParseError("protocol file: line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         what);
    }
    if (!doc.is_object()) fail_at("$", "expected a top-level object");
    const Ring ring = parse_ring(field(doc, "ring", "$"));
    const auto n = as_count(field(doc, "n", "$"), "n");
    if (n == 0) fail_at("n", "must be at least 1");
    const auto& root_j = field(doc, "root", "$");
    const auto root = std::to_string(as_count(root_j, "root"));
    const auto& nodes = field(doc, "nodes", "$");
    if (!nodes.is_object()) fail_at("nodes", "expected an object");
    std::unordered_map<std::string, RawNode> raw;
    for (auto it = nodes.begin(); it != nodes.end(); ++it) {
        const auto& k = it.key();
        if (k.empty() || !std::all_of(k.begin(), k.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
            (k.size() > 1 && k[0] == '0'))
            fail_at("nodes", "node id '" + k + "' is not a canonical non-negative integer");
        raw[k] = RawNode{&it.value(), "nodes." + k};
    }
    std::size_t rounds = 0;
    bool have_rounds = doc.contains("rounds");
    if (have_rounds) rounds = as_count(doc["rounds"], "rounds");
    ProtocolTree out(ring, n, rounds);
    Builder b(raw, out);
    out.set_root(b.build(root));
    if (b.visited() != raw.size()) fail_at("nodes", "some nodes are unreachable from the root");
    if (!have_rounds) out.set_rounds(out.depth());
    try {
        out.check();
    } catch (const Error& e) {
        throw ParseError(std::string("protocol file: ") + e.what());
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open '" + tmp.string() + "' for writing");
        f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        f.flush();
        if (!f) throw Error("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot rename onto '" + path.string() + "'");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void save_protocol(const std::filesystem::path& path, const ProtocolTree& pi) {
    write_file_atomic(path, write_protocol(pi));
}

ProtocolTree load_protocol(const std::filesystem::path& path) { return read_protocol(read_file(path)); }

}  // namespace lqp
