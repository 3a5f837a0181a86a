#include "lqp/protocol.hpp"

#include <algorithm>
#include <sstream>

#include "lqp/errors.hpp"
#include "parallel.hpp"

namespace lqp {

std::optional<NodeId> Internal::child(const Measurement& m) const {
    auto it = std::lower_bound(children.begin(), children.end(), m,
                               [](const auto& e, const Measurement& key) { return e.first < key; });
    if (it == children.end() || it->first != m) return std::nullopt;
    return it->second;
}

ProtocolTree ProtocolTree::leaf_only(Ring ring, std::size_t n, std::size_t output, std::size_t rounds) {
    ProtocolTree t(ring, n, rounds);
    t.set_root(t.add_leaf(output));
    t.check();
    return t;
}

NodeId ProtocolTree::add_leaf(std::size_t output) {
    nodes_.emplace_back(Leaf{output});
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId ProtocolTree::add_internal(QueryMatrix matrix) {
    nodes_.emplace_back(Internal{std::move(matrix), {}});
    return static_cast<NodeId>(nodes_.size() - 1);
}

void ProtocolTree::add_child(NodeId parent, Measurement key, NodeId child) {
    auto* in = std::get_if<Internal>(&nodes_.at(parent));
    if (!in) throw PreconditionError("cannot add a child to a leaf");
    if (!in->children.empty() && !(in->children.back().first < key))
        throw PreconditionError("edge labels must be added in strictly increasing order at node " +
                                std::to_string(parent));
    in->children.emplace_back(std::move(key), child);
}

std::size_t ProtocolTree::node_cost(NodeId id) const {
    if (const auto* in = std::get_if<Internal>(&nodes_.at(id))) return in->matrix.rows();
    return 0;
}

std::size_t ProtocolTree::depth() const {
    if (nodes_.empty()) return 0;
    std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        if (const auto* in = std::get_if<Internal>(&nodes_[id])) {
            for (const auto& [key, c] : in->children) stack.emplace_back(c, d + 1);
        } else {
            best = std::max(best, d);
        }
    }
    return best;
}

std::uint64_t row_value_count(const Ring& ring, std::span<const std::int64_t> row) {
    if (ring.is_modular()) return static_cast<std::uint64_t>(ring.modulus());
    std::uint64_t pos = 0, neg = 0;
    for (auto a : row) {
        if (a > 0) pos += static_cast<std::uint64_t>(a);
        if (a < 0) neg += static_cast<std::uint64_t>(-a);
    }
    return pos + neg + 1;
}

namespace {

bool key_value_legal(const Ring& ring, std::span<const std::int64_t> row, std::int64_t v) {
    if (ring.is_modular()) return v >= 0 && v < ring.modulus();
    std::int64_t lo = 0, hi = 0;
    for (auto a : row) (a > 0 ? hi : lo) += a;
    return v >= lo && v <= hi;
}

}  // namespace

void ProtocolTree::check() const {
    auto fail = [](const std::string& msg) { throw PreconditionError("malformed protocol: " + msg); };
    if (n_ == 0) fail("input dimension n must be >= 1");
    if (nodes_.empty()) fail("no nodes");
    if (root_ >= nodes_.size()) fail("root id out of range");
    std::vector<std::uint32_t> parents(nodes_.size(), 0);
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (const auto* in = std::get_if<Internal>(&nodes_[id])) {
            const auto& a = in->matrix;
            if (a.cols() != n_)
                fail("node " + std::to_string(id) + " matrix has " + std::to_string(a.cols()) + " columns, expected " +
                     std::to_string(n_));
            if (!(a.ring() == ring_)) fail("node " + std::to_string(id) + " matrix ring differs from protocol ring");
            if (in->children.empty()) fail("internal node " + std::to_string(id) + " has no children");
            for (std::size_t e = 0; e < in->children.size(); ++e) {
                const auto& [key, c] = in->children[e];
                if (key.size() != a.rows())
                    fail("edge label '" + measurement_key(key) + "' at node " + std::to_string(id) + " has length " +
                         std::to_string(key.size()) + ", expected " + std::to_string(a.rows()));
                for (std::size_t i = 0; i < key.size(); ++i)
                    if (!key_value_legal(ring_, a.row(i), key[i]))
                        fail("edge label '" + measurement_key(key) + "' at node " + std::to_string(id) +
                             " is not an attainable measurement");
                if (e > 0 && !(in->children[e - 1].first < key))
                    fail("edge labels at node " + std::to_string(id) + " are not distinct and sorted");
                if (c >= nodes_.size()) fail("child id out of range at node " + std::to_string(id));
                if (c == root_) fail("root has a parent");
                if (++parents[c] > 1) fail("node " + std::to_string(c) + " has more than one parent");
            }
        } else {
            const auto out = std::get<Leaf>(nodes_[id]).output;
            if (out < 1 || out > n_)
                fail("leaf " + std::to_string(id) + " output " + std::to_string(out) + " outside [1," +
                     std::to_string(n_) + "]");
        }
    }
    // Reachability from the root plus single parents makes it a tree.
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeId> stack{root_};
    std::size_t count = 0;
    while (!stack.empty()) {
        const auto id = stack.back();
        stack.pop_back();
        if (seen[id]) fail("cycle through node " + std::to_string(id));
        seen[id] = true;
        ++count;
        if (const auto* in = std::get_if<Internal>(&nodes_[id]))
            for (const auto& [key, c] : in->children) stack.push_back(c);
    }
    if (count != nodes_.size()) fail("some nodes are unreachable from the root");
    if (depth() > rounds_)
        fail("depth " + std::to_string(depth()) + " exceeds declared round count " + std::to_string(rounds_));
}

namespace {

[[noreturn]] void throw_missing(NodeId id, const Measurement& m) {
    throw MissingEdge("no edge for measurement (" + measurement_key(m) + ") at node " + std::to_string(id));
}

}  // namespace

Transcript execute(const ProtocolTree& pi, const BitVec& z) {
    if (z.size() != pi.n())
        throw DimensionMismatch("input has length " + std::to_string(z.size()) + ", protocol expects " +
                                std::to_string(pi.n()));
    Transcript t;
    NodeId id = pi.root();
    while (!pi.is_leaf(id)) {
        const auto& in = pi.internal(id);
        auto m = in.matrix.apply(z);
        auto next = in.child(m);
        if (!next) throw_missing(id, m);
        t.path.push_back({id, std::move(m)});
        id = *next;
    }
    t.leaf = id;
    t.output = std::get<Leaf>(pi.node(id)).output;
    return t;
}

std::size_t execute_output(const ProtocolTree& pi, const BitVec& z, Measurement& scratch) {
    NodeId id = pi.root();
    while (!pi.is_leaf(id)) {
        const auto& in = pi.internal(id);
        in.matrix.apply(z, scratch);
        auto next = in.child(scratch);
        if (!next) throw_missing(id, scratch);
        id = *next;
    }
    return std::get<Leaf>(pi.node(id)).output;
}

std::size_t cost_on(const ProtocolTree& pi, const BitVec& z) {
    Measurement scratch;
    std::size_t cost = 0;
    NodeId id = pi.root();
    while (!pi.is_leaf(id)) {
        const auto& in = pi.internal(id);
        cost += in.matrix.rows();
        in.matrix.apply(z, scratch);
        auto next = in.child(scratch);
        if (!next) throw_missing(id, scratch);
        id = *next;
    }
    return cost;
}

namespace {

std::size_t structural_from(const ProtocolTree& pi, NodeId id) {
    if (pi.is_leaf(id)) return 0;
    const auto& in = pi.internal(id);
    std::size_t best = 0;
    for (const auto& [key, c] : in.children) best = std::max(best, structural_from(pi, c));
    return in.matrix.rows() + best;
}

std::uint64_t input_count(const SearchProblem& p, unsigned cap) {
    if (p.n() > cap || p.n() > 63)
        throw CapExceeded("exhaustive run over 2^" + std::to_string(p.n()) + " inputs exceeds cap n <= " +
                          std::to_string(cap));
    return std::uint64_t{1} << p.n();
}

}  // namespace

std::size_t cost_structural(const ProtocolTree& pi) { return structural_from(pi, pi.root()); }

std::size_t cost_exact(const ProtocolTree& pi, const SearchProblem& p, unsigned cap, unsigned threads) {
    if (p.n() != pi.n()) throw DimensionMismatch("problem and protocol dimensions differ");
    const auto total = input_count(p, cap);
    std::vector<std::size_t> best(std::max(1U, threads), 0);
    detail::for_chunks(total, threads, [&](unsigned t, std::uint64_t b, std::uint64_t e) {
        for (auto r = b; r < e; ++r) {
            const auto z = BitVec::from_lex_rank(p.n(), r);
            if (!p.promise(z)) continue;
            best[t] = std::max(best[t], cost_on(pi, z));
        }
    });
    return *std::max_element(best.begin(), best.end());
}

ValidationReport validate(const ProtocolTree& pi, const SearchProblem& p, unsigned cap, unsigned threads) {
    if (p.n() != pi.n()) throw DimensionMismatch("problem and protocol dimensions differ");
    const auto total = input_count(p, cap);
    const unsigned slots = std::max(1U, threads);
    std::vector<ValidationReport> parts(slots);
    detail::for_chunks(total, threads, [&](unsigned t, std::uint64_t b, std::uint64_t e) {
        auto& rep = parts[t];
        Measurement scratch;
        for (auto r = b; r < e; ++r) {
            const auto z = BitVec::from_lex_rank(p.n(), r);
            if (!p.promise(z)) continue;
            ++rep.inputs_checked;
            try {
                const auto out = execute_output(pi, z, scratch);
                if (!p.valid(z, out)) {
                    rep.ok = false;
                    rep.counterexample = z;
                    rep.reason = "output " + std::to_string(out) + " is not valid for input " + z.to_string();
                    return;
                }
            } catch (const MissingEdge& ex) {
                rep.ok = false;
                rep.counterexample = z;
                rep.reason = std::string(ex.what()) + " on input " + z.to_string();
                return;
            }
        }
    });
    ValidationReport out;
    for (auto& rep : parts) {
        out.inputs_checked += rep.inputs_checked;
        if (out.ok && !rep.ok) {
            out.ok = false;
            out.counterexample = rep.counterexample;
            out.reason = rep.reason;
        }
    }
    return out;
}

std::uint64_t m_bound(const ProtocolTree& pi) {
    if (pi.ring().is_modular()) return static_cast<std::uint64_t>(pi.ring().modulus());
    std::uint64_t best = 1;
    for (NodeId id = 0; id < pi.size(); ++id) {
        if (pi.is_leaf(id)) continue;
        const auto& a = pi.internal(id).matrix;
        for (std::size_t i = 0; i < a.rows(); ++i) best = std::max(best, row_value_count(pi.ring(), a.row(i)));
    }
    return best;
}

namespace {

bool equal_from(const ProtocolTree& a, NodeId x, const ProtocolTree& b, NodeId y) {
    if (a.is_leaf(x) != b.is_leaf(y)) return false;
    if (a.is_leaf(x)) return std::get<Leaf>(a.node(x)).output == std::get<Leaf>(b.node(y)).output;
    const auto& ia = a.internal(x);
    const auto& ib = b.internal(y);
    if (!(ia.matrix == ib.matrix) || ia.children.size() != ib.children.size()) return false;
    for (std::size_t e = 0; e < ia.children.size(); ++e) {
        if (ia.children[e].first != ib.children[e].first) return false;
        if (!equal_from(a, ia.children[e].second, b, ib.children[e].second)) return false;
    }
    return true;
}

void copy_from(const ProtocolTree& src, NodeId id, ProtocolTree& dst, std::vector<NodeId>& map, NodeId& out_id) {
    if (src.is_leaf(id)) {
        out_id = dst.add_leaf(std::get<Leaf>(src.node(id)).output);
        map.push_back(id);
        return;
    }
    const auto& in = src.internal(id);
    out_id = dst.add_internal(in.matrix);
    map.push_back(id);
    for (const auto& [key, c] : in.children) {
        NodeId child_id = 0;
        copy_from(src, c, dst, map, child_id);
        dst.add_child(out_id, key, child_id);
    }
}

}  // namespace

bool structurally_equal(const ProtocolTree& a, const ProtocolTree& b) {
    return a.ring() == b.ring() && a.n() == b.n() && a.rounds() == b.rounds() &&
           equal_from(a, a.root(), b, b.root());
}

std::pair<ProtocolTree, std::vector<NodeId>> extract_subtree(const ProtocolTree& pi, NodeId at, std::size_t rounds) {
    ProtocolTree out(pi.ring(), pi.n(), rounds);
    std::vector<NodeId> map;
    NodeId root = 0;
    copy_from(pi, at, out, map, root);
    out.set_root(root);
    out.check();
    return {std::move(out), std::move(map)};
}

}  // namespace lqp
