#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lqp/bitvec.hpp"
#include "lqp/problems.hpp"
#include "lqp/ring.hpp"

namespace lqp {

using NodeId = std::uint32_t;

struct Leaf {
    std::size_t output = 1;  // 1-based index
};

struct Internal {
    QueryMatrix matrix;
    // Sorted by measurement, strictly increasing.
    std::vector<std::pair<Measurement, NodeId>> children;

    std::optional<NodeId> child(const Measurement& m) const;
};

using Node = std::variant<Internal, Leaf>;

// A deterministic k-round linear query protocol: a rooted tree whose
// internal nodes carry query matrices and whose edges are labelled by the
// measurements that select them.
//
// Trees are assembled through add_leaf / add_internal / add_child and then
// frozen by check(), which enforces the structural invariants. Only edges
// hit by inputs are ever required; missing edges surface as MissingEdge at
// execution time.
class ProtocolTree {
public:
    ProtocolTree(Ring ring, std::size_t n, std::size_t rounds) : ring_(ring), n_(n), rounds_(rounds) {}

    // The 0-query protocol that always answers `output`.
    static ProtocolTree leaf_only(Ring ring, std::size_t n, std::size_t output, std::size_t rounds = 0);

    NodeId add_leaf(std::size_t output);
    NodeId add_internal(QueryMatrix matrix);
    // Appends an edge; keys must be added in increasing order.
    void add_child(NodeId parent, Measurement key, NodeId child);
    void set_root(NodeId id) { root_ = id; }
    void set_rounds(std::size_t k) { rounds_ = k; }

    // Throws PreconditionError naming the first violated invariant.
    void check() const;

    const Ring& ring() const { return ring_; }
    std::size_t n() const { return n_; }
    std::size_t rounds() const { return rounds_; }
    NodeId root() const { return root_; }
    std::size_t size() const { return nodes_.size(); }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    bool is_leaf(NodeId id) const { return std::holds_alternative<Leaf>(nodes_.at(id)); }
    const Internal& internal(NodeId id) const { return std::get<Internal>(nodes_.at(id)); }
    // Query count d_v of a node (0 for leaves).
    std::size_t node_cost(NodeId id) const;
    // Number of internal nodes on the longest root-to-leaf path.
    std::size_t depth() const;

private:
    Ring ring_;
    std::size_t n_;
    std::size_t rounds_;
    NodeId root_ = 0;
    std::vector<Node> nodes_;
};

struct TranscriptStep {
    NodeId node;
    Measurement measurement;
};

struct Transcript {
    std::vector<TranscriptStep> path;
    NodeId leaf = 0;
    std::size_t output = 0;
};

// Walks the tree on z. Throws MissingEdge if a measurement has no child.
Transcript execute(const ProtocolTree& pi, const BitVec& z);
// Output only; reuses `scratch` for measurements.
std::size_t execute_output(const ProtocolTree& pi, const BitVec& z, Measurement& scratch);

// Maximum over root-to-leaf paths of the summed node costs.
std::size_t cost_structural(const ProtocolTree& pi);
// Maximum over promise inputs of the summed node costs along the executed path.
std::size_t cost_exact(const ProtocolTree& pi, const SearchProblem& p, unsigned cap = kDefaultEnumerationCap,
                       unsigned threads = 1);
// Summed node costs along the path taken by z.
std::size_t cost_on(const ProtocolTree& pi, const BitVec& z);

struct ValidationReport {
    bool ok = true;
    std::optional<BitVec> counterexample;  // lexicographically least failing input
    std::string reason;
    std::uint64_t inputs_checked = 0;
};

// Runs the protocol on every promise input; the first failure in
// lexicographic order is reported, independent of the thread count.
ValidationReport validate(const ProtocolTree& pi, const SearchProblem& p, unsigned cap = kDefaultEnumerationCap,
                          unsigned threads = 1);

// Largest number of distinct values any single measurement row can take on
// {0,1}^n: sum of positive minus sum of negative coefficients plus one for
// bounded integers (capped by nothing), q for ModQ, 2 for GF2.
std::uint64_t m_bound(const ProtocolTree& pi);
std::uint64_t row_value_count(const Ring& ring, std::span<const std::int64_t> row);

// Same shape, matrices, edge labels and leaf outputs; node ids may differ.
bool structurally_equal(const ProtocolTree& a, const ProtocolTree& b);

// The subtree rooted at `at` as a standalone protocol with `rounds` rounds,
// renumbered in preorder. Also returns new-id -> old-id.
std::pair<ProtocolTree, std::vector<NodeId>> extract_subtree(const ProtocolTree& pi, NodeId at, std::size_t rounds);

}  // namespace lqp
