#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lqp/families.hpp"
#include "lqp/problems.hpp"
#include "lqp/protocol.hpp"

namespace lqp {

// Node map from a tree onto another; phi[v] is the image of node v.
using Homomorphism = std::vector<NodeId>;

// Replaces every node matrix A_v by A_v L and relabels leaves: output o
// becomes i when o lies in S_i, and 1 otherwise. Edge labels are kept
// verbatim; integer edges whose label A_v L can no longer produce are
// dropped with their subtrees. `phi`, if given, receives lifted -> pi.
ProtocolTree lift_protocol(const ProtocolTree& pi, const UniformFamily& fam);
ProtocolTree lift_protocol(const ProtocolTree& pi, const UniformFamily& fam, Homomorphism* phi);

struct Shadow {
    ProtocolTree tree;
    Homomorphism phi;  // onto the tree that was shadowed
};

// The subtree under the root edge labelled r, with one round fewer.
// Throws NoSuchEdge when r is not an edge out of the root.
Shadow shadow(const ProtocolTree& lifted, const Measurement& r);

// Child-preserving, leaf to leaf, injective, cost-preserving, and the root
// of upsilon lands on a child of pi's root. On failure `reason` (if given)
// names the first violated clause.
bool verify_shadowing(const ProtocolTree& upsilon, const ProtocolTree& pi, const Homomorphism& phi,
                      std::string* reason = nullptr);

struct EliminationCase {
    enum class Kind { GF2, ModQ, Int };
    Kind kind = Kind::GF2;
    std::int64_t q = 2;
    std::int64_t h = 1;
    // Int only. m_bound 0 means "use m_bound(pi)"; weight unset means the
    // default weight clamped to the enumeration cap.
    std::uint64_t m_bound = 0;
    std::optional<std::size_t> weight;
    IntFamilyOptions int_options;

    static EliminationCase gf2() { return {}; }
    static EliminationCase modq(std::int64_t q, std::int64_t h) {
        EliminationCase c;
        c.kind = Kind::ModQ;
        c.q = q;
        c.h = h;
        return c;
    }
    static EliminationCase integer(std::uint64_t m_bound = 0, std::optional<std::size_t> weight = std::nullopt) {
        EliminationCase c;
        c.kind = Kind::Int;
        c.m_bound = m_bound;
        c.weight = weight;
        return c;
    }
    // "gf2", "modq:Q:H" or "int:M" (M may be omitted as "int").
    static EliminationCase parse(const std::string& text);
};

struct Elimination {
    ProtocolTree upsilon;
    std::size_t m = 0;
    SearchProblem new_problem;
    UniformFamily fam;      // trimmed to the sets actually used
    Measurement r;          // root edge followed in the lifted tree
    Homomorphism phi;       // upsilon -> pi
    std::size_t family_size = 0;  // m' before trimming (int) or m
    std::optional<std::uint64_t> prime;
    std::vector<std::string> notes;
};

// One round of elimination. Throws TooSmall when the family, the prime
// window or the new problem's promise set is empty at this size, and
// NoSuchEdge when the lifted root lacks the expected edge although promise
// inputs exist.
Elimination eliminate_round(const ProtocolTree& pi, const EliminationCase& c);

// Largest prime p with m'/8 < p <= m'/4, by trial division.
std::optional<std::uint64_t> quarter_prime(std::uint64_t m_prime);

// Two-round integer protocol for ElemX: the root queries `probe`; every
// attainable measurement leads to a node that reads z_1..z_{n-1} directly
// and answers the first set index, or n if none is set.
ProtocolTree probe_then_read(const QueryMatrix& probe, unsigned cap = 16);

}  // namespace lqp
