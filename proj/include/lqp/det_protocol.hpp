#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "lqp/bitvec.hpp"
#include "lqp/protocol.hpp"
#include "lqp/ring.hpp"

namespace lqp {

inline constexpr std::size_t kDefaultMaxNodes = std::size_t{1} << 22;

// d = ceil(n^(1/k)) - 1 repeated, cut at the first prefix whose nested
// ceiling divisions reach 1. Empty for n = 1.
std::vector<std::uint64_t> division_sequence(std::uint64_t n, std::uint64_t k);
// ceil(...ceil(ceil(n/(d1+1))/(d2+1))/...) == 1
bool is_division_sequence(std::uint64_t n, const std::vector<std::uint64_t>& ds);

// One round of interval splitting: [u, v] (1-based, inclusive) cut into
// consecutive chunks of size ceil(len/(d+1)). Only nonempty chunks are
// kept; all but the last one are queried.
std::vector<std::pair<std::size_t, std::size_t>> split_interval(std::size_t u, std::size_t v, std::uint64_t d);

// Node count of the tree build_det_protocol would produce (saturating).
std::uint64_t det_node_count(std::size_t n, std::size_t k, const Ring& ring);

// Worst-case path cost of the interval-splitting protocol, computed on the
// interval plan without building the tree. Equals cost_structural of the
// built tree.
std::uint64_t det_plan_cost(std::size_t n, std::size_t k);

// The interval-splitting protocol as an explicit k-round tree. Throws
// CapExceeded if it would have more than max_nodes nodes.
ProtocolTree build_det_protocol(std::size_t n, std::size_t k, const Ring& ring,
                                std::size_t max_nodes = kDefaultMaxNodes);

struct DetRun {
    // The interval [u, v] held at the start of each round, then the final one.
    std::vector<std::pair<std::size_t, std::size_t>> intervals;
    std::size_t output = 0;
    std::size_t cost = 0;
};

// Runs the interval-splitting algorithm directly on z without a tree.
DetRun det_run(std::size_t n, std::size_t k, const Ring& ring, const BitVec& z);

}  // namespace lqp
