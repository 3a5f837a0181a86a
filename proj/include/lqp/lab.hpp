#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lqp/problems.hpp"
#include "lqp/protocol.hpp"
#include "lqp/ring.hpp"

namespace lqp {

// Lower-bound formulas, named after the setting they bound.
enum class Bound {
    Gf2KRound,         // k (n^{1/k} - 1), odd-weight promise over Z2
    ModqKRound,        // k (n^{1/k} - 1) / (3.67 q^{1+1/k} ln^2 q)
    IntTwoRound,       // 0.19 sqrt(n / (log n log^2 M)) - 2, with c_0 = 1
    Gf2Elemx,          // n - 1, no promise
    ModqElemx,         // n / (2 q ln q), no promise, q >= 3
    IntOneRound,       // n / log M - 1
    IntQuarterOneRound // 0.14 n / log M
};

struct BoundParams {
    std::uint64_t n = 0;
    std::uint64_t k = 1;
    std::int64_t q = 2;
    std::uint64_t m_bound = 2;
};

struct BoundValue {
    double value = 0;
    // The formula carries an unpinned or loose constant; the value is
    // reported but never asserted tight.
    bool advisory = false;
    std::string note;
};

// Throws PreconditionError outside the formula's hypotheses. Logarithms of
// M and n are base 2.
BoundValue lb_value(Bound b, const BoundParams& p);
// "gf2-kround", "modq-kround", "int-2round", "gf2-elemx", "modq-elemx",
// "int-1round", "int-quarter".
Bound parse_bound(std::string_view name);
std::string bound_name(Bound b);

struct OracleOptions {
    std::uint64_t budget = 6;
    unsigned threads = 1;
    // Refuse n above this (the state space is 2^(2^n)).
    std::size_t max_n = 5;
};

struct OracleResult {
    // Minimum worst-case cost over k-round protocols, or nullopt when it
    // exceeds the budget.
    std::optional<std::uint64_t> cost;
    std::uint64_t states = 0;  // memoized (input set, rounds) pairs
};

// Exact minimum cost of a k-round protocol for p over GF2 or Zq (q prime,
// q <= 3). Searches over row spaces, not matrices, and identifies input
// sets up to coordinate permutation.
OracleResult brute_force_min_cost(const SearchProblem& p, const Ring& ring, std::size_t k,
                                  const OracleOptions& opt = {});

// A 1-round ElemX protocol querying A: every attainable nonzero-input
// measurement gets the smallest index set in all inputs producing it.
// Throws PreconditionError if some measurement has no such index.
ProtocolTree one_round_protocol(const QueryMatrix& a);

// Peels z out of y = [A; 1^T] z using a validated 1-round ElemX protocol
// with root matrix A. The last entry of y is |z| as an exact integer.
BitVec decode_full_input(const ProtocolTree& pi, const Measurement& y);
// [A; 1^T] z with the weight entry kept exact.
Measurement full_measurement(const ProtocolTree& pi, const BitVec& z);

struct KwResult {
    std::size_t index = 0;  // 1-based, x_i != y_i
    std::size_t bits = 0;
    std::size_t rounds = 0;
};

// Alice holds even-weight x, Bob odd-weight y; they walk pi on x + y,
// alternately sending their own measurements.
KwResult kw_simulate(const ProtocolTree& pi, const BitVec& x, const BitVec& y);

// max(ln n / C, k (n^{1/k} / D - 1)) >= k (n^{1/k} - 1) / (D (1 + C)).
// Requires 2C <= D, D >= 1, n > 1, k >= 1.
bool check_tradeoff_inequality(double c, double d, double n, double k);

struct TradeoffRow {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    std::uint64_t upper = 0;
    double lower = 0;
    double ratio = 0;
};

// Upper: cost of the interval-splitting protocol. Lower: the k-round bound
// for the ring (GF2 or Zq).
std::vector<TradeoffRow> tradeoff_table(const std::vector<std::uint64_t>& ns, const std::vector<std::uint64_t>& ks,
                                        const Ring& ring);
std::string tradeoff_csv(const std::vector<TradeoffRow>& rows);

}  // namespace lqp
