#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lqp/bitvec.hpp"
#include "lqp/ring.hpp"

namespace lqp {

using IndexSet = std::vector<std::size_t>;  // 0-based, ascending

// Pairwise disjoint sets S_1..S_m with A s_i = common for every i.
struct UniformFamily {
    std::size_t n = 0;
    Ring ring = Ring::gf2();
    std::vector<IndexSet> sets;
    Measurement common;
    // (q, rho): |S_i| = rho mod q for every i.
    std::optional<std::pair<std::int64_t, std::int64_t>> size_residue;

    // Construction trace. gf2: the maximal independent blocks T_i; modq:
    // the zero-sum-free buckets D_i; int: unused.
    std::vector<IndexSet> blocks;
    // Position (0-based) of the pivot column: k for gf2, t for modq.
    std::optional<std::size_t> pivot;
    // int only: weight of the enumerated vectors, size of the chosen
    // bucket, and the stripped sunflower core.
    std::size_t weight = 0;
    std::size_t bucket_size = 0;
    IndexSet core;
    bool sunflower_exact = true;

    std::size_t m() const { return sets.size(); }
};

// Throws PreconditionError unless the sets are nonempty, in range, pairwise
// disjoint, satisfy A s_i = common and the declared size residue.
void check_family(const QueryMatrix& a, const UniformFamily& fam);

UniformFamily uniform_family_gf2(const QueryMatrix& a);

// Throws TooSmall when the greedy bucketing yields fewer than 2 buckets.
UniformFamily uniform_family_modq(const QueryMatrix& a);

struct IntFamilyOptions {
    // Cap on C(n, t), the number of enumerated weight-t vectors.
    double enumeration_cap = 2e6;
    // Exact sunflower search is attempted for buckets up to this size.
    std::size_t exact_sunflower_cap = 4096;
    std::uint64_t search_budget = 2'000'000;
};

// ceil(d log2 M), the weight used in the sunflower construction.
std::size_t default_int_weight(std::size_t d, std::uint64_t m_bound);

// Throws PreconditionError if A is not M-bounded, CapExceeded if C(n,t) is
// above the enumeration cap.
UniformFamily uniform_family_int(const QueryMatrix& a, std::uint64_t m_bound, std::size_t t,
                                 const IntFamilyOptions& opt = {});

struct Sunflower {
    IndexSet core;
    std::vector<std::size_t> members;  // positions in the input family
};

struct SunflowerSearch {
    std::optional<Sunflower> best;
    bool exact = true;
};

// Largest sunflower among equal-size sets. Exact (over every candidate core
// with branch-and-bound petal packing) unless the node budget runs out, in
// which case the result is the best found and exact is false.
SunflowerSearch largest_sunflower(const std::vector<IndexSet>& family, std::uint64_t budget = 2'000'000);

// A p-sunflower, or nullopt if none exists. Throws SearchBudgetExceeded
// when the budget runs out before either is established.
std::optional<Sunflower> find_sunflower(const std::vector<IndexSet>& family, std::size_t p,
                                        std::uint64_t budget = 2'000'000);

// The n x m 0/1 matrix whose columns are the family's indicator vectors.
class LiftingMatrix {
public:
    LiftingMatrix(std::size_t n, std::vector<IndexSet> sets);
    explicit LiftingMatrix(const UniformFamily& fam) : LiftingMatrix(fam.n, fam.sets) {}

    std::size_t n() const { return n_; }
    std::size_t m() const { return sets_.size(); }
    const std::vector<IndexSet>& sets() const { return sets_; }
    bool at(std::size_t row, std::size_t col) const;
    std::vector<std::vector<std::int64_t>> to_rows() const;

    // L w: the indicator of the union of S_i over i in W.
    BitVec lift(const BitVec& w) const;
    // A L, reduced in the ring of A (bounded integers get the bound
    // B * max |S_i| so that every product entry is legal).
    QueryMatrix right_multiply(const QueryMatrix& a) const;
    Ring product_ring(const Ring& ring) const;
    // The i (0-based) with j in S_i, if any.
    std::optional<std::size_t> owner(std::size_t j) const;

private:
    std::size_t n_;
    std::vector<IndexSet> sets_;
    std::vector<std::size_t> owner_;  // m() where none
};

LiftingMatrix lifting_matrix(const UniformFamily& fam);

}  // namespace lqp
