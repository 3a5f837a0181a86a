#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lqp/bitvec.hpp"

namespace lqp {

// Incremental Gaussian elimination over GF(2). Vectors are inserted one at
// a time; each stored row remembers which inserted vectors it combines, so
// span membership queries also return a witness subset.
class Gf2Eliminator {
public:
    explicit Gf2Eliminator(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t rank() const { return rows_.size(); }

    // Inserts v if it is independent of the current span. Returns whether it
    // was inserted; accepted vectors are numbered 0, 1, ... in insertion order.
    bool insert(const BitVec& v);
    bool in_span(const BitVec& v) const;
    // Accepted-vector ids whose sum is v, or nullopt if v is outside the span.
    std::optional<std::vector<std::size_t>> express(const BitVec& v) const;

private:
    struct Row {
        std::size_t pivot;
        BitVec vec;
        BitVec combo;  // over accepted ids, capacity dim_
    };
    // Reduces v in place; combo accumulates the rows used.
    void reduce(BitVec& v, BitVec& combo) const;

    std::size_t dim_;
    std::vector<Row> rows_;  // pivots distinct; each row has zeros at earlier rows' pivots
};

// Subset of basis_cols (0-based positions) whose GF(2) sum is target, or
// nullopt if target is outside their span. Dependent columns are skipped in
// favour of earlier ones, so the answer is deterministic and unique when the
// columns are independent.
std::optional<std::vector<std::size_t>> gf2_express_in_span(const std::vector<BitVec>& basis_cols,
                                                            const BitVec& target);

}  // namespace lqp
