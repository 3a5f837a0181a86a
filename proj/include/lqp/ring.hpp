#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lqp/bitvec.hpp"

namespace lqp {

enum class RingKind { GF2, ModQ, BoundedInt };

// The coefficient ring of a linear query protocol: Z2, Zq (any q >= 2,
// composite allowed) or integers with coefficients in [-B, B].
class Ring {
public:
    static Ring gf2() { return Ring(RingKind::GF2, 2); }
    static Ring mod_q(std::int64_t q);
    static Ring bounded_int(std::int64_t bound);
    // Accepts "gf2", "modq:Q" and "int:B".
    static Ring parse(std::string_view text);

    RingKind kind() const { return kind_; }
    bool is_modular() const { return kind_ != RingKind::BoundedInt; }
    // 2 for GF2, q for ModQ; 0 for bounded integers.
    std::int64_t modulus() const { return is_modular() ? param_ : 0; }
    // B for bounded integers; 0 otherwise.
    std::int64_t bound() const { return kind_ == RingKind::BoundedInt ? param_ : 0; }
    // |D|: 2, q or 2B+1.
    std::uint64_t domain_size() const;

    std::int64_t reduce(std::int64_t v) const;
    bool is_legal_coefficient(std::int64_t a) const;
    // Ring addition / multiplication; bounded integers throw OverflowError
    // instead of wrapping.
    std::int64_t add(std::int64_t a, std::int64_t b) const;
    std::int64_t mul(std::int64_t a, std::int64_t b) const;
    std::int64_t neg(std::int64_t a) const { return is_modular() ? reduce(-a) : mul(-1, a); }

    std::string to_string() const;

    friend bool operator==(const Ring&, const Ring&) = default;

private:
    Ring(RingKind k, std::int64_t p) : kind_(k), param_(p) {}
    RingKind kind_;
    std::int64_t param_;
};

// A measurement A z: canonical residues for modular rings, exact integers
// otherwise. Ordered lexicographically, which fixes child order in trees.
using Measurement = std::vector<std::int64_t>;

std::string measurement_key(const Measurement& m);

struct MeasurementHash {
    std::size_t operator()(const Measurement& m) const;
};
Measurement parse_measurement_key(std::string_view key);

// Dense d x n matrix over a ring. Immutable once built; rows whose entries
// are all 0/1 are cached as bit masks so that A z is a popcount.
class QueryMatrix {
public:
    QueryMatrix() : ring_(Ring::gf2()) {}
    // Zero matrix.
    QueryMatrix(Ring ring, std::size_t rows, std::size_t cols);
    // Row-major entries; every entry must be a legal coefficient of the ring.
    QueryMatrix(Ring ring, std::size_t rows, std::size_t cols, std::vector<std::int64_t> entries);
    static QueryMatrix from_rows(Ring ring, std::size_t cols,
                                 const std::vector<std::vector<std::int64_t>>& rows);
    static QueryMatrix identity(Ring ring, std::size_t n);

    const Ring& ring() const { return ring_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::int64_t at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    std::span<const std::int64_t> row(std::size_t i) const {
        return {entries_.data() + i * cols_, cols_};
    }
    Measurement column(std::size_t j) const;
    std::vector<std::vector<std::int64_t>> to_rows() const;

    // A z into a caller-provided buffer (resized to rows()).
    void apply(const BitVec& z, Measurement& out) const;
    Measurement apply(const BitVec& z) const {
        Measurement m;
        apply(z, m);
        return m;
    }

    friend bool operator==(const QueryMatrix& a, const QueryMatrix& b) {
        return a.ring_ == b.ring_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
               a.entries_ == b.entries_;
    }

private:
    void index_rows();

    Ring ring_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::int64_t> entries_;
    std::vector<BitVec> masks_;       // per row; valid where binary_[i]
    std::vector<bool> binary_;
};

// A z over the matrix's ring.
Measurement mat_vec(const QueryMatrix& a, const BitVec& z);

// Largest r with r^k <= n. Exact integer arithmetic.
std::uint64_t int_kth_root(std::uint64_t n, std::uint64_t k);
// Smallest r with r^k >= n.
std::uint64_t int_kth_root_ceil(std::uint64_t n, std::uint64_t k);
// n^(1/k) as a double, exact whenever n is a perfect k-th power.
double real_kth_root(std::uint64_t n, std::uint64_t k);

}  // namespace lqp
