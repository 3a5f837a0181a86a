#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lqp/bitvec.hpp"
#include "lqp/ring.hpp"

namespace lqp {

struct SparseRecoveryOptions {
    std::size_t max_attempts = 64;
    // Refuse certification when C(n, s)^2 exceeds this.
    double pair_cap = 1e7;
};

// Smallest r with |D|^r >= (3n)^(2s), i.e. ceil(2s log(3n) / log|D|),
// computed without floating point.
std::size_t sparse_recovery_rows(std::size_t n, std::size_t s, const Ring& ring);

// True iff z -> H z is injective on the 0/1 vectors of weight <= s.
bool certify_sparse_injective(const QueryMatrix& h, std::size_t s, double pair_cap = 1e7);

// Random H with sparse_recovery_rows(n, s, ring) rows, entries uniform over
// the ring (0..q-1, or -B..B), resampled until certified. Throws
// CertificationBudgetExceeded after max_attempts failures.
QueryMatrix sparse_recovery_matrix(std::size_t n, std::size_t s, const Ring& ring, std::uint64_t seed,
                                   const SparseRecoveryOptions& opt = {});

// The unique weight <= s preimage of y, or nullopt ("dense").
std::optional<BitVec> sparse_decode(const QueryMatrix& h, const Measurement& y, std::size_t s);

// sparse_decode with a precomputed table; for repeated decoding.
class SparseDecoder {
public:
    SparseDecoder(const QueryMatrix& h, std::size_t s);
    std::optional<BitVec> decode(const Measurement& y) const;

private:
    std::unordered_map<Measurement, BitVec, MeasurementHash> table_;
};

// Calls fn on every 0/1 vector of length n and weight <= s, by weight and
// then lexicographically.
template <class Fn>
void for_each_sparse(std::size_t n, std::size_t s, Fn&& fn) {
    std::vector<std::size_t> idx;
    for (std::size_t w = 0; w <= s && w <= n; ++w) {
        idx.resize(w);
        for (std::size_t i = 0; i < w; ++i) idx[i] = i;
        while (true) {
            fn(BitVec::from_indices(n, idx));
            std::size_t i = w;
            while (i > 0 && idx[i - 1] == n - w + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < w; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
}

struct L0Level {
    std::vector<std::size_t> coords;  // T_i, 0-based, ascending
    QueryMatrix recovery;             // H_i over |T_i| columns
    QueryMatrix verifier;             // ModQ only; empty otherwise
    SparseDecoder decoder;
};

// The seeded one-round l0-sampling sketch.
struct L0Sketch {
    std::size_t n = 0;
    Ring ring = Ring::gf2();
    std::uint64_t seed = 0;
    std::size_t s = 2;
    std::vector<L0Level> levels;

    // Total number of linear queries (recovery rows, the weight row on
    // bounded-integer levels, and verifier rows).
    std::size_t query_count() const;
};

L0Sketch build_l0_sampler(std::size_t n, const Ring& ring, std::uint64_t seed, std::size_t s = 2);

// 1-based index, or nullopt on failure.
std::optional<std::size_t> run_l0(const L0Sketch& sk, const BitVec& z);

}  // namespace lqp
