#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lqp/ring.hpp"

namespace lqp {

// The additive group Zq^d with elements encoded as base-q integers.
class ZqGroup {
public:
    ZqGroup(std::int64_t q, std::size_t d);

    std::int64_t q() const { return q_; }
    std::size_t dim() const { return d_; }

    std::uint64_t encode(const Measurement& g) const;
    Measurement decode(std::uint64_t code) const;
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t neg(std::uint64_t a) const;

private:
    std::int64_t q_;
    std::size_t d_;
};

// Reachable sums of nonempty subsets of a growing sequence over Zq^d. Each
// sum keeps the first witness found (elements are scanned in order), so the
// reconstructed subsets are deterministic.
class SubsetSumTable {
public:
    SubsetSumTable(std::int64_t q, std::size_t d) : group_(q, d) {}

    const ZqGroup& group() const { return group_; }
    std::size_t length() const { return length_; }
    std::size_t reachable_count() const { return table_.size(); }

    void push(const Measurement& g);
    bool contains(const Measurement& g) const { return table_.contains(group_.encode(g)); }
    // True iff appending g would create a nonempty zero-sum subset, given the
    // sequence so far may or may not already contain one.
    bool would_create_zero_sum(const Measurement& g) const;
    // 0-based positions (ascending) of a nonempty subset summing to g.
    std::optional<std::vector<std::size_t>> witness(const Measurement& g) const;

private:
    struct Entry {
        std::uint32_t last;   // largest position in the witness
        bool has_prev;
        std::uint64_t prev;   // sum of the witness without `last`
    };

    ZqGroup group_;
    std::size_t length_ = 0;
    std::map<std::uint64_t, Entry> table_;
};

// Positions (0-based, ascending) of a nonempty zero-sum subsequence of seq
// over Zq^d, or nullopt if none exists. Never nullopt once
// |seq| >= q (1 + ln q^(d-1)).
std::optional<std::vector<std::size_t>> group_zero_sum(const std::vector<Measurement>& seq, std::int64_t q);

// Length from which a zero-sum subsequence is guaranteed in Zq^d:
// ceil(q (1 + ln(q^(d-1)))).
std::size_t zero_sum_guarantee_length(std::int64_t q, std::size_t d);

}  // namespace lqp
