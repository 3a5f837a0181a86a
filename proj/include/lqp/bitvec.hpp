#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lqp {

// Bit-packed vector over {0,1}. Doubles as a GF(2) vector and as the 0/1
// input vectors z, w and set indicators. Positions are 0-based; the string
// form lists position 0 first, so "0010" has bit 2 set.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    static BitVec from_string(std::string_view bits);
    static BitVec from_indices(std::size_t n, std::span<const std::size_t> idx);
    // The rank-th string of length n in lexicographic order (z_1 is the most
    // significant position). Requires n <= 64.
    static BitVec from_lex_rank(std::size_t n, std::uint64_t rank);

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::size_t i, bool v = true) {
        const std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (v) {
            words_[i >> 6] |= m;
        } else {
            words_[i >> 6] &= ~m;
        }
    }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    std::size_t weight() const {
        std::size_t w = 0;
        for (auto x : words_) w += static_cast<std::size_t>(std::popcount(x));
        return w;
    }
    bool any() const {
        for (auto x : words_)
            if (x) return true;
        return false;
    }
    // popcount(this & other); both must have the same size.
    std::size_t and_weight(const BitVec& other) const {
        std::size_t w = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            w += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
        return w;
    }

    BitVec& operator^=(const BitVec& o);
    BitVec& operator|=(const BitVec& o);
    BitVec& operator&=(const BitVec& o);
    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }

    std::vector<std::size_t> support() const;
    // Smallest set position, or size() if none.
    std::size_t first_set() const;
    std::uint64_t lex_rank() const;
    std::string to_string() const;

    std::span<const std::uint64_t> words() const { return words_; }

    friend bool operator==(const BitVec&, const BitVec&) = default;
    // Orders by size, then lexicographically by the string form.
    friend bool operator<(const BitVec& a, const BitVec& b);

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace lqp
