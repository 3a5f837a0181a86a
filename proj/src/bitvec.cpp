#include "lqp/bitvec.hpp"

#include "lqp/errors.hpp"

namespace lqp {

BitVec BitVec::from_string(std::string_view bits) {
    BitVec v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            v.set(i);
        } else if (bits[i] != '0') {
            throw PreconditionError("bit string may contain only '0' and '1': " + std::string(bits));
        }
    }
    return v;
}

BitVec BitVec::from_indices(std::size_t n, std::span<const std::size_t> idx) {
    BitVec v(n);
    for (auto i : idx) {
        if (i >= n) throw DimensionMismatch("index out of range for bit vector");
        v.set(i);
    }
    return v;
}

BitVec BitVec::from_lex_rank(std::size_t n, std::uint64_t rank) {
    BitVec v(n);
    for (std::size_t j = 0; j < n; ++j)
        if ((rank >> (n - 1 - j)) & 1U) v.set(j);
    return v;
}

BitVec& BitVec::operator^=(const BitVec& o) {
    if (o.n_ != n_) throw DimensionMismatch("xor of bit vectors with different sizes");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
}

BitVec& BitVec::operator|=(const BitVec& o) {
    if (o.n_ != n_) throw DimensionMismatch("or of bit vectors with different sizes");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
}

BitVec& BitVec::operator&=(const BitVec& o) {
    if (o.n_ != n_) throw DimensionMismatch("and of bit vectors with different sizes");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
}

std::vector<std::size_t> BitVec::support() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        auto x = words_[w];
        while (x) {
            out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(x)));
            x &= x - 1;
        }
    }
    return out;
}

std::size_t BitVec::first_set() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
    return n_;
}

std::uint64_t BitVec::lex_rank() const {
    if (n_ > 64) throw PreconditionError("lex_rank requires n <= 64");
    std::uint64_t r = 0;
    for (std::size_t j = 0; j < n_; ++j)
        if (get(j)) r |= std::uint64_t{1} << (n_ - 1 - j);
    return r;
}

std::string BitVec::to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

bool operator<(const BitVec& a, const BitVec& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    for (std::size_t i = 0; i < a.n_; ++i) {
        const bool x = a.get(i), y = b.get(i);
        if (x != y) return y;
    }
    return false;
}

}  // namespace lqp
