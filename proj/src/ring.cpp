#include "lqp/ring.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "lqp/errors.hpp"

namespace lqp {

namespace {

std::int64_t parse_int(std::string_view s, const char* what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError(std::string("bad integer for ") + what + ": '" + std::string(s) + "'");
    return v;
}

// base^exp saturating at UINT64_MAX.
std::uint64_t pow_sat(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
            return std::numeric_limits<std::uint64_t>::max();
        r *= base;
    }
    return r;
}

// base^exp <= limit, without overflow.
bool pow_le(std::uint64_t base, std::uint64_t exp, std::uint64_t limit) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base != 0 && r > limit / base) return false;
        r *= base;
    }
    return r <= limit;
}

}  // namespace

Ring Ring::mod_q(std::int64_t q) {
    if (q < 2) throw PreconditionError("ModQ requires q >= 2");
    if (q == 2) return gf2();
    return Ring(RingKind::ModQ, q);
}

Ring Ring::bounded_int(std::int64_t bound) {
    if (bound < 1) throw PreconditionError("BoundedInt requires B >= 1");
    return Ring(RingKind::BoundedInt, bound);
}

Ring Ring::parse(std::string_view text) {
    if (text == "gf2") return gf2();
    if (text.starts_with("modq:")) return mod_q(parse_int(text.substr(5), "q"));
    if (text.starts_with("int:")) return bounded_int(parse_int(text.substr(4), "B"));
    throw ParseError("unknown ring '" + std::string(text) + "' (expected gf2, modq:Q or int:B)");
}

std::uint64_t Ring::domain_size() const {
    if (is_modular()) return static_cast<std::uint64_t>(param_);
    return 2 * static_cast<std::uint64_t>(param_) + 1;
}

std::int64_t Ring::reduce(std::int64_t v) const {
    if (!is_modular()) return v;
    const std::int64_t r = v % param_;
    return r < 0 ? r + param_ : r;
}

bool Ring::is_legal_coefficient(std::int64_t a) const {
    if (is_modular()) return a >= 0 && a < param_;
    return a >= -param_ && a <= param_;
}

std::int64_t Ring::add(std::int64_t a, std::int64_t b) const {
    if (is_modular()) return reduce(reduce(a) + reduce(b));
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in ring addition");
    return r;
}

std::int64_t Ring::mul(std::int64_t a, std::int64_t b) const {
    if (is_modular()) {
        const auto x = static_cast<__int128>(reduce(a)) * reduce(b);
        return static_cast<std::int64_t>(x % param_);
    }
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in ring multiplication");
    return r;
}

std::string Ring::to_string() const {
    switch (kind_) {
    case RingKind::GF2: return "gf2";
    case RingKind::ModQ: return "modq:" + std::to_string(param_);
    case RingKind::BoundedInt: return "int:" + std::to_string(param_);
    }
    return {};
}

std::string measurement_key(const Measurement& m) {
    std::string s;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(m[i]);
    }
    return s;
}

std::size_t MeasurementHash::operator()(const Measurement& m) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : m) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 33));
}

Measurement parse_measurement_key(std::string_view key) {
    Measurement m;
    if (key.empty()) return m;
    std::size_t start = 0;
    while (true) {
        const auto comma = key.find(',', start);
        const auto part = key.substr(start, comma == std::string_view::npos ? key.size() - start : comma - start);
        m.push_back(parse_int(part, "measurement key"));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return m;
}

QueryMatrix::QueryMatrix(Ring ring, std::size_t rows, std::size_t cols)
    : ring_(ring), rows_(rows), cols_(cols), entries_(rows * cols, 0) {
    index_rows();
}

QueryMatrix::QueryMatrix(Ring ring, std::size_t rows, std::size_t cols, std::vector<std::int64_t> entries)
    : ring_(ring), rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols) throw DimensionMismatch("matrix entry count does not match shape");
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (!ring_.is_legal_coefficient(entries_[k])) {
            std::ostringstream os;
            os << "coefficient " << entries_[k] << " at (" << k / cols_ + 1 << "," << k % cols_ + 1
               << ") is not legal in ring " << ring_.to_string();
            throw PreconditionError(os.str());
        }
    }
    index_rows();
}

QueryMatrix QueryMatrix::from_rows(Ring ring, std::size_t cols,
                                   const std::vector<std::vector<std::int64_t>>& rows) {
    std::vector<std::int64_t> e;
    e.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw DimensionMismatch("matrix row has wrong length");
        e.insert(e.end(), r.begin(), r.end());
    }
    return QueryMatrix(ring, rows.size(), cols, std::move(e));
}

QueryMatrix QueryMatrix::identity(Ring ring, std::size_t n) {
    std::vector<std::int64_t> e(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1;
    return QueryMatrix(ring, n, n, std::move(e));
}

Measurement QueryMatrix::column(std::size_t j) const {
    Measurement c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = at(i, j);
    return c;
}

std::vector<std::vector<std::int64_t>> QueryMatrix::to_rows() const {
    std::vector<std::vector<std::int64_t>> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
}

void QueryMatrix::index_rows() {
    masks_.assign(rows_, BitVec());
    binary_.assign(rows_, false);
    for (std::size_t i = 0; i < rows_; ++i) {
        bool bin = true;
        BitVec m(cols_);
        for (std::size_t j = 0; j < cols_; ++j) {
            const auto a = at(i, j);
            if (a == 1) {
                m.set(j);
            } else if (a != 0) {
                bin = false;
                break;
            }
        }
        binary_[i] = bin;
        if (bin) masks_[i] = std::move(m);
    }
}

void QueryMatrix::apply(const BitVec& z, Measurement& out) const {
    if (z.size() != cols_) throw DimensionMismatch("mat_vec: matrix has " + std::to_string(cols_) +
                                                   " columns but input has length " + std::to_string(z.size()));
    out.resize(rows_);
    std::vector<std::size_t> support;
    bool have_support = false;
    for (std::size_t i = 0; i < rows_; ++i) {
        if (binary_[i]) {
            out[i] = ring_.reduce(static_cast<std::int64_t>(masks_[i].and_weight(z)));
            continue;
        }
        if (!have_support) {
            support = z.support();
            have_support = true;
        }
        std::int64_t acc = 0;
        for (auto j : support) acc = ring_.add(acc, at(i, j));
        out[i] = acc;
    }
}

Measurement mat_vec(const QueryMatrix& a, const BitVec& z) { return a.apply(z); }

std::uint64_t int_kth_root(std::uint64_t n, std::uint64_t k) {
    if (k == 0) throw PreconditionError("int_kth_root requires k >= 1");
    if (k == 1 || n <= 1) return n;
    // invariant: lo^k <= n < hi^k; the root of a 64-bit value is below 2^32.
    std::uint64_t lo = 1, hi = (std::uint64_t{1} << 32) + 1;
    while (hi - lo > 1) {
        const auto mid = lo + (hi - lo) / 2;
        if (pow_le(mid, k, n)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

std::uint64_t int_kth_root_ceil(std::uint64_t n, std::uint64_t k) {
    const auto r = int_kth_root(n, k);
    return pow_sat(r, k) == n ? r : r + 1;
}

double real_kth_root(std::uint64_t n, std::uint64_t k) {
    const auto r = int_kth_root(n, k);
    if (pow_sat(r, k) == n) return static_cast<double>(r);
    return std::pow(static_cast<double>(n), 1.0 / static_cast<double>(k));
}

}  // namespace lqp
