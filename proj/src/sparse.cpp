#include "lqp/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "lqp/errors.hpp"
#include "lqp/rng.hpp"

namespace lqp {

namespace {

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    double r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

void check_cert_cap(std::size_t n, std::size_t s, double pair_cap) {
    const double c = binomial(n, s);
    if (c * c > pair_cap)
        throw CapExceeded("certifying sparsity " + std::to_string(s) + " at n=" + std::to_string(n) +
                          " needs C(n,s)^2 = " + std::to_string(c * c) + " pairs, above the cap");
}

}  // namespace

std::size_t sparse_recovery_rows(std::size_t n, std::size_t s, const Ring& ring) {
    if (n == 0) throw PreconditionError("sparse recovery needs n >= 1");
    const auto dom = static_cast<unsigned __int128>(ring.domain_size());
    const double bits = 2.0 * static_cast<double>(s) * std::log2(3.0 * static_cast<double>(n));
    if (bits < 120) {
        unsigned __int128 target = 1;
        for (std::size_t i = 0; i < 2 * s; ++i) target *= 3 * static_cast<unsigned __int128>(n);
        std::size_t r = 0;
        unsigned __int128 pow = 1;
        while (pow < target) {
            pow *= dom;
            ++r;
        }
        return r;
    }
    return static_cast<std::size_t>(std::ceil(bits / std::log2(static_cast<double>(ring.domain_size()))));
}

bool certify_sparse_injective(const QueryMatrix& h, std::size_t s, double pair_cap) {
    check_cert_cap(h.cols(), s, pair_cap);
    std::unordered_set<Measurement, MeasurementHash> seen;
    bool ok = true;
    Measurement y;
    for_each_sparse(h.cols(), s, [&](const BitVec& z) {
        if (!ok) return;
        h.apply(z, y);
        if (!seen.insert(y).second) ok = false;
    });
    return ok;
}

QueryMatrix sparse_recovery_matrix(std::size_t n, std::size_t s, const Ring& ring, std::uint64_t seed,
                                   const SparseRecoveryOptions& opt) {
    const auto rows = sparse_recovery_rows(n, s, ring);
    check_cert_cap(n, s, opt.pair_cap);
    for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
        Rng rng(seed, attempt);
        std::vector<std::int64_t> e(rows * n);
        for (auto& x : e)
            x = ring.is_modular() ? static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(ring.modulus())))
                                  : rng.between(-ring.bound(), ring.bound());
        QueryMatrix h(ring, rows, n, std::move(e));
        if (certify_sparse_injective(h, s, opt.pair_cap)) return h;
    }
    throw CertificationBudgetExceeded("no injective " + std::to_string(rows) + "x" + std::to_string(n) +
                                      " matrix for sparsity " + std::to_string(s) + " over " + ring.to_string() +
                                      " after " + std::to_string(opt.max_attempts) + " attempts");
}

std::optional<BitVec> sparse_decode(const QueryMatrix& h, const Measurement& y, std::size_t s) {
    if (y.size() != h.rows()) throw DimensionMismatch("measurement length does not match matrix rows");
    std::optional<BitVec> found;
    Measurement m;
    for_each_sparse(h.cols(), s, [&](const BitVec& z) {
        if (found) return;
        h.apply(z, m);
        if (m == y) found = z;
    });
    return found;
}

SparseDecoder::SparseDecoder(const QueryMatrix& h, std::size_t s) {
    for_each_sparse(h.cols(), s, [&](const BitVec& z) { table_.emplace(h.apply(z), z); });
}

std::optional<BitVec> SparseDecoder::decode(const Measurement& y) const {
    auto it = table_.find(y);
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

std::size_t L0Sketch::query_count() const {
    std::size_t total = 0;
    for (const auto& lv : levels) total += lv.recovery.rows() + lv.verifier.rows() + (ring.is_modular() ? 0 : 1);
    return total;
}

L0Sketch build_l0_sampler(std::size_t n, const Ring& ring, std::uint64_t seed, std::size_t s) {
    if (n == 0) throw PreconditionError("l0 sampler needs n >= 1");
    if (s == 0) throw PreconditionError("l0 sampler needs s >= 1");
    L0Sketch sk;
    sk.n = n;
    sk.ring = ring;
    sk.seed = seed;
    sk.s = s;
    std::size_t levels = 0;
    while ((std::size_t{1} << levels) < n) ++levels;
    levels = std::max<std::size_t>(levels, 1);
    std::size_t verifier_rows = 0;
    if (ring.is_modular()) {
        std::uint64_t pow = 1;
        while (pow < n) {
            pow *= static_cast<std::uint64_t>(ring.modulus());
            ++verifier_rows;
        }
        verifier_rows += 2;
    }
    for (std::size_t i = 1; i <= levels; ++i) {
        const std::size_t size = i == levels ? n : std::min(n, std::size_t{1} << i);
        Rng rng(seed, 2 * i);
        auto coords = rng.sample_without_replacement(n, size);
        std::sort(coords.begin(), coords.end());
        const std::size_t si = std::min(s, size);
        auto h = sparse_recovery_matrix(size, si, ring, Rng::splitmix64(seed + 2 * i + 1));
        QueryMatrix ver(ring, 0, size);
        if (ring.is_modular()) {
            std::vector<std::int64_t> e(verifier_rows * size);
            for (auto& x : e) x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(ring.modulus())));
            ver = QueryMatrix(ring, verifier_rows, size, std::move(e));
        }
        SparseDecoder dec(h, si);
        sk.levels.push_back(L0Level{std::move(coords), std::move(h), std::move(ver), std::move(dec)});
    }
    return sk;
}

std::optional<std::size_t> run_l0(const L0Sketch& sk, const BitVec& z) {
    if (z.size() != sk.n) throw DimensionMismatch("input length does not match the sketch");
    for (const auto& lv : sk.levels) {
        BitVec zt(lv.coords.size());
        for (std::size_t j = 0; j < lv.coords.size(); ++j) zt.set(j, z.get(lv.coords[j]));
        const auto w = lv.decoder.decode(lv.recovery.apply(zt));
        if (!w || !w->any()) continue;
        const bool verified =
            sk.ring.is_modular() ? lv.verifier.apply(zt) == lv.verifier.apply(*w) : zt.weight() == w->weight();
        if (verified) return lv.coords[w->first_set()] + 1;
    }
    return std::nullopt;
}

}  // namespace lqp
