#include "lqp/families.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <unordered_map>

#include "lqp/errors.hpp"
#include "lqp/gf2.hpp"
#include "lqp/protocol.hpp"
#include "lqp/zero_sum.hpp"

namespace lqp {

namespace {

std::string set_string(const IndexSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i] + 1);
    return out + "}";
}

Measurement apply_set(const QueryMatrix& a, const IndexSet& s) {
    BitVec x(a.cols());
    for (auto j : s) x.set(j);
    return a.apply(x);
}

}  // namespace

void check_family(const QueryMatrix& a, const UniformFamily& fam) {
    if (a.cols() != fam.n) throw DimensionMismatch("family dimension does not match the matrix");
    std::vector<bool> used(fam.n, false);
    for (const auto& s : fam.sets) {
        if (s.empty()) throw PreconditionError("family contains an empty set");
        for (auto j : s) {
            if (j >= fam.n) throw PreconditionError("family set " + set_string(s) + " leaves [n]");
            if (used[j]) throw PreconditionError("family sets overlap at " + std::to_string(j + 1));
            used[j] = true;
        }
        if (apply_set(a, s) != fam.common)
            throw PreconditionError("A s differs from the common measurement for " + set_string(s));
        if (fam.size_residue) {
            const auto [q, rho] = *fam.size_residue;
            if (static_cast<std::int64_t>(s.size()) % q != rho)
                throw PreconditionError("size of " + set_string(s) + " is not " + std::to_string(rho) + " mod " +
                                        std::to_string(q));
        }
    }
}

UniformFamily uniform_family_gf2(const QueryMatrix& a) {
    if (a.ring().kind() != RingKind::GF2) throw PreconditionError("uniform_family_gf2 needs a GF2 matrix");
    const std::size_t d = a.rows(), n = a.cols();
    std::vector<BitVec> cols(n, BitVec(d + 1));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < d; ++i) cols[j].set(i, a.at(i, j) != 0);
        cols[j].set(d);
    }
    UniformFamily fam;
    fam.n = n;
    fam.ring = a.ring();
    fam.size_residue = std::make_pair(std::int64_t{2}, std::int64_t{1});
    std::vector<std::size_t> rest(n);
    for (std::size_t j = 0; j < n; ++j) rest[j] = j;
    while (!rest.empty()) {
        Gf2Eliminator elim(d + 1);
        IndexSet block;
        std::vector<std::size_t> left;
        for (auto j : rest) {
            if (elim.insert(cols[j])) {
                block.push_back(j);
            } else {
                left.push_back(j);
            }
        }
        fam.blocks.push_back(std::move(block));
        rest = std::move(left);
    }
    if (n == 0) return fam;
    const auto k = fam.blocks.back().front();
    fam.pivot = k;
    for (const auto& block : fam.blocks) {
        std::vector<BitVec> basis;
        for (auto j : block) basis.push_back(cols[j]);
        const auto pos = gf2_express_in_span(basis, cols[k]);
        if (!pos) throw PreconditionError("internal: nested span property failed");
        IndexSet s;
        for (auto p : *pos) s.push_back(block[p]);
        std::sort(s.begin(), s.end());
        fam.sets.push_back(std::move(s));
    }
    fam.common = a.column(k);
    check_family(a, fam);
    return fam;
}

UniformFamily uniform_family_modq(const QueryMatrix& a) {
    if (!a.ring().is_modular()) throw PreconditionError("uniform_family_modq needs a modular matrix");
    const auto q = a.ring().modulus();
    const std::size_t d = a.rows(), n = a.cols();
    auto col = [&](std::size_t j) {
        Measurement b(d + 1);
        b[0] = 1 % q;
        for (std::size_t i = 0; i < d; ++i) b[i + 1] = a.at(i, j);
        return b;
    };
    UniformFamily fam;
    fam.n = n;
    fam.ring = a.ring();
    fam.size_residue = std::make_pair(q, q - 1);
    std::vector<SubsetSumTable> tables;
    std::vector<std::size_t> rest(n);
    for (std::size_t j = 0; j < n; ++j) rest[j] = j;
    while (!rest.empty()) {
        SubsetSumTable table(q, d + 1);
        IndexSet bucket;
        std::vector<std::size_t> left;
        for (auto j : rest) {
            const auto b = col(j);
            if (table.would_create_zero_sum(b)) {
                left.push_back(j);
            } else {
                table.push(b);
                bucket.push_back(j);
            }
        }
        fam.blocks.push_back(std::move(bucket));
        tables.push_back(std::move(table));
        rest = std::move(left);
    }
    if (fam.blocks.size() < 2)
        throw TooSmall("zero-sum-free bucketing of " + std::to_string(n) + " columns over Z" + std::to_string(q) +
                       "^" + std::to_string(d + 1) + " gave " + std::to_string(fam.blocks.size()) +
                       " bucket(s); at least 2 are needed");
    const auto t = fam.blocks.back().front();
    fam.pivot = t;
    Measurement neg = col(t);
    for (auto& x : neg) x = (q - x) % q;
    for (std::size_t i = 0; i + 1 < fam.blocks.size(); ++i) {
        const auto w = tables[i].witness(neg);
        if (!w) throw PreconditionError("internal: pivot column was addable to an earlier bucket");
        IndexSet s;
        for (auto p : *w) s.push_back(fam.blocks[i][p]);
        fam.sets.push_back(std::move(s));
    }
    fam.common.assign(neg.begin() + 1, neg.end());
    check_family(a, fam);
    return fam;
}

std::size_t default_int_weight(std::size_t d, std::uint64_t m_bound) {
    const double t = std::ceil(static_cast<double>(d) * std::log2(static_cast<double>(std::max<std::uint64_t>(m_bound, 1))));
    return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

namespace {

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    double r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

template <class Fn>
void for_each_combination(std::size_t n, std::size_t t, Fn&& fn) {
    if (t > n) return;
    IndexSet idx(t);
    for (std::size_t i = 0; i < t; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        std::size_t i = t;
        while (i > 0 && idx[i - 1] == n - t + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < t; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Maximum packing of pairwise disjoint equal-size masks.
class Packer {
public:
    Packer(std::vector<std::uint64_t> sets, int size, std::size_t target, std::uint64_t& budget)
        : sets_(std::move(sets)), size_(size), target_(target), budget_(budget) {}

    std::vector<std::size_t> run() {
        std::vector<std::size_t> cand(sets_.size());
        for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = i;
        // Fewest conflicts first: a good greedy dive for the first leaf.
        std::vector<std::size_t> conflicts(sets_.size(), 0);
        for (std::size_t i = 0; i < sets_.size(); ++i)
            for (std::size_t j = 0; j < sets_.size(); ++j)
                if (i != j && (sets_[i] & sets_[j])) ++conflicts[i];
        std::stable_sort(cand.begin(), cand.end(),
                         [&](std::size_t x, std::size_t y) { return conflicts[x] < conflicts[y]; });
        std::vector<std::size_t> chosen;
        search(cand, 0, chosen);
        return best_;
    }

    bool complete() const { return complete_; }

private:
    void search(const std::vector<std::size_t>& cand, std::uint64_t used, std::vector<std::size_t>& chosen) {
        if (chosen.size() > best_.size()) best_ = chosen;
        if (best_.size() >= target_) return;
        if (cand.empty()) return;
        if (budget_ == 0) {
            complete_ = false;
            return;
        }
        --budget_;
        std::uint64_t free = 0;
        for (auto c : cand) free |= sets_[c];
        free &= ~used;
        const auto bound = chosen.size() + std::min<std::size_t>(cand.size(), std::popcount(free) / size_);
        if (bound <= best_.size()) return;
        const auto first = cand.front();
        std::vector<std::size_t> with;
        for (std::size_t i = 1; i < cand.size(); ++i)
            if (!(sets_[cand[i]] & sets_[first])) with.push_back(cand[i]);
        chosen.push_back(first);
        search(with, used | sets_[first], chosen);
        chosen.pop_back();
        if (best_.size() >= target_) return;
        std::vector<std::size_t> without(cand.begin() + 1, cand.end());
        search(without, used, chosen);
    }

    std::vector<std::uint64_t> sets_;
    int size_;
    std::size_t target_;
    std::uint64_t& budget_;
    std::vector<std::size_t> best_;
    bool complete_ = true;
};

SunflowerSearch sunflower_search(const std::vector<IndexSet>& family, std::size_t target, std::uint64_t budget) {
    SunflowerSearch out;
    if (family.empty()) return out;
    const auto t = family.front().size();
    std::vector<std::uint64_t> masks;
    for (const auto& s : family) {
        if (s.size() != t) throw PreconditionError("sunflower search needs sets of equal size");
        std::uint64_t m = 0;
        for (auto j : s) {
            if (j >= 64) throw PreconditionError("sunflower search supports ground sets of at most 64 elements");
            m |= std::uint64_t{1} << j;
        }
        masks.push_back(m);
    }
    out.best = Sunflower{{}, {0}};
    if (family.size() == 1 || target <= 1 || t == 0) return out;

    // Members indexed by every proper sub-core they contain.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_core;
    const double entries = static_cast<double>(family.size()) * std::ldexp(1.0, static_cast<int>(t));
    const bool all_cores = entries <= 4.0 * static_cast<double>(budget);
    if (!all_cores) out.exact = false;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        const auto s = masks[i];
        if (all_cores) {
            for (std::uint64_t c = s;; c = (c - 1) & s) {
                if (c != s) by_core[c].push_back(i);
                if (c == 0) break;
            }
        } else {
            by_core[0].push_back(i);
            for (std::uint64_t rest = s; rest; rest &= rest - 1) by_core[rest & -rest].push_back(i);
        }
    }
    struct Cand {
        std::uint64_t core;
        std::size_t bound;
    };
    std::vector<Cand> cands;
    for (const auto& [core, members] : by_core) {
        std::uint64_t uni = 0;
        for (auto i : members) uni |= masks[i] & ~core;
        const auto petal = static_cast<std::size_t>(t) - static_cast<std::size_t>(std::popcount(core));
        cands.push_back({core, std::min(members.size(), static_cast<std::size_t>(std::popcount(uni)) / petal)});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        if (x.bound != y.bound) return x.bound > y.bound;
        if (std::popcount(x.core) != std::popcount(y.core)) return std::popcount(x.core) < std::popcount(y.core);
        return x.core < y.core;
    });
    std::size_t best = 1;
    for (const auto& c : cands) {
        if (c.bound <= best) break;
        const auto& members = by_core[c.core];
        std::vector<std::uint64_t> petals;
        for (auto i : members) petals.push_back(masks[i] & ~c.core);
        const int petal_size = static_cast<int>(t) - std::popcount(c.core);
        Packer packer(std::move(petals), petal_size, target, budget);
        const auto chosen = packer.run();
        if (!packer.complete()) out.exact = false;
        if (chosen.size() > best) {
            best = chosen.size();
            Sunflower sf;
            for (std::size_t j = 0; j < 64; ++j)
                if (c.core >> j & 1U) sf.core.push_back(j);
            for (auto p : chosen) sf.members.push_back(members[p]);
            std::sort(sf.members.begin(), sf.members.end());
            out.best = std::move(sf);
        }
        if (best >= target) break;
        if (budget == 0) {
            out.exact = false;
            break;
        }
    }
    return out;
}

}  // namespace

SunflowerSearch largest_sunflower(const std::vector<IndexSet>& family, std::uint64_t budget) {
    return sunflower_search(family, SIZE_MAX, budget);
}

std::optional<Sunflower> find_sunflower(const std::vector<IndexSet>& family, std::size_t p, std::uint64_t budget) {
    if (p == 0) throw PreconditionError("sunflower size must be at least 1");
    auto res = sunflower_search(family, p, budget);
    if (res.best && res.best->members.size() >= p) {
        res.best->members.resize(p);
        return res.best;
    }
    if (!res.exact)
        throw SearchBudgetExceeded("sunflower search ran out of budget before settling whether a " +
                                   std::to_string(p) + "-sunflower exists");
    return std::nullopt;
}

UniformFamily uniform_family_int(const QueryMatrix& a, std::uint64_t m_bound, std::size_t t,
                                 const IntFamilyOptions& opt) {
    if (a.ring().kind() != RingKind::BoundedInt) throw PreconditionError("uniform_family_int needs an integer matrix");
    const std::size_t d = a.rows(), n = a.cols();
    for (std::size_t i = 0; i < d; ++i)
        if (row_value_count(a.ring(), a.row(i)) > m_bound)
            throw PreconditionError("row " + std::to_string(i + 1) + " takes " +
                                    std::to_string(row_value_count(a.ring(), a.row(i))) + " values, so A is not " +
                                    std::to_string(m_bound) + "-bounded");
    if (t < 1 || t > n) throw PreconditionError("weight t must lie in [1, n]");
    if (n > 64) throw PreconditionError("integer families support n <= 64");
    if (binomial(n, t) > opt.enumeration_cap)
        throw CapExceeded("C(" + std::to_string(n) + "," + std::to_string(t) + ") weight-t vectors exceed the cap");

    std::map<Measurement, std::size_t> counts;
    BitVec x(n);
    for_each_combination(n, t, [&](const IndexSet& idx) {
        x = BitVec::from_indices(n, idx);
        ++counts[a.apply(x)];
    });
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
        if (it->second > best->second) best = it;
    const Measurement r_tilde = best->first;
    std::vector<IndexSet> bucket;
    for_each_combination(n, t, [&](const IndexSet& idx) {
        if (a.apply(BitVec::from_indices(n, idx)) == r_tilde) bucket.push_back(idx);
    });

    UniformFamily fam;
    fam.n = n;
    fam.ring = a.ring();
    fam.weight = t;
    fam.bucket_size = bucket.size();
    SunflowerSearch sf;
    if (bucket.size() <= opt.exact_sunflower_cap) {
        sf = largest_sunflower(bucket, opt.search_budget);
    } else {
        std::vector<IndexSet> head(bucket.begin(), bucket.begin() + static_cast<std::ptrdiff_t>(opt.exact_sunflower_cap));
        sf = largest_sunflower(head, opt.search_budget);
        sf.exact = false;
    }
    fam.sunflower_exact = sf.exact;
    if (sf.best->members.size() == 1) {
        fam.sets.push_back(bucket[sf.best->members.front()]);
        fam.common = r_tilde;
    } else {
        fam.core = sf.best->core;
        BitVec v = BitVec::from_indices(n, fam.core);
        const auto av = a.apply(v);
        for (auto i : sf.best->members) {
            IndexSet s;
            std::set_difference(bucket[i].begin(), bucket[i].end(), fam.core.begin(), fam.core.end(),
                                std::back_inserter(s));
            if (!s.empty()) fam.sets.push_back(std::move(s));
        }
        fam.common.resize(d);
        for (std::size_t i = 0; i < d; ++i) fam.common[i] = a.ring().add(r_tilde[i], a.ring().neg(av[i]));
    }
    check_family(a, fam);
    return fam;
}

LiftingMatrix::LiftingMatrix(std::size_t n, std::vector<IndexSet> sets)
    : n_(n), sets_(std::move(sets)), owner_(n, SIZE_MAX) {
    for (std::size_t i = 0; i < sets_.size(); ++i)
        for (auto j : sets_[i]) {
            if (j >= n_) throw PreconditionError("lifting set leaves [n]");
            if (owner_[j] != SIZE_MAX)
                throw PreconditionError("lifting sets overlap at index " + std::to_string(j + 1));
            owner_[j] = i;
        }
    for (auto& o : owner_)
        if (o == SIZE_MAX) o = sets_.size();
}

bool LiftingMatrix::at(std::size_t row, std::size_t col) const { return owner_.at(row) == col; }

std::vector<std::vector<std::int64_t>> LiftingMatrix::to_rows() const {
    std::vector<std::vector<std::int64_t>> rows(n_, std::vector<std::int64_t>(m(), 0));
    for (std::size_t j = 0; j < n_; ++j)
        if (owner_[j] < m()) rows[j][owner_[j]] = 1;
    return rows;
}

BitVec LiftingMatrix::lift(const BitVec& w) const {
    if (w.size() != m()) throw DimensionMismatch("lift: input has length " + std::to_string(w.size()) +
                                                 ", expected m = " + std::to_string(m()));
    BitVec z(n_);
    for (std::size_t i = 0; i < m(); ++i)
        if (w.get(i))
            for (auto j : sets_[i]) z.set(j);
    return z;
}

Ring LiftingMatrix::product_ring(const Ring& ring) const {
    if (ring.is_modular()) return ring;
    std::size_t widest = 1;
    for (const auto& s : sets_) widest = std::max(widest, s.size());
    return Ring::bounded_int(ring.mul(ring.bound(), static_cast<std::int64_t>(widest)));
}

QueryMatrix LiftingMatrix::right_multiply(const QueryMatrix& a) const {
    if (a.cols() != n_) throw DimensionMismatch("A L: A has " + std::to_string(a.cols()) + " columns, L has " +
                                                std::to_string(n_) + " rows");
    const Ring out_ring = product_ring(a.ring());
    std::vector<std::int64_t> e(a.rows() * m(), 0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t c = 0; c < m(); ++c) {
            std::int64_t s = 0;
            for (auto j : sets_[c]) s = a.ring().add(s, a.at(i, j));
            e[i * m() + c] = s;
        }
    return QueryMatrix(out_ring, a.rows(), m(), std::move(e));
}

std::optional<std::size_t> LiftingMatrix::owner(std::size_t j) const {
    if (owner_.at(j) >= m()) return std::nullopt;
    return owner_[j];
}

LiftingMatrix lifting_matrix(const UniformFamily& fam) { return LiftingMatrix(fam); }

}  // namespace lqp
