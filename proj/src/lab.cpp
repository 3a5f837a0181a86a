#include "lqp/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "lqp/det_protocol.hpp"
#include "lqp/errors.hpp"
#include "parallel.hpp"

namespace lqp {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw PreconditionError(msg);
}

}  // namespace

BoundValue lb_value(Bound b, const BoundParams& p) {
    BoundValue out;
    const auto n = static_cast<double>(p.n);
    const auto k = static_cast<double>(p.k);
    const auto q = static_cast<double>(p.q);
    switch (b) {
    case Bound::Gf2KRound:
        require(p.n >= 1 && p.k >= 1, "needs n >= 1 and k >= 1");
        out.value = k * (real_kth_root(p.n, p.k) - 1);
        break;
    case Bound::ModqKRound:
        require(p.n >= 1 && p.k >= 1 && p.q >= 2, "needs n >= 1, k >= 1 and q >= 2");
        out.value = k * (real_kth_root(p.n, p.k) - 1) / (3.67 * std::pow(q, 1 + 1 / k) * std::pow(std::log(q), 2));
        break;
    case Bound::IntTwoRound:
        require(p.n >= 2 && p.m_bound >= 2, "needs n >= 2 and M >= 2");
        out.value = 0.19 * std::sqrt(n / (std::log2(n) * std::pow(std::log2(static_cast<double>(p.m_bound)), 2))) - 2;
        out.advisory = true;
        out.note = "unspecified absolute constant c_0 taken as 1";
        break;
    case Bound::Gf2Elemx:
        require(p.n >= 1, "needs n >= 1");
        out.value = n - 1;
        break;
    case Bound::ModqElemx:
        require(p.n >= 1 && p.q >= 3, "needs n >= 1 and q >= 3");
        out.value = n / (2 * q * std::log(q));
        break;
    case Bound::IntOneRound:
        require(p.n >= 1 && p.m_bound >= 2, "needs n >= 1 and M >= 2");
        out.value = n / std::log2(static_cast<double>(p.m_bound)) - 1;
        break;
    case Bound::IntQuarterOneRound:
        require(p.n >= 4 && p.n % 4 == 0 && p.m_bound >= 2, "needs n >= 4 divisible by 4 and M >= 2");
        out.value = 0.14 * n / std::log2(static_cast<double>(p.m_bound));
        out.advisory = true;
        out.note = "loose constant; far from tight at small n";
        break;
    }
    return out;
}

namespace {

const std::vector<std::pair<Bound, std::string>>& bound_names() {
    static const std::vector<std::pair<Bound, std::string>> names = {
        {Bound::Gf2KRound, "gf2-kround"},     {Bound::ModqKRound, "modq-kround"}, {Bound::IntTwoRound, "int-2round"},
        {Bound::Gf2Elemx, "gf2-elemx"},       {Bound::ModqElemx, "modq-elemx"},   {Bound::IntOneRound, "int-1round"},
        {Bound::IntQuarterOneRound, "int-quarter"},
    };
    return names;
}

}  // namespace

Bound parse_bound(std::string_view name) {
    for (const auto& [b, s] : bound_names())
        if (s == name) return b;
    throw PreconditionError("unknown bound '" + std::string(name) + "'");
}

std::string bound_name(Bound b) {
    for (const auto& [x, s] : bound_names())
        if (x == b) return s;
    return "?";
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

constexpr std::uint64_t kInf = 1U << 20;

struct Subspace {
    std::size_t dim;
    std::vector<std::uint16_t> code;  // per input index
    std::size_t classes;              // p^dim
};

std::vector<Subspace> all_subspaces(std::size_t n, std::int64_t p) {
    std::vector<Subspace> out;
    const std::size_t inputs = std::size_t{1} << n;
    for (std::size_t d = 1; d <= n; ++d) {
        // Pivot columns c_0 < ... < c_{d-1}.
        std::vector<std::size_t> piv(d);
        std::iota(piv.begin(), piv.end(), 0);
        while (true) {
            // Free slots: row r, column j > piv[r], j not a pivot.
            std::vector<std::pair<std::size_t, std::size_t>> free;
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t j = piv[r] + 1; j < n; ++j)
                    if (std::find(piv.begin(), piv.end(), j) == piv.end()) free.emplace_back(r, j);
            std::vector<std::int64_t> val(free.size(), 0);
            while (true) {
                std::vector<std::vector<std::int64_t>> rows(d, std::vector<std::int64_t>(n, 0));
                for (std::size_t r = 0; r < d; ++r) rows[r][piv[r]] = 1;
                for (std::size_t f = 0; f < free.size(); ++f) rows[free[f].first][free[f].second] = val[f];
                Subspace s{d, std::vector<std::uint16_t>(inputs), 1};
                for (std::size_t r = 0; r < d; ++r) s.classes *= static_cast<std::size_t>(p);
                for (std::size_t z = 0; z < inputs; ++z) {
                    std::uint64_t code = 0;
                    for (std::size_t r = d; r-- > 0;) {
                        std::int64_t dot = 0;
                        for (std::size_t j = 0; j < n; ++j)
                            if (z >> j & 1U) dot += rows[r][j];
                        code = code * static_cast<std::uint64_t>(p) + static_cast<std::uint64_t>(dot % p);
                    }
                    s.code[z] = static_cast<std::uint16_t>(code);
                }
                out.push_back(std::move(s));
                std::size_t f = 0;
                while (f < val.size() && val[f] == p - 1) val[f++] = 0;
                if (f == val.size()) break;
                ++val[f];
            }
            std::size_t i = d;
            while (i > 0 && piv[i - 1] == n - d + i - 1) --i;
            if (i == 0) break;
            ++piv[i - 1];
            for (std::size_t j = i; j < d; ++j) piv[j] = piv[j - 1] + 1;
        }
    }
    return out;
}

class Oracle {
public:
    Oracle(std::size_t n, const std::vector<Subspace>& spaces) : n_(n), spaces_(spaces) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        const std::size_t inputs = std::size_t{1} << n;
        do {
            std::vector<std::uint8_t> map(inputs);
            for (std::size_t z = 0; z < inputs; ++z) {
                std::size_t img = 0;
                for (std::size_t j = 0; j < n; ++j)
                    if (z >> j & 1U) img |= std::size_t{1} << perm[j];
                map[z] = static_cast<std::uint8_t>(img);
            }
            perms_.push_back(std::move(map));
        } while (std::next_permutation(perm.begin(), perm.end()));
        scratch_.resize(spaces_.empty() ? 1 : spaces_.back().classes + 1);
    }

    // Minimum cost on input set s (bit z set = input z present) with r rounds.
    std::uint64_t solve(std::uint64_t s, std::size_t r) {
        if (solved_directly(s)) return 0;
        if (r == 0) return kInf;
        const auto raw_key = key(s, r);
        if (auto it = raw_.find(raw_key); it != raw_.end()) return it->second;
        const auto canon_key = key(canonical(s), r);
        if (auto it = canon_.find(canon_key); it != canon_.end()) {
            raw_.emplace(raw_key, it->second);
            return it->second;
        }
        const auto best = search(s, r, kInf, 0, 1);
        canon_.emplace(canon_key, best);
        raw_.emplace(raw_key, best);
        return best;
    }

    // Best over subspaces i with i % stride == offset, pruned at `bound`.
    std::uint64_t search(std::uint64_t s, std::size_t r, std::uint64_t bound, std::size_t offset, std::size_t stride) {
        std::uint64_t best = bound;
        for (std::size_t i = offset; i < spaces_.size(); i += stride) {
            const auto& sp = spaces_[i];
            if (sp.dim >= best) break;
            const auto parts = partition(s, sp);
            if (parts.size() < 2) continue;
            std::uint64_t worst = 0;
            for (auto part : parts) {
                worst = std::max(worst, solve(part, r - 1));
                if (sp.dim + worst >= best) break;
            }
            best = std::min(best, sp.dim + worst);
        }
        return best;
    }

    std::uint64_t states() const { return canon_.size(); }

private:
    static std::uint64_t key(std::uint64_t s, std::size_t r) { return s * 8 + r; }

    bool solved_directly(std::uint64_t s) const {
        if (s == 0) return true;
        std::uint64_t common = (std::uint64_t{1} << n_) - 1;
        for (std::uint64_t rest = s; rest; rest &= rest - 1) common &= static_cast<std::uint64_t>(std::countr_zero(rest));
        return common != 0;
    }

    std::uint64_t canonical(std::uint64_t s) const {
        std::uint64_t best = s;
        for (const auto& map : perms_) {
            std::uint64_t img = 0;
            for (std::uint64_t rest = s; rest; rest &= rest - 1) img |= std::uint64_t{1} << map[std::countr_zero(rest)];
            best = std::min(best, img);
        }
        return best;
    }

    std::vector<std::uint64_t> partition(std::uint64_t s, const Subspace& sp) {
        std::vector<std::uint16_t> touched;
        for (std::uint64_t rest = s; rest; rest &= rest - 1) {
            const auto z = std::countr_zero(rest);
            const auto c = sp.code[static_cast<std::size_t>(z)];
            if (scratch_[c] == 0) touched.push_back(c);
            scratch_[c] |= std::uint64_t{1} << z;
        }
        std::vector<std::uint64_t> out;
        for (auto c : touched) {
            out.push_back(scratch_[c]);
            scratch_[c] = 0;
        }
        return out;
    }

    std::size_t n_;
    const std::vector<Subspace>& spaces_;
    std::vector<std::vector<std::uint8_t>> perms_;
    std::vector<std::uint64_t> scratch_;
    std::unordered_map<std::uint64_t, std::uint64_t> raw_;
    std::unordered_map<std::uint64_t, std::uint64_t> canon_;
};

}  // namespace

OracleResult brute_force_min_cost(const SearchProblem& p, const Ring& ring, std::size_t k, const OracleOptions& opt) {
    require(ring.is_modular() && (ring.modulus() == 2 || ring.modulus() == 3),
            "the oracle supports GF2 and Z3 only, got " + ring.to_string());
    const auto n = p.n();
    require(n >= 1, "the oracle needs n >= 1");
    if (n > opt.max_n || n > 5)
        throw CapExceeded("the oracle is limited to n <= " + std::to_string(std::min<std::size_t>(opt.max_n, 5)) +
                          ", got n = " + std::to_string(n));
    require(k <= 7, "the oracle supports at most 7 rounds");
    std::uint64_t s = 0;
    for (std::uint64_t z = 0; z < (std::uint64_t{1} << n); ++z) {
        BitVec v(n);
        for (std::size_t j = 0; j < n; ++j) v.set(j, z >> j & 1U);
        if (p.promise(v)) s |= std::uint64_t{1} << z;
    }
    const auto spaces = all_subspaces(n, ring.modulus());
    const std::uint64_t bound = opt.budget + 1;
    const unsigned threads = std::max(1U, opt.threads);
    std::vector<std::uint64_t> per(threads, kInf), states(threads, 0);
    detail::for_chunks(threads, threads, [&](unsigned, std::uint64_t b, std::uint64_t e) {
        for (auto t = b; t < e; ++t) {
            Oracle o(n, spaces);
            if (o.solve(s, 0) == 0) {
                per[t] = 0;
            } else if (k > 0) {
                per[t] = o.search(s, k, bound, t, threads);
            }
            states[t] = o.states();
        }
    });
    OracleResult res;
    const auto best = *std::min_element(per.begin(), per.end());
    res.states = std::accumulate(states.begin(), states.end(), std::uint64_t{0});
    if (best <= opt.budget) res.cost = best;
    return res;
}

// ---------------------------------------------------------------------------
// One-round protocols and full-input decoding

ProtocolTree one_round_protocol(const QueryMatrix& a) {
    const auto n = a.cols();
    require(n >= 1 && n <= 20, "one_round_protocol enumerates 2^n inputs and needs 1 <= n <= 20");
    std::map<Measurement, BitVec> common;
    Measurement m;
    for (std::uint64_t rank = 1; rank < (std::uint64_t{1} << n); ++rank) {
        const auto z = BitVec::from_lex_rank(n, rank);
        a.apply(z, m);
        auto [it, fresh] = common.try_emplace(m, z);
        if (!fresh) it->second &= z;
    }
    ProtocolTree out(a.ring(), n, 1);
    const auto root = out.add_internal(a);
    out.set_root(root);
    for (const auto& [key, bits] : common) {
        if (!bits.any())
            throw PreconditionError("measurement " + measurement_key(key) +
                                    " is produced by inputs with no common index, so A admits no 1-round protocol");
        out.add_child(root, key, out.add_leaf(bits.first_set() + 1));
    }
    out.check();
    return out;
}

Measurement full_measurement(const ProtocolTree& pi, const BitVec& z) {
    Measurement y;
    if (!pi.is_leaf(pi.root())) y = pi.internal(pi.root()).matrix.apply(z);
    y.push_back(static_cast<std::int64_t>(z.weight()));
    return y;
}

BitVec decode_full_input(const ProtocolTree& pi, const Measurement& y) {
    const auto n = pi.n();
    const bool leaf_root = pi.is_leaf(pi.root());
    if (!leaf_root && pi.depth() > 1) throw PreconditionError("decode_full_input needs a 1-round protocol");
    const std::size_t d = leaf_root ? 0 : pi.internal(pi.root()).matrix.rows();
    if (y.size() != d + 1)
        throw DimensionMismatch("measurement has " + std::to_string(y.size()) + " entries, expected " +
                                std::to_string(d + 1));
    auto weight = y.back();
    if (weight < 0 || static_cast<std::uint64_t>(weight) > n) throw PreconditionError("weight entry out of range");
    Measurement cur(y.begin(), y.end() - 1);
    BitVec z(n);
    while (weight > 0) {
        std::size_t i = 0;
        if (leaf_root) {
            i = std::get<Leaf>(pi.node(pi.root())).output;
        } else {
            const auto& root = pi.internal(pi.root());
            const auto child = root.child(cur);
            if (!child)
                throw MissingEdge("no edge for measurement (" + measurement_key(cur) + ") while peeling; the protocol is not correct for ElemX");
            if (!pi.is_leaf(*child)) throw PreconditionError("decode_full_input needs a 1-round protocol");
            i = std::get<Leaf>(pi.node(*child)).output;
            const auto& a = root.matrix;
            for (std::size_t r = 0; r < d; ++r) cur[r] = a.ring().add(cur[r], a.ring().neg(a.at(r, i - 1)));
        }
        if (z.get(i - 1))
            throw PreconditionError("protocol answered index " + std::to_string(i) +
                                    " twice while peeling; it is not correct for ElemX");
        z.set(i - 1);
        --weight;
    }
    if (std::any_of(cur.begin(), cur.end(), [](std::int64_t v) { return v != 0; }))
        throw PreconditionError("measurement is inconsistent with its weight entry");
    return z;
}

// ---------------------------------------------------------------------------
// KW game and numeric checks

KwResult kw_simulate(const ProtocolTree& pi, const BitVec& x, const BitVec& y) {
    require(pi.ring().kind() == RingKind::GF2, "kw_simulate needs a GF2 protocol");
    if (x.size() != pi.n() || y.size() != pi.n()) throw DimensionMismatch("X and Y must have length n");
    require(x.weight() % 2 == 0, "Alice's set must have even size");
    require(y.weight() % 2 == 1, "Bob's set must have odd size");
    KwResult res;
    NodeId v = pi.root();
    std::size_t prev = 0;
    while (!pi.is_leaf(v)) {
        const auto& in = pi.internal(v);
        const auto ax = in.matrix.apply(x);
        const auto ay = in.matrix.apply(y);
        Measurement r(ax.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = (ax[i] + ay[i]) % 2;
        const auto d = in.matrix.rows();
        ++res.rounds;
        res.bits += res.rounds == 1 ? d : prev + d;
        prev = d;
        const auto child = in.child(r);
        if (!child) throw MissingEdge("no edge for measurement (" + measurement_key(r) + ") at node " + std::to_string(v));
        v = *child;
    }
    res.index = std::get<Leaf>(pi.node(v)).output;
    return res;
}

bool check_tradeoff_inequality(double c, double d, double n, double k) {
    require(2 * c <= d && d >= 1 && n > 1 && k >= 1, "needs 2C <= D, D >= 1, n > 1 and k >= 1");
    const double root = std::pow(n, 1 / k);
    const double lhs = std::max(std::log(n) / c, k * (root / d - 1));
    const double rhs = k * (root - 1) / (d * (1 + c));
    return lhs >= rhs * (1 - 1e-12);
}

std::vector<TradeoffRow> tradeoff_table(const std::vector<std::uint64_t>& ns, const std::vector<std::uint64_t>& ks,
                                        const Ring& ring) {
    require(ring.is_modular(), "tradeoff_table supports GF2 and Zq");
    std::vector<TradeoffRow> rows;
    for (auto n : ns)
        for (auto k : ks) {
            TradeoffRow row;
            row.n = n;
            row.k = k;
            row.upper = det_plan_cost(n, k);
            BoundParams p;
            p.n = n;
            p.k = k;
            p.q = ring.modulus();
            row.lower = lb_value(ring.kind() == RingKind::GF2 ? Bound::Gf2KRound : Bound::ModqKRound, p).value;
            row.ratio = row.lower > 0 ? static_cast<double>(row.upper) / row.lower : (row.upper == 0 ? 1.0 : INFINITY);
            rows.push_back(row);
        }
    return rows;
}

std::string tradeoff_csv(const std::vector<TradeoffRow>& rows) {
    std::ostringstream os;
    os << "n,k,upper,lower,ratio\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%llu,%llu,%llu,%.6f,%.6f\n", static_cast<unsigned long long>(r.n),
                      static_cast<unsigned long long>(r.k), static_cast<unsigned long long>(r.upper), r.lower, r.ratio);
        os << buf;
    }
    return os.str();
}

}  // namespace lqp
