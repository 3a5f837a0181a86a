// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "lqp/det_protocol.hpp"
#include "lqp/errors.hpp"
#include "lqp/lab.hpp"
#include "lqp/rng.hpp"
#include "lqp/round_elim.hpp"
#include "lqp/sparse.hpp"
#include "lqp/zero_sum.hpp"

using namespace lqp;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Failure messages keep only the first few cases.
class Tally {
public:
    void fail(const std::string& what) {
        if (failures_++ < 3) first_ += (first_.empty() ? "" : "; ") + what;
    }
    void check(bool cond, const std::string& what) {
        ++checks_;
        if (!cond) fail(what);
    }
    Outcome done(const std::string& summary) const {
        if (failures_ == 0) return {true, summary};
        return {false, std::to_string(failures_) + " failures: " + first_};
    }

private:
    std::size_t checks_ = 0, failures_ = 0;
    std::string first_;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string num(std::size_t v) { return std::to_string(v); }

std::uint64_t oracle_cost(const SearchProblem& p, const Ring& ring, std::size_t k) {
    OracleOptions opt;
    opt.budget = 8;
    const auto r = brute_force_min_cost(p, ring, k, opt);
    return r.cost ? *r.cost : UINT64_MAX;
}

Outcome tight_powers_of_two() {
    Tally t;
    for (std::size_t k = 1; k <= 4; ++k) {
        const std::size_t n = std::size_t{1} << k;
        const auto pi = build_det_protocol(n, k, Ring::gf2());
        const auto p = SearchProblem::elemx_mod(n, 2);
        const auto rep = validate(pi, p);
        t.check(rep.ok, "n=" + num(n) + " invalid: " + rep.reason);
        t.check(cost_structural(pi) == k, "n=" + num(n) + " structural cost " + num(cost_structural(pi)));
        t.check(cost_exact(pi, p) == k, "n=" + num(n) + " exact cost " + num(cost_exact(pi, p)));
    }
    return t.done("cost == k at n = 2, 4, 8, 16");
}

Outcome upper_window() {
    Tally t;
    std::size_t validated = 0;
    for (std::size_t n = 2; n <= 64; ++n)
        for (std::size_t k = 1; k <= 6; ++k) {
            const auto c = det_plan_cost(n, k);
            const double kd = static_cast<double>(k);
            const double lo = kd * (std::pow(static_cast<double>(n), 1 / kd) - 1);
            const double hi = kd * static_cast<double>(int_kth_root_ceil(n, k) - 1);
            const auto where = "n=" + num(n) + " k=" + num(k);
            t.check(static_cast<double>(c) >= lo - 1e-9 && static_cast<double>(c) <= hi,
                    where + " cost " + num(c) + " outside [" + fmt("%.3f", lo) + ", " + fmt("%.0f", hi) + "]");
            if (n <= 20) {
                const auto pi = build_det_protocol(n, k, Ring::gf2());
                t.check(cost_structural(pi) == c, where + " tree cost differs from plan");
                const auto rep = validate(pi, SearchProblem::elemx_mod(n, 2), kDefaultEnumerationCap, 4);
                t.check(rep.ok, where + " invalid: " + rep.reason);
                ++validated;
            }
        }
    return t.done("63x6 cells in window, " + num(validated) + " trees validated exhaustively");
}

Outcome oracle_values() {
    Tally t;
    const auto gf2 = Ring::gf2();
    t.check(oracle_cost(SearchProblem::elemx_mod(4, 2), gf2, 1) == 3, "(4,1) != 3");
    t.check(oracle_cost(SearchProblem::elemx_mod(4, 2), gf2, 2) == 2, "(4,2) != 2");
    t.check(oracle_cost(SearchProblem::elemx_mod(2, 2), gf2, 1) == 1, "(2,1) != 1");
    for (std::size_t k = 1; k <= 4; ++k)
        t.check(oracle_cost(SearchProblem::elemx(3), gf2, k) == 2, "elemx n=3 k=" + num(k) + " != 2");
    return t.done("3 / 2 / 1, and 2 for elemx n=3 at k=1..4");
}

Outcome elimination_soundness() {
    Tally t;
    std::size_t runs = 0, vacuous = 0, too_small = 0;
    auto run = [&](std::size_t n, std::size_t k, const Ring& ring, const EliminationCase& c) {
        const auto pi = build_det_protocol(n, k, ring);
        if (pi.is_leaf(pi.root())) return;
        const auto where = ring.to_string() + " n=" + num(n) + " k=" + num(k) + " h=" + std::to_string(c.h);
        const double d = static_cast<double>(pi.internal(pi.root()).matrix.rows());
        const double nd = static_cast<double>(n);
        const double q = static_cast<double>(c.q);
        const double bound = c.kind == EliminationCase::Kind::GF2 ? std::ceil(nd / (d + 1))
                                                                 : nd / ((d + 1) * q * std::log(q)) - 1;
        try {
            const auto e = eliminate_round(pi, c);
            ++runs;
            std::string why;
            t.check(verify_shadowing(e.upsilon, pi, e.phi, &why), where + " shadowing: " + why);
            const auto rep = validate(e.upsilon, e.new_problem);
            t.check(rep.ok, where + " invalid: " + rep.reason);
            t.check(static_cast<double>(e.m) >= bound - 1e-9, where + " m=" + num(e.m) + " below bound");
            if (!e.notes.empty()) ++vacuous;
        } catch (const TooSmall&) {
            // Legitimate only when the guarantee does not promise a usable family.
            ++too_small;
            t.check(c.kind != EliminationCase::Kind::GF2 && bound < 1, where + " TooSmall although bound allows m >= 1");
        }
    };
    for (std::size_t n = 2; n <= 16; ++n)
        for (std::size_t k = 1; k <= 4; ++k) {
            run(n, k, Ring::gf2(), EliminationCase::gf2());
            run(n, k, Ring::mod_q(3), EliminationCase::modq(3, 1));
            run(n, k, Ring::mod_q(3), EliminationCase::modq(3, 2));
        }
    return t.done(num(runs) + " eliminations sound (" + num(vacuous) + " vacuous), " + num(too_small) +
                  " TooSmall where the bound gives m < 1");
}

Outcome zero_sum_contract() {
    Tally t;
    for (std::int64_t q = 2; q <= 6; ++q)
        for (std::size_t d = 1; d <= 2; ++d) {
            const auto len = zero_sum_guarantee_length(q, d);
            Rng rng(1000 + static_cast<std::uint64_t>(q) * 10 + d);
            for (int trial = 0; trial < 500; ++trial) {
                std::vector<Measurement> seq(len, Measurement(d));
                for (auto& g : seq)
                    for (auto& x : g) x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(q)));
                const auto w = group_zero_sum(seq, q);
                const auto where = "q=" + std::to_string(q) + " d=" + num(d);
                if (!w || w->empty()) {
                    t.fail(where + " returned none");
                    continue;
                }
                Measurement sum(d, 0);
                for (auto i : *w)
                    for (std::size_t j = 0; j < d; ++j) sum[j] = (sum[j] + seq[i][j]) % q;
                t.check(sum == Measurement(d, 0), where + " subset does not sum to zero");
            }
        }
    return t.done("5000 sequences, all witnesses re-sum to zero");
}

Outcome sparse_recovery() {
    Tally t;
    for (const Ring ring : {Ring::mod_q(5), Ring::bounded_int(8)})
        for (auto [n, s] : {std::pair<std::size_t, std::size_t>{8, 1}, {8, 2}, {12, 1}}) {
            const auto where = ring.to_string() + " n=" + num(n) + " s=" + num(s);
            const auto h = sparse_recovery_matrix(n, s, ring, 1);
            const double dom = static_cast<double>(ring.domain_size());
            const auto limit = static_cast<std::size_t>(
                std::ceil(2 * static_cast<double>(s) * std::log(3.0 * static_cast<double>(n)) / std::log(dom) - 1e-9));
            t.check(h.rows() <= limit, where + " rows " + num(h.rows()) + " > " + num(limit));
            const auto rows = h.to_rows();
            std::set<Measurement> seen;
            std::size_t count = 0;
            for_each_sparse(n, s, [&](const BitVec& z) {
                Measurement y;
                for (const auto& r : rows) {
                    std::int64_t v = 0;
                    for (std::size_t j = 0; j < n; ++j)
                        if (z.get(j)) v += r[j];
                    y.push_back(ring.is_modular() ? ((v % ring.modulus()) + ring.modulus()) % ring.modulus() : v);
                }
                seen.insert(y);
                ++count;
            });
            t.check(seen.size() == count, where + " not injective");
        }
    return t.done("6 matrices within the row budget and injective");
}

Outcome l0_sampler() {
    Tally t;
    std::string summary;
    for (const Ring ring : {Ring::mod_q(5), Ring::bounded_int(8)}) {
        std::size_t ok = 0, sparse_ok = 0;
        for (std::uint64_t seed = 1; seed <= 500; ++seed) {
            Rng rng(seed, 77);
            auto support = rng.sample_without_replacement(64, 13);
            std::sort(support.begin(), support.end());
            const auto z = BitVec::from_indices(64, support);
            const auto sk = build_l0_sampler(64, ring, seed);
            const auto r = run_l0(sk, z);
            ok += r && z.get(*r - 1);
            const std::size_t i = 1 + seed % 64;
            const auto e = BitVec::from_indices(64, std::vector<std::size_t>{i - 1});
            sparse_ok += run_l0(sk, e) == i;
        }
        const double rate = static_cast<double>(ok) / 500;
        t.check(rate >= 0.6, ring.to_string() + " success " + fmt("%.3f", rate));
        t.check(sparse_ok == 500, ring.to_string() + " 1-sparse " + num(sparse_ok) + "/500");
        summary += (summary.empty() ? "" : ", ") + ring.to_string() + " " + fmt("%.3f", rate) + " (1-sparse " +
                   num(sparse_ok) + "/500)";
    }
    return t.done(summary);
}

Outcome kw_conversion() {
    Tally t;
    std::size_t pairs = 0;
    for (std::size_t n : {2, 4, 6})
        for (std::size_t k = 1; k <= 3; ++k) {
            const auto pi = build_det_protocol(n, k, Ring::gf2());
            const auto cost = cost_structural(pi);
            for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
                const auto x = BitVec::from_lex_rank(n, a);
                if (x.weight() % 2) continue;
                for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
                    const auto y = BitVec::from_lex_rank(n, b);
                    if (y.weight() % 2 == 0) continue;
                    const auto r = kw_simulate(pi, x, y);
                    const auto where = "n=" + num(n) + " x=" + x.to_string() + " y=" + y.to_string();
                    t.check(r.index >= 1 && r.index <= n && x.get(r.index - 1) != y.get(r.index - 1),
                            where + " index " + num(r.index));
                    t.check(r.bits <= 2 * cost, where + " bits " + num(r.bits));
                    ++pairs;
                }
            }
        }
    return t.done(num(pairs) + " pairs separated within 2 cost bits");
}

Outcome decoder() {
    Tally t;
    std::size_t protocols = 0;
    Rng rng(5);
    auto exercise = [&](const ProtocolTree& pi, const std::string& where) {
        const auto n = pi.n();
        if (!validate(pi, SearchProblem::elemx(n)).ok) {
            t.fail(where + " is not a valid 1-round protocol");
            return;
        }
        ++protocols;
        for (int i = 0; i < 100; ++i) {
            BitVec z(n);
            for (std::size_t j = 0; j < n; ++j) z.set(j, rng.below(2));
            t.check(decode_full_input(pi, full_measurement(pi, z)) == z, where + " z=" + z.to_string());
        }
    };
    for (std::size_t n = 1; n <= 10; ++n)
        for (const Ring ring : {Ring::gf2(), Ring::mod_q(3), Ring::bounded_int(1)})
            exercise(build_det_protocol(n, 1, ring), ring.to_string() + " n=" + num(n));
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng.below(9), d = 1 + rng.below(n);
        std::vector<std::int64_t> e(d * n);
        for (auto& x : e) x = rng.between(-4, 4);
        try {
            exercise(one_round_protocol(QueryMatrix(Ring::bounded_int(4), d, n, e)), "random n=" + num(n));
        } catch (const PreconditionError&) {
        }
    }
    return t.done(num(protocols) + " protocols, 100 inputs each reconstructed");
}

Outcome inequality_grid() {
    Tally t;
    std::size_t points = 0;
    for (double c : {0.5, 1.0, 2.0})
        for (double mult : {1.0, 2.0}) {
            const double d = std::max(2 * c, 1.0) * mult;
            for (int e = 0; e <= 60; ++e) {
                const double n = std::pow(10.0, std::log10(2.0) + e * (6 - std::log10(2.0)) / 60);
                for (int k = 1; k <= 20; ++k) {
                    ++points;
                    t.check(check_tradeoff_inequality(c, d, n, k), "C=" + fmt("%g", c) + " D=" + fmt("%g", d) +
                                                                       " n=" + fmt("%g", n) + " k=" + std::to_string(k));
                }
            }
        }
    return t.done(num(points) + " grid points hold");
}

Outcome one_directional() {
    Tally t;
    auto bp = [](std::uint64_t n, std::uint64_t k, std::int64_t q, std::uint64_t m) {
        BoundParams p;
        p.n = n;
        p.k = k;
        p.q = q;
        p.m_bound = m;
        return p;
    };
    const auto z3 = Ring::mod_q(3);
    std::size_t oracle_checks = 0, upper_checks = 0;
    for (std::size_t n = 2; n <= 8; ++n) {
        for (std::size_t k = 1; k <= 3; ++k) {
            const double kr = lb_value(Bound::ModqKRound, bp(n, k, 3, 2)).value;
            const double el = lb_value(Bound::ModqElemx, bp(n, 1, 3, 2)).value;
            const auto where = "n=" + num(n) + " k=" + num(k);
            const double up = static_cast<double>(det_plan_cost(n, k));
            t.check(up >= kr, where + " upper below modq-kround");
            t.check(up >= el, where + " upper below modq-elemx");
            ++upper_checks;
            if (n <= 5) {
                const auto a = oracle_cost(SearchProblem::elemx_mod(n, 3), z3, k);
                const auto b = oracle_cost(SearchProblem::elemx(n), z3, k);
                t.check(static_cast<double>(a) >= kr, where + " oracle below modq-kround");
                t.check(static_cast<double>(b) >= el, where + " oracle below modq-elemx");
                t.check(static_cast<double>(b) >= kr, where + " elemx oracle below modq-kround");
                ++oracle_checks;
            }
        }
        for (std::uint64_t m = 2; m <= 9; ++m) {
            const auto where = "n=" + num(n) + " M=" + num(m);
            const double one = static_cast<double>(det_plan_cost(n, 1));
            t.check(one >= lb_value(Bound::IntOneRound, bp(n, 1, 2, m)).value, where + " int-1round");
            if (n % 4 == 0)
                t.check(one >= lb_value(Bound::IntQuarterOneRound, bp(n, 1, 2, m)).value, where + " int-quarter");
            t.check(static_cast<double>(det_plan_cost(n, 2)) >= lb_value(Bound::IntTwoRound, bp(n, 2, 2, m)).value,
                    where + " int-2round");
            ++upper_checks;
        }
    }
    return t.done(num(oracle_checks) + " oracle and " + num(upper_checks) + " known-upper comparisons");
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all = {
        {1, "tight tradeoff at powers of two", 5, tight_powers_of_two},
        {2, "upper-bound window", 120, upper_window},
        {3, "oracle values", 600, oracle_values},
        {4, "round-elimination soundness", 60, elimination_soundness},
        {5, "zero-sum contract", 10, zero_sum_contract},
        {6, "sparse recovery", 30, sparse_recovery},
        {7, "l0-sampler success", 30, l0_sampler},
        {8, "KW conversion", 30, kw_conversion},
        {9, "full-input decoder", 10, decoder},
        {10, "tradeoff inequality grid", 5, inequality_grid},
        {11, "one-directional bound checks", 60, one_directional},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.ok && secs > c.limit_s) o = {false, o.detail + "; took longer than " + fmt("%.0f", c.limit_s) + " s"};
        failed += !o.ok;
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
