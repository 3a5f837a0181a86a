#include <doctest.h>

#include <random>

#include "lqp/det_protocol.hpp"
#include "lqp/errors.hpp"
#include "lqp/round_elim.hpp"

using namespace lqp;

namespace {

// Owner of a 0-based coordinate by scanning the sets; 0 when unowned.
std::size_t owner_of(const UniformFamily& fam, std::size_t j) {
    for (std::size_t i = 0; i < fam.sets.size(); ++i)
        for (auto x : fam.sets[i])
            if (x == j) return i + 1;
    return 0;
}

BitVec lift_naive(const UniformFamily& fam, const BitVec& w) {
    BitVec z(fam.n);
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w.get(i))
            for (auto j : fam.sets[i]) z.set(j);
    return z;
}

// Lemma-level correctness of the lift: exhaustive over w in {0,1}^m.
void check_lift_correctness(const ProtocolTree& pi, const SearchProblem& source, const Elimination& e) {
    REQUIRE(e.m <= 12);
    const auto& a = pi.internal(pi.root()).matrix;
    std::size_t checked = 0;
    for (std::uint64_t rank = 0; rank < (std::uint64_t{1} << e.m); ++rank) {
        const auto w = BitVec::from_lex_rank(e.m, rank);
        const auto z = lift_naive(e.fam, w);
        if (!source.promise(z) || a.apply(z) != e.r) continue;
        const auto big = execute(pi, z).output;
        const auto small = execute(e.upsilon, w).output;
        const auto own = owner_of(e.fam, big - 1);
        CHECK(small == (own ? own : 1));
        ++checked;
    }
    bool any = false;
    for (std::size_t wt = 1; wt <= e.m; ++wt) any = any || e.new_problem.promise_weight(wt);
    CHECK(any == (checked > 0));
}

void check_elimination(const ProtocolTree& pi, const Elimination& e) {
    std::string why;
    CHECK_MESSAGE(verify_shadowing(e.upsilon, pi, e.phi, &why), why);
    CHECK(e.upsilon.rounds() + 1 == pi.rounds());
    CHECK(e.upsilon.n() == e.m);
    const auto rep = validate(e.upsilon, e.new_problem);
    CHECK_MESSAGE(rep.ok, rep.reason);
}

}  // namespace

TEST_SUITE("round_elim") {

TEST_CASE("lift examples") {
    UniformFamily fam;
    fam.n = 3;
    fam.ring = Ring::gf2();
    fam.sets = {{0, 1}, {2}};
    auto leaf2 = ProtocolTree::leaf_only(Ring::gf2(), 3, 2);
    CHECK(std::get<Leaf>(lift_protocol(leaf2, fam).node(0)).output == 1);
    UniformFamily fam4 = fam;
    fam4.n = 4;
    auto leaf4 = ProtocolTree::leaf_only(Ring::gf2(), 4, 4);
    CHECK(std::get<Leaf>(lift_protocol(leaf4, fam4).node(0)).output == 1);
    auto leaf3 = ProtocolTree::leaf_only(Ring::gf2(), 3, 3);
    CHECK(std::get<Leaf>(lift_protocol(leaf3, fam).node(0)).output == 2);
    CHECK_THROWS_AS(lift_protocol(leaf4, fam), DimensionMismatch);

    ProtocolTree pi(Ring::gf2(), 3, 1);
    const auto root = pi.add_internal(QueryMatrix::from_rows(Ring::gf2(), 3, {{1, 1, 1}}));
    pi.add_child(root, {0}, pi.add_leaf(1));
    pi.add_child(root, {1}, pi.add_leaf(3));
    pi.set_root(root);
    const auto lifted = lift_protocol(pi, fam);
    CHECK(lifted.internal(lifted.root()).matrix.to_rows() == std::vector<std::vector<std::int64_t>>{{0, 1}});

    const auto sh = shadow(pi, {1});
    CHECK(sh.tree.rounds() == 0);
    CHECK(sh.tree.is_leaf(sh.tree.root()));
    CHECK(std::get<Leaf>(sh.tree.node(sh.tree.root())).output == 3);
    CHECK_THROWS_AS(shadow(pi, {2}), NoSuchEdge);
}

TEST_CASE("integer lifting drops unreachable edges") {
    ProtocolTree pi(Ring::bounded_int(1), 3, 1);
    const auto root = pi.add_internal(QueryMatrix::from_rows(Ring::bounded_int(1), 3, {{1, 1, 1}}));
    for (std::int64_t v = 0; v <= 3; ++v) pi.add_child(root, {v}, pi.add_leaf(1));
    pi.set_root(root);
    UniformFamily fam;
    fam.n = 3;
    fam.ring = Ring::bounded_int(1);
    fam.sets = {{0}, {1}};
    Homomorphism phi;
    const auto lifted = lift_protocol(pi, fam, &phi);
    CHECK(lifted.internal(lifted.root()).children.size() == 3);
    CHECK(lifted.size() == 4);
    CHECK(phi.size() == 4);
}

TEST_CASE("verify_shadowing rejects bad maps") {
    const auto pi = build_det_protocol(8, 3, Ring::gf2());
    Homomorphism id(pi.size());
    for (NodeId v = 0; v < pi.size(); ++v) id[v] = v;
    std::string why;
    CHECK_FALSE(verify_shadowing(pi, pi, id, &why));
    CHECK(why.find("root") != std::string::npos);

    const auto child = pi.internal(pi.root()).children.front().second;
    auto [sub, phi] = extract_subtree(pi, child, pi.rounds() - 1);
    CHECK(verify_shadowing(sub, pi, phi));
    if (phi.size() > 1) {
        auto collapsed = phi;
        collapsed[1] = collapsed[0];
        CHECK_FALSE(verify_shadowing(sub, pi, collapsed));
    }
}

TEST_CASE("gf2 elimination of the interval-splitting tree") {
    const auto pi = build_det_protocol(8, 3, Ring::gf2());
    const auto e = eliminate_round(pi, EliminationCase::gf2());
    CHECK(e.upsilon.rounds() == 2);
    CHECK(e.m >= 4);
    CHECK(e.new_problem == SearchProblem::elemx_residue(e.m, 2, 1));
    check_elimination(pi, e);
    check_lift_correctness(pi, SearchProblem::elemx_residue(8, 2, 1), e);
}

TEST_CASE("gf2 chains down to zero rounds") {
    for (std::size_t n : {8, 12, 16}) {
        for (std::size_t k : {2, 3}) {
            auto pi = build_det_protocol(n, k, Ring::gf2());
            auto source = SearchProblem::elemx_residue(n, 2, 1);
            while (pi.rounds() > 0 && !pi.is_leaf(pi.root())) {
                const auto d = pi.internal(pi.root()).matrix.rows();
                const auto e = eliminate_round(pi, EliminationCase::gf2());
                CHECK(e.m >= (pi.n() + d) / (d + 1));
                check_elimination(pi, e);
                if (e.m <= 12) check_lift_correctness(pi, source, e);
                pi = e.upsilon;
                source = e.new_problem;
            }
        }
    }
}

TEST_CASE("modq elimination") {
    const auto pi = build_det_protocol(9, 2, Ring::mod_q(3));
    const auto e = eliminate_round(pi, EliminationCase::modq(3, 1));
    CHECK(e.upsilon.rounds() == 1);
    CHECK(e.new_problem == SearchProblem::elemx_residue(e.m, 3, 2));
    // Two buckets, so m = 1 and weight 2 mod 3 is unreachable: vacuous.
    CHECK(e.m == 1);
    CHECK(e.notes.size() == 1);
    check_elimination(pi, e);
    check_lift_correctness(pi, SearchProblem::elemx_residue(9, 3, 1), e);

    // Residue bookkeeping on random w: |Lw| = -|W| and A L w = |W| x.
    std::mt19937_64 g(3);
    const auto& a = pi.internal(pi.root()).matrix;
    for (int trial = 0; trial < 200; ++trial) {
        BitVec w(e.m);
        for (std::size_t i = 0; i < e.m; ++i) w.set(i, g() & 1U);
        const auto z = lift_naive(e.fam, w);
        CHECK((z.weight() + w.weight()) % 3 == 0);
        const auto y = a.apply(z);
        for (std::size_t i = 0; i < y.size(); ++i)
            CHECK(y[i] == static_cast<std::int64_t>(w.weight() * e.fam.common[i] % 3));
    }
}

TEST_CASE("modq chains alternate the residue") {
    for (std::int64_t q : {3, 5}) {
        auto pi = build_det_protocol(40, 3, Ring::mod_q(q));
        std::int64_t h = 1;
        while (pi.rounds() > 0 && !pi.is_leaf(pi.root())) {
            std::optional<Elimination> res;
            try {
                res = eliminate_round(pi, EliminationCase::modq(q, h));
            } catch (const TooSmall&) {
                break;
            }
            const auto& e = *res;
            CHECK(e.new_problem.h() == (q - h) % q);
            const double d = static_cast<double>(pi.internal(pi.root()).matrix.rows());
            CHECK(static_cast<double>(e.m) >= static_cast<double>(pi.n()) / ((d + 1) * q * std::log(q)) - 1);
            check_elimination(pi, e);
            pi = e.upsilon;
            h = e.new_problem.h();
        }
    }
}

TEST_CASE("modq with a single bucket is too small") {
    ProtocolTree pi(Ring::mod_q(3), 2, 1);
    const auto root = pi.add_internal(QueryMatrix(Ring::mod_q(3), 0, 2));
    pi.add_child(root, {}, pi.add_leaf(1));
    pi.set_root(root);
    CHECK_THROWS_AS(eliminate_round(pi, EliminationCase::modq(3, 1)), TooSmall);
}

TEST_CASE("quarter prime") {
    CHECK(quarter_prime(40) == 7U);
    CHECK(quarter_prime(12) == 3U);
    CHECK(quarter_prime(9) == 2U);
    CHECK_FALSE(quarter_prime(7).has_value());
    // Oracle: brute force over the window.
    for (std::uint64_t mp = 8; mp < 2000; ++mp) {
        std::uint64_t best = 0;
        for (std::uint64_t p = 2; 4 * p <= mp; ++p) {
            if (8 * p <= mp) continue;
            bool prime = true;
            for (std::uint64_t f = 2; f < p; ++f) prime = prime && p % f != 0;
            if (prime) best = p;
        }
        REQUIRE(best > 0);
        CHECK(quarter_prime(mp) == best);
    }
}

TEST_CASE("integer elimination of probe-then-read") {
    const auto probe = QueryMatrix::from_rows(Ring::bounded_int(1), 12, {std::vector<std::int64_t>(12, 1)});
    const auto pi = probe_then_read(probe);
    CHECK(validate(pi, SearchProblem::elemx(12)).ok);
    CHECK(cost_structural(pi) == 12);

    const auto e = eliminate_round(pi, EliminationCase::integer());
    CHECK(e.family_size == 9);
    CHECK(e.fam.core.size() == 3);
    CHECK(e.prime == 2U);
    CHECK(e.m == 8);
    CHECK(e.new_problem == SearchProblem::elemx_quarter(8));
    check_elimination(pi, e);
    CHECK(m_bound(e.upsilon) <= m_bound(pi));
    check_lift_correctness(pi, SearchProblem::elemx(12), e);

    const auto e1 = eliminate_round(pi, EliminationCase::integer(0, 1));
    CHECK(e1.family_size == 12);
    CHECK(e1.m == 12);
    check_elimination(pi, e1);
    check_lift_correctness(pi, SearchProblem::elemx(12), e1);
}

TEST_CASE("case parsing") {
    CHECK(EliminationCase::parse("gf2").kind == EliminationCase::Kind::GF2);
    const auto m = EliminationCase::parse("modq:5:2");
    CHECK(m.q == 5);
    CHECK(m.h == 2);
    CHECK(EliminationCase::parse("int:7").m_bound == 7U);
    CHECK(EliminationCase::parse("int").m_bound == 0U);
    CHECK_THROWS_AS(EliminationCase::parse("modq:5"), PreconditionError);
    CHECK_THROWS_AS(EliminationCase::parse("int:x"), PreconditionError);
}

}  // TEST_SUITE
