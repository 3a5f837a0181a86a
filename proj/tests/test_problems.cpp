#include <doctest.h>

#include "lqp/errors.hpp"
#include "lqp/problems.hpp"

using namespace lqp;

namespace {

std::vector<std::string> as_strings(const std::vector<BitVec>& v) {
    std::vector<std::string> out;
    for (const auto& z : v) out.push_back(z.to_string());
    return out;
}

std::vector<SearchProblem> all_kinds(std::size_t n) {
    std::vector<SearchProblem> ps{SearchProblem::elemx(n), SearchProblem::all_inputs(n)};
    for (std::int64_t q = 2; q <= 5; ++q) {
        ps.push_back(SearchProblem::elemx_mod(n, q));
        for (std::int64_t h = 1; h < q; ++h) ps.push_back(SearchProblem::elemx_residue(n, q, h));
    }
    if (n % 4 == 0) ps.push_back(SearchProblem::elemx_quarter(n));
    return ps;
}

}  // namespace

TEST_SUITE("problems") {

TEST_CASE("make_problem examples") {
    const auto res = make_problem("elemx-res", 5, 2, 1);
    CHECK_FALSE(res.promise(BitVec::from_string("11000")));
    CHECK(make_problem("elemx", 3).valid(BitVec::from_string("000"), 2));
    const auto quarter = make_problem("elemx-quarter", 8);
    CHECK(quarter.promise(BitVec::from_string("11000000")));
    CHECK_FALSE(quarter.valid(BitVec::from_string("11000000"), 3));
    CHECK(quarter.valid(BitVec::from_string("11000000"), 2));
}

TEST_CASE("parameter checks") {
    CHECK_THROWS_AS(make_problem("elemx-res", 5, 3, 0), PreconditionError);
    CHECK_THROWS_AS(make_problem("elemx-res", 5, 3, 3), PreconditionError);
    CHECK_THROWS_AS(make_problem("elemx-quarter", 6), PreconditionError);
    CHECK_THROWS_AS(make_problem("elemx-mod", 6, 1), PreconditionError);
    CHECK_THROWS_AS(make_problem("frobnicate", 6), PreconditionError);
}

TEST_CASE("enumerate_promise_inputs examples") {
    CHECK(as_strings(enumerate_promise_inputs(SearchProblem::elemx_residue(2, 2, 1))) ==
          std::vector<std::string>{"01", "10"});
    CHECK(as_strings(enumerate_promise_inputs(SearchProblem::elemx(1))) == std::vector<std::string>{"1"});
    CHECK(as_strings(enumerate_promise_inputs(SearchProblem::elemx_quarter(4))) ==
          std::vector<std::string>{"0001", "0010", "0100", "1000"});
    CHECK_THROWS_AS(enumerate_promise_inputs(SearchProblem::elemx(25)), CapExceeded);
    CHECK_THROWS_AS(enumerate_promise_inputs(SearchProblem::elemx(10), 8), CapExceeded);
}

TEST_CASE("enumeration is lexicographic and complete") {
    const auto p = SearchProblem::elemx_mod(7, 3);
    const auto all = enumerate_promise_inputs(p);
    std::size_t expected = 0;
    for (std::uint64_t r = 0; r < 128; ++r) {
        std::size_t w = 0;
        for (int b = 0; b < 7; ++b) w += r >> b & 1U;
        if (w % 3 != 0) ++expected;
    }
    CHECK(all.size() == expected);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].to_string() < all[i].to_string());
}

TEST_CASE("vacuous truth off the promise") {
    for (std::size_t n = 1; n <= 12; ++n)
        for (const auto& p : all_kinds(n))
            for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
                const auto z = BitVec::from_lex_rank(n, r);
                if (p.promise(z) && z.any()) {
                    for (std::size_t i = 1; i <= n; ++i) REQUIRE(p.valid(z, i) == z.get(i - 1));
                } else {
                    for (std::size_t i = 1; i <= n; ++i) REQUIRE(p.valid(z, i));
                }
            }
}

TEST_CASE("residue promises refine the mod-q promise") {
    for (std::size_t n = 1; n <= 12; ++n)
        for (std::int64_t q = 2; q <= 5; ++q)
            for (std::int64_t h = 1; h < q; ++h) {
                const auto res = SearchProblem::elemx_residue(n, q, h);
                const auto mod = SearchProblem::elemx_mod(n, q);
                for (std::size_t w = 0; w <= n; ++w)
                    if (res.promise_weight(w)) REQUIRE(mod.promise_weight(w));
            }
}

}  // TEST_SUITE
