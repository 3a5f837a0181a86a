#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lqp/bitvec.hpp"

namespace lqp {

inline constexpr unsigned kDefaultEnumerationCap = 24;

enum class ProblemKind {
    ElemX,             // |Z| > 0
    ElemXModQ,         // |Z| != 0 mod q
    ElemXModQResidue,  // |Z| == h mod q
    ElemXQuarter,      // |Z| == n/4
    AllInputs,         // every z; validity is the ElemX relation
};

// An element-extraction search problem: a promise on the input weight plus
// the relation "promise(z) implies z_i = 1". Output indices are 1-based.
class SearchProblem {
public:
    static SearchProblem elemx(std::size_t n) { return SearchProblem(ProblemKind::ElemX, n, 0, 0); }
    static SearchProblem elemx_mod(std::size_t n, std::int64_t q);
    static SearchProblem elemx_residue(std::size_t n, std::int64_t q, std::int64_t h);
    static SearchProblem elemx_quarter(std::size_t n);
    static SearchProblem all_inputs(std::size_t n) { return SearchProblem(ProblemKind::AllInputs, n, 0, 0); }

    ProblemKind kind() const { return kind_; }
    std::size_t n() const { return n_; }
    std::int64_t q() const { return q_; }
    std::int64_t h() const { return h_; }

    bool promise_weight(std::size_t w) const;
    bool promise(const BitVec& z) const { return promise_weight(z.weight()); }
    // i is 1-based; out-of-range outputs are never valid on promise inputs.
    bool valid(const BitVec& z, std::size_t i) const;

    // e.g. "elemx-res(q=3,h=2) n=9"
    std::string describe() const;

    friend bool operator==(const SearchProblem&, const SearchProblem&) = default;

private:
    SearchProblem(ProblemKind k, std::size_t n, std::int64_t q, std::int64_t h) : kind_(k), n_(n), q_(q), h_(h) {}

    ProblemKind kind_;
    std::size_t n_;
    std::int64_t q_;
    std::int64_t h_;
};

// Named constructor used by the CLI: kind is one of elemx, elemx-mod,
// elemx-res, elemx-quarter, all.
SearchProblem make_problem(const std::string& kind, std::size_t n, std::int64_t q = 0, std::int64_t h = 0);

// Calls fn on every promise input in lexicographic order (z_1 most
// significant) until fn returns false. Throws CapExceeded if n > cap.
void for_each_promise_input(const SearchProblem& p, const std::function<bool(const BitVec&)>& fn,
                            unsigned cap = kDefaultEnumerationCap);

std::vector<BitVec> enumerate_promise_inputs(const SearchProblem& p, unsigned cap = kDefaultEnumerationCap);

}  // namespace lqp
