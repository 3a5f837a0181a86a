#include "lqp/problems.hpp"

#include <sstream>

#include "lqp/errors.hpp"

namespace lqp {

SearchProblem SearchProblem::elemx_mod(std::size_t n, std::int64_t q) {
    if (q < 2) throw PreconditionError("elemx-mod requires q >= 2");
    return SearchProblem(ProblemKind::ElemXModQ, n, q, 0);
}

SearchProblem SearchProblem::elemx_residue(std::size_t n, std::int64_t q, std::int64_t h) {
    if (q < 2) throw PreconditionError("elemx-res requires q >= 2");
    if (h < 1 || h > q - 1) throw PreconditionError("elemx-res requires 1 <= h <= q-1");
    return SearchProblem(ProblemKind::ElemXModQResidue, n, q, h);
}

SearchProblem SearchProblem::elemx_quarter(std::size_t n) {
    if (n % 4 != 0) throw PreconditionError("elemx-quarter requires n divisible by 4");
    return SearchProblem(ProblemKind::ElemXQuarter, n, 0, 0);
}

bool SearchProblem::promise_weight(std::size_t w) const {
    switch (kind_) {
    case ProblemKind::ElemX: return w > 0;
    case ProblemKind::ElemXModQ: return static_cast<std::int64_t>(w) % q_ != 0;
    case ProblemKind::ElemXModQResidue: return static_cast<std::int64_t>(w) % q_ == h_;
    case ProblemKind::ElemXQuarter: return w == n_ / 4;
    case ProblemKind::AllInputs: return true;
    }
    return false;
}

bool SearchProblem::valid(const BitVec& z, std::size_t i) const {
    if (z.size() != n_) throw DimensionMismatch("input length does not match problem dimension");
    const auto w = z.weight();
    if (kind_ == ProblemKind::AllInputs) {
        if (w == 0) return true;
    } else if (!promise_weight(w)) {
        return true;
    }
    return i >= 1 && i <= n_ && z.get(i - 1);
}

std::string SearchProblem::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case ProblemKind::ElemX: os << "elemx"; break;
    case ProblemKind::ElemXModQ: os << "elemx-mod(q=" << q_ << ")"; break;
    case ProblemKind::ElemXModQResidue: os << "elemx-res(q=" << q_ << ",h=" << h_ << ")"; break;
    case ProblemKind::ElemXQuarter: os << "elemx-quarter"; break;
    case ProblemKind::AllInputs: os << "all"; break;
    }
    os << " n=" << n_;
    return os.str();
}

SearchProblem make_problem(const std::string& kind, std::size_t n, std::int64_t q, std::int64_t h) {
    if (kind == "elemx") return SearchProblem::elemx(n);
    if (kind == "elemx-mod") return SearchProblem::elemx_mod(n, q);
    if (kind == "elemx-res") return SearchProblem::elemx_residue(n, q, h);
    if (kind == "elemx-quarter") return SearchProblem::elemx_quarter(n);
    if (kind == "all") return SearchProblem::all_inputs(n);
    throw PreconditionError("unknown problem kind '" + kind + "'");
}

void for_each_promise_input(const SearchProblem& p, const std::function<bool(const BitVec&)>& fn, unsigned cap) {
    if (p.n() > cap || p.n() > 63)
        throw CapExceeded("enumeration of 2^" + std::to_string(p.n()) + " inputs exceeds cap n <= " +
                          std::to_string(cap));
    const std::uint64_t total = std::uint64_t{1} << p.n();
    for (std::uint64_t r = 0; r < total; ++r) {
        const auto z = BitVec::from_lex_rank(p.n(), r);
        if (!p.promise(z)) continue;
        if (!fn(z)) return;
    }
}

std::vector<BitVec> enumerate_promise_inputs(const SearchProblem& p, unsigned cap) {
    std::vector<BitVec> out;
    for_each_promise_input(p, [&](const BitVec& z) {
        out.push_back(z);
        return true;
    }, cap);
    return out;
}

}  // namespace lqp
