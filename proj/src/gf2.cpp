#include "lqp/gf2.hpp"

#include "lqp/errors.hpp"

namespace lqp {

void Gf2Eliminator::reduce(BitVec& v, BitVec& combo) const {
    for (const auto& r : rows_) {
        if (v.get(r.pivot)) {
            v ^= r.vec;
            combo ^= r.combo;
        }
    }
}

bool Gf2Eliminator::insert(const BitVec& v) {
    if (v.size() != dim_) throw DimensionMismatch("GF(2) vector has wrong dimension");
    BitVec w = v;
    BitVec combo(dim_);
    reduce(w, combo);
    const auto p = w.first_set();
    if (p == dim_) return false;
    combo.set(rows_.size());
    // Keep the basis fully reduced at the new pivot so later reductions stay
    // a single pass in insertion order.
    for (auto& r : rows_) {
        if (r.vec.get(p)) {
            r.vec ^= w;
            r.combo ^= combo;
        }
    }
    rows_.push_back(Row{p, std::move(w), std::move(combo)});
    return true;
}

bool Gf2Eliminator::in_span(const BitVec& v) const {
    if (v.size() != dim_) throw DimensionMismatch("GF(2) vector has wrong dimension");
    BitVec w = v;
    BitVec combo(dim_);
    reduce(w, combo);
    return !w.any();
}

std::optional<std::vector<std::size_t>> Gf2Eliminator::express(const BitVec& v) const {
    if (v.size() != dim_) throw DimensionMismatch("GF(2) vector has wrong dimension");
    BitVec w = v;
    BitVec combo(dim_);
    reduce(w, combo);
    if (w.any()) return std::nullopt;
    return combo.support();
}

std::optional<std::vector<std::size_t>> gf2_express_in_span(const std::vector<BitVec>& basis_cols,
                                                            const BitVec& target) {
    Gf2Eliminator elim(target.size());
    std::vector<std::size_t> accepted;
    for (std::size_t i = 0; i < basis_cols.size(); ++i) {
        if (basis_cols[i].size() != target.size())
            throw DimensionMismatch("gf2_express_in_span: vectors must share one dimension");
        if (elim.insert(basis_cols[i])) accepted.push_back(i);
    }
    auto ids = elim.express(target);
    if (!ids) return std::nullopt;
    std::vector<std::size_t> out;
    out.reserve(ids->size());
    for (auto id : *ids) out.push_back(accepted[id]);
    return out;
}

}  // namespace lqp
