#include "lqp/zero_sum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqp/errors.hpp"

namespace lqp {

ZqGroup::ZqGroup(std::int64_t q, std::size_t d) : q_(q), d_(d) {
    if (q < 2) throw PreconditionError("Zq^d requires q >= 2");
    std::uint64_t order = 1;
    for (std::size_t i = 0; i < d; ++i) {
        if (order > std::numeric_limits<std::uint64_t>::max() / 2 / static_cast<std::uint64_t>(q))
            throw CapExceeded("group Zq^d too large to encode");
        order *= static_cast<std::uint64_t>(q);
    }
}

std::uint64_t ZqGroup::encode(const Measurement& g) const {
    if (g.size() != d_) throw DimensionMismatch("group element has wrong dimension");
    std::uint64_t code = 0;
    for (std::size_t i = d_; i-- > 0;) {
        std::int64_t r = g[i] % q_;
        if (r < 0) r += q_;
        code = code * static_cast<std::uint64_t>(q_) + static_cast<std::uint64_t>(r);
    }
    return code;
}

Measurement ZqGroup::decode(std::uint64_t code) const {
    Measurement g(d_);
    for (std::size_t i = 0; i < d_; ++i) {
        g[i] = static_cast<std::int64_t>(code % static_cast<std::uint64_t>(q_));
        code /= static_cast<std::uint64_t>(q_);
    }
    return g;
}

std::uint64_t ZqGroup::add(std::uint64_t a, std::uint64_t b) const {
    const auto uq = static_cast<std::uint64_t>(q_);
    std::uint64_t out = 0, scale = 1;
    for (std::size_t i = 0; i < d_; ++i) {
        out += ((a % uq + b % uq) % uq) * scale;
        a /= uq;
        b /= uq;
        scale *= uq;
    }
    return out;
}

std::uint64_t ZqGroup::neg(std::uint64_t a) const {
    const auto uq = static_cast<std::uint64_t>(q_);
    std::uint64_t out = 0, scale = 1;
    for (std::size_t i = 0; i < d_; ++i) {
        out += ((uq - a % uq) % uq) * scale;
        a /= uq;
        scale *= uq;
    }
    return out;
}

void SubsetSumTable::push(const Measurement& g) {
    const auto code = group_.encode(g);
    const auto pos = static_cast<std::uint32_t>(length_);
    std::vector<std::pair<std::uint64_t, Entry>> fresh;
    if (!table_.contains(code)) fresh.push_back({code, Entry{pos, false, 0}});
    for (const auto& [sum, entry] : table_) {
        const auto s = group_.add(sum, code);
        if (!table_.contains(s)) fresh.push_back({s, Entry{pos, true, sum}});
    }
    // First witness wins, also among sums discovered at this step.
    for (auto& [s, e] : fresh) table_.emplace(s, e);
    ++length_;
}

bool SubsetSumTable::would_create_zero_sum(const Measurement& g) const {
    const auto code = group_.encode(g);
    return code == 0 || table_.contains(group_.neg(code));
}

std::optional<std::vector<std::size_t>> SubsetSumTable::witness(const Measurement& g) const {
    auto it = table_.find(group_.encode(g));
    if (it == table_.end()) return std::nullopt;
    std::vector<std::size_t> out;
    while (true) {
        out.push_back(it->second.last);
        if (!it->second.has_prev) break;
        it = table_.find(it->second.prev);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::vector<std::size_t>> group_zero_sum(const std::vector<Measurement>& seq, std::int64_t q) {
    if (seq.empty()) throw PreconditionError("group_zero_sum requires a nonempty sequence");
    const auto d = seq.front().size();
    SubsetSumTable table(q, d);
    const Measurement zero(d, 0);
    for (const auto& g : seq) {
        if (g.size() != d) throw DimensionMismatch("group_zero_sum: elements must share one group Zq^d");
        table.push(g);
        if (table.contains(zero)) return table.witness(zero);
    }
    return std::nullopt;
}

std::size_t zero_sum_guarantee_length(std::int64_t q, std::size_t d) {
    const double qd = static_cast<double>(q);
    const double len = qd * (1.0 + (d == 0 ? 0.0 : static_cast<double>(d - 1) * std::log(qd)));
    return static_cast<std::size_t>(std::ceil(len - 1e-9));
}

}  // namespace lqp
