#include "lqp/det_protocol.hpp"

#include <algorithm>
#include <map>

#include "lqp/errors.hpp"

namespace lqp {

std::vector<std::uint64_t> division_sequence(std::uint64_t n, std::uint64_t k) {
    if (n < 1 || k < 1) throw PreconditionError("division_sequence requires n >= 1 and k >= 1");
    std::vector<std::uint64_t> ds;
    if (n == 1) return ds;
    const auto d = int_kth_root_ceil(n, k) - 1;
    std::uint64_t x = n;
    while (x > 1) {
        x = (x + d) / (d + 1);
        ds.push_back(d);
    }
    if (ds.size() > k || !is_division_sequence(n, ds))
        throw PreconditionError("internal: division sequence construction failed");
    return ds;
}

bool is_division_sequence(std::uint64_t n, const std::vector<std::uint64_t>& ds) {
    std::uint64_t x = n;
    for (auto d : ds) {
        if (d == 0) return false;
        x = (x + d) / (d + 1);
    }
    return x == 1;
}

std::vector<std::pair<std::size_t, std::size_t>> split_interval(std::size_t u, std::size_t v, std::uint64_t d) {
    const std::size_t len = v - u + 1;
    const std::size_t c = (len + d) / (d + 1);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = u; a <= v; a += c) out.emplace_back(a, std::min(v, a + c - 1));
    return out;
}

namespace {

std::uint64_t values_of(const Ring& ring, std::size_t len) {
    switch (ring.kind()) {
    case RingKind::GF2: return 2;
    case RingKind::ModQ: return std::min<std::uint64_t>(len, static_cast<std::uint64_t>(ring.modulus()) - 1) + 1;
    case RingKind::BoundedInt: return len + 1;
    }
    return 0;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    return __builtin_add_overflow(a, b, &r) ? UINT64_MAX : r;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    return __builtin_mul_overflow(a, b, &r) ? UINT64_MAX : r;
}

struct Plan {
    std::vector<std::uint64_t> ds;
    Ring ring;

    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> count_memo;
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> cost_memo;

    std::uint64_t count(std::size_t len, std::size_t r) {
        if (len <= 1) return 1;
        auto key = std::make_pair(len, r);
        if (auto it = count_memo.find(key); it != count_memo.end()) return it->second;
        const auto chunks = split_interval(1, len, ds.at(r));
        const std::size_t rows = chunks.size() - 1;
        std::vector<std::uint64_t> vals(rows);
        for (std::size_t i = 0; i < rows; ++i) vals[i] = values_of(ring, chunks[i].second - chunks[i].first + 1);
        // suffix[i] = product of value counts of rows i..end
        std::vector<std::uint64_t> suffix(rows + 1, 1);
        for (std::size_t i = rows; i-- > 0;) suffix[i] = sat_mul(suffix[i + 1], vals[i]);
        std::uint64_t total = 1;
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            const auto ways = i < rows ? sat_mul(vals[i] - 1, suffix[i + 1]) : 1;
            const auto sub = count(chunks[i].second - chunks[i].first + 1, r + 1);
            total = sat_add(total, sat_mul(ways, sub));
        }
        count_memo[key] = total;
        return total;
    }

    std::uint64_t cost(std::size_t len, std::size_t r) {
        if (len <= 1) return 0;
        auto key = std::make_pair(len, r);
        if (auto it = cost_memo.find(key); it != cost_memo.end()) return it->second;
        const auto chunks = split_interval(1, len, ds.at(r));
        std::uint64_t best = 0;
        for (const auto& [a, b] : chunks) best = std::max(best, cost(b - a + 1, r + 1));
        const auto total = chunks.size() - 1 + best;
        cost_memo[key] = total;
        return total;
    }
};

class DetBuilder {
public:
    DetBuilder(std::vector<std::uint64_t> ds, ProtocolTree& out) : ds_(std::move(ds)), out_(out) {}

    NodeId build(std::size_t u, std::size_t v, std::size_t r) {
        if (u == v) return out_.add_leaf(u);
        const auto chunks = split_interval(u, v, ds_.at(r));
        const std::size_t rows = chunks.size() - 1;
        const std::size_t n = out_.n();
        std::vector<std::int64_t> entries(rows * n, 0);
        std::vector<std::int64_t> hi(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            for (auto j = chunks[i].first; j <= chunks[i].second; ++j) entries[i * n + (j - 1)] = 1;
            hi[i] = static_cast<std::int64_t>(values_of(out_.ring(), chunks[i].second - chunks[i].first + 1)) - 1;
        }
        const auto self = out_.add_internal(QueryMatrix(out_.ring(), rows, n, std::move(entries)));
        Measurement m(rows, 0);
        while (true) {
            std::size_t target = rows;
            for (std::size_t i = 0; i < rows; ++i)
                if (m[i] != 0) {
                    target = i;
                    break;
                }
            const auto child = build(chunks[target].first, chunks[target].second, r + 1);
            out_.add_child(self, m, child);
            std::size_t i = rows;
            while (i > 0 && m[i - 1] == hi[i - 1]) m[--i] = 0;
            if (i == 0) break;
            ++m[i - 1];
        }
        return self;
    }

private:
    std::vector<std::uint64_t> ds_;
    ProtocolTree& out_;
};

}  // namespace

std::uint64_t det_node_count(std::size_t n, std::size_t k, const Ring& ring) {
    Plan plan{division_sequence(n, k), ring, {}, {}};
    return plan.count(n, 0);
}

std::uint64_t det_plan_cost(std::size_t n, std::size_t k) {
    Plan plan{division_sequence(n, k), Ring::gf2(), {}, {}};
    return plan.cost(n, 0);
}

ProtocolTree build_det_protocol(std::size_t n, std::size_t k, const Ring& ring, std::size_t max_nodes) {
    const auto ds = division_sequence(n, k);
    const auto nodes = det_node_count(n, k, ring);
    if (nodes > max_nodes)
        throw CapExceeded("interval-splitting tree for n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                          " over " + ring.to_string() + " has " +
                          (nodes == UINT64_MAX ? std::string("more than 2^64") : std::to_string(nodes)) +
                          " nodes, above the cap of " + std::to_string(max_nodes));
    ProtocolTree out(ring, n, k);
    DetBuilder b(ds, out);
    out.set_root(b.build(1, n, 0));
    out.check();
    return out;
}

DetRun det_run(std::size_t n, std::size_t k, const Ring& ring, const BitVec& z) {
    if (z.size() != n) throw DimensionMismatch("input length does not match n");
    const auto ds = division_sequence(n, k);
    DetRun run;
    std::size_t u = 1, v = n;
    for (std::size_t r = 0; u < v; ++r) {
        run.intervals.emplace_back(u, v);
        const auto chunks = split_interval(u, v, ds.at(r));
        const std::size_t rows = chunks.size() - 1;
        run.cost += rows;
        std::size_t target = rows;
        for (std::size_t i = 0; i < rows; ++i) {
            std::int64_t w = 0;
            for (auto j = chunks[i].first; j <= chunks[i].second; ++j) w += z.get(j - 1);
            if (ring.is_modular()) w %= ring.modulus();
            if (w != 0) {
                target = i;
                break;
            }
        }
        u = chunks[target].first;
        v = chunks[target].second;
    }
    run.intervals.emplace_back(u, v);
    run.output = u;
    return run;
}

}  // namespace lqp
