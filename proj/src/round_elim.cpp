#include "lqp/round_elim.hpp"

#include <algorithm>
#include <set>

#include "lqp/det_protocol.hpp"
#include "lqp/errors.hpp"

namespace lqp {

namespace {

bool label_attainable(const QueryMatrix& a, const Measurement& key) {
    if (a.ring().is_modular()) return true;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::int64_t lo = 0, hi = 0;
        for (auto x : a.row(i)) (x > 0 ? hi : lo) += x;
        if (key[i] < lo || key[i] > hi) return false;
    }
    return true;
}

class Lifter {
public:
    Lifter(const ProtocolTree& pi, const LiftingMatrix& l, ProtocolTree& out, Homomorphism& phi)
        : pi_(pi), l_(l), out_(out), phi_(phi) {}

    NodeId lift(NodeId v) {
        if (pi_.is_leaf(v)) {
            const auto o = std::get<Leaf>(pi_.node(v)).output;
            const auto owner = l_.owner(o - 1);
            phi_.push_back(v);
            return out_.add_leaf(owner ? *owner + 1 : 1);
        }
        const auto& in = pi_.internal(v);
        auto a = l_.right_multiply(in.matrix);
        std::vector<std::pair<const Measurement*, NodeId>> kids;
        for (const auto& [key, c] : in.children)
            if (label_attainable(a, key)) kids.emplace_back(&key, c);
        const auto self = out_.add_internal(std::move(a));
        phi_.push_back(v);
        for (const auto& [key, c] : kids) {
            const auto child = lift(c);
            out_.add_child(self, *key, child);
        }
        return self;
    }

private:
    const ProtocolTree& pi_;
    const LiftingMatrix& l_;
    ProtocolTree& out_;
    Homomorphism& phi_;
};

bool has_promise_input(const SearchProblem& p) {
    for (std::size_t w = 1; w <= p.n(); ++w)
        if (p.promise_weight(w)) return true;
    return false;
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    double r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

std::int64_t parse_int(const std::string& s, const std::string& whole) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw PreconditionError("bad elimination case '" + whole + "'");
    }
}

}  // namespace

ProtocolTree lift_protocol(const ProtocolTree& pi, const UniformFamily& fam, Homomorphism* phi) {
    if (fam.n != pi.n())
        throw DimensionMismatch("family lives on n = " + std::to_string(fam.n) + ", protocol on n = " +
                                std::to_string(pi.n()));
    if (fam.m() == 0) throw PreconditionError("cannot lift through an empty family");
    LiftingMatrix l(fam);
    ProtocolTree out(l.product_ring(pi.ring()), l.m(), pi.rounds());
    Homomorphism map;
    Lifter lifter(pi, l, out, map);
    out.set_root(lifter.lift(pi.root()));
    out.check();
    if (phi) *phi = std::move(map);
    return out;
}

ProtocolTree lift_protocol(const ProtocolTree& pi, const UniformFamily& fam) { return lift_protocol(pi, fam, nullptr); }

Shadow shadow(const ProtocolTree& lifted, const Measurement& r) {
    if (lifted.is_leaf(lifted.root())) throw NoSuchEdge("the root is a leaf, so it has no edge " + measurement_key(r));
    if (lifted.rounds() == 0) throw PreconditionError("cannot shadow a 0-round protocol");
    const auto child = lifted.internal(lifted.root()).child(r);
    if (!child) throw NoSuchEdge("no root edge labelled " + measurement_key(r));
    auto [tree, phi] = extract_subtree(lifted, *child, lifted.rounds() - 1);
    return Shadow{std::move(tree), std::move(phi)};
}

bool verify_shadowing(const ProtocolTree& upsilon, const ProtocolTree& pi, const Homomorphism& phi,
                      std::string* reason) {
    auto fail = [&](const std::string& why) {
        if (reason) *reason = why;
        return false;
    };
    if (phi.size() != upsilon.size()) return fail("map is not total on the shadowing tree");
    for (auto x : phi)
        if (x >= pi.size()) return fail("map leaves the shadowed tree");
    std::vector<bool> hit(pi.size(), false);
    for (NodeId v = 0; v < upsilon.size(); ++v) {
        const auto img = phi[v];
        if (upsilon.is_leaf(v)) {
            if (!pi.is_leaf(img)) return fail("leaf " + std::to_string(v) + " maps to an internal node");
        } else {
            if (pi.is_leaf(img)) return fail("internal node " + std::to_string(v) + " maps to a leaf");
            const auto& kids = pi.internal(img).children;
            for (const auto& [key, c] : upsilon.internal(v).children) {
                const bool ok = std::any_of(kids.begin(), kids.end(), [&](const auto& e) { return e.second == phi[c]; });
                if (!ok) return fail("child " + std::to_string(c) + " of " + std::to_string(v) + " is not mapped to a child");
            }
        }
        if (hit[img]) return fail("map is not injective at node " + std::to_string(img));
        hit[img] = true;
        if (upsilon.node_cost(v) != pi.node_cost(img))
            return fail("node " + std::to_string(v) + " costs " + std::to_string(upsilon.node_cost(v)) + " but its image costs " +
                        std::to_string(pi.node_cost(img)));
    }
    if (pi.is_leaf(pi.root())) return fail("shadowed root is a leaf");
    const auto& top = pi.internal(pi.root()).children;
    const auto root_img = phi[upsilon.root()];
    if (!std::any_of(top.begin(), top.end(), [&](const auto& e) { return e.second == root_img; }))
        return fail("root is not mapped to a child of the shadowed root");
    if (reason) reason->clear();
    return true;
}

EliminationCase EliminationCase::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(':', start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (parts[0] == "gf2" && parts.size() == 1) return gf2();
    if (parts[0] == "modq" && parts.size() == 3) {
        const auto q = parse_int(parts[1], text);
        if (q < 2) throw PreconditionError("modulus must be at least 2 in '" + text + "'");
        return modq(q, parse_int(parts[2], text));
    }
    if (parts[0] == "int" && parts.size() <= 2) {
        if (parts.size() == 1) return integer();
        const auto m = parse_int(parts[1], text);
        if (m < 1) throw PreconditionError("M must be at least 1 in '" + text + "'");
        return integer(static_cast<std::uint64_t>(m));
    }
    throw PreconditionError("bad elimination case '" + text + "' (expected gf2, modq:Q:H or int:M)");
}

std::optional<std::uint64_t> quarter_prime(std::uint64_t m_prime) {
    for (std::uint64_t p = m_prime / 4; p >= 2 && 8 * p > m_prime; --p) {
        bool prime = true;
        for (std::uint64_t f = 2; f * f <= p; ++f)
            if (p % f == 0) {
                prime = false;
                break;
            }
        if (prime) return p;
    }
    return std::nullopt;
}

Elimination eliminate_round(const ProtocolTree& pi, const EliminationCase& c) {
    if (pi.rounds() < 1) throw PreconditionError("eliminate_round needs a protocol with at least one round");
    if (pi.is_leaf(pi.root())) throw PreconditionError("the root makes no queries, so there is no round to remove");
    const auto& a = pi.internal(pi.root()).matrix;
    const Ring& ring = pi.ring();
    UniformFamily fam;
    Measurement r;
    std::optional<SearchProblem> problem;
    std::optional<std::uint64_t> prime;
    std::vector<std::string> notes;
    std::size_t family_size = 0;

    switch (c.kind) {
    case EliminationCase::Kind::GF2: {
        if (ring.kind() != RingKind::GF2) throw PreconditionError("gf2 elimination needs a GF2 protocol");
        fam = uniform_family_gf2(a);
        r = fam.common;
        problem = SearchProblem::elemx_residue(fam.m(), 2, 1);
        break;
    }
    case EliminationCase::Kind::ModQ: {
        if (!ring.is_modular() || ring.modulus() != c.q)
            throw PreconditionError("modq:" + std::to_string(c.q) + " elimination needs a protocol over Z" +
                                    std::to_string(c.q) + ", got " + ring.to_string());
        fam = uniform_family_modq(a);
        const auto q = c.q;
        const auto h = ((c.h % q) + q) % q;
        r.resize(fam.common.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = ring.reduce(-h * fam.common[i]);
        problem = SearchProblem::elemx_residue(fam.m(), q, (q - h) % q);
        break;
    }
    case EliminationCase::Kind::Int: {
        if (ring.kind() != RingKind::BoundedInt) throw PreconditionError("int elimination needs an integer protocol");
        const auto mb = c.m_bound ? c.m_bound : m_bound(pi);
        const auto n = pi.n();
        std::size_t t = 0;
        if (c.weight) {
            t = *c.weight;
        } else {
            const auto paper_t = default_int_weight(a.rows(), mb);
            t = std::min(paper_t, n);
            while (t > 1 && binomial(n, t) > c.int_options.enumeration_cap) --t;
            if (t != paper_t)
                notes.push_back("weight t clamped from " + std::to_string(paper_t) + " to " + std::to_string(t) +
                                " to stay within the enumeration cap");
        }
        fam = uniform_family_int(a, mb, t, c.int_options);
        if (!fam.sunflower_exact) notes.push_back("sunflower search was not exhaustive; m' is a lower estimate");
        family_size = fam.m();
        prime = quarter_prime(fam.m());
        if (!prime)
            throw TooSmall("no prime p with m'/8 < p <= m'/4 for m' = " + std::to_string(fam.m()) +
                           " (needs m' >= 8)");
        fam.sets.resize(4 * *prime);
        r.resize(fam.common.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = ring.mul(static_cast<std::int64_t>(*prime), fam.common[i]);
        problem = SearchProblem::elemx_quarter(fam.m());
        break;
    }
    }
    if (family_size == 0) family_size = fam.m();

    Homomorphism lift_phi;
    const auto lifted = lift_protocol(pi, fam, &lift_phi);
    const auto child = lifted.internal(lifted.root()).child(r);
    if (!child) {
        if (!has_promise_input(*problem))
            throw TooSmall("the new problem " + problem->describe() + " has no promise inputs, and the lifted root has no edge " +
                           measurement_key(r));
        throw NoSuchEdge("the lifted root has no edge " + measurement_key(r) +
                         " although promise inputs exist; the protocol does not solve the source problem");
    }
    if (!has_promise_input(*problem))
        notes.push_back("the new problem " + problem->describe() + " has no promise inputs, so the result is vacuous");
    auto sh = shadow(lifted, r);
    Homomorphism phi(sh.phi.size());
    for (std::size_t v = 0; v < phi.size(); ++v) phi[v] = lift_phi[sh.phi[v]];
    return Elimination{std::move(sh.tree), fam.m(),           *problem,          std::move(fam), std::move(r),
                       std::move(phi),     family_size,       prime,             std::move(notes)};
}

ProtocolTree probe_then_read(const QueryMatrix& probe, unsigned cap) {
    const auto n = probe.cols();
    if (n < 2) throw PreconditionError("probe_then_read needs n >= 2");
    if (n > cap) throw CapExceeded("probe_then_read enumerates 2^n inputs; n = " + std::to_string(n) + " exceeds the cap of " +
                                   std::to_string(cap));
    std::set<Measurement> values;
    Measurement m;
    for (std::uint64_t rank = 0; rank < (std::uint64_t{1} << n); ++rank) {
        probe.apply(BitVec::from_lex_rank(n, rank), m);
        values.insert(m);
    }
    const std::uint64_t per_read = (std::uint64_t{1} << (n - 1)) + 1;
    if (1 + values.size() * per_read > kDefaultMaxNodes)
        throw CapExceeded("probe_then_read would build " + std::to_string(1 + values.size() * per_read) + " nodes");
    const Ring& ring = probe.ring();
    std::vector<std::int64_t> e((n - 1) * n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i * n + i] = 1;
    const QueryMatrix read(ring, n - 1, n, std::move(e));

    ProtocolTree out(ring, n, 2);
    const auto root = out.add_internal(probe);
    out.set_root(root);
    for (const auto& v : values) {
        const auto node = out.add_internal(read);
        out.add_child(root, v, node);
        for (std::uint64_t rank = 0; rank < (std::uint64_t{1} << (n - 1)); ++rank) {
            const auto bits = BitVec::from_lex_rank(n - 1, rank);
            Measurement key(n - 1);
            for (std::size_t i = 0; i + 1 < n; ++i) key[i] = bits.get(i);
            const auto first = bits.first_set();
            out.add_child(node, std::move(key), out.add_leaf(first < n - 1 ? first + 1 : n));
        }
    }
    out.check();
    return out;
}

}  // namespace lqp
