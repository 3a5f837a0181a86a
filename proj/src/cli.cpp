#include "lqp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "lqp/codec.hpp"
#include "lqp/det_protocol.hpp"
#include "lqp/errors.hpp"
#include "lqp/families.hpp"
#include "lqp/lab.hpp"
#include "lqp/problems.hpp"
#include "lqp/rng.hpp"
#include "lqp/round_elim.hpp"
#include "lqp/sparse.hpp"

namespace lqp {

namespace {

std::string join(const Measurement& y) {
    std::string s = "(";
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(y[i]);
    }
    return s + ")";
}

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// "a..b", "a,b,c" or "a".
std::vector<std::uint64_t> parse_range(const std::string& text) {
    std::vector<std::uint64_t> out;
    auto num = [&](const std::string& s) -> std::uint64_t {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ParseError("bad number '" + s + "' in range '" + text + "'");
        return v;
    };
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const auto lo = num(text.substr(0, dots)), hi = num(text.substr(dots + 2));
        if (lo > hi) throw ParseError("empty range '" + text + "'");
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(num(part));
    if (out.empty()) throw ParseError("empty range '" + text + "'");
    return out;
}

unsigned default_cap() {
    if (const char* env = std::getenv("LQP_LAB_CAP")) {
        char* end = nullptr;
        const auto v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 40) return static_cast<unsigned>(v);
    }
    return kDefaultEnumerationCap;
}

QueryMatrix load_matrix(const std::string& path, const Ring& ring) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (j.is_object() && j.contains("rows")) j = j["rows"];
    if (!j.is_array() || j.empty()) throw ParseError(path + ": expected a nonempty array of rows");
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& r : j) {
        if (!r.is_array()) throw ParseError(path + ": every row must be an array of integers");
        std::vector<std::int64_t> row;
        for (const auto& x : r) {
            if (!x.is_number_integer()) throw ParseError(path + ": every entry must be an integer");
            row.push_back(x.get<std::int64_t>());
        }
        rows.push_back(std::move(row));
    }
    return QueryMatrix::from_rows(ring, rows.front().size(), rows);
}

struct Options {
    unsigned threads = 1;
    unsigned cap = kDefaultEnumerationCap;

    std::size_t n = 0, k = 0;
    std::string ring = "gf2";
    std::string out_path;
    std::string protocol_path;
    std::string input;
    std::string problem;
    std::int64_t q = 0, h = 0;
    std::string matrix_path;
    std::uint64_t m_bound = 0;
    std::size_t t = 0;
    std::string elim_case;
    std::uint64_t budget = 6;
    std::string n_range, k_range;
    std::uint64_t seed = 1;
    std::size_t trials = 100, weight = 1, sparsity = 2;
    std::string x, y;
    bool grid = false;
    double c = 1, d = 2;
    double real_n = 0;
};

int cmd_build_det(const Options& o, std::ostream& out) {
    const auto ring = Ring::parse(o.ring);
    const auto pi = build_det_protocol(o.n, o.k, ring);
    if (!o.out_path.empty()) save_protocol(o.out_path, pi);
    out << "nodes=" << pi.size() << " rounds=" << pi.rounds() << " cost=" << cost_structural(pi) << "\n";
    if (o.out_path.empty()) out << write_protocol(pi);
    return 0;
}

int cmd_run(const Options& o, std::ostream& out) {
    const auto pi = load_protocol(o.protocol_path);
    const auto z = BitVec::from_string(o.input);
    if (z.size() != pi.n())
        throw DimensionMismatch("input has " + std::to_string(z.size()) + " bits, protocol expects " +
                                std::to_string(pi.n()));
    const auto t = execute(pi, z);
    std::size_t round = 1;
    for (const auto& step : t.path)
        out << "round " << round++ << " node " << step.node << " queries " << pi.node_cost(step.node)
            << " measurement " << join(step.measurement) << "\n";
    out << "cost " << cost_on(pi, z) << "\n";
    out << "output " << t.output << "\n";
    return 0;
}

int cmd_validate(const Options& o, std::ostream& out) {
    const auto pi = load_protocol(o.protocol_path);
    const auto p = make_problem(o.problem, pi.n(), o.q, o.h);
    const auto rep = validate(pi, p, o.cap, o.threads);
    if (rep.ok) {
        out << "valid problem=" << p.describe() << " inputs=" << rep.inputs_checked
            << " cost=" << cost_structural(pi) << "\n";
        return 0;
    }
    out << "invalid problem=" << p.describe() << " counterexample="
        << (rep.counterexample ? rep.counterexample->to_string() : "-") << " reason=" << rep.reason << "\n";
    return 1;
}

int cmd_family(const Options& o, std::ostream& out, std::ostream& err) {
    const auto ring = Ring::parse(o.ring);
    const auto a = load_matrix(o.matrix_path, ring);
    const double n = static_cast<double>(a.cols()), d = static_cast<double>(a.rows());
    UniformFamily fam;
    double bound = 0;
    std::string bound_kind = "guaranteed";
    if (ring.kind() == RingKind::GF2) {
        fam = uniform_family_gf2(a);
        bound = std::ceil(n / (d + 1));
    } else if (ring.is_modular()) {
        fam = uniform_family_modq(a);
        const double q = static_cast<double>(ring.modulus());
        bound = n / ((d + 1) * q * std::log(q)) - 1;
    } else {
        std::uint64_t m = o.m_bound;
        if (m == 0) {
            m = 2;
            for (const auto& row : a.to_rows()) m = std::max(m, row_value_count(ring, row));
        }
        std::size_t t = o.t;
        if (t == 0) {
            t = default_int_weight(a.rows(), m);
            double choose = 1;
            std::size_t fit = 0;
            for (std::size_t i = 1; i <= t && i <= a.cols(); ++i) {
                choose = choose * static_cast<double>(a.cols() - i + 1) / static_cast<double>(i);
                if (choose > IntFamilyOptions{}.enumeration_cap) break;
                fit = i;
            }
            if (fit < t) {
                err << "note: weight " << t << " clamped to " << std::max<std::size_t>(fit, 1)
                    << " by the enumeration cap\n";
                t = std::max<std::size_t>(fit, 1);
            }
        }
        fam = uniform_family_int(a, m, t);
        bound = n / (d * std::log2(std::max(n, 2.0)) * std::log2(static_cast<double>(m))) - 1;
        bound_kind = "advisory";
    }
    nlohmann::ordered_json j;
    j["m"] = fam.m();
    j["common"] = fam.common;
    auto sets = nlohmann::json::array();
    for (const auto& s : fam.sets) {
        auto one = nlohmann::json::array();
        for (auto x : s) one.push_back(x + 1);
        sets.push_back(one);
    }
    j["sets"] = sets;
    if (!fam.core.empty() || ring.kind() == RingKind::BoundedInt) {
        auto core = nlohmann::json::array();
        for (auto x : fam.core) core.push_back(x + 1);
        j["core"] = core;
        j["weight"] = fam.weight;
        j["bucket_size"] = fam.bucket_size;
        j["sunflower_exact"] = fam.sunflower_exact;
    }
    out << j.dump() << "\n";
    out << "m=" << fam.m() << " bound=" << fixed(bound) << " (" << bound_kind << ")\n";
    return 0;
}

int cmd_eliminate(const Options& o, std::ostream& out) {
    const auto pi = load_protocol(o.protocol_path);
    auto c = EliminationCase::parse(o.elim_case);
    if (o.m_bound) c.m_bound = o.m_bound;
    if (o.t) c.weight = o.t;
    const auto e = eliminate_round(pi, c);
    std::string why;
    const bool shadow_ok = verify_shadowing(e.upsilon, pi, e.phi, &why);
    if (!o.out_path.empty()) save_protocol(o.out_path, e.upsilon);
    out << "m=" << e.m << " family_size=" << e.family_size;
    if (e.prime) out << " prime=" << *e.prime;
    out << " r=" << join(e.r) << "\n";
    out << "new_problem=" << e.new_problem.describe() << "\n";
    out << "rounds=" << e.upsilon.rounds() << " cost=" << cost_structural(e.upsilon) << "\n";
    for (const auto& note : e.notes) out << "note: " << note << "\n";
    out << "shadowing=" << (shadow_ok ? "ok" : "FAILED " + why) << "\n";
    return shadow_ok ? 0 : 1;
}

int cmd_oracle(const Options& o, std::ostream& out) {
    const auto ring = Ring::parse(o.ring);
    const auto p = make_problem(o.problem, o.n, o.q, o.h);
    OracleOptions opt;
    opt.budget = o.budget;
    opt.threads = o.threads;
    const auto res = brute_force_min_cost(p, ring, o.k, opt);
    if (res.cost)
        out << *res.cost << "\n";
    else
        out << "exceeds-budget\n";
    return 0;
}

int cmd_table(const Options& o, std::ostream& out) {
    const auto ring = Ring::parse(o.ring);
    const auto rows = tradeoff_table(parse_range(o.n_range), parse_range(o.k_range), ring);
    const auto csv = tradeoff_csv(rows);
    if (o.out_path.empty()) {
        out << csv;
    } else {
        write_file_atomic(o.out_path, csv);
        out << "rows=" << rows.size() << "\n";
    }
    return 0;
}

int cmd_l0(const Options& o, std::ostream& out, std::ostream& err) {
    const auto ring = Ring::parse(o.ring);
    if (o.weight > o.n) throw PreconditionError("weight exceeds n");
    err << "seed=" << o.seed << "\n";
    Rng input_rng(o.seed, 0x7a);
    const auto support = input_rng.sample_without_replacement(o.n, o.weight);
    auto sorted = support;
    std::sort(sorted.begin(), sorted.end());
    const auto z = BitVec::from_indices(o.n, sorted);
    std::ostringstream csv;
    csv << "trial,seed,output,in_support\n";
    std::size_t ok = 0;
    for (std::size_t i = 0; i < o.trials; ++i) {
        const std::uint64_t s = o.seed + i;
        const auto sk = build_l0_sampler(o.n, ring, s, o.sparsity);
        const auto r = run_l0(sk, z);
        const bool hit = r && z.get(*r - 1);
        ok += hit;
        csv << i << "," << s << "," << (r ? std::to_string(*r) : "fail") << "," << (hit ? 1 : 0) << "\n";
    }
    if (o.out_path.empty())
        out << csv.str();
    else
        write_file_atomic(o.out_path, csv.str());
    out << "success " << ok << "/" << o.trials << " rate="
        << fixed(o.trials ? static_cast<double>(ok) / static_cast<double>(o.trials) : 0.0) << " n=" << o.n
        << " weight=" << o.weight << " seed=" << o.seed << "\n";
    return 0;
}

int cmd_kw(const Options& o, std::ostream& out) {
    const auto x = BitVec::from_string(o.x), y = BitVec::from_string(o.y);
    const std::size_t n = o.n ? o.n : x.size();
    if (x.size() != n || y.size() != n) throw DimensionMismatch("x and y must both have n bits");
    const auto pi = build_det_protocol(n, o.k, Ring::gf2());
    const auto r = kw_simulate(pi, x, y);
    out << "index=" << r.index << " bits=" << r.bits << " rounds=" << r.rounds << " cost=" << cost_structural(pi)
        << "\n";
    return 0;
}

int cmd_check_inequality(const Options& o, std::ostream& out) {
    if (!o.grid) {
        const bool ok = check_tradeoff_inequality(o.c, o.d, o.real_n, static_cast<double>(o.k));
        out << (ok ? "holds" : "VIOLATED") << "\n";
        return ok ? 0 : 1;
    }
    std::size_t points = 0, bad = 0;
    for (double c : {0.5, 1.0, 2.0})
        for (double mult : {1.0, 2.0}) {
            const double d = std::max(2 * c, 1.0) * mult;
            for (int e = 0; e <= 60; ++e) {
                const double n = std::pow(10.0, std::log10(2.0) + e * (6 - std::log10(2.0)) / 60);
                for (int k = 1; k <= 20; ++k) {
                    ++points;
                    if (!check_tradeoff_inequality(c, d, n, k)) {
                        ++bad;
                        out << "violation C=" << c << " D=" << d << " n=" << n << " k=" << k << "\n";
                    }
                }
            }
        }
    out << "points=" << points << " violations=" << bad << "\n";
    return bad ? 1 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    o.cap = default_cap();
    CLI::App app{"Linear query protocol lab"};
    app.set_help_flag("--help", "Print help and exit");
    app.require_subcommand(1);
    app.add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1U, 256U));
    app.add_option("--cap", o.cap, "log2 of the enumeration cap (default: LQP_LAB_CAP or 24)")
        ->check(CLI::Range(1U, 40U));

    auto* build = app.add_subcommand("build-det", "Build the interval-splitting protocol");
    build->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);
    build->add_option("--k", o.k)->required();
    build->add_option("--ring", o.ring, "gf2, modq:Q or int:B");
    build->add_option("--out", o.out_path);

    auto* run = app.add_subcommand("run", "Execute a protocol on one input");
    run->add_option("--protocol", o.protocol_path)->required();
    run->add_option("--input", o.input)->required();

    auto* val = app.add_subcommand("validate", "Check a protocol on every promise input");
    val->add_option("--protocol", o.protocol_path)->required();
    val->add_option("--problem", o.problem, "elemx, elemx-mod, elemx-res, elemx-quarter")->required();
    val->add_option("--q", o.q);
    val->add_option("--h", o.h);

    auto* fam = app.add_subcommand("family", "Build a uniform family for a query matrix");
    fam->add_option("--ring", o.ring);
    fam->add_option("--matrix", o.matrix_path, "JSON array of rows")->required();
    fam->add_option("--M", o.m_bound);
    fam->add_option("--t", o.t);

    auto* elim = app.add_subcommand("eliminate", "Eliminate the first round of a protocol");
    elim->add_option("--protocol", o.protocol_path)->required();
    elim->add_option("--case", o.elim_case, "gf2, modq:Q:H or int[:M]")->required();
    elim->add_option("--out", o.out_path);
    elim->add_option("--M", o.m_bound);
    elim->add_option("--t", o.t);

    auto* orc = app.add_subcommand("oracle", "Exact minimum cost by exhaustive search");
    orc->add_option("--problem", o.problem)->required();
    orc->add_option("--q", o.q);
    orc->add_option("--h", o.h);
    orc->add_option("--ring", o.ring);
    orc->add_option("--k", o.k)->required();
    orc->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);
    orc->add_option("--budget", o.budget);

    auto* table = app.add_subcommand("table", "Upper vs lower bound CSV");
    table->add_option("--n", o.n_range, "e.g. 2..64")->required();
    table->add_option("--k", o.k_range, "e.g. 1..6")->required();
    table->add_option("--ring", o.ring);
    table->add_option("--out", o.out_path);

    auto* l0 = app.add_subcommand("l0", "Monte-Carlo run of the l0 sampler");
    l0->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);
    l0->add_option("--ring", o.ring)->required();
    l0->add_option("--seed", o.seed);
    l0->add_option("--trials", o.trials);
    l0->add_option("--weight", o.weight)->check(CLI::PositiveNumber);
    l0->add_option("--s", o.sparsity);
    l0->add_option("--out", o.out_path, "per-trial CSV");

    auto* kw = app.add_subcommand("kw", "Simulate the Karchmer-Wigderson game");
    kw->add_option("--n", o.n);
    kw->add_option("--k", o.k)->required();
    kw->add_option("--x", o.x, "even-weight bits")->required();
    kw->add_option("--y", o.y, "odd-weight bits")->required();

    auto* ineq = app.add_subcommand("check-lemma81", "Check the tradeoff inequality");
    ineq->add_flag("--grid", o.grid);
    ineq->add_option("--C", o.c);
    ineq->add_option("--D", o.d);
    ineq->add_option("--n", o.real_n);
    ineq->add_option("--k", o.k);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ineq->parsed() && !o.grid && (ineq->count("--n") == 0 || ineq->count("--k") == 0)) {
            err << "error: check-lemma81 needs --grid or --C --D --n --k\n";
            return 2;
        }
        if (build->parsed()) return cmd_build_det(o, out);
        if (run->parsed()) return cmd_run(o, out);
        if (val->parsed()) return cmd_validate(o, out);
        if (fam->parsed()) return cmd_family(o, out, err);
        if (elim->parsed()) return cmd_eliminate(o, out);
        if (orc->parsed()) return cmd_oracle(o, out);
        if (table->parsed()) return cmd_table(o, out);
        if (l0->parsed()) return cmd_l0(o, out, err);
        if (kw->parsed()) return cmd_kw(o, out);
        return cmd_check_inequality(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace lqp
