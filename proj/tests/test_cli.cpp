#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "lqp/cli.hpp"
#include "lqp/codec.hpp"
#include "lqp/problems.hpp"

using namespace lqp;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "lqp-lab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / ("lqp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("build, run and validate") {
    const auto dir = scratch_dir();
    const auto p = (dir / "p.json").string();
    auto r = cli({"build-det", "--n", "8", "--k", "3", "--ring", "gf2", "--out", p});
    REQUIRE(r.code == 0);
    CHECK(validate(load_protocol(p), SearchProblem::elemx_mod(8, 2)).ok);

    r = cli({"run", "--protocol", p, "--input", "00100000"});
    CHECK(r.code == 0);
    CHECK(r.out.find("output 3\n") != std::string::npos);
    CHECK(r.out.find("round 1 ") != std::string::npos);

    r = cli({"validate", "--protocol", p, "--problem", "elemx-mod", "--q", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("valid", 0) == 0);
    // Even-weight inputs are outside the tree's promise.
    r = cli({"validate", "--protocol", p, "--problem", "elemx"});
    CHECK(r.code == 1);
    CHECK(r.out.rfind("invalid", 0) == 0);

    r = cli({"run", "--protocol", p, "--input", "001"});
    CHECK(r.code == 1);
    CHECK(r.err.find("error:") == 0);
    fs::remove_all(dir);
}

TEST_CASE("output is deterministic") {
    const auto dir = scratch_dir();
    const auto a = (dir / "a.json").string(), b = (dir / "b.json").string();
    REQUIRE(cli({"build-det", "--n", "12", "--k", "2", "--ring", "modq:3", "--out", a}).code == 0);
    REQUIRE(cli({"build-det", "--n", "12", "--k", "2", "--ring", "modq:3", "--out", b}).code == 0);
    CHECK(read_file(a) == read_file(b));

    const auto x = cli({"l0", "--n", "32", "--ring", "int:4", "--seed", "9", "--trials", "20", "--weight", "5"});
    const auto y = cli({"l0", "--n", "32", "--ring", "int:4", "--seed", "9", "--trials", "20", "--weight", "5"});
    CHECK(x.code == 0);
    CHECK(x.out == y.out);
    CHECK(x.err.find("seed=9") != std::string::npos);
    CHECK(x.out.find("trial,seed,output,in_support\n") == 0);
    fs::remove_all(dir);
}

TEST_CASE("oracle and table") {
    auto r = cli({"oracle", "--problem", "elemx-res", "--q", "2", "--h", "1", "--ring", "gf2", "--k", "1", "--n", "4",
                  "--budget", "4"});
    CHECK(r.code == 0);
    CHECK(r.out == "3\n");
    r = cli({"oracle", "--problem", "elemx-res", "--q", "2", "--h", "1", "--ring", "gf2", "--k", "1", "--n", "4",
             "--budget", "2"});
    CHECK(r.out == "exceeds-budget\n");

    const auto dir = scratch_dir();
    const auto t = (dir / "t.csv").string();
    r = cli({"table", "--n", "2..64", "--k", "1..6", "--ring", "gf2", "--out", t});
    REQUIRE(r.code == 0);
    std::istringstream in(read_file(t));
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,k,upper,lower,ratio");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        unsigned long long n, k, up;
        double lo, ratio;
        REQUIRE(std::sscanf(line.c_str(), "%llu,%llu,%llu,%lf,%lf", &n, &k, &up, &lo, &ratio) == 5);
        CHECK(static_cast<double>(up) >= lo - 1e-6);
        ++rows;
    }
    CHECK(rows == 63 * 6);
    fs::remove_all(dir);
}

TEST_CASE("family and eliminate") {
    const auto dir = scratch_dir();
    const auto m = (dir / "a.json").string();
    write_file_atomic(m, "[[1,0,1,0],[0,1,0,1]]");
    auto r = cli({"family", "--ring", "gf2", "--matrix", m});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"m\":2") != std::string::npos);

    const auto b = (dir / "b.json").string();
    write_file_atomic(b, "[[1,2,1,2]]");
    r = cli({"family", "--ring", "int:2", "--matrix", b, "--M", "7", "--t", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"bucket_size\":4") != std::string::npos);

    const auto p = (dir / "p.json").string(), u = (dir / "u.json").string();
    REQUIRE(cli({"build-det", "--n", "16", "--k", "2", "--ring", "gf2", "--out", p}).code == 0);
    r = cli({"eliminate", "--protocol", p, "--case", "gf2", "--out", u});
    CHECK(r.code == 0);
    CHECK(r.out.find("shadowing=ok") != std::string::npos);
    const auto ups = load_protocol(u);
    CHECK(ups.rounds() == 1);
    fs::remove_all(dir);
}

TEST_CASE("kw and inequality") {
    auto r = cli({"kw", "--n", "4", "--k", "2", "--x", "0000", "--y", "0100"});
    CHECK(r.code == 0);
    CHECK(r.out.find("index=2") == 0);
    r = cli({"check-lemma81", "--grid"});
    CHECK(r.code == 0);
    CHECK(r.out.find("violations=0") != std::string::npos);
    r = cli({"check-lemma81", "--C", "1", "--D", "2", "--n", "100", "--k", "3"});
    CHECK(r.out == "holds\n");
}

TEST_CASE("exit codes") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"bogus"}).code == 2);
    CHECK(cli({"build-det", "--n", "8"}).code == 2);
    CHECK(cli({"build-det", "--n", "x", "--k", "1"}).code == 2);
    CHECK(cli({"check-lemma81"}).code == 2);
    CHECK(cli({"build-det", "--n", "8", "--k", "3", "--ring", "foo"}).code == 1);
    CHECK(cli({"oracle", "--problem", "elemx", "--k", "1", "--n", "7"}).code == 1);
    CHECK(cli({"table", "--n", "9..2", "--k", "1"}).code == 1);
    CHECK(cli({"--help"}).code == 0);
}

}  // TEST_SUITE
