#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace hodgeformal;
using io::json;
namespace fs = std::filesystem;

namespace {

struct Run
{
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch()
{
    static const fs::path dir = [] {
        auto p = fs::temp_directory_path() / ("hodgeformal_test_cli_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Run run(const std::string& args, const std::string& env = "")
{
    const auto out = scratch() / "stdout.txt";
    const auto err = scratch() / "stderr.txt";
    const std::string cmd =
        env + (env.empty() ? "" : " ") + "'" HODGEFORMAL_CLI "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string summary(const std::string& name) { return "'" + testing::data_path("summaries/" + name + ".json") + "'"; }

}  // namespace

TEST_CASE("generate", "[cli]")
{
    auto r = run("generate sphere:3");
    REQUIRE(r.code == 0);
    REQUIRE(json::parse(r.out).at("facets").size() == 5);

    r = run("generate torus:2");
    REQUIRE(json::parse(r.out).at("facets").size() == 18);

    const auto path = scratch() / "g2.json";
    r = run("generate surface:2 -o '" + path.string() + "'");
    REQUIRE(r.code == 0);
    REQUIRE(io::read_json(path).at("euler_characteristic") == -2);
    REQUIRE(io::load_complex(path).facets() == surface(2).facets());

    REQUIRE(run("generate cube:3").code == 2);
    REQUIRE(run("generate").code == 2);
}

TEST_CASE("analyze", "[cli]")
{
    SECTION("torus with every stage")
    {
        const auto r = run("analyze torus:2 --all");
        REQUIRE(r.code == 0);
        const auto j = json::parse(r.out);
        REQUIRE(j.at("formality").at("aggregate").is_number());
        REQUIRE(j.at("betti") == json({1, 2, 1}));
        REQUIRE(j.at("intersection_form").at("rank") == 2);
        REQUIRE(j.at("obstructions").at("model") == "T²");
        REQUIRE(j.contains("timings"));
        REQUIRE(j.at("errors").empty());
    }
    SECTION("genus two surface is obstructed")
    {
        const auto r = run("analyze surface:2 --obstructions");
        REQUIRE(r.code == 1);
        const auto j = json::parse(r.out);
        REQUIRE(j.at("obstructions").at("verdict") == "obstructed");
        REQUIRE(j.at("obstructions").at("fired") == json({"R1", "R5"}));
    }
    SECTION("sphere formality")
    {
        const auto r = run("analyze sphere:2 --formality");
        REQUIRE(r.code == 0);
        REQUIRE(json::parse(r.out).at("formality").at("aggregate") == 0.0);
    }
    SECTION("file input with weights")
    {
        const auto K = torus(2);
        const auto kpath = scratch() / "t2.json", wpath = scratch() / "w.json";
        io::write_json(kpath, io::complex_to_json(K));
        io::write_json(wpath, io::weights_to_json(random_weights(K, 3)));
        const auto r = run("analyze '" + kpath.string() + "' -w '" + wpath.string() + "' --formality --no-timings");
        REQUIRE(r.code == 0);
        const auto j = json::parse(r.out);
        REQUIRE_FALSE(j.contains("timings"));
        REQUIRE(j.at("formality").at("aggregate") == formality_residual(K, random_weights(K, 3)).aggregate);

        io::write_json(wpath, io::weights_to_json(unit_weights(sphere(2))));
        REQUIRE(run("analyze '" + kpath.string() + "' -w '" + wpath.string() + "'").code == 2);
    }
    SECTION("non-orientable input skips the obstruction stage")
    {
        const auto r = run("analyze 'file:" + testing::data_path("rp2_6.json") + "' --all --no-timings");
        REQUIRE(r.code == 0);
        const auto j = json::parse(r.out);
        REQUIRE(j.at("complex").at("orientable") == false);
        REQUIRE(j.at("obstructions").contains("skipped"));
    }
    SECTION("reports are reproducible without timings")
    {
        const auto a = run("analyze surface:2 --all --no-timings");
        const auto b = run("analyze surface:2 --all --no-timings");
        REQUIRE(a.out == b.out);
    }
    SECTION("usage errors")
    {
        REQUIRE(run("analyze").code == 2);
        REQUIRE(run("analyze '/nonexistent/k.json'").code == 2);
        REQUIRE(run("analyze torus:2 --tol -1").code == 2);
        REQUIRE(run("frobnicate").code == 2);
    }
}

TEST_CASE("analysis cache", "[cli]")
{
    const auto cache = scratch() / "cache";
    const std::string env = "HODGEFORMAL_CACHE_DIR='" + cache.string() + "'";
    const auto a = run("analyze torus:2 --hodge --no-timings", env);
    REQUIRE(a.code == 0);
    REQUIRE_FALSE(fs::is_empty(cache));
    const auto b = run("analyze torus:2 --hodge --no-timings", env);
    REQUIRE(b.code == 0);
    const auto ja = json::parse(a.out), jb = json::parse(b.out);
    REQUIRE(ja.at("hodge").at("cache").at("hits") == 0);
    REQUIRE(jb.at("hodge").at("cache").at("hits") == 3);
    REQUIRE(ja.at("hodge").at("degrees") == jb.at("hodge").at("degrees"));
    REQUIRE(ja.at("intersection_form") == jb.at("intersection_form"));
}

TEST_CASE("check", "[cli]")
{
    auto r = run("check " + summary("k3"));
    REQUIRE(r.code == 1);
    auto j = json::parse(r.out);
    REQUIRE(j.at("obstructions").at("fired") == json({"R1", "R2", "R11"}));

    r = run("check " + summary("s3_x_s1"));
    REQUIRE(r.code == 0);
    REQUIRE(json::parse(r.out).at("obstructions").at("model") == "S³×S¹");

    r = run("check " + summary("b1_three_4d"));
    REQUIRE(r.code == 1);
    REQUIRE(json::parse(r.out).at("obstructions").at("fired") == json({"R3", "R7"}));

    const auto bad = scratch() / "bad_summary.json";
    io::write_text(bad, R"({"dimension": 2, "betti": [1, 3, 2], "orientable": true})");
    REQUIRE(run("check '" + bad.string() + "'").code == 2);
    REQUIRE(run("check '/nonexistent/s.json'").code == 2);
}

TEST_CASE("search", "[cli]")
{
    const auto t1 = scratch() / "trace1.csv", t2 = scratch() / "trace2.csv", w = scratch() / "best.json";
    const std::string args = "search torus:2 --seed 1 --max-iterations 2 --symmetric-product --no-timings";
    auto r = run(args + " --trace-out '" + t1.string() + "' --weights-out '" + w.string() + "'");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    REQUIRE(j.at("final_aggregate") <= j.at("initial_aggregate"));
    r = run(args + " --trace-out '" + t2.string() + "'");
    REQUIRE(r.code == 0);
    REQUIRE(slurp(t1) == slurp(t2));
    REQUIRE(slurp(t1).rfind("iteration,aggregate\n0,", 0) == 0);
    REQUIRE(json::parse(r.out) == j);
    // The written weights reproduce the final aggregate.
    FormalityOptions sym;
    sym.symmetric_product = true;
    const auto K = torus(2);
    REQUIRE(formality_residual(K, io::weights_from_json(io::read_json(w), K), sym).aggregate == j.at("final_aggregate"));

    const auto t3 = scratch() / "trace3.csv";
    r = run("search sphere:4 --trace-out '" + t3.string() + "'");
    REQUIRE(r.code == 0);
    REQUIRE(slurp(t3) == "iteration,aggregate\n0,0\n");
    REQUIRE(json::parse(r.out).at("stop_reason") == "zero-residual");

    REQUIRE(run("search torus:2 --seed abc").code == 2);
    REQUIRE(run("search torus:2 --seed -3").code == 2);
    REQUIRE(run("search torus:2 --start sideways").code == 2);
    REQUIRE(run("search torus:2 --free-degrees 7").code == 2);
}
