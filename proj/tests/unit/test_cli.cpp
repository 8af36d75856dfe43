#include "stochctl/cli/config.hpp"
#include "stochctl/cli/run.hpp"
#include "stochctl/errors.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stochctl;
using cli::Config;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        out.push_back(l);
    }
    return out;
}

int run_main(std::vector<std::string> args)
{
    args.insert(args.begin(), "stochctl");
    std::vector<char*> argv;
    for (auto& a : args) {
        argv.push_back(a.data());
    }
    return cli::main_entry(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("stochctl_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

const char* small_fp = "dynamics.beta = 1\n# comment\nrun.seed=3\nrun.paths=200\ngrid.t_end=0.1\ngrid.step=0.01\n"
                       "potential.kind=double_well\npoints.count=11\n";

} // namespace

TEST_CASE("config text parsing", "[cli]")
{
    auto c = Config::from_text("dynamics.beta = 2.5  # inverse temperature\n\npoints.list = 1, 2,3\n");
    CHECK(c.number("dynamics.beta") == 2.5);
    CHECK(c.numbers("points.list") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(c.number("dynamics.mu", 1.0) == 1.0);
    CHECK_THROWS_AS(c.set("dynamics.betta", "1"), InvalidInput);
    CHECK_THROWS_AS(Config::from_text("no equals sign\n"), InvalidInput);
    CHECK_THROWS_AS(Config::from_text("run.paths=abc\n").count("run.paths"), InvalidInput);
    CHECK_THROWS_AS(Config::from_text("run.paths=-3\n").count("run.paths"), InvalidInput);
}

TEST_CASE("fp-overdamped output layout", "[cli]")
{
    const auto r = cli::execute("fp-overdamped", Config::from_text(small_fp));
    const auto l = lines(r.csv);
    REQUIRE(l.size() == 12);
    CHECK(l[0] == "q,estimate,std_error,mean_weight");
    CHECK(r.diagnostics.contains("average_mean_weight"));
}

TEST_CASE("missing or invalid input is rejected", "[cli]")
{
    auto c = Config::from_text(small_fp);
    auto no_beta = Config::from_text("run.paths=10\n");
    CHECK_THROWS_AS(cli::execute("fp-overdamped", no_beta), InvalidInput);
    CHECK_THROWS_AS(cli::execute("no-such-command", c), InvalidInput);
    auto pos = Config::from_text("dynamics.beta=1\ngradient.direction=position\npoints.list=0,0\n");
    CHECK_THROWS_AS(cli::execute("hjb-grad-underdamped", pos), Unsupported);

    const auto dir = scratch("errors");
    CHECK(run_main({"fp-overdamped", "--out", (dir / "x.csv").string()}) == 2);
    CHECK(run_main({"fp-overdamped", "--dynamics.beta", "1", "--grid.step", "0.03", "--out",
                    (dir / "x.csv").string()}) == 2);
    CHECK(run_main({"fp-overdamped", "--bogus", "1"}) == 2);
}

TEST_CASE("command line run writes a replayable summary", "[cli]")
{
    const auto dir = scratch("replay");
    {
        std::ofstream f(dir / "run.cfg");
        f << small_fp;
    }
    const auto out = dir / "first.csv";
    REQUIRE(run_main({"fp-overdamped", "--config", (dir / "run.cfg").string(), "--workers", "2", "--out",
                      out.string()}) == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "first.json"));
    CHECK(summary["subcommand"] == "fp-overdamped");
    CHECK(summary["seed"] == 3);
    CHECK(summary["config"]["run.workers"] == "2");

    const auto again = dir / "second.csv";
    REQUIRE(run_main({"fp-overdamped", "--config", (dir / "first.json").string(), "--workers", "1", "--out",
                      again.string()}) == 0);
    CHECK(slurp(out) == slurp(again));
}

TEST_CASE("bridge-iterate writes its drift table", "[cli]")
{
    auto c = Config::from_text("dynamics.beta=1\nrun.paths=200\ngrid.t_end=0.1\ngrid.step=0.02\n"
                               "bridge.axis_count=201\nbridge.iters=2\n");
    const auto r = cli::execute("bridge-iterate", c);
    CHECK(lines(r.csv).front() == "t,q,phi,phi_hat,density");
    REQUIRE(r.extra_files.size() == 1);
    CHECK(r.extra_files[0].first == ".drift.csv");
    CHECK(lines(r.extra_files[0].second).front() == "t,q,drift,potential");
    // 6 slices of 201 axis points.
    CHECK(lines(r.extra_files[0].second).size() == 1 + 6 * 201);
}

TEST_CASE("seed override changes the estimate", "[cli]")
{
    auto a = Config::from_text(small_fp);
    auto b = a;
    b.set("run.seed", "4");
    CHECK(cli::execute("fp-overdamped", a).csv == cli::execute("fp-overdamped", a).csv);
    CHECK(cli::execute("fp-overdamped", a).csv != cli::execute("fp-overdamped", b).csv);
}
