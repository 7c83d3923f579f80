#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bfslab/bfslab.hpp"

using namespace bfslab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(BFSLAB_CLI_PATH) + " " + args + " > " + log.string() +
                            " 2>&1";
    const int rc = std::system(cmd.c_str());
    return (rc >= 0) ? ((rc >> 8) & 0xff) : -1;
}

fs::path test_dir() {
    auto p = fs::temp_directory_path() / "bfslab_cli_tests";
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing reports field paths") {
    auto expect_path = [](const char* text, const std::string& path) {
        try {
            parse_config(nlohmann::json::parse(text));
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(e.path() == path);
        }
    };
    expect_path(R"({"suite":"nope"})", "suite");
    expect_path(R"({})", "suite");
    expect_path(R"({"suite":"young","grid":{"N":100}})", "grid.N");
    expect_path(R"({"suite":"young","spaces":[{"family":"lorentz","p":1.0,"q":2}]})",
                "spaces[0]");
    expect_path(R"({"suite":"young","spaces":[{"family":"weird"}]})", "spaces[0].family");
    expect_path(R"({"suite":"young","time":{"first_cell":0.5}})", "time.first_cell");
    expect_path(R"({"suite":"young","lp":{"j_min":2,"j_max":1}})", "lp");

    auto cfg = parse_config(nlohmann::json::parse(
        R"({"suite":"young","spaces":[{"family":"lebesgue","p":"inf"}]})"));
    CHECK(cfg.spaces.front().p == kInf);
    CHECK(cfg.sweep.count == 100);  // defaults fill in
}

TEST_CASE("suite runs are deterministic in-process") {
    SuiteConfig cfg;
    cfg.suite = "young";
    cfg.grid = {1, 128, 8.0};
    cfg.lp = {-2, 2};
    cfg.sweep = {20, 42};
    cfg.spaces = {SpaceSpec::lebesgue(2.0), SpaceSpec::morrey(2.0, 1.0)};
    auto a = run_suite(cfg);
    auto b = run_suite(cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].lhs == b.rows[i].lhs);
        CHECK(a.rows[i].rhs == b.rows[i].rhs);
        CHECK(a.rows[i].params == b.rows[i].params);
    }
}

TEST_CASE("cli: list-suites, run, determinism, exit codes") {
    const auto dir = test_dir();
    const auto log = dir / "log.txt";

    CHECK(run_cli("list-suites", log) == 0);
    const auto listing = slurp(log);
    for (const auto& name : suite_names()) CHECK(listing.find(name) != std::string::npos);

    // a small config exercising one suite end to end
    const auto cfg_path = dir / "young_small.json";
    {
        std::ofstream os(cfg_path);
        os << R"({
  "suite": "young",
  "grid": {"dim": 1, "N": 128, "L": 8.0},
  "lp": {"j_min": -2, "j_max": 2},
  "spaces": [{"family": "lebesgue", "p": 2.0}],
  "sweep": {"count": 25, "seed": 9},
  "ceilings": {"young": 1.000001},
  "output": ")" << (dir / "run1").string() << R"("
})";
    }
    CHECK(run_cli("run --config " + cfg_path.string(), log) == 0);
    CHECK(run_cli("run --config " + cfg_path.string() + " --output " + (dir / "run2").string(),
                  log) == 0);

    const auto csv1 = slurp(dir / "run1.cases.csv");
    const auto csv2 = slurp(dir / "run2.cases.csv");
    CHECK(!csv1.empty());
    CHECK(csv1 == csv2);  // byte-identical reruns

    const auto rep = nlohmann::json::parse(slurp(dir / "run1.report.json"));
    CHECK(rep.at("suite") == "young");
    CHECK(rep.at("passed") == true);
    CHECK(rep.at("aggregate").at("violations") == 0);
    CHECK(rep.at("config").at("sweep").at("seed") == 9);

    // usage and config errors exit with 2
    CHECK(run_cli("run --config " + (dir / "missing.json").string(), log) == 2);
    const auto bad = dir / "bad.json";
    {
        std::ofstream os(bad);
        os << R"({"suite":"young","grid":{"N":100}})";
    }
    CHECK(run_cli("run --config " + bad.string(), log) == 2);
    CHECK(slurp(log).find("grid.N") != std::string::npos);
    CHECK(run_cli("bogus-subcommand", log) == 2);

    // refine resource bound rejected before computation
    const auto huge = dir / "huge.json";
    {
        std::ofstream os(huge);
        os << R"({"suite":"young","grid":{"dim":1,"N":4194304,"L":8.0}})";
    }
    CHECK(run_cli("refine --config " + huge.string(), log) == 2);
}

TEST_CASE("cli: refine on a small config") {
    const auto dir = test_dir();
    const auto log = dir / "refine_log.txt";
    const auto cfg_path = dir / "besov_small.json";
    {
        std::ofstream os(cfg_path);
        os << R"({
  "suite": "besov",
  "grid": {"dim": 1, "N": 256, "L": 16.0},
  "lp": {"j_min": -3, "j_max": 3},
  "spaces": [{"family": "lebesgue", "p": 2.0}],
  "sweep": {"count": 10, "seed": 4},
  "output": ")" << (dir / "besov_refine").string() << R"("
})";
    }
    CHECK(run_cli("refine --config " + cfg_path.string(), log) == 0);
    const auto rep = nlohmann::json::parse(slurp(dir / "besov_refine.report.json"));
    CHECK(rep.at("aggregate").contains("refinement_delta"));
    const auto csv = slurp(dir / "besov_refine.cases.csv");
    CHECK(csv.find("phase=base") != std::string::npos);
    CHECK(csv.find("phase=refined") != std::string::npos);
}
