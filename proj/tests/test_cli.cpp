#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "blowup/errors.hpp"
#include "blowup/run.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("blowup_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(BLOWUP_CLI) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json report_of(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "report.json")); }

}  // namespace

TEST_CASE("denjoy end to end, deterministic report") {
    fs::path a = scratch_dir("denjoy_a"), b = scratch_dir("denjoy_b");
    REQUIRE(run_cli("run --construction denjoy --out " + a.string()) == 0);
    REQUIRE(run_cli("run --construction denjoy --out " + b.string()) == 0);
    CHECK(fs::exists(a / "gaps.csv"));
    CHECK(fs::exists(a / "timings.json"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    auto r = report_of(a);
    CHECK(r["all_pass"] == true);
    CHECK(r["properties"].size() > 10);
    std::string header;
    std::ifstream(a / "gaps.csv") >> header;
    CHECK(header == "n,c,d,a");
}

TEST_CASE("qpf without blow-up notes the trivial case") {
    fs::path d = scratch_dir("qpf_trivial");
    CHECK(run_cli("run --construction qpf --N -1 --grid 200 --samples 2000 --out " + d.string()) == 0);
    auto r = report_of(d);
    CHECK(r["info"].contains("trivial_case"));
    bool identity = false;
    for (const auto& e : r["properties"])
        if (e["id"] == "h.identity") identity = e["pass"].get<bool>();
    CHECK(identity);
}

TEST_CASE("failing properties exit with 1") {
    fs::path d = scratch_dir("sharkovsky_bare");
    CHECK(run_cli("run --construction sharkovsky --N -1 --verify-only --out " + d.string()) == 1);
    auto r = report_of(d);
    CHECK(r["all_pass"] == false);
    CHECK_FALSE(fs::exists(d / "sharkovsky_attractor.csv"));
}

TEST_CASE("usage errors exit with 2") {
    fs::path d = scratch_dir("usage");
    CHECK(run_cli("run --construction spiral --out " + d.string()) == 2);
    CHECK(run_cli("run --construction qpf --N -7 --out " + d.string()) == 2);
    CHECK(run_cli("run --construction general --base sphere --out " + d.string()) == 2);
    CHECK(run_cli("run --bogus-flag") == 2);
    CHECK(run_cli("") == 2);
    fs::create_directories(d);
    std::ofstream(d / "bad.cfg") << "construction = denjoy\nflavour = strawberry\n";
    CHECK(run_cli("run --config " + (d / "bad.cfg").string() + " --out " + d.string()) == 2);
    CHECK(run_cli("run --config " + (d / "missing.cfg").string()) == 2);
    // the basepoint lands on the cut: an invalid configuration, not a failed property
    std::ofstream(d / "cut.cfg") << "construction = denjoy\nx0 = 0\n";
    CHECK(run_cli("run --config " + (d / "cut.cfg").string() + " --out " + d.string()) == 2);
}

TEST_CASE("config file, with flags taking precedence") {
    fs::path d = scratch_dir("config");
    fs::create_directories(d);
    std::ofstream(d / "run.cfg") << "# denjoy with a shorter orbit\nconstruction = denjoy\nN = 10\nsamples = 5000\n";
    CHECK(run_cli("run --config " + (d / "run.cfg").string() + " --N 12 --out " + d.string()) == 0);
    auto r = report_of(d);
    CHECK(r["config"]["N"] == 12);
    CHECK(r["config"]["samples"] == 5000);
}

TEST_CASE("config parsing in the library") {
    blowup::RunConfig cfg;
    blowup::apply_config(cfg, {{"construction", "rees"}, {"theta_star", "0.4"}, {"seed", "9"}});
    CHECK(cfg.construction == "rees");
    CHECK(cfg.theta_star == 0.4);
    CHECK(cfg.seed == 9);
    CHECK_THROWS_AS(blowup::apply_config(cfg, {{"N", "ten"}}), blowup::UsageError);
    CHECK_THROWS_AS(blowup::apply_config(cfg, {{"colour", "red"}}), blowup::UsageError);
    blowup::RunConfig bad;
    bad.r = 1.5;
    CHECK_THROWS_AS(blowup::validate(bad), blowup::UsageError);
}
