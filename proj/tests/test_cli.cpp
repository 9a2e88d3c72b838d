#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "config.hpp"
#include "doctest.h"

using namespace branching;
using namespace branching::cli;

namespace {

const std::filesystem::path work = std::filesystem::temp_directory_path() / "branching_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(BRANCHING_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string out_dir(const std::string& name) { return (work / name).string(); }

}  // namespace

TEST_CASE("config text parsing") {
    const auto e = parse_config_text("# comment\ncase = k1\nalpha=0.2 # trailing\n\nmesh=12,8\n");
    CHECK(e.size() == 3);
    RunConfig cfg;
    apply_entries(cfg, e);
    CHECK(cfg.well_case == WellCase::K1);
    CHECK(cfg.alpha == 0.2);
    CHECK(cfg.mesh_nx == 12);
    CHECK(cfg.mesh_ny == 8);
    cfg.validate();

    CHECK_THROWS_AS(parse_config_text("novalue\n"), ConfigError);
    CHECK_THROWS_AS(apply_entries(cfg, {{"alhpa", "0.1"}}), ConfigError);
    CHECK_THROWS_AS(apply_entries(cfg, {{"alpha", "0.1x"}}), ConfigError);
    CHECK_THROWS_AS(apply_entries(cfg, {{"case", "k3"}}), ConfigError);
    CHECK(parse_list("1e-7, 1e-6,1e-5") == std::vector<double>{1e-7, 1e-6, 1e-5});

    RunConfig bad;
    bad.alpha = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.construction = "vertical";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.mesh_nx = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("exit codes") {
    std::filesystem::create_directories(work);
    CHECK(run("validate --samples 10 --out " + out_dir("v")) == 2);  // unknown flag
    CHECK(run("validate --out " + out_dir("v")) == 0);
    CHECK(run("validate --seed 12345 --out " + out_dir("v")) == 0);
    {
        std::ofstream(work / "corrupt.cfg") << "corrupt_wells=1\nsamples=20\n";
    }
    CHECK(run("validate --config " + (work / "corrupt.cfg").string() + " --out " + out_dir("v")) == 3);
    {
        std::ofstream(work / "typo.cfg") << "alhpa=0.1\n";
    }
    CHECK(run("energy --config " + (work / "typo.cfg").string()) == 2);
    CHECK(run("energy --alpha 1.5") == 2);
    CHECK(run("energy --config " + (work / "missing.cfg").string()) == 2);
    CHECK(run("") == 2);
}

TEST_CASE("flags override the config file") {
    {
        std::ofstream(work / "phase.cfg") << "case=k1\nalpha=0.1\ngrid=20,20\n";
    }
    REQUIRE(run("phase --config " + (work / "phase.cfg").string() + " --case k2 --out " + out_dir("p2")) == 0);
    const std::string csv = slurp(work / "p2" / "phase.csv");
    CHECK(csv.rfind("case,alpha,log10_L_over_eps,log10_H_over_eps,regime,bound_value\n", 0) == 0);
    CHECK(csv.find("\nk2,") != std::string::npos);
    CHECK(csv.find("\nk1,") == std::string::npos);
    CHECK(csv.find(",VB1,") == std::string::npos);
    CHECK(csv.find(",BR,") != std::string::npos);
    CHECK(std::filesystem::exists(work / "p2" / "phase.svg"));
}

TEST_CASE("byte-identical outputs") {
    REQUIRE(run("energy --case k1 --epsilon 1e-4 --out " + out_dir("e1")) == 0);
    REQUIRE(run("energy --case k1 --epsilon 1e-4 --out " + out_dir("e2")) == 0);
    const std::string a = slurp(work / "e1" / "energy.csv");
    CHECK(a == slurp(work / "e2" / "energy.csv"));
    CHECK(a.rfind("case,alpha,epsilon,L,H,construction,elastic,tv_bulk,tv_jump,total,bound,ratio\n", 0) == 0);
    CHECK(a.find(",horizontal,") != std::string::npos);
}

TEST_CASE("construct") {
    REQUIRE(run("construct --case k2 --epsilon 10 --out " + out_dir("c0")) == 0);
    const std::string svg = slurp(work / "c0" / "construction.svg");
    // the identity renders as one color
    const auto first = svg.find("fill=\"hsl(");
    REQUIRE(first != std::string::npos);
    const std::string color = svg.substr(first, svg.find(')', first) - first);
    std::size_t pos = 0, fills = 0;
    while ((pos = svg.find("fill=\"hsl(", pos)) != std::string::npos) {
        CHECK(svg.compare(pos, color.size(), color) == 0);
        ++fills;
        ++pos;
    }
    CHECK(fills > 0);
    REQUIRE(run("construct --case k1 --L 0.05 --H 1 --epsilon 1e-5 --out " + out_dir("c1")) == 0);
    CHECK(slurp(work / "c1" / "manifest.txt").find("rotate_90") != std::string::npos);
}

TEST_CASE("minimize") {
    REQUIRE(run("minimize --case k2 --epsilon 10 --mesh 8,8 --out " + out_dir("m0")) == 0);
    const std::string rep = slurp(work / "m0" / "minimize_report.txt");
    CHECK(rep.find("construction=identity") != std::string::npos);
    CHECK(rep.find("minimum=0.010000000000000") != std::string::npos);
    const int code = run("minimize --case k2 --alpha 0.2 --epsilon 1e-3 --mesh 24,24 --out " + out_dir("m1"));
    CHECK((code == 0 || code == 4));
    const std::string rep1 = slurp(work / "m1" / "minimize_report.txt");
    const auto at = rep1.find("\nminimum=");
    REQUIRE(at != std::string::npos);
    CHECK(std::stod(rep1.substr(at + 9)) < 0.04);
    CHECK(slurp(work / "m1" / "field.csv").rfind("x,y,u1,u2\n", 0) == 0);
}
