#include "doctest.h"

#include "levelset/density.hpp"
#include "levelset/models.hpp"
#include "levelset/rng.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#ifndef LEVELSET_CLI_PATH
#define LEVELSET_CLI_PATH "./build/tools/levelset"
#endif

using namespace levelset;

namespace {

struct CmdResult {
    int exit_code;
    std::string output;
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd =
        std::string(LEVELSET_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[512];
    while (fgets(buf, sizeof(buf), pipe)) output += buf;
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("constants subcommand") {
    const auto ok = run_cli("constants --kernel sim2d");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("mu2,0.076923") != std::string::npos);
    CHECK(ok.output.find("integral,") != std::string::npos);

    const auto bad = run_cli("constants --kernel nope");
    CHECK(bad.exit_code == 1);
}

TEST_CASE("kde-eval subcommand") {
    const std::string data_path = "/tmp/levelset_cli_data.csv";
    const std::string pts_path = "/tmp/levelset_cli_pts.csv";
    const auto model = TrueModel::elliptic(1.0);
    Rng rng(99);
    const auto data = model.sample(120, rng);
    save_dataset_csv(data, data_path);
    {
        std::ofstream out(pts_path);
        out << "0.1,0.2\n100.0,100.0\n";
    }

    const auto res = run_cli("kde-eval --data " + data_path +
                             " --h 0.8,0.9 --points " + pts_path);
    REQUIRE(res.exit_code == 0);

    // far point evaluates to zero; near point matches the library bit for bit
    auto shared = std::make_shared<Dataset>(data);
    const auto est = DensityEstimator::fit_plain(
        shared, KernelSpec::simulation(2), {0.8, 0.9});
    char expect[40];
    std::snprintf(expect, sizeof(expect), "%.17g",
                  est.eval(std::array<double, 2>{0.1, 0.2}));
    CHECK(res.output.find(expect) != std::string::npos);
    CHECK(res.output.find("\n0,0\n") != std::string::npos);

    {
        std::ofstream out(pts_path);
        out << "0.1,not_a_number\n";
    }
    const auto bad = run_cli("kde-eval --data " + data_path +
                             " --h 0.8,0.9 --points " + pts_path);
    CHECK(bad.exit_code == 3);

    std::remove(data_path.c_str());
    std::remove(pts_path.c_str());
}

TEST_CASE("region subcommand") {
    const std::string data_path = "/tmp/levelset_cli_region.csv";
    const auto model = TrueModel::elliptic(1.0);
    Rng rng(123);
    save_dataset_csv(model.sample(500, rng), data_path);

    const std::string base = "region --data " + data_path +
                             " --prob 0.5 --case elliptic:1 --alpha 0.1 "
                             "--bootstrap 50 --grid-cells 128 "
                             "--contour-cells 96 --boot-cells 64 ";

    const auto ve = run_cli(base + "--method V.e --out /tmp/levelset_cli_ve");
    CHECK(ve.exit_code == 0);
    CHECK(ve.output.find("quantile=") != std::string::npos);
    CHECK(!slurp("/tmp/levelset_cli_ve_contour.csv").empty());
    CHECK(!slurp("/tmp/levelset_cli_ve_region.csv").empty());
    CHECK(slurp("/tmp/levelset_cli_ve.svg").find("<svg") != std::string::npos);

    const auto bad_alpha =
        run_cli(base + "--method V.e --alpha 1.5 --out /tmp/x");
    CHECK(bad_alpha.exit_code == 1);

    // normal-scale bandwidth at n=500 sits above 1: the large-sample region
    // is undefined and the CLI reports the numeric failure
    const auto vls = run_cli(base + "--method V.ls --out /tmp/x");
    CHECK(vls.exit_code == 2);
    CHECK(vls.output.find("h < 1") != std::string::npos);

    for (const char* suffix : {"_contour.csv", "_region.csv", ".svg"})
        std::remove((std::string("/tmp/levelset_cli_ve") + suffix).c_str());
    std::remove(data_path.c_str());
}

TEST_CASE("simulate subcommand") {
    const std::string cfg_path = "/tmp/levelset_cli_cfg.toml";
    {
        std::ofstream out(cfg_path);
        out << "case = \"case1\"\n"
            << "n = 120\nruns = 2\nbootstrap = 25\nalpha = 0.1\n"
            << "methods = [\"V.e\"]\nseed = 5150\n"
            << "grid_cells = 96\ncontour_cells = 64\n"
            << "bootstrap_contour_cells = 48\nprobe_points = 128\n";
    }

    const auto r1 = run_cli("simulate --config " + cfg_path +
                            " --out /tmp/levelset_cli_r1.csv --threads 2");
    CHECK(r1.exit_code == 0);
    const auto r2 = run_cli("simulate --config " + cfg_path +
                            " --out /tmp/levelset_cli_r2.csv --threads 7");
    CHECK(r2.exit_code == 0);
    CHECK(slurp("/tmp/levelset_cli_r1.csv") ==
          slurp("/tmp/levelset_cli_r2.csv"));

    // a seed override changes the bytes
    const auto r3 = run_cli("simulate --config " + cfg_path +
                            " --out /tmp/levelset_cli_r3.csv --seed 777");
    CHECK(r3.exit_code == 0);
    CHECK(slurp("/tmp/levelset_cli_r1.csv") !=
          slurp("/tmp/levelset_cli_r3.csv"));

    const auto missing =
        run_cli("simulate --config /tmp/nope.toml --out /tmp/x.csv");
    CHECK(missing.exit_code == 3);

    for (const char* p :
         {"/tmp/levelset_cli_r1.csv", "/tmp/levelset_cli_r2.csv",
          "/tmp/levelset_cli_r3.csv", "/tmp/levelset_cli_cfg.toml"})
        std::remove(p);
}
