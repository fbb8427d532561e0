#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qread/bench.hpp"
#include "qread/cli.hpp"
#include "qread/gridfn.hpp"

using namespace qread;
namespace fs = std::filesystem;

namespace {

// the built binary, passed in by ctest; in-process dispatch() covers the rest
std::string qread_bin() {
    const char* env = std::getenv("QREAD_BIN");
    return env ? env : "";
}

int run_binary(const std::string& args, std::string* out = nullptr) {
    const std::string path = "/tmp/qread_cli_out.txt";
    const int rc = std::system((qread_bin() + " " + args + " > " + path + " 2>&1").c_str());
    if (out) {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        *out = ss.str();
    }
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("series csv round trip") {
    const std::string path = "/tmp/qread_series.csv";
    const std::vector<std::string> header{"method", "abscissa_kind", "abscissa", "seed",
                                          "l2ns_error"};
    const std::vector<std::vector<std::string>> rows{
        {"fsr", "shots", "10000", "7", format_cell(0.012345678901234567)},
        {"rsr", "shots", "40000", "8", format_cell(1.0 / 3.0)}};
    write_series_csv(path, header, rows);
    std::vector<std::string> header2;
    const auto rows2 = read_series_csv(path, &header2);
    CHECK(header2 == header);
    CHECK(rows2 == rows);

    // empty series: header-only file
    write_series_csv(path, header, {});
    const auto rows3 = read_series_csv(path, &header2);
    CHECK(rows3.empty());
    CHECK(header2 == header);
    std::remove(path.c_str());
}

TEST_CASE("series csv feeds the slope fitter unchanged") {
    const std::string path = "/tmp/qread_series_fit.csv";
    std::vector<std::vector<std::string>> rows;
    const std::vector<double> xs{1e4, 1e5, 1e6, 1e7};
    for (double x : xs)
        rows.push_back({"rsr", "shots", format_cell(x), "1", format_cell(3.0 * std::pow(x, -0.5))});
    write_series_csv(path, {"method", "abscissa_kind", "abscissa", "seed", "l2ns_error"}, rows);
    const auto parsed = read_series_csv(path, nullptr);
    std::vector<double> x, y;
    for (const auto& r : parsed) {
        x.push_back(std::stod(r[2]));
        y.push_back(std::stod(r[4]));
    }
    const auto [slope, se] = fit_loglog_slope(x, y);
    CHECK(slope == doctest::Approx(-0.5).epsilon(1e-12));
    std::remove(path.c_str());
}

TEST_CASE("estimate-shots prints the resource rows") {
    REQUIRE(!qread_bin().empty());
    std::string out;
    const int rc = run_binary("estimate-shots --class w21 --dim 2 --eps 0.01", &out);
    CHECK(rc == 0);
    CHECK(out.find("1e+08") != std::string::npos);   // rsr
    CHECK(out.find("1e+06") != std::string::npos);   // arsr
    CHECK(out.find("4.6e+05") != std::string::npos); // fsr
}

TEST_CASE("unknown flags exit with usage status 2") {
    REQUIRE(!qread_bin().empty());
    std::string out;
    CHECK(run_binary("--definitely-not-a-flag", &out) == 2);
    CHECK(out.find("Usage") != std::string::npos);
    CHECK(run_binary("bench example2 --bogus 3", &out) == 2);
}

TEST_CASE("runtime failures exit 1 with a machine-readable record") {
    REQUIRE(!qread_bin().empty());
    std::string out;
    const int rc = run_binary("readout --input /nonexistent/file.csv", &out);
    CHECK(rc == 1);
    CHECK(out.find("{\"error\"") != std::string::npos);
}

TEST_CASE("bench runs are reproducible byte-for-byte") {
    REQUIRE(!qread_bin().empty());
    const std::string outa = "/tmp/qread_bench_a", outb = "/tmp/qread_bench_b";
    fs::remove_all(outa);
    fs::remove_all(outb);
    const std::string args =
        "bench example2 --methods fsr --shots 10000 --repeats 1 --seed 7 --grid-n0 6 --out ";
    CHECK(run_binary(args + outa) == 0);
    CHECK(run_binary(args + outb) == 0);
    for (const std::string f : {"series.csv"}) {
        CHECK(slurp(fs::path(outa) / f) == slurp(fs::path(outb) / f));
        CHECK(!slurp(fs::path(outa) / f).empty());
    }
    // manifests agree except for the output directory they record
    const RunManifest ma = read_manifest((fs::path(outa) / "manifest.json").string());
    const RunManifest mb = read_manifest((fs::path(outb) / "manifest.json").string());
    CHECK(ma.checksums == mb.checksums);
    CHECK(ma.seed == mb.seed);

    // a single shots value cannot be fitted: no summary emitted
    CHECK(!fs::exists(fs::path(outa) / "summary.csv"));
    fs::remove_all(outa);
    fs::remove_all(outb);
}

TEST_CASE("manifest rerun reproduces outputs") {
    REQUIRE(!qread_bin().empty());
    const std::string out = "/tmp/qread_rerun";
    fs::remove_all(out);
    CHECK(run_binary("bench example2 --methods rsr --shots 1e4,4e4,1.6e5,6.4e5 --repeats 1 "
                     "--seed 3 --grid-n0 6 --out " +
                     out) == 0);
    const std::string first = slurp(fs::path(out) / "series.csv");
    const RunManifest m = read_manifest((fs::path(out) / "manifest.json").string());
    CHECK(dispatch(m.argv) == 0);  // in-process rerun of the stored command
    CHECK(slurp(fs::path(out) / "series.csv") == first);
    for (const auto& [file, sum] : m.checksums)
        CHECK(fnv1a_file((fs::path(out) / file).string()) == sum);
    fs::remove_all(out);
}

TEST_CASE("readout subcommand writes reconstruction and coefficients") {
    const std::string grid = "/tmp/qread_cli_grid.csv";
    const std::string out = "/tmp/qread_cli_readout";
    fs::remove_all(out);
    GridSpec spec{{32}, {1.0}};
    GridFunction g;
    g.spec = spec;
    g.values.resize(32);
    for (int j = 0; j < 32; ++j) g.values[j] = std::sin(2.0 * 3.14159265358979 * j / 32.0) + 1.5;
    write_grid_csv(grid, g);

    const int rc = dispatch({"qread", "readout", "--input", grid, "--method", "fsr", "--shots",
                             "200000", "--seed", "5", "--out", out});
    CHECK(rc == 0);
    CHECK(fs::exists(fs::path(out) / "reconstruction.csv"));
    CHECK(fs::exists(fs::path(out) / "coefficients.csv"));
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
    const RawGrid rec = read_grid_csv((fs::path(out) / "reconstruction.csv").string());
    CHECK(l2ns_error(rec.values, g.values) < 0.05);
    std::remove(grid.c_str());
    fs::remove_all(out);
}

TEST_CASE("config file supplies defaults and flags win") {
    const std::string cfg = "/tmp/qread_cli_cfg.json";
    const std::string out = "/tmp/qread_cli_cfgout";
    fs::remove_all(out);
    {
        std::ofstream o(cfg);
        o << R"({"dim": 3, "eps": 0.001})";
    }
    REQUIRE(!qread_bin().empty());
    std::string printed;
    CHECK(run_binary("estimate-shots --config " + cfg + " --class w21", &printed) == 0);
    CHECK(printed.find("6.9e+08") != std::string::npos);  // fsr at d=3, eps=1e-3
    // flag overrides the config value
    CHECK(run_binary("estimate-shots --config " + cfg + " --class w21 --eps 0.01", &printed) == 0);
    CHECK(printed.find("9.9e+05") != std::string::npos);  // fsr at d=3, eps=1e-2
    std::remove(cfg.c_str());
}
