#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "testutil.hpp"
#include "zll/cli.hpp"
#include "zll/experiments.hpp"
#include "zll/moments.hpp"

using namespace zll;
using nlohmann::json;

namespace {

int run_cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv = {"zll"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string write_test_config(const std::string& name, const std::string& extra = "") {
    const std::string dir = zll_test::cache_dir();
    const std::string path = dir + "/" + name;
    std::ofstream out(path);
    out << "# test configuration\n";
    out << "cache_dir = " << dir << "\n";
    out << "fit_ts = 5e3,1e4,2e4,3e4,5e4,6.5e4,8e4\n";
    out << "prime_limit = 10000000\n";
    out << "calibrate_ts = 9e4,1e5\n";
    out << extra;
    return path;
}

}  // namespace

TEST_CASE("config: file parsing, unknown keys, value validation") {
    const std::string path = write_test_config(
        "cfg_basic.conf", "t_list = 1e5\nu = 500\nseed = 99\ncalibrate = true\n");
    const RunConfig cfg = parse_config_file(path);
    CHECK(cfg.t_list == std::vector<double>{1e5});
    CHECK(cfg.u_abs == 500.0);
    CHECK(cfg.seed == 99);
    CHECK(cfg.calibrate);
    CHECK(cfg.fit_ts.size() == 7);

    const std::string bad1 = write_test_config("cfg_unknown.conf", "no_such_key = 1\n");
    CHECK_THROWS_AS(parse_config_file(bad1), std::invalid_argument);

    const std::string bad2 = write_test_config("cfg_badval.conf", "u = not_a_number\n");
    CHECK_THROWS_AS(parse_config_file(bad2), std::invalid_argument);

    RunConfig boundary;
    boundary.omega = 0.875;  // boundary exponent is allowed
    CHECK_NOTHROW(boundary.validate());
    boundary.omega = 0.9;
    CHECK_THROWS_AS(boundary.validate(), std::invalid_argument);
}

TEST_CASE("cli: usage errors exit with 2") {
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"no-such-subcommand"}) == 2);
    CHECK(run_cli({"verify-lemma", "--no-such-flag"}) == 2);
    CHECK(run_cli({"splitting", "--config", "/nonexistent/path.conf"}) == 2);
    CHECK(run_cli({"geometry", "--omega", "0.93", "--t", "1e5"}) == 2);
}

TEST_CASE("cli: verify-lemma produces residuals and deterministic bytes") {
    const std::string dir = zll_test::cache_dir();
    const std::string cfgp = write_test_config(
        "cfg_lemma.conf", "lemma_t_lo = 1e5\nlemma_t_hi = 1.02e5\nlemma_windows = 3\n");
    const std::string out1 = dir + "/out_lemma1";
    const std::string out2 = dir + "/out_lemma2";
    CHECK(run_cli({"verify-lemma", "--config", cfgp.c_str(), "--out-dir", out1.c_str()}) == 0);
    CHECK(run_cli({"verify-lemma", "--config", cfgp.c_str(), "--out-dir", out2.c_str()}) == 0);

    const std::string j1 = slurp(out1 + "/lemma_report.json");
    const std::string j2 = slurp(out2 + "/lemma_report.json");
    CHECK(j1 == j2);  // identical config and cache -> identical bytes

    const json rep = json::parse(j1);
    REQUIRE(rep["lemma_suite"].size() == 3);
    for (const auto& w : rep["lemma_suite"]) {
        CHECK(w["residuals"].size() == 5);
        for (const char* key : {"one", "ln", "ln2", "ln3", "ln4"})
            CHECK(w["residuals"][key].get<double>() < 1e-6);
        CHECK(w["pass"].get<bool>());
    }
    // provenance block embedded
    CHECK(rep["meta"]["provenance"]["rs"]["correction_terms"].is_number());
    CHECK(rep["meta"]["provenance"]["tolerances"]["lemma_rtol"].is_number());
    CHECK(rep["meta"]["provenance"]["seed"].is_number());
}

TEST_CASE("splitting: forward and reverse rows with cross-checked geometry") {
    RunConfig cfg = zll_test::small_config();
    cfg.coeff_source = "fitted";
    Lab lab(cfg);
    const auto rows = run_splitting(lab);
    REQUIRE(rows.size() == 2);
    const SplitReport& fwd = rows[0];
    const SplitReport& rev = rows[1];
    CHECK(fwd.variant == "forward");
    CHECK(rev.variant == "reverse");
    CHECK(fwd.coefficients_source == "fitted");

    // three independent routes to the same ordering statement
    CHECK(fwd.gap_ok == (fwd.rho > 0));
    CHECK(fwd.gap_ok == (fwd.x1 < fwd.T));
    CHECK(fwd.gap_ok);
    CHECK(fwd.admissible);

    CHECK(fwd.lhs.value > 0);
    CHECK(fwd.rhs.value > 0);
    CHECK(std::abs(fwd.ratio - 1.0) < 0.2);
    CHECK(fwd.lower_bound_ratio > 0);

    // the transform side equals the image-interval main term to high
    // precision (the exact identity inside the measurement)
    const LnPoly c = lab.coefficients();
    const double boundary = fwd.x1 * eval_lnpoly(c, fwd.x1) - fwd.x0 * eval_lnpoly(c, fwd.x0);
    CHECK(std::abs(fwd.rhs.value - boundary) < 1e-5 * std::abs(boundary));

    // reverse side: preimage ordering and matching identity
    CHECK(rev.gap_ok == (rev.x0 > rev.T + rev.U));
    CHECK(rev.gap_ok);
    CHECK(std::abs(rev.ratio - 1.0) < 0.2);
}

TEST_CASE("splitting: unit weight diagnostic mode") {
    RunConfig cfg = zll_test::small_config();
    cfg.unit_d = true;
    Lab lab(cfg);
    const auto rows = run_splitting(lab);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].coefficients_source == "unit");
    // with the unit weight the transform reduces to the image increment
    const double incr = rows[0].x1 - rows[0].x0;
    CHECK(std::abs(rows[0].rhs.value - incr) < 1e-5 * incr);
}

TEST_CASE("splitting: inadmissible exponent windows are reported, not run") {
    RunConfig cfg = zll_test::small_config();
    cfg.omega = 0.875;  // U = T^(0.895) far beyond T/ln T at this scale
    Lab lab(cfg);
    const auto rows = run_splitting(lab);
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].admissible);
    CHECK_FALSE(rows[0].gap_ok);  // image overlaps the source window
    CHECK(rows[0].lhs.evals == 0);
    CHECK(rows[0].rho < 0);
}

TEST_CASE("cli: inadmissible exponent run still exits zero with a warning") {
    const std::string dir = zll_test::cache_dir();
    const std::string cfgp = write_test_config("cfg_omega.conf", "");
    const std::string out = dir + "/out_omega";
    CHECK(run_cli({"splitting", "--config", cfgp.c_str(), "--t", "1e5", "--omega", "0.875",
                   "--out-dir", out.c_str()}) == 0);
    const json rep = json::parse(slurp(out + "/splitting_report.json"));
    REQUIRE(rep["splitting"].size() == 1);
    CHECK_FALSE(rep["splitting"][0]["admissible"].get<bool>());
    CHECK(rep["splitting"][0]["ratio"].is_null());
}

TEST_CASE("geometry scan: orderings, increments and trend data") {
    RunConfig cfg = zll_test::small_config();
    cfg.calibrate = true;
    Lab lab(cfg);
    const GeometryReport rep = run_geometry_scan(lab);
    REQUIRE(rep.rows.size() == 1);
    const GeometryRow& row = rep.rows[0];
    CHECK(row.gap_ok);
    CHECK(row.a1_ok);
    CHECK(row.pi_T == 9592);
    CHECK(row.increment_over_u > 0.9);
    CHECK(row.increment_over_u < 1.1);
    CHECK(row.defect_T > 0);
    CHECK(row.rho > 0);
    CHECK(row.rho_over_prediction > 0.6);
    CHECK(row.rho_over_prediction < 1.35);
    CHECK(row.defect_over_prediction > 0.75);
    CHECK(row.defect_over_prediction < 1.25);
    CHECK(rep.c0_used > 0);
    CHECK(rep.trend_nondecreasing);
}

TEST_CASE("corollary lower-bound ratio is stable across window lengths") {
    auto& lab = zll_test::shared_lab();
    RSConfig rs = lab.grid(0).rs;
    const double T = 1e5;
    const LadderTable& lad = lab.window_ladder(T - 2, T + 2000 + 2);
    const double ln4 = std::pow(std::log(T), 4);
    std::vector<double> ratios;
    for (double U : {500.0, 1000.0, 2000.0}) {
        const double x0 = lad.phi1_at(T), x1 = lad.phi1_at(T + U);
        const QuadResult q = integrate_z4(x0, x1, rs);
        ratios.push_back(q.value / (U * ln4));
    }
    const double mean = (ratios[0] + ratios[1] + ratios[2]) / 3;
    for (double r : ratios) {
        CHECK(r > 0);
        CHECK(std::abs(r - mean) < 0.5 * mean);
    }
}

TEST_CASE("report subcommand merges runs and emits tables plus a plot script") {
    const std::string dir = zll_test::cache_dir();
    const std::string out = dir + "/out_merge";
    const std::string lemma_json = dir + "/out_lemma1/lemma_report.json";
    const std::string cfgp = write_test_config("cfg_geo.conf", "calibrate = true\n");
    const std::string gout = dir + "/out_geo";
    // geometry run may exit 1 if a band check fails at this scale; both
    // outcomes still write the report
    const int rc = run_cli({"geometry", "--config", cfgp.c_str(), "--t", "1e5",
                            "--out-dir", gout.c_str()});
    CHECK(rc <= 1);
    const std::string geo_json = gout + "/geometry_report.json";

    CHECK(run_cli({"report", lemma_json.c_str(), geo_json.c_str(), "--out-dir",
                   out.c_str()}) == 0);
    const json merged = json::parse(slurp(out + "/merged.json"));
    CHECK(merged["lemma_suite"].size() == 3);
    CHECK(merged["geometry"].size() == 1);
    CHECK(slurp(out + "/lemma.csv").find("res_ln4") != std::string::npos);
    CHECK(slurp(out + "/geometry.csv").find("rho_over_prediction") != std::string::npos);
    CHECK(slurp(out + "/plot_report.py").find("matplotlib") != std::string::npos);
}
