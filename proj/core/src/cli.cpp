#include "zll/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "zll/experiments.hpp"

namespace zll {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct CliFlags {
    std::string config_path;
    std::vector<double> t;
    double u = -1, omega = -10, epsilon = -1, tol = -1;
    std::string cache_dir, out_dir, format;
    std::uint64_t seed = 0;
    bool seed_set = false, calibrate = false, pin_c0 = false, unit_d = false;
    int windows = -1;
    double t_max = -1, step = -1;
    std::vector<double> fit_ts;
};

void add_common(CLI::App* sub, CliFlags& f) {
    sub->add_option("--config", f.config_path, "flat key = value config file");
    sub->add_option("--t", f.t, "window left endpoint(s) T")->delimiter(',');
    sub->add_option("--u", f.u, "window length U (absolute mode)");
    sub->add_option("--omega", f.omega, "exponent mode: U = T^(omega + 2 epsilon)");
    sub->add_option("--epsilon", f.epsilon, "exponent mode epsilon");
    sub->add_option("--tol", f.tol, "quadrature and identity tolerance");
    sub->add_option("--cache-dir", f.cache_dir, "cache directory for grids/ladders/primes");
    sub->add_option("--out-dir", f.out_dir, "report output directory");
    sub->add_option("--seed", f.seed, "random seed for window draws")
        ->each([&f](const std::string&) { f.seed_set = true; });
    sub->add_option("--format", f.format, "report format: json or csv (csv adds tables)")
        ->check(CLI::IsMember({"json", "csv"}));
}

RunConfig make_config(const CliFlags& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) cfg = parse_config_file(f.config_path);
    if (!f.t.empty()) cfg.t_list = f.t;
    if (f.u > 0) cfg.u_abs = f.u;
    if (f.omega > -10) cfg.omega = f.omega;
    if (f.epsilon > 0) cfg.epsilon = f.epsilon;
    if (f.tol > 0) {
        cfg.quad_tol = f.tol;
        cfg.lemma_rtol = f.tol;
    }
    if (!f.cache_dir.empty()) cfg.cache_dir = f.cache_dir;
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.seed_set) cfg.seed = f.seed;
    if (!f.format.empty()) cfg.format = f.format;
    if (f.calibrate) cfg.calibrate = true;
    if (f.pin_c0) cfg.fit_pin_c0 = true;
    if (f.unit_d) cfg.unit_d = true;
    if (f.windows > 0) cfg.lemma_windows = f.windows;
    if (!f.fit_ts.empty()) cfg.fit_ts = f.fit_ts;
    cfg.validate();
    return cfg;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

void emit(const RunConfig& cfg, const std::string& name, const std::string& json,
          const std::string& csv = "") {
    fs::create_directories(cfg.out_dir);
    const std::string jpath = cfg.out_dir + "/" + name + ".json";
    write_file(jpath, json);
    std::cout << "wrote " << jpath << "\n";
    if (cfg.format == "csv" && !csv.empty()) {
        const std::string cpath = cfg.out_dir + "/" + name + ".csv";
        write_file(cpath, csv);
        std::cout << "wrote " << cpath << "\n";
    }
}

// json -> csv converters for the report merger
std::string csv_from_splitting(const ordered_json& arr);
std::string csv_from_geometry(const ordered_json& arr);
std::string csv_from_lemma(const ordered_json& arr);
std::string csv_from_moment(const ordered_json& m);

int run_report(const std::vector<std::string>& inputs, const std::string& out_dir,
               const std::string& format) {
    ordered_json merged;
    merged["meta"] = ordered_json::array();
    merged["lemma_suite"] = ordered_json::array();
    merged["splitting"] = ordered_json::array();
    merged["geometry"] = ordered_json::array();
    merged["moment_fit"] = nullptr;
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) {
            std::cerr << "report: cannot open " << path << "\n";
            return 2;
        }
        ordered_json j = ordered_json::parse(in, nullptr, true);
        merged["meta"].push_back(j.value("meta", ordered_json{}));
        for (const char* key : {"lemma_suite", "splitting", "geometry"})
            for (auto& row : j.value(key, ordered_json::array())) merged[key].push_back(row);
        if (j.contains("moment_fit") && !j["moment_fit"].is_null())
            merged["moment_fit"] = j["moment_fit"];
        if (j.contains("geometry_trend")) merged["geometry_trend"] = j["geometry_trend"];
    }
    fs::create_directories(out_dir);
    write_file(out_dir + "/merged.json", merged.dump(2) + "\n");
    std::cout << "wrote " << out_dir << "/merged.json\n";
    if (format != "json") {
        if (!merged["splitting"].empty())
            write_file(out_dir + "/splitting.csv", csv_from_splitting(merged["splitting"]));
        if (!merged["geometry"].empty())
            write_file(out_dir + "/geometry.csv", csv_from_geometry(merged["geometry"]));
        if (!merged["lemma_suite"].empty())
            write_file(out_dir + "/lemma.csv", csv_from_lemma(merged["lemma_suite"]));
        if (!merged["moment_fit"].is_null())
            write_file(out_dir + "/moment.csv", csv_from_moment(merged["moment_fit"]));
    }
    write_file(out_dir + "/plot_report.py", plot_script());
    std::cout << "wrote " << out_dir << "/plot_report.py\n";
    return 0;
}

std::string jnum(const ordered_json& v) {
    if (v.is_null()) return "nan";
    char b[40];
    std::snprintf(b, sizeof(b), "%.17g", v.get<double>());
    return b;
}

std::string csv_from_splitting(const ordered_json& arr) {
    std::string s =
        "variant,T,U,admissible,coefficients_source,lhs,lhs_err,lhs_evals,rhs,rhs_err,rhs_evals,"
        "ratio,gap_ok,rho,rho_over_prediction,lower_bound_ratio,x0,x1\n";
    for (auto& r : arr) {
        const bool adm = r["admissible"].get<bool>();
        s += r["variant"].get<std::string>() + "," + jnum(r["T"]) + "," + jnum(r["U"]) + "," +
             (adm ? "1" : "0") + "," + r["coefficients_source"].get<std::string>() + ",";
        if (adm) {
            s += jnum(r["lhs"]["value"]) + "," + jnum(r["lhs"]["err_estimate"]) + "," +
                 std::to_string(r["lhs"]["evals"].get<long>()) + "," + jnum(r["rhs"]["value"]) +
                 "," + jnum(r["rhs"]["err_estimate"]) + "," +
                 std::to_string(r["rhs"]["evals"].get<long>()) + "," + jnum(r["ratio"]);
        } else {
            s += "nan,nan,0,nan,nan,0,nan";
        }
        s += std::string(",") + (r["gap_ok"].get<bool>() ? "1" : "0") + "," + jnum(r["rho"]) +
             "," + jnum(r["rho_over_prediction"]) + "," +
             (adm ? jnum(r["lower_bound_ratio"]) : "nan") + "," + jnum(r["x0"]) + "," +
             jnum(r["x1"]) + "\n";
    }
    return s;
}

std::string csv_from_geometry(const ordered_json& arr) {
    std::string s =
        "T,U,phi_T,phi_TU,defect,increment_over_u,rho,pi_T,rho_over_prediction,"
        "defect_over_prediction,gap_ok,a1_ok\n";
    for (auto& r : arr) {
        s += jnum(r["T"]) + "," + jnum(r["U"]) + "," + jnum(r["phi_T"]) + "," +
             jnum(r["phi_TU"]) + "," + jnum(r["defect"]) + "," + jnum(r["increment_over_u"]) +
             "," + jnum(r["rho"]) + "," + std::to_string(r["pi_T"].get<long long>()) + "," +
             jnum(r["rho_over_prediction"]) + "," + jnum(r["defect_over_prediction"]) + "," +
             (r["gap_ok"].get<bool>() ? "1" : "0") + "," + (r["a1_ok"].get<bool>() ? "1" : "0") +
             "\n";
    }
    return s;
}

std::string csv_from_lemma(const ordered_json& arr) {
    std::string s = "T,U,res_one,res_ln,res_ln2,res_ln3,res_ln4,res_reverse,res_lemma3,pass\n";
    for (auto& r : arr) {
        s += jnum(r["T"]) + "," + jnum(r["U"]);
        for (const char* k : {"one", "ln", "ln2", "ln3", "ln4"})
            s += "," + jnum(r["residuals"][k]);
        s += "," + jnum(r["reverse_residual"]) + "," + jnum(r["lemma3_residual"]) + "," +
             (r["pass"].get<bool>() ? "1" : "0") + "\n";
    }
    return s;
}

std::string csv_from_moment(const ordered_json& m) {
    std::string s = "T,I4\n";
    for (auto& c : m["checkpoints"]) s += jnum(c["T"]) + "," + jnum(c["I4"]) + "\n";
    return s;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"numerical laboratory for critical-line moment integrals and the ladder "
                 "transform of the Hardy Z-function"};
    app.require_subcommand(1);

    CliFlags f;

    auto* sample = app.add_subcommand("sample-z", "build or extend the cumulative Z^2 grid cache");
    sample->add_option("--t-max", f.t_max, "grid coverage target")->required();
    add_common(sample, f);

    auto* blad = app.add_subcommand("build-ladder", "tabulate and persist a navigation ladder");
    blad->add_option("--t-max", f.t_max, "ladder coverage end")->required();
    blad->add_option("--step", f.step, "node spacing (default 2.0)");
    add_common(blad, f);

    auto* lemma = app.add_subcommand("verify-lemma",
                                     "residuals of the change-of-variables identities");
    lemma->add_option("--windows", f.windows, "number of random windows");
    add_common(lemma, f);

    auto* split = app.add_subcommand("splitting", "both sides of the nonlocal splitting formula");
    split->add_flag("--calibrate", f.calibrate, "calibrate c0 before running");
    split->add_flag("--unit-d", f.unit_d, "diagnostic mode: unit weight polynomial");
    add_common(split, f);

    auto* geo = app.add_subcommand("geometry", "defect, segment distance and ordering scan");
    geo->add_flag("--calibrate", f.calibrate, "calibrate c0 before running");
    add_common(geo, f);

    auto* fourth = app.add_subcommand("fourth-moment",
                                      "cumulative fourth moment checkpoints and coefficient fit");
    fourth->add_option("--fit-ts", f.fit_ts, "checkpoint T values")->delimiter(',');
    fourth->add_flag("--pin-c0", f.pin_c0, "pin the leading coefficient to 1/(2 pi^2)");
    add_common(fourth, f);

    auto* rep = app.add_subcommand("report", "merge JSON reports, emit CSV tables and a plot script");
    std::vector<std::string> inputs;
    rep->add_option("inputs", inputs, "input report JSON files")->required();
    add_common(rep, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints message/usage
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (rep->parsed()) {
            const std::string out_dir = f.out_dir.empty() ? "." : f.out_dir;
            const std::string format = f.format.empty() ? "csv" : f.format;
            return run_report(inputs, out_dir, format);
        }

        RunConfig cfg = make_config(f);
        Lab lab(cfg);

        if (sample->parsed()) {
            const SampleGrid& g = lab.grid(f.t_max);
            std::cout << "grid nodes=" << g.t_values.size() << " coverage=[" << g.t_min() << ", "
                      << g.t_max() << "] cum_v(t_max)=" << g.cum_v.back() << "\n";
            return 0;
        }
        if (blad->parsed()) {
            const double lo = cfg.t_list.front();
            const double step = f.step > 0 ? f.step : 2.0;
            const SampleGrid& g = lab.grid(f.t_max + 10);
            LadderTable t = build_ladder(std::max(lo, cfg.model.anchor_t0 + 10), f.t_max, step, g,
                                         lab.model());
            const std::string path = cfg.cache_dir + "/ladder_nav.csv";
            t.save(path, lab.model(), cfg.rs);
            std::cout << "ladder nodes=" << t.t_values.size() << " coverage=[" << t.t_min()
                      << ", " << t.t_max() << "] saved " << path << "\n";
            return 0;
        }
        if (lemma->parsed()) {
            LemmaSuiteReport r = run_lemma_suite(lab);
            emit(cfg, "lemma_report",
                 report_json(cfg, lab.model(), &r, nullptr, nullptr, nullptr), lemma_csv(r));
            std::cout << (r.pass ? "lemma suite: PASS" : "lemma suite: FAIL") << "\n";
            return r.pass ? 0 : 1;
        }
        if (split->parsed()) {
            std::vector<SplitReport> rows = run_splitting(lab);
            const MomentReport* m =
                (cfg.coeff_source == "fitted" && !cfg.unit_d) ? &lab.fourth_moment() : nullptr;
            emit(cfg, "splitting_report",
                 report_json(cfg, lab.model(), nullptr, &rows, nullptr, m), splitting_csv(rows));
            bool pass = true;
            for (const auto& r : rows) {
                if (!r.admissible) {
                    std::cout << "warning: window T=" << r.T << " U=" << r.U
                              << " violates U <= T/ln T; geometry reported, integrals skipped\n";
                    continue;
                }
                if (r.coefficients_source != "unit")
                    pass = pass && std::abs(r.ratio - 1.0) <= cfg.split_band;
            }
            std::cout << (pass ? "splitting: PASS" : "splitting: FAIL") << "\n";
            return pass ? 0 : 1;
        }
        if (geo->parsed()) {
            GeometryReport r = run_geometry_scan(lab);
            emit(cfg, "geometry_report",
                 report_json(cfg, lab.model(), nullptr, nullptr, &r, nullptr), geometry_csv(r));
            std::cout << (r.pass ? "geometry: PASS" : "geometry: FAIL") << "\n";
            return r.pass ? 0 : 1;
        }
        if (fourth->parsed()) {
            const MomentReport& m = lab.fourth_moment();
            emit(cfg, "moment_report",
                 report_json(cfg, lab.model(), nullptr, nullptr, nullptr, &m), moment_csv(m));
            const bool pass = m.free_fit.residual_rms <= m.rms_one_term;
            std::cout << "free-fit C0 = " << m.free_fit.C[0]
                      << " (relative deviation from 1/2pi^2: " << m.c0_relative_deviation
                      << ")\n";
            std::cout << (pass ? "fourth-moment: PASS" : "fourth-moment: FAIL") << "\n";
            return pass ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace zll
