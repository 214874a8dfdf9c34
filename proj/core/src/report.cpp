// Report serialization.  JSON uses ordered keys and contains no clocks or
// hostnames, so identical configurations and caches serialize to identical
// bytes.
#include <json.hpp>
#include <sstream>

#include "zll/experiments.hpp"

namespace zll {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json quad_json(const QuadResult& q) {
    return ordered_json{{"value", q.value},
                        {"err_estimate", q.err_estimate},
                        {"evals", q.evals},
                        {"converged", q.converged}};
}

ordered_json poly_json(const LnPoly& p) {
    return ordered_json{p[0], p[1], p[2], p[3], p[4]};
}

ordered_json fit_json(const MomentFit& f) {
    return ordered_json{{"C", poly_json(f.C)},
                        {"residual_rms", f.residual_rms},
                        {"windows_used", f.windows_used},
                        {"c0_pinned", f.c0_pinned}};
}

ordered_json config_json(const RunConfig& c, const LadderModel& model_used) {
    ordered_json j;
    j["t_list"] = c.t_list;
    j["u"] = c.u_abs;
    j["omega"] = c.omega;
    j["epsilon"] = c.epsilon;
    j["rs"] = {{"correction_terms", c.rs.correction_terms},
               {"t_min", c.rs.t_min},
               {"theta_terms", c.rs.theta_terms}};
    j["ladder_model"] = {{"euler_c", model_used.euler_c},
                         {"anchor_t0", model_used.anchor_t0},
                         {"v0", model_used.v0},
                         {"c0", model_used.c0},
                         {"c0_calibrated", c.calibrate}};
    j["coeff_source"] = c.coeff_source;
    j["fit_ts"] = c.fit_ts;
    j["fit_pin_c0"] = c.fit_pin_c0;
    j["tolerances"] = {{"quad_tol", c.quad_tol},
                       {"lemma_rtol", c.lemma_rtol},
                       {"theorem_rtol", c.theorem_rtol},
                       {"split_band", c.split_band}};
    j["lemma"] = {{"windows", c.lemma_windows}, {"t_lo", c.lemma_t_lo}, {"t_hi", c.lemma_t_hi}};
    j["unit_d"] = c.unit_d;
    j["seed"] = c.seed;
    j["grid_stride"] = c.grid_stride;
    j["prime_limit"] = c.prime_limit;
    return j;
}

}  // namespace

std::string report_json(const RunConfig& cfg, const LadderModel& model_used,
                        const LemmaSuiteReport* lemma, const std::vector<SplitReport>* splitting,
                        const GeometryReport* geometry, const MomentReport* moments) {
    ordered_json j;
    j["meta"] = {{"tool", "zll"},
                 {"format", "zll-report-v1"},
                 {"provenance", config_json(cfg, model_used)}};

    j["lemma_suite"] = ordered_json::array();
    if (lemma) {
        for (const auto& w : lemma->windows) {
            j["lemma_suite"].push_back(
                {{"T", w.T},
                 {"U", w.U},
                 {"residuals",
                  {{"one", w.monomial_residuals[0]},
                   {"ln", w.monomial_residuals[1]},
                   {"ln2", w.monomial_residuals[2]},
                   {"ln3", w.monomial_residuals[3]},
                   {"ln4", w.monomial_residuals[4]}}},
                 {"reverse_residual", w.reverse_residual},
                 {"lemma3_residual", w.lemma3_residual},
                 {"pass", w.pass}});
        }
    }

    j["splitting"] = ordered_json::array();
    if (splitting) {
        for (const auto& s : *splitting) {
            ordered_json row{{"variant", s.variant},
                             {"T", s.T},
                             {"U", s.U},
                             {"admissible", s.admissible},
                             {"coefficients_source", s.coefficients_source},
                             {"gap_ok", s.gap_ok},
                             {"rho", s.rho},
                             {"rho_over_prediction", s.rho_over_prediction},
                             {"x0", s.x0},
                             {"x1", s.x1}};
            if (s.admissible) {
                row["lhs"] = quad_json(s.lhs);
                row["rhs"] = quad_json(s.rhs);
                row["ratio"] = s.ratio;
                row["lower_bound_ratio"] = s.lower_bound_ratio;
            } else {
                row["lhs"] = nullptr;
                row["rhs"] = nullptr;
                row["ratio"] = nullptr;
                row["lower_bound_ratio"] = nullptr;
            }
            j["splitting"].push_back(row);
        }
    }

    j["geometry"] = ordered_json::array();
    if (geometry) {
        for (const auto& r : geometry->rows) {
            j["geometry"].push_back({{"T", r.T},
                                     {"U", r.U},
                                     {"phi_T", r.phi_T},
                                     {"phi_TU", r.phi_TU},
                                     {"defect", r.defect_T},
                                     {"increment_over_u", r.increment_over_u},
                                     {"rho", r.rho},
                                     {"pi_T", r.pi_T},
                                     {"rho_over_prediction", r.rho_over_prediction},
                                     {"defect_over_prediction", r.defect_over_prediction},
                                     {"gap_ok", r.gap_ok},
                                     {"a1_ok", r.a1_ok}});
        }
        j["geometry_trend"] = {{"window_t", geometry->trend_window_t},
                               {"defect_mean", geometry->trend_defect_mean},
                               {"nondecreasing", geometry->trend_nondecreasing},
                               {"c0_used", geometry->c0_used}};
    }

    if (moments) {
        ordered_json cps = ordered_json::array();
        for (auto& [t, v] : moments->checkpoints) cps.push_back({{"T", t}, {"I4", v}});
        j["moment_fit"] = {{"checkpoints", cps},
                           {"free", fit_json(moments->free_fit)},
                           {"pinned", fit_json(moments->pinned_fit)},
                           {"rms_one_term", moments->rms_one_term},
                           {"c0_relative_deviation", moments->c0_relative_deviation}};
    } else {
        j["moment_fit"] = nullptr;
    }

    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV tables

namespace {
std::string g17(double v) {
    char b[40];
    std::snprintf(b, sizeof(b), "%.17g", v);
    return b;
}
}  // namespace

std::string splitting_csv(const std::vector<SplitReport>& rows) {
    std::ostringstream os;
    os << "variant,T,U,admissible,coefficients_source,lhs,lhs_err,lhs_evals,rhs,rhs_err,"
          "rhs_evals,ratio,gap_ok,rho,rho_over_prediction,lower_bound_ratio,x0,x1\n";
    for (const auto& s : rows) {
        os << s.variant << ',' << g17(s.T) << ',' << g17(s.U) << ',' << (s.admissible ? 1 : 0)
           << ',' << s.coefficients_source << ',' << g17(s.lhs.value) << ','
           << g17(s.lhs.err_estimate) << ',' << s.lhs.evals << ',' << g17(s.rhs.value) << ','
           << g17(s.rhs.err_estimate) << ',' << s.rhs.evals << ',' << g17(s.ratio) << ','
           << (s.gap_ok ? 1 : 0) << ',' << g17(s.rho) << ',' << g17(s.rho_over_prediction) << ','
           << g17(s.lower_bound_ratio) << ',' << g17(s.x0) << ',' << g17(s.x1) << "\n";
    }
    return os.str();
}

std::string geometry_csv(const GeometryReport& rep) {
    std::ostringstream os;
    os << "T,U,phi_T,phi_TU,defect,increment_over_u,rho,pi_T,rho_over_prediction,"
          "defect_over_prediction,gap_ok,a1_ok\n";
    for (const auto& r : rep.rows) {
        os << g17(r.T) << ',' << g17(r.U) << ',' << g17(r.phi_T) << ',' << g17(r.phi_TU) << ','
           << g17(r.defect_T) << ',' << g17(r.increment_over_u) << ',' << g17(r.rho) << ','
           << r.pi_T << ',' << g17(r.rho_over_prediction) << ',' << g17(r.defect_over_prediction)
           << ',' << (r.gap_ok ? 1 : 0) << ',' << (r.a1_ok ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string lemma_csv(const LemmaSuiteReport& rep) {
    std::ostringstream os;
    os << "T,U,res_one,res_ln,res_ln2,res_ln3,res_ln4,res_reverse,res_lemma3,pass\n";
    for (const auto& w : rep.windows) {
        os << g17(w.T) << ',' << g17(w.U);
        for (double r : w.monomial_residuals) os << ',' << g17(r);
        os << ',' << g17(w.reverse_residual) << ',' << g17(w.lemma3_residual) << ','
           << (w.pass ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string moment_csv(const MomentReport& rep) {
    std::ostringstream os;
    os << "T,I4,free_fit_pred,pinned_fit_pred\n";
    for (auto& [t, v] : rep.checkpoints) {
        os << g17(t) << ',' << g17(v) << ',' << g17(t * eval_lnpoly(rep.free_fit.C, t)) << ','
           << g17(t * eval_lnpoly(rep.pinned_fit.C, t)) << "\n";
    }
    return os.str();
}

std::string plot_script() {
    return R"PY(#!/usr/bin/env python3
# Plots the CSV tables emitted by `zll report`.  Usage: plot_report.py <dir>
import os, sys
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import csv

d = sys.argv[1] if len(sys.argv) > 1 else "."

def read(name):
    path = os.path.join(d, name)
    if not os.path.exists(path):
        return None
    with open(path) as f:
        return list(csv.DictReader(f))

fig_idx = 0
def save(fig, name):
    global fig_idx
    fig.tight_layout()
    fig.savefig(os.path.join(d, name), dpi=130)
    plt.close(fig)

rows = read("splitting.csv")
if rows:
    fwd = [r for r in rows if r["variant"] == "forward" and r["admissible"] == "1"]
    if fwd:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.axhline(1.0, color="gray", lw=0.8)
        ax.plot([float(r["T"]) for r in fwd], [float(r["ratio"]) for r in fwd], "o-")
        ax.set_xscale("log"); ax.set_xlabel("T"); ax.set_ylabel("rhs / lhs")
        ax.set_title("splitting ratio (forward)")
        save(fig, "splitting_ratio.png")

rows = read("geometry.csv")
if rows:
    fig, ax = plt.subplots(figsize=(6, 4))
    T = [float(r["T"]) for r in rows]
    ax.plot(T, [float(r["rho_over_prediction"]) for r in rows], "o-", label="rho / ((1-c) pi(T))")
    ax.plot(T, [float(r["defect_over_prediction"]) for r in rows], "s-", label="defect / ((1-c) pi(T))")
    ax.plot(T, [float(r["increment_over_u"]) for r in rows], "^-", label="increment / U")
    ax.axhline(1.0, color="gray", lw=0.8)
    ax.set_xscale("log"); ax.set_xlabel("T"); ax.legend()
    ax.set_title("segment geometry")
    save(fig, "geometry.png")

rows = read("lemma.csv")
if rows:
    fig, ax = plt.subplots(figsize=(6, 4))
    keys = ["res_one", "res_ln", "res_ln2", "res_ln3", "res_ln4"]
    for k in keys:
        ax.plot([float(r["T"]) for r in rows], [float(r[k]) for r in rows], ".", label=k)
    ax.set_yscale("log"); ax.set_xlabel("T"); ax.set_ylabel("relative residual")
    ax.legend(fontsize=7); ax.set_title("substitution identity residuals")
    save(fig, "lemma_residuals.png")

rows = read("moment.csv")
if rows:
    fig, ax = plt.subplots(figsize=(6, 4))
    T = [float(r["T"]) for r in rows]
    ax.plot(T, [float(r["I4"]) for r in rows], "o", label="cumulative data")
    ax.plot(T, [float(r["free_fit_pred"]) for r in rows], "-", label="free fit")
    ax.plot(T, [float(r["pinned_fit_pred"]) for r in rows], "--", label="pinned fit")
    ax.set_xscale("log"); ax.set_yscale("log"); ax.legend()
    ax.set_xlabel("T"); ax.set_title("fourth moment and fitted main term")
    save(fig, "moment_fit.png")

print("plots written to", d)
)PY";
}

}  // namespace zll
