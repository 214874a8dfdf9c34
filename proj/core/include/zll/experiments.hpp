// End-to-end experiment drivers: the splitting measurement, the
// change-of-variables lemma suite, the segment-geometry scan and the
// fourth-moment fit, all sharing cached grids, ladders and prime tables
// through the Lab orchestrator.
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zll/config.hpp"
#include "zll/ladder.hpp"
#include "zll/moments.hpp"
#include "zll/primes.hpp"
#include "zll/quadrature.hpp"

namespace zll {

struct SplitReport {
    double T = 0, U = 0;
    std::string variant = "forward";  // forward | reverse
    std::string coefficients_source;  // fitted | config | unit
    bool admissible = true;           // U <= T/ln T held (exponent mode can violate)
    QuadResult lhs{};                 // direct fourth-moment integral
    QuadResult rhs{};                 // weighted transform of the log-polynomial
    double ratio = 0;                 // rhs / lhs
    bool gap_ok = false;              // image lies strictly left of the source window
    double rho = 0;                   // distance between source and image segments
    double rho_over_prediction = 0;   // rho / ((1-c) pi(T))
    double lower_bound_ratio = 0;     // lhs / (U ln^4 T)
    double x0 = 0, x1 = 0;            // image endpoints
};

struct LemmaWindowReport {
    double T = 0, U = 0;
    std::array<double, 5> monomial_residuals{};  // relative residual per monomial
    double reverse_residual = 0;                 // reverse form, f = 1
    double lemma3_residual = 0;                  // random-polynomial boundary equivalence
    bool pass = false;
};

struct LemmaSuiteReport {
    std::vector<LemmaWindowReport> windows;
    double tolerance = 0;
    bool pass = false;
};

struct GeometryRow {
    double T = 0, U = 0;
    double phi_T = 0, phi_TU = 0;
    double defect_T = 0;
    double increment_over_u = 0;       // (phi1(T+U) - phi1(T)) / U
    double rho = 0;
    double rho_over_prediction = 0;    // rho / ((1-c) pi(T))
    double defect_over_prediction = 0; // defect / ((1-c) pi(T))
    std::int64_t pi_T = 0;
    bool gap_ok = false;   // ordering of the forward image
    bool a1_ok = false;    // reverse point beyond T + U
};

struct GeometryReport {
    std::vector<GeometryRow> rows;
    std::vector<double> trend_window_t;       // left edges of 1e4-long windows
    std::vector<double> trend_defect_mean;    // windowed defect means
    bool trend_nondecreasing = true;
    double c0_used = 0;
    bool pass = false;
};

struct MomentReport {
    std::vector<std::pair<double, double>> checkpoints;  // (T, int_0^T Z^4)
    MomentFit free_fit;
    MomentFit pinned_fit;
    double rms_one_term = 0;          // single-coefficient model residual
    double c0_relative_deviation = 0; // free-fit C0 vs 1/(2 pi^2)
};

// int_0^50 Z^4, precomputed once by high-accuracy quadrature of
// |zeta(1/2+it)|^4 below the Riemann-Siegel validity floor.
inline constexpr double kFourthMomentBelowAnchor = 659.480388831688062;

// Lazily builds and caches everything the runners need.  All products are
// deterministic functions of the configuration and the cache directory
// contents.
class Lab {
  public:
    explicit Lab(RunConfig cfg);

    const RunConfig& config() const { return cfg_; }

    const SampleGrid& grid(double coverage_needed);
    const PrimeTable& primes();
    const LadderModel& model();  // calibrated when cfg.calibrate is set
    const LnPoly& coefficients();
    const MomentReport& fourth_moment();

    // refined ladder covering [lo, hi], memoized per span
    const LadderTable& window_ladder(double lo, double hi);

    // navigation-quality preimage of x under phi1 (error well below 1)
    double inverse_estimate(double x);

    double window_u(double T) const;
    // conservative upper bound for the reverse-iteration point of x
    double reverse_margin(double x) const;

  private:
    RunConfig cfg_;
    std::optional<SampleGrid> grid_;
    std::optional<PrimeTable> primes_;
    std::optional<LadderModel> model_;
    std::optional<LnPoly> coeffs_;
    std::optional<MomentReport> moments_;
    std::vector<std::pair<std::pair<double, double>, std::unique_ptr<LadderTable>>> ladders_;

    std::vector<std::pair<double, double>> z4_checkpoints(const std::vector<double>& ts);
    double grid_coverage_for_config() const;
};

LemmaSuiteReport run_lemma_suite(Lab& lab);
std::vector<SplitReport> run_splitting(Lab& lab);
GeometryReport run_geometry_scan(Lab& lab);

// Full JSON report with the pinned top-level schema; sections not produced
// by a run stay empty.  Identical configs and caches give identical bytes.
std::string report_json(const RunConfig& cfg, const LadderModel& model_used,
                        const LemmaSuiteReport* lemma, const std::vector<SplitReport>* splitting,
                        const GeometryReport* geometry, const MomentReport* moments);

// CSV emission (one row per window) and a plotting script for the merged
// tables; used by the report subcommand.
std::string splitting_csv(const std::vector<SplitReport>& rows);
std::string geometry_csv(const GeometryReport& rep);
std::string lemma_csv(const LemmaSuiteReport& rep);
std::string moment_csv(const MomentReport& rep);
std::string plot_script();

}  // namespace zll
