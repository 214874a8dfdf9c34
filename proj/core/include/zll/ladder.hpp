// The ladder transform phi1 and its supporting structures.
//
// The ladder is defined implicitly: phi1(T) is the root x > e of
//
//     G(x) = x ln x + (c - ln 2pi) x + c0 - V(T) = 0,
//
// where V(T) = v0 + int_{anchor}^{T} Z^2(u) du is the cumulative mean-square
// integral.  Differentiating gives the exact derivative
//
//     d phi1 / dT = Z^2(T) / (ln phi1(T) + 1 + c - ln 2pi),
//
// a Z^2 normalized by a slowly varying ~ln t factor, so the transform turns
// integrals of f(phi1(t)) weighted by that derivative into plain integrals
// of f.  First-order expansion of G reproduces the defect law
// t - phi1(t) ~ (1-c) t / ln t ~ (1-c) pi(t).
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zll/rs_zeta.hpp"

namespace zll {

class PrimeTable;

inline constexpr double kEulerC = 0.57721566490153286;
inline constexpr double kLn2Pi = 1.8378770664093455;

// Constants of the implicit ladder model.
struct LadderModel {
    double euler_c = kEulerC;
    double anchor_t0 = 50.0;
    // int_0^50 Z^2, precomputed once by high-accuracy quadrature of
    // |zeta(1/2+it)|^2 (the Riemann-Siegel core is not valid that low).
    double v0 = 115.911735339598989;
    double c0 = 0.0;  // additive calibration constant

    void validate() const;
    // ln x + 1 + c - ln 2pi, the derivative dG/dx
    double gprime(double x) const { return std::log(x) + 1.0 + euler_c - kLn2Pi; }
};

// Cached cumulative mean-square data: strictly increasing nodes t with
// Z^2(t) and int_{anchor}^{t} Z^2.  Node values are exact panel sums
// (quarter-wavelength 15-point Gauss-Legendre); between nodes cum_at()
// interpolates monotonically, with pointwise error bounded by the local
// oscillation of the integral (~ +-3), fine for navigation but not for the
// window experiments, which re-integrate locally (see build_ladder).
class SampleGrid {
  public:
    std::vector<double> t_values;
    std::vector<double> z2_values;
    std::vector<double> cum_v;  // int from t_values.front()

    RSConfig rs;
    double store_stride = 2.0;

    // Build over [anchor_t0, t_max], storing a node roughly every
    // store_stride.  Optionally accumulates int Z^4 checkpoints at the
    // given T values (snapped to stored nodes) in the same sweep.
    static SampleGrid build(double anchor_t0, double t_max, double store_stride,
                            const RSConfig& cfg, std::span<const double> z4_checkpoint_ts = {},
                            std::vector<std::pair<double, double>>* z4_checkpoints = nullptr);

    double t_min() const { return t_values.front(); }
    double t_max() const { return t_values.back(); }

    // interpolated int_{anchor}^{T}; throws std::out_of_range outside coverage
    double cum_at(double T) const;

    // index of the last node with t <= T
    size_t node_below(double T) const;

    void save(const std::string& path) const;
    // Refuses files whose header does not match the expected configuration.
    static SampleGrid load(const std::string& path, const RSConfig& expected_rs);

  private:
    mutable std::vector<double> cum_slopes_;  // lazy PCHIP slopes
    void ensure_slopes() const;
};

// Admissible integration window [T, T+U]; U is capped by T/ln T.
struct Window {
    double T;
    double U;
    Window(double T_, double U_);
};

// V(T) = v0 + cumulative grid integral at T; nondecreasing in T.
double hl_integral(double T, const SampleGrid& grid, const LadderModel& model);

// Root x > e of G(x) = x ln x + (c - ln 2pi) x + c0 - V(T); Newton from
// x0 = T to 1e-12 relative.  Throws if V(T) admits no root > e or the
// iteration fails to converge (signals a grid/model defect).
double phi1_solve(double T, const SampleGrid& grid, const LadderModel& model);

// Tabulated ladder with monotone cubic interpolation (linear as debug mode).
class LadderTable {
  public:
    std::vector<double> t_values;
    std::vector<double> phi1_values;
    int interpolation_order = 3;  // 3 or 1

    // slopes of the model derivative at nodes when built in refined mode
    std::vector<double> slopes;

    double t_min() const { return t_values.front(); }
    double t_max() const { return t_values.back(); }
    double x_min() const { return phi1_values.front(); }
    double x_max() const { return phi1_values.back(); }

    double phi1_at(double t) const;
    double phi1_deriv_at(double t) const;
    // Inverse lookup (monotone bisection then Newton on the interpolant);
    // realizes the reverse map: phi1_inverse(phi1_at(t)) = t.
    double phi1_inverse(double x) const;

    void save(const std::string& path, const LadderModel& model, const RSConfig& rs) const;
    static LadderTable load(const std::string& path, const LadderModel& expected_model,
                            const RSConfig& expected_rs);

    void validate_invariants() const;  // strictly increasing, below diagonal

  private:
    mutable std::vector<double> interp_slopes_;
    void ensure_slopes() const;
};

// Tabulate phi1 over [t0, t1].
//
// With cfg == nullptr nodes come from phi1_solve on the interpolated grid
// (navigation quality: pointwise error is set by the unresolved oscillation
// of the cumulative integral between grid nodes, a few units at stride ~50).
// With cfg set, the span is anchored to a grid node and V is advanced
// node-to-node by direct Gauss-Legendre integration of Z^2 at step
// ~ wavelength/64, giving a table whose interpolant tracks the model to
// ~1e-7 absolute with derivative error below 1e-4 relative; the exact model
// slopes are stored for Hermite interpolation.
LadderTable build_ladder(double t0, double t1, double step, const SampleGrid& grid,
                         const LadderModel& model, const RSConfig* cfg = nullptr);

// Z^2(t) / (ln phi1(t) + 1 + c - ln 2pi): the exact model derivative of
// phi1 (analytically, not by differencing the table).
double z_tilde_sq(double t, const LadderTable& table, const LadderModel& model,
                  const RSConfig& cfg);

// t - phi1(t) > 0, the below-diagonal defect.
double defect(double t, const LadderTable& table);

// Distance between [T, T+U] and its image [phi1(T), phi1(T+U)]:
// T - phi1(T+U).  Negative values are returned (not thrown) and flag a
// violated ordering for that window.
double segment_distance(const Window& w, const LadderTable& table);

// Fit c0 by least squares so that defect(T)/((1-c) pi(T)) tracks 1 over the
// training points; returns the fitted model.  pi values must cover max T.
LadderModel calibrate_c0(const SampleGrid& grid, LadderModel model, const PrimeTable& primes,
                         std::span<const double> training_ts);

}  // namespace zll
