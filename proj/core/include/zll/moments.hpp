// Moment integrals and their polynomial main terms: direct quadrature of
// Z^4, the weighted transform of log-polynomials through the ladder, the
// change-of-variables identities, and least-squares recovery of the moment
// polynomial coefficients from cumulative data.
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "zll/ladder.hpp"
#include "zll/lnpoly.hpp"
#include "zll/quadrature.hpp"
#include "zll/rs_zeta.hpp"

namespace zll {

enum class MonomialF { one, ln, ln2, ln3, ln4 };

struct MomentFit {
    LnPoly C;
    double residual_rms = 0;  // relative to the cumulative values
    int windows_used = 0;
    bool c0_pinned = false;
};

// int_T^{T+U} Z^4, quarter-wavelength panels.  The interval overload serves
// cumulative integration, where spans routinely exceed the T/ln T window
// admissibility bound of the transform windows.
QuadResult integrate_z4(double a, double b, const RSConfig& cfg, double tol = 1e-6);
QuadResult integrate_z4(const Window& w, const RSConfig& cfg, double tol = 1e-6);

// Boundary difference of t * sum C[k] ln^(4-k) t over [a, b] (the moment
// polynomial evaluated directly on t).
double main_term(double a, double b, const LnPoly& c);
double main_term(const Window& w, const LnPoly& c);

// int_T^{T+U} { sum D[k] ln^(4-k) phi1(t) } ztilde^2(t) dt.
QuadResult transformed_integral(const Window& w, const LnPoly& d, const LadderTable& table,
                                const LadderModel& model, const RSConfig& cfg, double tol = 1e-6);

// Both sides of the change-of-variables identity for f in the monomial set:
//   first:  int_T^{T+U} f(phi1(t)) ztilde^2(t) dt        (t-side quadrature)
//   second: int_{phi1(T)}^{phi1(T+U)} f(x) dx            (closed form)
std::pair<QuadResult, QuadResult> substitution_check(MonomialF f, const Window& w,
                                                     const LadderTable& table,
                                                     const LadderModel& model, const RSConfig& cfg,
                                                     double tol = 1e-6);

// Reverse form: the target [T, T+U] is the image; endpoints are pulled back
// through phi1_inverse and the t-side integral runs over the preimage.
//   first:  int over [inv(T), inv(T+U)] of f(phi1(t)) ztilde^2(t) dt
//   second: int_T^{T+U} f(x) dx
std::pair<QuadResult, QuadResult> substitution_check_reverse(MonomialF f, const Window& w,
                                                             const LadderTable& table,
                                                             const LadderModel& model,
                                                             const RSConfig& cfg,
                                                             double tol = 1e-6);

// Weighted least squares of cumulative fourth-moment values (T_i, I4_i)
// against T * sum C[k] ln^(4-k) T.  Requires >= 6 points spread over the
// range; throws on an ill-conditioned design.  pin_c0 fixes C[0] = 1/2pi^2.
MomentFit fit_moment_coefficients(std::span<const std::pair<double, double>> cumulative_z4,
                                  bool pin_c0);

// Monomial helpers shared by the identity checks.
LnPoly monomial_poly(MonomialF f);
double eval_monomial(MonomialF f, double x);

}  // namespace zll
