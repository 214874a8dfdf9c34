// Hardy Z-function and the phase function theta on the critical line,
// evaluated by the Riemann-Siegel formula with up to four correction terms.
#pragma once

#include <stdexcept>

namespace zll {

// Evaluation policy for the Riemann-Siegel core.
//
// correction_terms k means the remainder terms C0..Ck are included; the
// absolute error of hardy_z is then roughly (t/2pi)^(-(2k+3)/4), down to a
// rounding floor of about 1e-10 at t ~ 1e6.
struct RSConfig {
    int correction_terms = 2;  // 0..4
    double t_min = 50.0;       // smallest admissible t (>= 10)
    int theta_terms = 3;       // asymptotic 1/t terms in theta, 1..4

    void validate() const {
        if (correction_terms < 0 || correction_terms > 4)
            throw std::invalid_argument("RSConfig: correction_terms must be in [0,4]");
        if (theta_terms < 1 || theta_terms > 4)
            throw std::invalid_argument("RSConfig: theta_terms must be in [1,4]");
        if (!(t_min >= 10.0))
            throw std::invalid_argument("RSConfig: t_min must be >= 10");
    }
};

struct ZSample {
    double t = 0;
    double z = 0;   // Z(t)
    double z2 = 0;  // Z(t)^2, always z*z
};

// theta(t) = (t/2) ln(t/2pi) - t/2 - pi/8 + 1/(48t) + 7/(5760 t^3) + ...
double theta(double t, const RSConfig& cfg);

// First omitted term of the theta expansion at this config; an upper bound
// for the truncation error of theta().
double theta_truncation(double t, const RSConfig& cfg);

// theta'(t) = (1/2) ln(t/2pi) + derivative of the included 1/t terms.
// Strictly positive for t > 2pi; sets the local oscillation rate of Z.
double theta_deriv(double t, const RSConfig& cfg);

// Z(t) by the Riemann-Siegel main sum plus correction terms.
ZSample hardy_z(double t, const RSConfig& cfg);

// Documented error model for hardy_z at this depth:
// (t/2pi)^(-(2k+3)/4) plus the 1e-10 rounding floor.
double hardy_z_error_bound(double t, int correction_terms);

}  // namespace zll
