// Degree-4 polynomials in ln x and the antiderivative coefficient maps
// connecting p(ln x) with d/dx [x * q(ln x)].
//
// Coefficients are stored in DESCENDING powers of ln x:
//   coeffs[k] multiplies ln^(4-k) x,  k = 0..4.
// This is the opposite of the usual ascending convention; every transform
// below is written against the descending layout.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace zll {

struct LnPoly {
    std::array<double, 5> coeffs{};  // coeffs[k] * ln^(4-k) x

    constexpr double operator[](int k) const { return coeffs[static_cast<size_t>(k)]; }
    constexpr double& operator[](int k) { return coeffs[static_cast<size_t>(k)]; }

    friend constexpr bool operator==(const LnPoly&, const LnPoly&) = default;
};

// Coefficient maps as exact linear transforms.  Templated on the scalar so
// tests can run them in integer arithmetic; the double instantiations are
// the production surface below.

// B such that d/dx [x * sum B[k] ln^(4-k) x] = sum A[k] ln^(4-k) x.
template <class T>
constexpr std::array<T, 5> antiderivative_coeffs(const std::array<T, 5>& a) {
    return {a[0],
            T(-4) * a[0] + a[1],
            T(12) * a[0] - T(3) * a[1] + a[2],
            T(-24) * a[0] + T(6) * a[1] - T(2) * a[2] + a[3],
            T(24) * a[0] - T(6) * a[1] + T(2) * a[2] - a[3] + a[4]};
}

// Inverse of antiderivative_coeffs: recovers the integrand coefficients.
template <class T>
constexpr std::array<T, 5> derivative_coeffs(const std::array<T, 5>& b) {
    return {b[0],
            b[1] + T(4) * b[0],
            b[2] + T(3) * b[1],
            b[3] + T(2) * b[2],
            b[4] + b[3]};
}

inline LnPoly b_from_a(const LnPoly& a) { return {antiderivative_coeffs(a.coeffs)}; }
inline LnPoly a_from_b(const LnPoly& b) { return {derivative_coeffs(b.coeffs)}; }

// The theorem-side map taking the moment polynomial C into the weights D of
// the transformed integral.  Structurally the same linear map as a_from_b.
inline LnPoly d_from_c(const LnPoly& c) { return {derivative_coeffs(c.coeffs)}; }

inline double eval_lnpoly(const LnPoly& p, double x) {
    if (!(x > 1.0)) throw std::domain_error("eval_lnpoly: requires x > 1");
    const double u = std::log(x);
    double s = p[0];
    for (int k = 1; k < 5; ++k) s = s * u + p[k];
    return s;
}

// x * sum B[k] ln^(4-k) x, the boundary term of the antiderivative.
inline double antiderivative_value(const LnPoly& b, double x) {
    if (!(x > 1.0)) throw std::domain_error("antiderivative_value: requires x > 1");
    return x * eval_lnpoly(b, x);
}

inline LnPoly operator+(const LnPoly& p, const LnPoly& q) {
    LnPoly r;
    for (int k = 0; k < 5; ++k) r[k] = p[k] + q[k];
    return r;
}

inline LnPoly operator*(double s, const LnPoly& p) {
    LnPoly r;
    for (int k = 0; k < 5; ++k) r[k] = s * p[k];
    return r;
}

}  // namespace zll
