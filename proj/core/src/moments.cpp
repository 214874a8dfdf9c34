#include "zll/moments.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace zll {
namespace {

constexpr double kPi = 3.141592653589793238462643383279;

double poly_boundary(const LnPoly& b, double x0, double x1) {
    return antiderivative_value(b, x1) - antiderivative_value(b, x0);
}

}  // namespace

LnPoly monomial_poly(MonomialF f) {
    LnPoly p{};
    switch (f) {
        case MonomialF::one: p[4] = 1; break;
        case MonomialF::ln: p[3] = 1; break;
        case MonomialF::ln2: p[2] = 1; break;
        case MonomialF::ln3: p[1] = 1; break;
        case MonomialF::ln4: p[0] = 1; break;
    }
    return p;
}

double eval_monomial(MonomialF f, double x) {
    const double u = std::log(x);
    switch (f) {
        case MonomialF::one: return 1.0;
        case MonomialF::ln: return u;
        case MonomialF::ln2: return u * u;
        case MonomialF::ln3: return u * u * u;
        case MonomialF::ln4: return (u * u) * (u * u);
    }
    return 0;
}

QuadResult integrate_z4(double a, double b, const RSConfig& cfg, double tol) {
    cfg.validate();
    auto f = [&cfg](double t) {
        const double z2 = hardy_z(t, cfg).z2;
        return z2 * z2;
    };
    auto lam = [&cfg](double t) { return kPi / theta_deriv(t, cfg); };
    return integrate_local(f, a, b, tol, lam);
}

QuadResult integrate_z4(const Window& w, const RSConfig& cfg, double tol) {
    return integrate_z4(w.T, w.T + w.U, cfg, tol);
}

double main_term(double a, double b, const LnPoly& c) {
    if (!(a > 1.0)) throw std::domain_error("main_term: left endpoint must exceed 1");
    return b * eval_lnpoly(c, b) - a * eval_lnpoly(c, a);
}

double main_term(const Window& w, const LnPoly& c) { return main_term(w.T, w.T + w.U, c); }

QuadResult transformed_integral(const Window& w, const LnPoly& d, const LadderTable& table,
                                const LadderModel& model, const RSConfig& cfg, double tol) {
    cfg.validate();
    auto f = [&](double t) {
        const double x = table.phi1_at(t);
        return eval_lnpoly(d, x) * hardy_z(t, cfg).z2 / model.gprime(x);
    };
    auto lam = [&cfg](double t) { return kPi / theta_deriv(t, cfg); };
    return integrate_local(f, w.T, w.T + w.U, tol, lam);
}

namespace {

std::pair<QuadResult, QuadResult> substitution_pair(MonomialF f, double t0, double t1, double x0,
                                                    double x1, const LadderTable& table,
                                                    const LadderModel& model, const RSConfig& cfg,
                                                    double tol) {
    auto lhs_f = [&](double t) {
        const double x = table.phi1_at(t);
        return eval_monomial(f, x) * hardy_z(t, cfg).z2 / model.gprime(x);
    };
    auto lam = [&cfg](double t) { return kPi / theta_deriv(t, cfg); };
    QuadResult lhs = integrate_local(lhs_f, t0, t1, tol, lam);

    // closed-form right-hand side: x times the matching antiderivative
    // polynomial, differenced at the endpoints
    const LnPoly b = b_from_a(monomial_poly(f));
    QuadResult rhs;
    rhs.value = poly_boundary(b, x0, x1);
    rhs.err_estimate =
        4e-16 * (std::abs(antiderivative_value(b, x1)) + std::abs(antiderivative_value(b, x0)));
    rhs.evals = 1;
    return {lhs, rhs};
}

}  // namespace

std::pair<QuadResult, QuadResult> substitution_check(MonomialF f, const Window& w,
                                                     const LadderTable& table,
                                                     const LadderModel& model, const RSConfig& cfg,
                                                     double tol) {
    cfg.validate();
    const double x0 = table.phi1_at(w.T);
    const double x1 = table.phi1_at(w.T + w.U);
    return substitution_pair(f, w.T, w.T + w.U, x0, x1, table, model, cfg, tol);
}

std::pair<QuadResult, QuadResult> substitution_check_reverse(MonomialF f, const Window& w,
                                                             const LadderTable& table,
                                                             const LadderModel& model,
                                                             const RSConfig& cfg, double tol) {
    cfg.validate();
    const double t0 = table.phi1_inverse(w.T);
    const double t1 = table.phi1_inverse(w.T + w.U);
    return substitution_pair(f, t0, t1, w.T, w.T + w.U, table, model, cfg, tol);
}

MomentFit fit_moment_coefficients(std::span<const std::pair<double, double>> cumulative_z4,
                                  bool pin_c0) {
    const int n = static_cast<int>(cumulative_z4.size());
    if (n < 6)
        throw std::invalid_argument("fit_moment_coefficients: need at least 6 cumulative values");

    const double c0_fixed = 1.0 / (2.0 * kPi * kPi);
    const int unknowns = pin_c0 ? 4 : 5;

    Eigen::MatrixXd X(n, unknowns);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double T = cumulative_z4[static_cast<size_t>(i)].first;
        const double I = cumulative_z4[static_cast<size_t>(i)].second;
        if (!(T > 1) || !(I > 0))
            throw std::invalid_argument("fit_moment_coefficients: bad cumulative value");
        const double L = std::log(T);
        const double wgt = 1.0 / I;  // relative residuals
        double target = I;
        if (pin_c0) target -= c0_fixed * T * L * L * L * L;
        for (int k = 0; k < unknowns; ++k) {
            const int kk = pin_c0 ? k + 1 : k;
            X(i, k) = T * std::pow(L, 4 - kk) * wgt;
        }
        y(i) = target * wgt;
    }

    // column scaling, then SVD for a conditioning check
    Eigen::VectorXd scale(unknowns);
    for (int k = 0; k < unknowns; ++k) {
        scale(k) = X.col(k).norm();
        if (scale(k) == 0) scale(k) = 1;
        X.col(k) /= scale(k);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(unknowns - 1);
    if (!(cond < 1e12))
        throw std::runtime_error("fit_moment_coefficients: ill-conditioned design matrix "
                                 "(checkpoints too clustered)");
    Eigen::VectorXd sol = svd.solve(y);
    for (int k = 0; k < unknowns; ++k) sol(k) /= scale(k);

    MomentFit fit;
    fit.c0_pinned = pin_c0;
    fit.windows_used = n;
    if (pin_c0) {
        fit.C[0] = c0_fixed;
        for (int k = 0; k < 4; ++k) fit.C[k + 1] = sol(k);
    } else {
        for (int k = 0; k < 5; ++k) fit.C[k] = sol(k);
    }

    double ss = 0;
    for (int i = 0; i < n; ++i) {
        const double T = cumulative_z4[static_cast<size_t>(i)].first;
        const double I = cumulative_z4[static_cast<size_t>(i)].second;
        const double pred = T * eval_lnpoly(fit.C, T);
        const double r = (pred - I) / I;
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

}  // namespace zll
