// Panel quadrature for oscillatory integrands: fixed-order Gauss-Legendre
// panels sized to a fraction of the local oscillation wavelength, with an
// error estimate from comparing the 15-point rule against the embedded
// 7-point rule on every panel.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace zll {

struct QuadResult {
    double value = 0;
    double err_estimate = 0;  // absolute
    long evals = 0;
    bool converged = true;  // false when the eval budget cut refinement short
};

namespace detail {

// 5-point Gauss-Legendre on [-1, 1] (short-step refinement integrals)
inline constexpr double kGL5X[5] = {
    -9.06179845938663964e-01, -5.38469310105683108e-01, +0.00000000000000000e+00,
    +5.38469310105683108e-01, +9.06179845938663964e-01,
};
inline constexpr double kGL5W[5] = {
    +2.36926885056189088e-01, +4.78628670499366468e-01, +5.68888888888888889e-01,
    +4.78628670499366468e-01, +2.36926885056189088e-01,
};
// 7-point Gauss-Legendre on [-1, 1]
inline constexpr double kGL7X[7] = {
    -9.49107912342758486e-01, -7.41531185599394460e-01, -4.05845151377397184e-01,
    +0.00000000000000000e+00, +4.05845151377397184e-01, +7.41531185599394460e-01,
    +9.49107912342758486e-01,
};
inline constexpr double kGL7W[7] = {
    +1.29484966168870647e-01, +2.79705391489276589e-01, +3.81830050505118312e-01,
    +4.17959183673468959e-01, +3.81830050505118312e-01, +2.79705391489276589e-01,
    +1.29484966168870647e-01,
};
// 15-point Gauss-Legendre on [-1, 1]
inline constexpr double kGL15X[15] = {
    -9.87992518020485377e-01, -9.37273392400705951e-01, -8.48206583410427206e-01,
    -7.24417731360170070e-01, -5.70972172608538830e-01, -3.94151347077563385e-01,
    -2.01194093997434514e-01, +0.00000000000000000e+00, +2.01194093997434514e-01,
    +3.94151347077563385e-01, +5.70972172608538830e-01, +7.24417731360170070e-01,
    +8.48206583410427206e-01, +9.37273392400705951e-01, +9.87992518020485377e-01,
};
inline constexpr double kGL15W[15] = {
    +3.07532419961186465e-02, +7.03660474881080689e-02, +1.07159220467171773e-01,
    +1.39570677926153908e-01, +1.66269205816993781e-01, +1.86161000015561878e-01,
    +1.98431485327111246e-01, +2.02578241925560898e-01, +1.98431485327111246e-01,
    +1.86161000015561878e-01, +1.66269205816993781e-01, +1.39570677926153908e-01,
    +1.07159220467171773e-01, +7.03660474881080689e-02, +3.07532419961186465e-02,
};

template <class F>
void panel_rule(F& f, double a, double b, double& i15, double& err, double& absv) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s15 = 0, s7 = 0, sa = 0;
    for (int j = 0; j < 15; ++j) {
        const double v = f(mid + half * kGL15X[j]);
        s15 += kGL15W[j] * v;
        sa += kGL15W[j] * std::abs(v);
    }
    for (int j = 0; j < 7; ++j) s7 += kGL7W[j] * f(mid + half * kGL7X[j]);
    i15 = s15 * half;
    err = std::abs((s15 - s7) * half);
    absv = sa * half;
}

struct Panel {
    double a, b, value, err, absv;
};

}  // namespace detail

inline constexpr long kDefaultQuadBudget = 50'000'000;

// Integrate f over [a, b].  Panels start at wavelength_hint/4 wide and the
// worst panels are bisected until the summed 15-vs-7 discrepancy drops below
// tol (relative to |value|, with a small absolute floor) or the eval budget
// runs out; a budget stop returns the best effort with converged = false.
template <class F>
QuadResult integrate(F&& f, double a, double b, double tol, double wavelength_hint,
                     long max_evals = kDefaultQuadBudget) {
    if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");
    if (!(tol > 0)) throw std::invalid_argument("integrate: requires tol > 0");
    if (!(wavelength_hint > 0)) throw std::invalid_argument("integrate: requires wavelength_hint > 0");

    const double w0 = wavelength_hint / 4.0;
    const auto n0 = static_cast<std::int64_t>(std::ceil((b - a) / w0));
    std::vector<detail::Panel> panels;
    panels.reserve(static_cast<size_t>(std::min<std::int64_t>(n0, 1 << 20)) + 8);

    QuadResult r;
    for (std::int64_t i = 0; i < n0; ++i) {
        const double pa = a + (b - a) * static_cast<double>(i) / static_cast<double>(n0);
        const double pb = a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(n0);
        detail::Panel p{pa, pb, 0, 0, 0};
        detail::panel_rule(f, pa, pb, p.value, p.err, p.absv);
        r.evals += 22;
        panels.push_back(p);
        if (r.evals > max_evals) break;
    }

    double abs_total = 0;
    auto total = [&panels, &abs_total](QuadResult& out) {
        long double v = 0, e = 0, av = 0;
        for (const auto& p : panels) {
            v += p.value;
            e += p.err;
            av += p.absv;
        }
        out.value = static_cast<double>(v);
        out.err_estimate = static_cast<double>(e);
        abs_total = static_cast<double>(av);
    };
    total(r);

    // refine by bisecting the worst panel; the noise floor keeps pure
    // rounding discrepancies from triggering endless splits under heavy
    // cancellation
    auto target = [&] {
        return tol * std::max(std::abs(r.value), 1e-300) + 64 * 2.2e-16 * abs_total;
    };
    while (r.err_estimate > target()) {
        if (r.evals + 44 > max_evals) {
            r.converged = false;
            break;
        }
        size_t worst = 0;
        for (size_t i = 1; i < panels.size(); ++i)
            if (panels[i].err > panels[worst].err) worst = i;
        if (panels[worst].err == 0.0) break;
        detail::Panel hi = panels[worst];
        const double m = 0.5 * (hi.a + hi.b);
        if (!(m > hi.a && m < hi.b)) break;  // width at the floating floor
        detail::Panel left{hi.a, m, 0, 0, 0}, right{m, hi.b, 0, 0, 0};
        detail::panel_rule(f, left.a, left.b, left.value, left.err, left.absv);
        detail::panel_rule(f, right.a, right.b, right.value, right.err, right.absv);
        r.evals += 44;
        panels[worst] = left;
        panels.push_back(right);
        total(r);
    }
    return r;
}

// Variant for Z-derived integrands: panel widths follow a position-dependent
// wavelength (typically pi / theta'(t)), quarter-wave per panel.  If the
// estimate misses tol the whole span is re-walked once at eighth-wave.
template <class F, class WavelengthFn>
QuadResult integrate_local(F&& f, double a, double b, double tol, WavelengthFn&& wavelength,
                           long max_evals = kDefaultQuadBudget) {
    if (!(a < b)) throw std::invalid_argument("integrate_local: requires a < b");
    QuadResult r;
    for (double frac : {0.25, 0.125}) {
        long double v = 0, e = 0, av = 0;
        long evals = r.evals;
        bool hit_budget = false;
        double t = a;
        while (t < b) {
            double w = std::max(wavelength(t) * frac, 1e-12);
            if (b - t <= 1.25 * w) w = b - t;  // absorb the terminal sliver
            double pv, pe, pa;
            detail::panel_rule(f, t, t + w, pv, pe, pa);
            evals += 22;
            v += pv;
            e += pe;
            av += pa;
            const double tn = t + w;
            if (!(tn > t)) break;
            t = tn;
            if (evals > max_evals) {
                hit_budget = true;
                break;
            }
        }
        r.value = static_cast<double>(v);
        r.err_estimate = static_cast<double>(e);
        r.evals = evals;
        r.converged = !hit_budget;
        const double floor = 64 * 2.2e-16 * static_cast<double>(av);
        if (hit_budget ||
            r.err_estimate <= tol * std::max(std::abs(r.value), 1e-300) + floor)
            break;
    }
    return r;
}

}  // namespace zll
