#include "zll/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "zll/detail/interp.hpp"
#include "zll/primes.hpp"
#include "zll/quadrature.hpp"

#ifdef ZLL_HAVE_OPENMP
#include <omp.h>
#endif

namespace zll {
namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// Newton solve of G(x) = x ln x + (c - ln2pi) x + c0 - V = 0 from x0,
// assuming x0 is above the root (G convex, so iterates descend monotonically).
double solve_g(double V, const LadderModel& m, double x0, int max_iter = 100) {
    const double e = std::exp(1.0);
    const double g_at_e = e * (1.0 + m.euler_c - kLn2Pi) + m.c0 - V;
    if (!(g_at_e < 0))
        throw std::domain_error("phi1_solve: V(T) below admissible range (no root > e)");
    double x = std::max(x0, 2 * e);
    for (int it = 0; it < max_iter; ++it) {
        const double g = x * std::log(x) + (m.euler_c - kLn2Pi) * x + m.c0 - V;
        const double gp = m.gprime(x);
        const double xn = x - g / gp;
        if (!(xn > e)) {
            x = 0.5 * (x + e);  // keep inside the admissible branch
            continue;
        }
        const bool done = std::abs(xn - x) <= 1e-12 * std::abs(xn);
        x = xn;
        if (done) return x;
    }
    throw std::runtime_error("phi1_solve: Newton did not converge in 100 iterations");
}

}  // namespace

void LadderModel::validate() const {
    if (!(anchor_t0 >= 10.0)) throw std::invalid_argument("LadderModel: anchor_t0 must be >= 10");
    if (!(v0 >= 0.0)) throw std::invalid_argument("LadderModel: v0 must be >= 0");
}

Window::Window(double T_, double U_) : T(T_), U(U_) {
    if (!(T > 1.0)) throw std::invalid_argument("Window: T must exceed 1");
    if (!(U > 0.0) || U > T / std::log(T))
        throw std::invalid_argument("Window: U must lie in (0, T/ln T]");
}

double hl_integral(double T, const SampleGrid& grid, const LadderModel& model) {
    model.validate();
    return model.v0 + grid.cum_at(T);
}

double phi1_solve(double T, const SampleGrid& grid, const LadderModel& model) {
    model.validate();
    if (!(T >= model.anchor_t0 + 10.0))
        throw std::domain_error("phi1_solve: T below anchor_t0 + 10");
    return solve_g(hl_integral(T, grid, model), model, T);
}

// ---------------------------------------------------------------------------
// LadderTable

void LadderTable::ensure_slopes() const {
    if (!interp_slopes_.empty()) return;
    if (!slopes.empty()) {
        interp_slopes_ = slopes;
        detail::clamp_monotone(t_values, phi1_values, interp_slopes_);
    } else {
        interp_slopes_ = detail::pchip_slopes(t_values, phi1_values);
    }
}

double LadderTable::phi1_at(double t) const {
    if (t_values.size() == 1) {
        if (t == t_values[0]) return phi1_values[0];
        throw std::out_of_range("phi1_at: t outside table coverage");
    }
    const size_t i = detail::interval_index(t_values, t);
    if (interpolation_order == 1) {
        const double s = (t - t_values[i]) / (t_values[i + 1] - t_values[i]);
        return phi1_values[i] + s * (phi1_values[i + 1] - phi1_values[i]);
    }
    ensure_slopes();
    return detail::hermite_value(t_values[i], t_values[i + 1], phi1_values[i], phi1_values[i + 1],
                                 interp_slopes_[i], interp_slopes_[i + 1], t);
}

double LadderTable::phi1_deriv_at(double t) const {
    const size_t i = detail::interval_index(t_values, t);
    if (interpolation_order == 1)
        return (phi1_values[i + 1] - phi1_values[i]) / (t_values[i + 1] - t_values[i]);
    ensure_slopes();
    return detail::hermite_deriv(t_values[i], t_values[i + 1], phi1_values[i], phi1_values[i + 1],
                                 interp_slopes_[i], interp_slopes_[i + 1], t);
}

double LadderTable::phi1_inverse(double x) const {
    if (!(x >= x_min() && x <= x_max()))
        throw std::out_of_range("phi1_inverse: x outside ladder image");
    const auto it = std::upper_bound(phi1_values.begin(), phi1_values.end(), x);
    size_t i = static_cast<size_t>(it - phi1_values.begin());
    if (i == 0) i = 1;
    if (i >= phi1_values.size()) i = phi1_values.size() - 1;
    double lo = t_values[i - 1], hi = t_values[i];
    // Newton on the interpolant with a bisection bracket
    double s = (x - phi1_values[i - 1]) / (phi1_values[i] - phi1_values[i - 1]);
    double t = lo + s * (hi - lo);
    for (int it2 = 0; it2 < 60; ++it2) {
        const double f = phi1_at(t) - x;
        if (f > 0)
            hi = t;
        else
            lo = t;
        const double d = phi1_deriv_at(t);
        double tn = (d > 0) ? t - f / d : 0.5 * (lo + hi);
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) <= 1e-13 * std::abs(tn)) return tn;
        t = tn;
    }
    return t;
}

void LadderTable::validate_invariants() const {
    for (size_t i = 0; i < t_values.size(); ++i) {
        if (!(phi1_values[i] < t_values[i]))
            throw std::runtime_error("LadderTable: ladder crossed the diagonal (phi1 >= t)");
        if (i > 0 && !(phi1_values[i] > phi1_values[i - 1]))
            throw std::runtime_error(
                "LadderTable: phi1 not strictly increasing (insufficient grid resolution)");
    }
}

// ---------------------------------------------------------------------------
// builders

LadderTable build_ladder(double t0, double t1, double step, const SampleGrid& grid,
                         const LadderModel& model, const RSConfig* cfg) {
    model.validate();
    if (!(step > 0)) throw std::invalid_argument("build_ladder: step must be positive");
    if (!(t1 >= t0)) throw std::invalid_argument("build_ladder: empty span");

    LadderTable lad;
    lad.interpolation_order = 3;

    if (cfg == nullptr) {
        // navigation mode: phi1_solve on the interpolated grid
        const size_t n = static_cast<size_t>(std::ceil((t1 - t0) / step));
        double x_prev = -1;
        for (size_t i = 0; i <= n; ++i) {
            const double t = (i == n) ? t1 : t0 + static_cast<double>(i) * step;
            const double V = hl_integral(t, grid, model);
            const double x = solve_g(V, model, x_prev > 0 ? x_prev * 1.0001 : t);
            lad.t_values.push_back(t);
            lad.phi1_values.push_back(x);
            x_prev = x;
            if (t >= t1) break;
        }
        lad.validate_invariants();
        return lad;
    }

    // refined mode: anchor at a grid node, advance V by direct quadrature
    cfg->validate();
    const size_t anchor_idx = grid.node_below(t0);
    const double a0 = grid.t_values[anchor_idx];
    const double v_anchor = model.v0 + grid.cum_v[anchor_idx];

    const double lam = kPi / theta_deriv(0.5 * (a0 + t1), *cfg);
    const double h = std::min(step, lam / 64.0);
    const auto n = static_cast<size_t>(std::ceil((t1 - a0) / h));

    // per-interval increments of int Z^2, parallel then prefixed in order
    std::vector<double> inc(n);
#ifdef ZLL_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const double a = a0 + static_cast<double>(i) * h;
        const double mid = a + 0.5 * h, half = 0.5 * h;
        double s = 0;
        for (int j = 0; j < 5; ++j) {
            const double z2 = hardy_z(mid + half * detail::kGL5X[j], *cfg).z2;
            s += detail::kGL5W[j] * z2;
        }
        inc[static_cast<size_t>(i)] = s * half;
    }

    lad.t_values.resize(n + 1);
    lad.phi1_values.resize(n + 1);
    lad.slopes.resize(n + 1);
    long double V = v_anchor;
    double x = solve_g(v_anchor, model, a0);
    for (size_t i = 0; i <= n; ++i) {
        const double t = a0 + static_cast<double>(i) * h;
        if (i > 0) {
            V += inc[i - 1];
            x = solve_g(static_cast<double>(V), model, x * 1.001);
        }
        lad.t_values[i] = t;
        lad.phi1_values[i] = x;
        lad.slopes[i] = hardy_z(t, *cfg).z2 / model.gprime(x);
    }
    lad.validate_invariants();
    return lad;
}

// ---------------------------------------------------------------------------
// pointwise operations

double z_tilde_sq(double t, const LadderTable& table, const LadderModel& model,
                  const RSConfig& cfg) {
    const double x = table.phi1_at(t);
    const double den = model.gprime(x);
    if (!(den > 0)) throw std::domain_error("z_tilde_sq: nonpositive denominator");
    return hardy_z(t, cfg).z2 / den;
}

double defect(double t, const LadderTable& table) { return t - table.phi1_at(t); }

double segment_distance(const Window& w, const LadderTable& table) {
    return w.T - table.phi1_at(w.T + w.U);
}

LadderModel calibrate_c0(const SampleGrid& grid, LadderModel model, const PrimeTable& primes,
                         std::span<const double> training_ts) {
    if (training_ts.size() < 1) throw std::invalid_argument("calibrate_c0: no training points");
    const double one_minus_c = 1.0 - model.euler_c;
    for (int pass = 0; pass < 8; ++pass) {
        double num = 0, den = 0;
        for (double T : training_ts) {
            const double x = phi1_solve(T, grid, model);
            const double pi_T = static_cast<double>(primes.prime_pi(T));
            const double scale = one_minus_c * pi_T;
            const double r = (T - x) / scale - 1.0;
            const double drdc0 = 1.0 / (model.gprime(x) * scale);
            num += r * drdc0;
            den += drdc0 * drdc0;
        }
        const double delta = -num / den;
        model.c0 += delta;
        if (std::abs(delta) < 1e-6 * std::max(1.0, std::abs(model.c0))) break;
    }
    return model;
}

// ---------------------------------------------------------------------------
// persistence

void LadderTable::save(const std::string& path, const LadderModel& model,
                       const RSConfig& rs) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("LadderTable::save: cannot open " + path);
    char header[320];
    std::snprintf(header, sizeof(header),
                  "zll-ladder-v1 euler_c=%.17g anchor=%.17g v0=%.17g c0=%.17g rs_correction=%d "
                  "rs_theta=%d rs_tmin=%.17g mode=%s interpolation=%d",
                  model.euler_c, model.anchor_t0, model.v0, model.c0, rs.correction_terms,
                  rs.theta_terms, rs.t_min, slopes.empty() ? "nav" : "refined",
                  interpolation_order);
    out << header << "\n";
    char row[96];
    for (size_t i = 0; i < t_values.size(); ++i) {
        std::snprintf(row, sizeof(row), "%.17g,%.17g\n", t_values[i], phi1_values[i]);
        out << row;
    }
}

LadderTable LadderTable::load(const std::string& path, const LadderModel& expected_model,
                              const RSConfig& expected_rs) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("LadderTable::load: cannot open " + path);
    std::string header;
    std::getline(in, header);
    double ec = 0, anchor = 0, v0 = 0, c0 = 0, tmin = 0;
    int corr = -1, theta_terms = -1, order = 0;
    char mode[16] = {0};
    if (std::sscanf(header.c_str(),
                    "zll-ladder-v1 euler_c=%lg anchor=%lg v0=%lg c0=%lg rs_correction=%d "
                    "rs_theta=%d rs_tmin=%lg mode=%15s interpolation=%d",
                    &ec, &anchor, &v0, &c0, &corr, &theta_terms, &tmin, mode, &order) != 9)
        throw std::runtime_error("LadderTable::load: unrecognized header: " + header);
    if (ec != expected_model.euler_c || anchor != expected_model.anchor_t0 ||
        v0 != expected_model.v0 || c0 != expected_model.c0 ||
        corr != expected_rs.correction_terms || theta_terms != expected_rs.theta_terms ||
        tmin != expected_rs.t_min)
        throw std::runtime_error("LadderTable::load: header does not match requested model/config");

    LadderTable lad;
    lad.interpolation_order = order;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double t, x;
        if (std::sscanf(line.c_str(), "%lg,%lg", &t, &x) != 2)
            throw std::runtime_error("LadderTable::load: bad row: " + line);
        lad.t_values.push_back(t);
        lad.phi1_values.push_back(x);
    }
    if (lad.t_values.size() < 2) throw std::runtime_error("LadderTable::load: empty table");
    if (std::string(mode) == "refined") {
        lad.slopes.resize(lad.t_values.size());
        for (size_t i = 0; i < lad.t_values.size(); ++i)
            lad.slopes[i] = hardy_z(lad.t_values[i], expected_rs).z2 /
                            expected_model.gprime(lad.phi1_values[i]);
    }
    lad.validate_invariants();
    return lad;
}

}  // namespace zll
