#include "zll/rs_zeta.hpp"

#include <cmath>
#include <mutex>
#include <vector>

#include "rs_correction_tables.inc"

namespace zll {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr long double kTwoPiL = 6.283185307179586476925286766559L;
constexpr long double kInvTwoPiL = 0.15915494309189533576888376337251L;

// 1/(48 t), 7/(5760 t^3), 31/(80640 t^5), 127/(430080 t^7)
constexpr double kThetaC[4] = {1.0 / 48.0, 7.0 / 5760.0, 31.0 / 80640.0, 127.0 / 430080.0};

// Clenshaw on [-1, 1].
double cheb_eval(const double* c, int n, double u) {
    double b0 = 0, b1 = 0, b2 = 0;
    const double u2 = 2 * u;
    for (int j = n - 1; j > 0; --j) {
        b2 = b1;
        b1 = b0;
        b0 = u2 * b0 - b2 + c[j];
    }
    return u * b0 - b1 + c[0];
}

struct ChebTable {
    const double* c;
    int n;
};
constexpr ChebTable kRSCheb[5] = {
    {kRSCheb0, static_cast<int>(std::size(kRSCheb0))},
    {kRSCheb1, static_cast<int>(std::size(kRSCheb1))},
    {kRSCheb2, static_cast<int>(std::size(kRSCheb2))},
    {kRSCheb3, static_cast<int>(std::size(kRSCheb3))},
    {kRSCheb4, static_cast<int>(std::size(kRSCheb4))},
};

// ln n (split into a double-double pair) and 1/sqrt(n) tables.  Built once;
// covers the main sum up to t ~ 2pi * kMaxN^2 ~ 2.6e7.
constexpr int kMaxN = 2048;
struct TermTables {
    std::vector<double> log_hi, log_lo, rsqrt_n;
    TermTables() : log_hi(kMaxN + 1), log_lo(kMaxN + 1), rsqrt_n(kMaxN + 1) {
        for (int n = 1; n <= kMaxN; ++n) {
            const long double l = logl(static_cast<long double>(n));
            log_hi[n] = static_cast<double>(l);
            log_lo[n] = static_cast<double>(l - static_cast<long double>(log_hi[n]));
            rsqrt_n[n] = 1.0 / std::sqrt(static_cast<double>(n));
        }
    }
};

const TermTables& term_tables() {
    static const TermTables t;
    return t;
}

long double theta_l(long double t, int terms) {
    long double th = 0.5L * t * (logl(t * kInvTwoPiL)) - 0.5L * t - 0.39269908169872415481L;  // pi/8
    long double tp = t;
    const long double t2 = t * t;
    for (int j = 0; j < terms; ++j) {
        th += static_cast<long double>(kThetaC[j]) / tp;
        tp *= t2;
    }
    return th;
}

inline long double reduce_two_pi(long double x) {
    const long double k = nearbyintl(x * kInvTwoPiL);
    return x - k * kTwoPiL;
}

}  // namespace

double theta(double t, const RSConfig& cfg) {
    cfg.validate();
    if (!(t >= cfg.t_min)) throw std::domain_error("theta: t below cfg.t_min");
    return static_cast<double>(theta_l(t, cfg.theta_terms));
}

double theta_truncation(double t, const RSConfig& cfg) {
    cfg.validate();
    if (!(t >= cfg.t_min)) throw std::domain_error("theta_truncation: t below cfg.t_min");
    if (cfg.theta_terms >= 4) {
        // next coefficient of the expansion, 511/(1216512 t^9)
        return 511.0 / 1216512.0 / std::pow(t, 9);
    }
    return kThetaC[cfg.theta_terms] / std::pow(t, 2 * cfg.theta_terms + 1);
}

double theta_deriv(double t, const RSConfig& cfg) {
    cfg.validate();
    if (!(t >= cfg.t_min)) throw std::domain_error("theta_deriv: t below cfg.t_min");
    double d = 0.5 * std::log(t / kTwoPi);
    double tp = t * t;
    for (int j = 0; j < cfg.theta_terms; ++j) {
        d -= (2 * j + 1) * kThetaC[j] / tp;
        tp *= t * t;
    }
    return d;
}

ZSample hardy_z(double t, const RSConfig& cfg) {
    cfg.validate();
    if (!(t >= cfg.t_min)) throw std::domain_error("hardy_z: t below cfg.t_min");

    const double a = std::sqrt(t / kTwoPi);
    const int N = static_cast<int>(a);
    const double p = a - N;
    if (N >= kMaxN) throw std::domain_error("hardy_z: t beyond supported range");

    const TermTables& tt = term_tables();
    const double th = static_cast<double>(reduce_two_pi(theta_l(t, cfg.theta_terms)));

    // main sum 2 sum n^{-1/2} cos(theta - t ln n).  The phase t ln n is
    // reduced mod 2pi in double-double arithmetic (Cody-Waite with fma),
    // keeping the argument accurate to ~1e-15 even at t ~ 1e6 where the
    // raw phase is ~6e6.
    constexpr double kInvTwoPi = 0.15915494309189535;
    constexpr double kTwoPiHi = 6.283185307179586;
    constexpr double kTwoPiLo = 2.4492935982947064e-16;
    double s = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double p = t * tt.log_hi[n];
        const double e = std::fma(t, tt.log_hi[n], -p);  // exact product residual
        const double k = std::nearbyint(p * kInvTwoPi);
        double r = std::fma(-k, kTwoPiHi, p);
        r -= k * kTwoPiLo;
        r += e + t * tt.log_lo[n];
        s += tt.rsqrt_n[n] * std::cos(th - r);
    }
    s *= 2.0;

    // correction terms (-1)^(N+1) a^(-1/2) sum_k C_k(p) a^(-k)
    const double u = 2 * p - 1;
    double corr = 0.0;
    double ap = 1.0;
    for (int k = 0; k <= cfg.correction_terms; ++k) {
        corr += cheb_eval(kRSCheb[k].c, kRSCheb[k].n, u) * ap;
        ap /= a;
    }
    const double sign = (N % 2 == 1) ? 1.0 : -1.0;
    s += sign * corr / std::sqrt(a);

    return {t, s, s * s};
}

double hardy_z_error_bound(double t, int correction_terms) {
    const double a2 = t / kTwoPi;
    return std::pow(a2, -(2 * correction_terms + 3) / 4.0) + 1e-10;
}

}  // namespace zll
