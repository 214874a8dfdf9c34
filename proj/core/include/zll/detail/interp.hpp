// Monotone cubic (Fritsch-Carlson) slope selection and Hermite evaluation
// on sorted node tables.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace zll::detail {

// PCHIP-style slopes preserving monotonicity of the node values.
inline std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n < 2) return m;
    std::vector<double> d(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0) {
            m[i] = 0.0;
        } else {
            // weighted harmonic mean
            const double w1 = 2 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
            const double w2 = (x[i + 1] - x[i]) + 2 * (x[i] - x[i - 1]);
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    return m;
}

// Clamp Hermite slopes into the Fritsch-Carlson monotone box.
inline void clamp_monotone(const std::vector<double>& x, const std::vector<double>& y,
                           std::vector<double>& m) {
    for (size_t i = 0; i + 1 < x.size(); ++i) {
        const double d = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if (d == 0) continue;
        m[i] = std::clamp(m[i], 0.0, 3.0 * d);
        m[i + 1] = std::clamp(m[i + 1], 0.0, 3.0 * d);
    }
}

inline size_t interval_index(const std::vector<double>& x, double t) {
    if (!(t >= x.front() && t <= x.back()))
        throw std::out_of_range("interp: argument outside table coverage");
    auto it = std::upper_bound(x.begin(), x.end(), t);
    size_t i = static_cast<size_t>(it - x.begin());
    if (i == 0) i = 1;
    if (i >= x.size()) i = x.size() - 1;
    return i - 1;
}

inline double hermite_value(double x0, double x1, double y0, double y1, double m0, double m1,
                            double t) {
    const double h = x1 - x0, s = (t - x0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * m1;
}

inline double hermite_deriv(double x0, double x1, double y0, double y1, double m0, double m1,
                            double t) {
    const double h = x1 - x0, s = (t - x0) / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * (y0 - y1) / h + (3 * s2 - 4 * s + 1) * m0 + (3 * s2 - 2 * s) * m1);
}

}  // namespace zll::detail
