// SampleGrid construction: one sweep of quarter-wavelength 15-point
// Gauss-Legendre panels accumulating int Z^2 (and optionally int Z^4
// checkpoints), parallel over panels within fixed-size blocks, sequential
// prefix accumulation so results do not depend on the thread count.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "zll/detail/interp.hpp"
#include "zll/ladder.hpp"
#include "zll/quadrature.hpp"

#ifdef ZLL_HAVE_OPENMP
#include <omp.h>
#endif

namespace zll {
namespace {

constexpr double kPi = 3.141592653589793238462643383279;

struct PanelSums {
    double z2;
    double z4;
};

}  // namespace

SampleGrid SampleGrid::build(double anchor_t0, double t_max, double store_stride,
                             const RSConfig& cfg, std::span<const double> z4_checkpoint_ts,
                             std::vector<std::pair<double, double>>* z4_checkpoints) {
    cfg.validate();
    if (!(anchor_t0 >= cfg.t_min)) throw std::invalid_argument("SampleGrid: anchor below rs t_min");
    if (!(t_max > anchor_t0 + store_stride)) throw std::invalid_argument("SampleGrid: empty span");

    SampleGrid g;
    g.rs = cfg;
    g.store_stride = store_stride;

    std::vector<double> wanted(z4_checkpoint_ts.begin(), z4_checkpoint_ts.end());
    std::sort(wanted.begin(), wanted.end());
    size_t next_checkpoint = 0;
    if (z4_checkpoints) z4_checkpoints->clear();

    const size_t approx_nodes = static_cast<size_t>((t_max - anchor_t0) / store_stride) + 2;
    g.t_values.reserve(approx_nodes);
    g.z2_values.reserve(approx_nodes);
    g.cum_v.reserve(approx_nodes);

    long double cum2 = 0.0L, cum4 = 0.0L;
    double t = anchor_t0;
    double next_store = anchor_t0;  // store the very first node at the anchor

    constexpr int kBlock = 1 << 15;
    std::vector<double> bounds(kBlock + 1);
    std::vector<PanelSums> sums(kBlock);

    while (t < t_max) {
        // lay out one block of quarter-wave panels
        bounds[0] = t;
        int n = 0;
        while (n < kBlock && bounds[n] < t_max) {
            const double w = kPi / (4.0 * theta_deriv(bounds[n], cfg));
            bounds[n + 1] = std::min(bounds[n] + w, t_max);
            ++n;
        }

#ifdef ZLL_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int i = 0; i < n; ++i) {
            const double mid = 0.5 * (bounds[i] + bounds[i + 1]);
            const double half = 0.5 * (bounds[i + 1] - bounds[i]);
            double s2 = 0, s4 = 0;
            for (int j = 0; j < 15; ++j) {
                const double z2 = hardy_z(mid + half * detail::kGL15X[j], cfg).z2;
                s2 += detail::kGL15W[j] * z2;
                s4 += detail::kGL15W[j] * z2 * z2;
            }
            sums[static_cast<size_t>(i)] = {s2 * half, s4 * half};
        }

        for (int i = 0; i < n; ++i) {
            const double tb = bounds[i];
            if (tb >= next_store) {
                g.t_values.push_back(tb);
                g.z2_values.push_back(hardy_z(tb, cfg).z2);
                g.cum_v.push_back(static_cast<double>(cum2));
                next_store = tb + store_stride;
            }
            while (next_checkpoint < wanted.size() && tb >= wanted[next_checkpoint]) {
                if (z4_checkpoints) z4_checkpoints->emplace_back(tb, static_cast<double>(cum4));
                ++next_checkpoint;
            }
            cum2 += sums[static_cast<size_t>(i)].z2;
            cum4 += sums[static_cast<size_t>(i)].z4;
        }
        t = bounds[n];
    }

    // terminal node
    g.t_values.push_back(t);
    g.z2_values.push_back(hardy_z(t, cfg).z2);
    g.cum_v.push_back(static_cast<double>(cum2));
    while (next_checkpoint < wanted.size() && t >= wanted[next_checkpoint]) {
        if (z4_checkpoints) z4_checkpoints->emplace_back(t, static_cast<double>(cum4));
        ++next_checkpoint;
    }
    if (next_checkpoint < wanted.size())
        throw std::invalid_argument("SampleGrid: z4 checkpoint beyond t_max");
    return g;
}

void SampleGrid::ensure_slopes() const {
    if (cum_slopes_.empty() && t_values.size() >= 2) {
        cum_slopes_ = detail::pchip_slopes(t_values, cum_v);
    }
}

double SampleGrid::cum_at(double T) const {
    if (!(T >= t_min() && T <= t_max()))
        throw std::out_of_range("SampleGrid::cum_at: T outside grid coverage");
    ensure_slopes();
    const size_t i = detail::interval_index(t_values, T);
    return detail::hermite_value(t_values[i], t_values[i + 1], cum_v[i], cum_v[i + 1],
                                 cum_slopes_[i], cum_slopes_[i + 1], T);
}

size_t SampleGrid::node_below(double T) const {
    if (!(T >= t_min() && T <= t_max()))
        throw std::out_of_range("SampleGrid::node_below: T outside grid coverage");
    return detail::interval_index(t_values, T);
}

void SampleGrid::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("SampleGrid::save: cannot open " + path);
    char header[256];
    std::snprintf(header, sizeof(header),
                  "zll-grid-v1 anchor=%.17g t_max=%.17g stride=%.17g rs_correction=%d "
                  "rs_theta=%d rs_tmin=%.17g step=quarterwave-gl15",
                  t_values.front(), t_values.back(), store_stride, rs.correction_terms,
                  rs.theta_terms, rs.t_min);
    out << header << "\n";
    char row[128];
    for (size_t i = 0; i < t_values.size(); ++i) {
        std::snprintf(row, sizeof(row), "%.17g,%.17g,%.17g\n", t_values[i], z2_values[i], cum_v[i]);
        out << row;
    }
}

SampleGrid SampleGrid::load(const std::string& path, const RSConfig& expected_rs) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("SampleGrid::load: cannot open " + path);
    std::string header;
    std::getline(in, header);
    double anchor = 0, tmax = 0, stride = 0, tmin = 0;
    int corr = -1, theta_terms = -1;
    if (std::sscanf(header.c_str(),
                    "zll-grid-v1 anchor=%lg t_max=%lg stride=%lg rs_correction=%d rs_theta=%d "
                    "rs_tmin=%lg step=quarterwave-gl15",
                    &anchor, &tmax, &stride, &corr, &theta_terms, &tmin) != 6)
        throw std::runtime_error("SampleGrid::load: unrecognized header: " + header);
    if (corr != expected_rs.correction_terms || theta_terms != expected_rs.theta_terms ||
        tmin != expected_rs.t_min)
        throw std::runtime_error("SampleGrid::load: header does not match requested RS config");

    SampleGrid g;
    g.rs = expected_rs;
    g.store_stride = stride;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double t, z2, cv;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &t, &z2, &cv) != 3)
            throw std::runtime_error("SampleGrid::load: bad row: " + line);
        g.t_values.push_back(t);
        g.z2_values.push_back(z2);
        g.cum_v.push_back(cv);
    }
    if (g.t_values.size() < 2) throw std::runtime_error("SampleGrid::load: empty grid");
    for (size_t i = 1; i < g.t_values.size(); ++i) {
        if (!(g.t_values[i] > g.t_values[i - 1]) || g.cum_v[i] < g.cum_v[i - 1])
            throw std::runtime_error("SampleGrid::load: non-monotone rows");
    }
    if (std::abs(g.t_values.front() - anchor) > 1e-9 || std::abs(g.t_values.back() - tmax) > 1e-9)
        throw std::runtime_error("SampleGrid::load: node range disagrees with header");
    return g;
}

}  // namespace zll
