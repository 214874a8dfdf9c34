// Run configuration for the experiment drivers, with a flat key=value file
// format.  Unknown keys are errors; CLI flags override file values.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zll/ladder.hpp"
#include "zll/lnpoly.hpp"
#include "zll/rs_zeta.hpp"

namespace zll {

struct RunConfig {
    // experiment windows
    std::vector<double> t_list = {1e5};
    double u_abs = 1e3;    // absolute window length
    double omega = -1.0;   // >= 0 switches to exponent mode: U = T^(omega + 2 eps)
    double epsilon = 0.01;

    // Riemann-Siegel policy
    RSConfig rs{};

    // ladder model + optional calibration of c0 against (1-c) pi(T)
    LadderModel model{};
    bool calibrate = false;
    std::vector<double> calibrate_ts = {1e5, 3e5, 1e6};

    // moment polynomial coefficients
    std::string coeff_source = "fitted";  // "fitted" or "config"
    LnPoly c_config{};                    // used when coeff_source == "config"
    std::vector<double> fit_ts = {5e3, 1e4, 2e4, 3e4, 5e4, 8e4};
    bool fit_pin_c0 = false;

    // tolerances and bands
    double quad_tol = 1e-6;
    double lemma_rtol = 1e-6;    // substitution identity residual
    double theorem_rtol = 1e-5;  // boundary-equivalence residual
    double split_band = 0.10;    // |ratio - 1| acceptance band

    // lemma suite window draws
    int lemma_windows = 20;
    double lemma_t_lo = 1e5;
    double lemma_t_hi = 1e6;

    // splitting diagnostic: replace D by the unit polynomial (non-theorem mode)
    bool unit_d = false;

    // infrastructure
    std::string cache_dir = "zll-cache";
    std::string out_dir = ".";
    std::uint64_t seed = 20260809;
    std::string format = "json";  // json or csv
    double grid_stride = 2.0;
    double grid_t_max = 0;  // 0 = derived from the experiment windows
    std::uint64_t prime_limit = 100000000;
    int geometry_trend_samples = 1800;

    void validate() const;  // throws std::invalid_argument on bad combinations
};

// Parse a flat key = value config file ('#' comments allowed).
RunConfig parse_config_file(const std::string& path);

// Apply one key=value pair; throws std::invalid_argument on unknown keys.
void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace zll
