#include "zll/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace zll {
namespace {

std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list value");
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("bad boolean value: " + v);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::validate() const {
    rs.validate();
    model.validate();
    if (t_list.empty()) throw std::invalid_argument("RunConfig: empty t_list");
    // omega = 7/8 itself is allowed so the boundary exponent can be
    // demonstrated (its windows fail admissibility and are reported as such)
    if (omega > 0.875 + 1e-12)
        throw std::invalid_argument("RunConfig: exponent mode requires omega <= 7/8");
    if (!(epsilon > 0)) throw std::invalid_argument("RunConfig: epsilon must be positive");
    if (omega < 0 && !(u_abs > 0)) throw std::invalid_argument("RunConfig: u must be positive");
    if (coeff_source != "fitted" && coeff_source != "config")
        throw std::invalid_argument("RunConfig: coeff_source must be 'fitted' or 'config'");
    if (format != "json" && format != "csv")
        throw std::invalid_argument("RunConfig: format must be 'json' or 'csv'");
    if (!(quad_tol > 0) || !(lemma_rtol > 0) || !(theorem_rtol > 0) || !(split_band > 0))
        throw std::invalid_argument("RunConfig: tolerances must be positive");
    if (lemma_windows < 1) throw std::invalid_argument("RunConfig: lemma_windows must be >= 1");
}

void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "t_list") cfg.t_list = parse_list(value);
        else if (key == "u") cfg.u_abs = std::stod(value);
        else if (key == "omega") cfg.omega = std::stod(value);
        else if (key == "epsilon") cfg.epsilon = std::stod(value);
        else if (key == "rs_correction_terms") cfg.rs.correction_terms = std::stoi(value);
        else if (key == "rs_t_min") cfg.rs.t_min = std::stod(value);
        else if (key == "rs_theta_terms") cfg.rs.theta_terms = std::stoi(value);
        else if (key == "anchor_t0") cfg.model.anchor_t0 = std::stod(value);
        else if (key == "v0") cfg.model.v0 = std::stod(value);
        else if (key == "c0") cfg.model.c0 = std::stod(value);
        else if (key == "euler_c") cfg.model.euler_c = std::stod(value);
        else if (key == "calibrate") cfg.calibrate = parse_bool(value);
        else if (key == "calibrate_ts") cfg.calibrate_ts = parse_list(value);
        else if (key == "coeff_source") cfg.coeff_source = value;
        else if (key == "c_config") {
            const auto v = parse_list(value);
            if (v.size() != 5) throw std::invalid_argument("c_config needs 5 values");
            for (int k = 0; k < 5; ++k) cfg.c_config[k] = v[static_cast<size_t>(k)];
        }
        else if (key == "fit_ts") cfg.fit_ts = parse_list(value);
        else if (key == "fit_pin_c0") cfg.fit_pin_c0 = parse_bool(value);
        else if (key == "quad_tol") cfg.quad_tol = std::stod(value);
        else if (key == "lemma_rtol") cfg.lemma_rtol = std::stod(value);
        else if (key == "theorem_rtol") cfg.theorem_rtol = std::stod(value);
        else if (key == "split_band") cfg.split_band = std::stod(value);
        else if (key == "lemma_windows") cfg.lemma_windows = std::stoi(value);
        else if (key == "lemma_t_lo") cfg.lemma_t_lo = std::stod(value);
        else if (key == "lemma_t_hi") cfg.lemma_t_hi = std::stod(value);
        else if (key == "unit_d") cfg.unit_d = parse_bool(value);
        else if (key == "cache_dir") cfg.cache_dir = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "format") cfg.format = value;
        else if (key == "grid_stride") cfg.grid_stride = std::stod(value);
        else if (key == "grid_t_max") cfg.grid_t_max = std::stod(value);
        else if (key == "prime_limit") cfg.prime_limit = std::stoull(value);
        else if (key == "geometry_trend_samples") cfg.geometry_trend_samples = std::stoi(value);
        else throw std::invalid_argument("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for config key '" + key + "': " + value);
    }
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        apply_config_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

}  // namespace zll
