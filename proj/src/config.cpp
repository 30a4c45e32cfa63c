#include "risdfrc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace risdfrc {

using nlohmann::json;

double ScenarioConfig::noise_power_w() const {
    const double dbm = noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

RadarParams ScenarioConfig::radar_params() const {
    return RadarParams{gamma0_db, noise_power_w()};
}

void ScenarioConfig::validate() const {
    std::ostringstream err;
    if (n_t < 1 || n_r < 1 || m_k < 1 || k_users < 1 || d_k < 1 || l_elems < 1)
        err << "all counts must be >= 1; ";
    if (d_k > std::min(n_t, m_k)) err << "d_k must not exceed min(n_t, m_k); ";
    if (p0_w <= 0.0) err << "p0_w must be positive; ";
    if (bandwidth_hz <= 0.0) err << "bandwidth_hz must be positive; ";
    if (geometry.target_distance_m <= 0.0) err << "target_distance_m must be positive; ";
    if (geometry.cu_radius_m < 0.0) err << "cu_radius_m must be >= 0; ";
    if (pathloss.d0 <= 0.0) err << "pathloss d0 must be positive; ";
    if (pathloss.alpha_bi <= 0.0 || pathloss.alpha_iu <= 0.0 || pathloss.alpha_bu <= 0.0)
        err << "pathloss exponents must be positive; ";
    if (k_rician < 0.0) err << "k_rician must be >= 0; ";
    if (penalty.rho0 <= 0.0 || penalty.step_c <= 0.0 || penalty.step_c >= 1.0)
        err << "penalty needs rho0 > 0 and 0 < step_c < 1; ";
    if (penalty.tol_penalty <= 0.0 || penalty.tol_obj <= 0.0 || penalty.bisect_tol <= 0.0)
        err << "penalty tolerances must be positive; ";
    const std::string msg = err.str();
    if (!msg.empty()) throw std::invalid_argument("ScenarioConfig: " + msg);
}

namespace config {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_geometry(const json& j, ScenarioGeometry& g) {
    maybe(j, "bs_pos", g.bs_pos);
    maybe(j, "ris_pos", g.ris_pos);
    if (j.contains("target_angle_deg"))
        g.target_angle_rad = j.at("target_angle_deg").get<double>() * kDegToRad;
    maybe(j, "target_distance_m", g.target_distance_m);
    maybe(j, "cu_center", g.cu_center);
    maybe(j, "cu_radius_m", g.cu_radius_m);
}

}  // namespace

ScenarioConfig from_json_text(const std::string& text) {
    const json j = json::parse(text);
    ScenarioConfig cfg;
    maybe(j, "n_t", cfg.n_t);
    maybe(j, "n_r", cfg.n_r);
    maybe(j, "m_k", cfg.m_k);
    maybe(j, "k_users", cfg.k_users);
    maybe(j, "d_k", cfg.d_k);
    maybe(j, "l_elems", cfg.l_elems);
    maybe(j, "p0_w", cfg.p0_w);
    maybe(j, "gamma0_db", cfg.gamma0_db);
    maybe(j, "bandwidth_hz", cfg.bandwidth_hz);
    maybe(j, "noise_density_dbm_hz", cfg.noise_density_dbm_hz);
    maybe(j, "k_rician", cfg.k_rician);
    maybe(j, "spacing_ratio", cfg.spacing_ratio);
    maybe(j, "seed", cfg.seed);
    if (j.contains("eta_override")) {
        if (j.at("eta_override").is_null())
            cfg.eta_override.reset();
        else
            cfg.eta_override = j.at("eta_override").get<double>();
    }
    if (j.contains("geometry")) parse_geometry(j.at("geometry"), cfg.geometry);
    if (j.contains("pathloss")) {
        const json& p = j.at("pathloss");
        maybe(p, "pl0_db", cfg.pathloss.pl0_db);
        maybe(p, "d0", cfg.pathloss.d0);
        maybe(p, "alpha_bi", cfg.pathloss.alpha_bi);
        maybe(p, "alpha_iu", cfg.pathloss.alpha_iu);
        maybe(p, "alpha_bu", cfg.pathloss.alpha_bu);
    }
    if (j.contains("penalty")) {
        const json& p = j.at("penalty");
        maybe(p, "rho0", cfg.penalty.rho0);
        maybe(p, "step_c", cfg.penalty.step_c);
        maybe(p, "tol_penalty", cfg.penalty.tol_penalty);
        maybe(p, "tol_obj", cfg.penalty.tol_obj);
        maybe(p, "max_outer", cfg.penalty.max_outer);
        maybe(p, "max_inner", cfg.penalty.max_inner);
        maybe(p, "bisect_tol", cfg.penalty.bisect_tol);
    }
    if (j.contains("mm")) {
        const json& p = j.at("mm");
        maybe(p, "max_mm", cfg.mm.max_mm);
        maybe(p, "tol", cfg.mm.tol);
        maybe(p, "n_trials", cfg.mm.n_trials);
    }
    if (j.contains("sdp")) {
        const json& p = j.at("sdp");
        maybe(p, "tol", cfg.sdp.tol);
        maybe(p, "max_iter", cfg.sdp.max_iter);
    }
    if (j.contains("ao")) {
        const json& p = j.at("ao");
        maybe(p, "n_max", cfg.ao.n_max);
        maybe(p, "tol", cfg.ao.tol);
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config::load: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string to_json_text(const ScenarioConfig& cfg) {
    json j;
    j["n_t"] = cfg.n_t;
    j["n_r"] = cfg.n_r;
    j["m_k"] = cfg.m_k;
    j["k_users"] = cfg.k_users;
    j["d_k"] = cfg.d_k;
    j["l_elems"] = cfg.l_elems;
    j["p0_w"] = cfg.p0_w;
    j["gamma0_db"] = cfg.gamma0_db;
    j["bandwidth_hz"] = cfg.bandwidth_hz;
    j["noise_density_dbm_hz"] = cfg.noise_density_dbm_hz;
    j["k_rician"] = cfg.k_rician;
    j["spacing_ratio"] = cfg.spacing_ratio;
    j["seed"] = cfg.seed;
    if (cfg.eta_override)
        j["eta_override"] = *cfg.eta_override;
    else
        j["eta_override"] = nullptr;
    j["geometry"] = {{"bs_pos", cfg.geometry.bs_pos},
                     {"ris_pos", cfg.geometry.ris_pos},
                     {"target_angle_deg", cfg.geometry.target_angle_rad / kDegToRad},
                     {"target_distance_m", cfg.geometry.target_distance_m},
                     {"cu_center", cfg.geometry.cu_center},
                     {"cu_radius_m", cfg.geometry.cu_radius_m}};
    j["pathloss"] = {{"pl0_db", cfg.pathloss.pl0_db},
                     {"d0", cfg.pathloss.d0},
                     {"alpha_bi", cfg.pathloss.alpha_bi},
                     {"alpha_iu", cfg.pathloss.alpha_iu},
                     {"alpha_bu", cfg.pathloss.alpha_bu}};
    j["penalty"] = {{"rho0", cfg.penalty.rho0},
                    {"step_c", cfg.penalty.step_c},
                    {"tol_penalty", cfg.penalty.tol_penalty},
                    {"tol_obj", cfg.penalty.tol_obj},
                    {"max_outer", cfg.penalty.max_outer},
                    {"max_inner", cfg.penalty.max_inner},
                    {"bisect_tol", cfg.penalty.bisect_tol}};
    j["mm"] = {{"max_mm", cfg.mm.max_mm}, {"tol", cfg.mm.tol}, {"n_trials", cfg.mm.n_trials}};
    j["sdp"] = {{"tol", cfg.sdp.tol}, {"max_iter", cfg.sdp.max_iter}};
    j["ao"] = {{"n_max", cfg.ao.n_max}, {"tol", cfg.ao.tol}};
    return j.dump(2);
}

}  // namespace config
}  // namespace risdfrc
