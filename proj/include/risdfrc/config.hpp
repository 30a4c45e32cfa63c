#pragma once

#include <optional>
#include <string>

#include "risdfrc/channel.hpp"
#include "risdfrc/penalty.hpp"

namespace risdfrc {

struct MmOptions {
    int max_mm = 5;        // MM linearization rounds per phase step
    double tol = 1e-4;     // relative objective change to stop MM
    int n_trials = 200;    // Gaussian randomization draws
};

struct SdpOptions {
    double tol = 1e-7;
    int max_iter = 200;
};

struct AoConfig {
    int n_max = 30;     // maximum AO iterations
    double tol = 1e-4;  // zeta: |E^(n-1) - E^(n)| threshold
};

/// Full experiment definition. Defaults reproduce the reference scenario.
struct ScenarioConfig {
    int n_t = 4;
    int n_r = 4;
    int m_k = 2;
    int k_users = 2;
    int d_k = 2;
    int l_elems = 20;
    double p0_w = 1.0;
    double gamma0_db = 30.0;
    double bandwidth_hz = 10e6;
    double noise_density_dbm_hz = -174.0;
    double k_rician = 3.0;
    double spacing_ratio = 0.5;  // d / lambda
    std::optional<double> eta_override = 0.1;
    std::uint64_t seed = 1;

    ScenarioGeometry geometry;
    PathLossModel pathloss;
    PenaltyConfig penalty;
    MmOptions mm;
    SdpOptions sdp;
    AoConfig ao;

    /// Noise power in W from density and bandwidth.
    double noise_power_w() const;
    RadarParams radar_params() const;

    /// Throws std::invalid_argument when a field violates its constraints.
    void validate() const;
};

namespace config {

/// Loads a ScenarioConfig from a JSON file; absent fields keep defaults.
ScenarioConfig load(const std::string& path);

/// Parses from a JSON string (used by load and by tests).
ScenarioConfig from_json_text(const std::string& text);

/// Serializes the fully-resolved config (for the run manifest).
std::string to_json_text(const ScenarioConfig& cfg);

}  // namespace config
}  // namespace risdfrc
