#pragma once

#include <array>
#include <optional>
#include <vector>

#include "risdfrc/linalg.hpp"
#include "risdfrc/phase_vector.hpp"
#include "risdfrc/rng.hpp"

namespace risdfrc {

struct ScenarioConfig;  // config.hpp

/// Positions in meters on the 2D deployment plane.
using Position = std::array<double, 2>;

struct ScenarioGeometry {
    Position bs_pos{0.0, 0.0};
    Position ris_pos{15.0, 0.0};
    double target_angle_rad = -20.0 * 3.14159265358979323846 / 180.0;  // w.r.t. RIS broadside
    double target_distance_m = 5.0;
    Position cu_center{0.0, 100.0};
    double cu_radius_m = 5.0;
};

/// PL(d) = pl0_db - 10 * alpha * log10(d / d0), in dB.
struct PathLossModel {
    double pl0_db = -30.0;
    double d0 = 1.0;
    double alpha_bi = 2.2;   // BS-RIS
    double alpha_iu = 2.2;   // RIS-CU
    double alpha_bu = 3.75;  // BS-CU
};

/// One realization of every channel in the scenario.
struct ChannelSet {
    ComplexMatrix g;                  // L x N_t, BS -> RIS
    std::vector<ComplexMatrix> h_bu;  // K of M_k x N_t, BS -> CU k
    std::vector<ComplexMatrix> h_ru;  // K of M_k x L,   RIS -> CU k
    ComplexMatrix a_resp;             // L x L, target response a(theta0) a(theta0)^H
    Complex eta;                      // radar round-trip gain
    double sigma2 = 0.0;              // CU noise power, W
    double sigma2_r = 0.0;            // radar noise power, W
};

namespace channel {

/// Path loss in dB at distance d for exponent alpha.
double path_loss_db(double d, double alpha, const PathLossModel& model);

/// Amplitude gain corresponding to a dB power loss: 10^(pl_db / 20).
double db_to_amplitude(double pl_db);

/// ULA steering vector, element i = exp(-j 2 pi (d/lambda) i sin(theta)).
ComplexVector steering(double theta, Eigen::Index n, double spacing_ratio = 0.5);

/// Rank-one target response A = a(theta0) a(theta0)^H.
ComplexMatrix target_response(double theta0, Eigen::Index n, double spacing_ratio = 0.5);

/// Rician fading matrix with LoS steering structure.
ComplexMatrix gen_rician(Eigen::Index rows, Eigen::Index cols, double k_factor, double aoa,
                         double aod, double gain_linear, RngStream& rng,
                         double spacing_ratio = 0.5);

/// Rayleigh fading (Rician with K_R = 0).
ComplexMatrix gen_rayleigh(Eigen::Index rows, Eigen::Index cols, double gain_linear,
                           RngStream& rng);

/// Equivalent channel H_k = H_bu,k + H_ru,k Theta^H G with Theta = Diag(theta).
ComplexMatrix effective_channel(const ComplexMatrix& h_bu, const ComplexMatrix& h_ru,
                                const PhaseVector& theta, const ComplexMatrix& g);

/// All K effective channels for one phase configuration.
std::vector<ComplexMatrix> effective_channels(const ChannelSet& ch, const PhaseVector& theta);

/// Draw a full channel realization for the scenario. Deterministic in
/// (config, rng lineage).
ChannelSet sample_scenario(const ScenarioConfig& config, const RngStream& rng);

}  // namespace channel
}  // namespace risdfrc
