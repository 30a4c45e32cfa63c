#pragma once

#include <vector>

#include "risdfrc/linalg.hpp"
#include "risdfrc/phase_vector.hpp"
#include "risdfrc/wmmse.hpp"

namespace risdfrc {

struct RadarParams {
    double gamma0_db = 30.0;  // required output SNR; -inf disables the constraint
    double sigma2_r = 0.0;    // radar noise power, W

    /// Linear SNR threshold; -inf dB maps to -inf (constraint absent).
    double gamma0_linear() const;

    /// sigma2_r * gamma0_linear, the target on sum_k tr(Y_k Y_k^H). -inf when disabled.
    double snr_target() const;
};

namespace radar {

/// Cascaded two-way target matrix V = eta G^H Theta A Theta^H G, N_t x N_t.
ComplexMatrix cascade_matrix(const ComplexMatrix& g, const PhaseVector& theta,
                             const ComplexMatrix& a_resp, Complex eta);

/// MVDR receive weight, normalized to unit norm. Throws when V x = 0.
ComplexVector mvdr_weight(const ComplexMatrix& v, const ComplexVector& x);

/// Output SNR gamma = sum_k tr(V^H V B_k B_k^H) / sigma2_r = sum_k ||V B_k||_F^2 / sigma2_r.
double radar_snr(const ComplexMatrix& v, const BeamformerSet& beams, double sigma2_r);

/// Data-averaged transmit beampattern from the RIS aperture:
/// P(theta) = a(theta)^H Theta^H G (sum_k B_k B_k^H) G^H Theta a(theta).
std::vector<double> beampattern(const std::vector<double>& theta_grid, const PhaseVector& phase,
                                const ComplexMatrix& g, const BeamformerSet& beams,
                                double spacing_ratio = 0.5);

}  // namespace radar
}  // namespace risdfrc
