#pragma once

#include <optional>
#include <vector>

#include "risdfrc/channel.hpp"
#include "risdfrc/config.hpp"
#include "risdfrc/phase_vector.hpp"
#include "risdfrc/radar.hpp"
#include "risdfrc/rng.hpp"
#include "risdfrc/sdp.hpp"
#include "risdfrc/wmmse.hpp"

namespace risdfrc {

/// Quadratic form of the phase objective:
/// f(theta) = theta^H Xi theta + 2 Re(z^H theta) + const.
struct PhaseQuadratic {
    ComplexMatrix xi;       // L x L Hermitian
    ComplexVector z;        // length L
    double const_term = 0.0;
};

/// Linearized SNR constraint sum_k 2 Re(theta^H M_k theta) >= gamma_hat.
struct SurrogateConstraint {
    std::vector<ComplexMatrix> m_list;  // K of L x L
    std::vector<double> c_list;         // C_k = -theta_hat_t^H Q_k theta_hat_t
    double gamma_hat = 0.0;             // sigma_r^2 gamma_0 - sum C_k
};

struct PhaseTraceRow {
    int mm_iter;
    double objective_40a;
    double surrogate_snr;
    double true_snr;
};

struct PhaseOptResult {
    PhaseVector theta;
    bool improved = false;
    bool init_feasible = true;
    std::vector<PhaseTraceRow> trace;
};

namespace phase {

/// theta_hat = diag(Theta^* kron Theta), length L^2, entry (j*L + i) =
/// conj(theta_j) theta_i (column-major pairing).
ComplexVector theta_hat(const PhaseVector& theta);

/// Xi, z and the constant term of the phase objective (40a).
PhaseQuadratic build_quadratic(const ChannelSet& channels, const BeamformerSet& beams,
                               const DecoderSet& decoders, const WeightSet& weights);

/// Objective (40a) evaluated from the quadratic form.
double objective(const PhaseQuadratic& quad, const PhaseVector& theta);

/// Lifted SNR matrices Q_k (L^2 x L^2, Hermitian PSD); a_resp_scaled carries
/// the |eta| folding so that theta_hat^H Q_k theta_hat = tr(V^H V B_k B_k^H).
std::vector<ComplexMatrix> build_snr_lift(const BeamformerSet& beams, const ComplexMatrix& g,
                                          const ComplexMatrix& a_resp_scaled);

/// First-order MM surrogate of the lifted SNR constraint at theta_t.
SurrogateConstraint mm_surrogate(const std::vector<ComplexMatrix>& q_list,
                                 const PhaseVector& theta_t, double snr_target);

/// sum_k theta_hat^H Q_k theta_hat (the true lifted constraint value).
double lifted_snr_value(const std::vector<ComplexMatrix>& q_list, const PhaseVector& theta);

/// sum_k 2 Re(theta^H M_k theta) (the surrogate constraint value).
double surrogate_snr_value(const SurrogateConstraint& surr, const PhaseVector& theta);

/// SDR assembly: R = [[Xi, z], [z^H, 0]], T_k = [[M_k, 0], [0, 0]].
SdpProblem assemble_sdr(const PhaseQuadratic& quad, const SurrogateConstraint& surr);

/// Gaussian randomization over the SDR solution. Returns the candidate with
/// the smallest objective among surrogate-feasible draws; when none is
/// feasible, returns the max-surrogate-SNR candidate with `improved` false.
struct RoundResult {
    PhaseVector theta;
    bool feasible = false;
};
RoundResult randomize_round(const ComplexMatrix& phi, int n_trials,
                            const SurrogateConstraint& surr, const PhaseQuadratic& quad,
                            RngStream& rng);

/// Full phase step: MM linearization + SDR + randomization, with a fallback
/// that never returns a point worse than theta_init under the true constraint.
PhaseOptResult optimize_phase(const ChannelSet& channels, const BeamformerSet& beams,
                              const DecoderSet& decoders, const WeightSet& weights,
                              const RadarParams& radar, const PhaseVector& theta_init,
                              const MmOptions& mm, const SdpOptions& sdp_opts, RngStream& rng);

/// Nearest-grid-point quantization of each phase to B bits, circular
/// distance, ties toward the smaller grid index.
PhaseVector quantize_phase(const PhaseVector& theta, int bits);

}  // namespace phase
}  // namespace risdfrc
