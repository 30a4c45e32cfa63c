#pragma once

#include <vector>

#include "risdfrc/linalg.hpp"

namespace risdfrc {

/// Transmit beamforming matrices, one N_t x D_k block per user.
struct BeamformerSet {
    std::vector<ComplexMatrix> b;

    double total_power() const;
};

/// Linear receive decoders, one M_k x D_k block per user.
struct DecoderSet {
    std::vector<ComplexMatrix> u;
};

/// WMMSE auxiliary weights, one Hermitian positive definite D_k x D_k block per user.
struct WeightSet {
    std::vector<ComplexMatrix> w;
};

namespace wmmse {

/// Achievable sum rate (natural log) over the effective channels.
double sum_rate(const std::vector<ComplexMatrix>& channels, const BeamformerSet& beams,
                double sigma2);

/// MSE matrix E_k for user k given its decoder.
ComplexMatrix mse_matrix(const ComplexMatrix& h_k, const BeamformerSet& beams,
                         const ComplexMatrix& u_k, double sigma2, std::size_t k);

/// MMSE decoder update: U_k = (H_k sum_i B_i B_i^H H_k^H + sigma2 I)^{-1} H_k B_k.
ComplexMatrix update_decoder(const ComplexMatrix& h_k, const BeamformerSet& beams, double sigma2,
                             std::size_t k);

/// Weight update W_k = E_k^{-1}. Throws if E_k is singular.
ComplexMatrix update_weight(const ComplexMatrix& e_k);

/// sum_k (log det W_k - tr(W_k E_k) + D_k).
double objective(const WeightSet& weights, const std::vector<ComplexMatrix>& mses);

/// Convenience: decoders and weights for all users at fixed (beams, channels).
DecoderSet update_decoders(const std::vector<ComplexMatrix>& channels, const BeamformerSet& beams,
                           double sigma2);
WeightSet update_weights(const std::vector<ComplexMatrix>& channels, const BeamformerSet& beams,
                         const DecoderSet& decoders, double sigma2);

}  // namespace wmmse
}  // namespace risdfrc
