#include "risdfrc/wmmse.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace risdfrc {

double BeamformerSet::total_power() const {
    double p = 0.0;
    for (const auto& bk : b) p += bk.squaredNorm();
    return p;
}

namespace wmmse {

namespace {

/// sum_i H_k B_i B_i^H H_k^H
ComplexMatrix rx_signal_cov(const ComplexMatrix& h_k, const BeamformerSet& beams) {
    const Eigen::Index m = h_k.rows();
    ComplexMatrix cov = ComplexMatrix::Zero(m, m);
    for (const auto& bi : beams.b) {
        const ComplexMatrix hb = h_k * bi;
        cov += hb * hb.adjoint();
    }
    return cov;
}

}  // namespace

double sum_rate(const std::vector<ComplexMatrix>& channels, const BeamformerSet& beams,
                double sigma2) {
    double rate = 0.0;
    for (std::size_t k = 0; k < channels.size(); ++k) {
        const ComplexMatrix& h_k = channels[k];
        const Eigen::Index m = h_k.rows();
        const ComplexMatrix cov = rx_signal_cov(h_k, beams);
        const ComplexMatrix hb = h_k * beams.b[k];
        const ComplexMatrix sig = hb * hb.adjoint();
        const ComplexMatrix j_k =
            sigma2 * ComplexMatrix::Identity(m, m) + cov - sig;
        // log det(I + sig J^{-1}) = log det(J + sig) - log det(J); both HPD.
        rate += linalg::logdet_hpd(j_k + sig) - linalg::logdet_hpd(j_k);
    }
    return rate;
}

ComplexMatrix mse_matrix(const ComplexMatrix& h_k, const BeamformerSet& beams,
                         const ComplexMatrix& u_k, double sigma2, std::size_t k) {
    const Eigen::Index d = beams.b[k].cols();
    const ComplexMatrix cov = rx_signal_cov(h_k, beams);
    const ComplexMatrix uhb = u_k.adjoint() * h_k * beams.b[k];
    return u_k.adjoint() * cov * u_k - uhb - uhb.adjoint() +
           sigma2 * (u_k.adjoint() * u_k) + ComplexMatrix::Identity(d, d);
}

ComplexMatrix update_decoder(const ComplexMatrix& h_k, const BeamformerSet& beams, double sigma2,
                             std::size_t k) {
    const Eigen::Index m = h_k.rows();
    const ComplexMatrix j_full =
        rx_signal_cov(h_k, beams) + sigma2 * ComplexMatrix::Identity(m, m);
    return linalg::solve_hpd(j_full, h_k * beams.b[k]);
}

ComplexMatrix update_weight(const ComplexMatrix& e_k) {
    const auto eig = linalg::herm_eig(e_k);
    if (eig.eigenvalues.minCoeff() <= 0.0) {
        std::ostringstream msg;
        msg << "update_weight: MSE matrix singular (min eigenvalue "
            << eig.eigenvalues.minCoeff() << ")";
        throw std::runtime_error(msg.str());
    }
    return linalg::solve_hpd(e_k, ComplexMatrix::Identity(e_k.rows(), e_k.cols()));
}

double objective(const WeightSet& weights, const std::vector<ComplexMatrix>& mses) {
    double obj = 0.0;
    for (std::size_t k = 0; k < weights.w.size(); ++k) {
        const double d_k = static_cast<double>(mses[k].rows());
        obj += linalg::logdet_hpd(weights.w[k]) -
               std::real((weights.w[k] * mses[k]).trace()) + d_k;
    }
    return obj;
}

DecoderSet update_decoders(const std::vector<ComplexMatrix>& channels, const BeamformerSet& beams,
                           double sigma2) {
    DecoderSet out;
    out.u.reserve(channels.size());
    for (std::size_t k = 0; k < channels.size(); ++k)
        out.u.push_back(update_decoder(channels[k], beams, sigma2, k));
    return out;
}

WeightSet update_weights(const std::vector<ComplexMatrix>& channels, const BeamformerSet& beams,
                         const DecoderSet& decoders, double sigma2) {
    WeightSet out;
    out.w.reserve(channels.size());
    for (std::size_t k = 0; k < channels.size(); ++k)
        out.w.push_back(update_weight(mse_matrix(channels[k], beams, decoders.u[k], sigma2, k)));
    return out;
}

}  // namespace wmmse
}  // namespace risdfrc
