#include "risdfrc/radar.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "risdfrc/channel.hpp"

namespace risdfrc {

double RadarParams::gamma0_linear() const {
    if (std::isinf(gamma0_db) && gamma0_db < 0.0)
        return -std::numeric_limits<double>::infinity();
    return std::pow(10.0, gamma0_db / 10.0);
}

double RadarParams::snr_target() const {
    const double g0 = gamma0_linear();
    if (std::isinf(g0) && g0 < 0.0) return g0;
    return sigma2_r * g0;
}

namespace radar {

ComplexMatrix cascade_matrix(const ComplexMatrix& g, const PhaseVector& theta,
                             const ComplexMatrix& a_resp, Complex eta) {
    if (g.rows() != theta.size() || a_resp.rows() != theta.size() ||
        a_resp.cols() != theta.size())
        throw std::invalid_argument("cascade_matrix: dimension mismatch");
    const auto th = theta.theta.asDiagonal();
    const auto th_h = theta.theta.conjugate().asDiagonal();
    return eta * (g.adjoint() * (th * (a_resp * (th_h * g))));
}

ComplexVector mvdr_weight(const ComplexMatrix& v, const ComplexVector& x) {
    const ComplexVector vx = v * x;
    const double n = vx.norm();
    if (n == 0.0) throw std::runtime_error("mvdr_weight: V x = 0, no echo energy");
    return vx / n;
}

double radar_snr(const ComplexMatrix& v, const BeamformerSet& beams, double sigma2_r) {
    double num = 0.0;
    for (const auto& bk : beams.b) num += (v * bk).squaredNorm();
    return num / sigma2_r;
}

std::vector<double> beampattern(const std::vector<double>& theta_grid, const PhaseVector& phase,
                                const ComplexMatrix& g, const BeamformerSet& beams,
                                double spacing_ratio) {
    if (theta_grid.empty()) throw std::invalid_argument("beampattern: empty grid");
    const Eigen::Index n_t = g.cols();
    ComplexMatrix b_bar = ComplexMatrix::Zero(n_t, n_t);
    for (const auto& bk : beams.b) b_bar += bk * bk.adjoint();
    // G B_bar G^H once; the grid scan is then a quadratic form per angle.
    const ComplexMatrix gbg = g * b_bar * g.adjoint();
    std::vector<double> out;
    out.reserve(theta_grid.size());
    for (double th : theta_grid) {
        const ComplexVector a = channel::steering(th, g.rows(), spacing_ratio);
        const ComplexVector u = phase.theta.cwiseProduct(a);  // Theta a
        out.push_back(std::real(u.dot(gbg * u)));
    }
    return out;
}

}  // namespace radar
}  // namespace risdfrc
