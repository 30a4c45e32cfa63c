#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "risdfrc/channel.hpp"
#include "risdfrc/radar.hpp"
#include "risdfrc/rng.hpp"

using namespace risdfrc;
using doctest::Approx;

namespace {

ComplexMatrix rand_mat(Eigen::Index r, Eigen::Index c, RngStream& rng) {
    ComplexMatrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.cnormal();
    return m;
}

PhaseVector rand_phase(Eigen::Index l, RngStream& rng) {
    ComplexVector v(l);
    for (Eigen::Index i = 0; i < l; ++i)
        v(i) = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    return PhaseVector{std::move(v)};
}

}  // namespace

TEST_CASE("cascade matrix degenerate and oracle cases") {
    RngStream rng(21);
    const Eigen::Index l = 4, n_t = 3;
    const ComplexMatrix g = rand_mat(l, n_t, rng);
    const ComplexMatrix a = channel::target_response(0.4, l);
    const PhaseVector theta = rand_phase(l, rng);

    CHECK(radar::cascade_matrix(g, theta, a, Complex(0.0)).norm() == Approx(0.0));

    const PhaseVector ones = PhaseVector::checked(ComplexVector::Ones(l));
    const ComplexMatrix v_id = radar::cascade_matrix(
        ComplexMatrix::Identity(l, l), ones, ComplexMatrix::Identity(l, l), Complex(2.5));
    CHECK((v_id - 2.5 * ComplexMatrix::Identity(l, l)).norm() <= 1e-12);

    // Explicit matrix-chain oracle.
    ComplexMatrix theta_mat = ComplexMatrix::Zero(l, l);
    for (Eigen::Index i = 0; i < l; ++i) theta_mat(i, i) = theta.theta(i);
    const Complex eta(0.3, -0.7);
    const ComplexMatrix oracle = eta * g.adjoint() * theta_mat * a * theta_mat.adjoint() * g;
    CHECK((radar::cascade_matrix(g, theta, a, eta) - oracle).norm() <= 1e-12);
}

TEST_CASE("mvdr weight") {
    RngStream rng(22);
    const ComplexVector x = rand_mat(4, 1, rng);
    const ComplexVector w = radar::mvdr_weight(ComplexMatrix::Identity(4, 4), x);
    CHECK((w - x / x.norm()).norm() <= 1e-12);

    // Homogeneity: scaling x leaves the normalized weight unchanged.
    const ComplexVector w2 = radar::mvdr_weight(ComplexMatrix::Identity(4, 4), 2.0 * x);
    CHECK((w - w2).norm() <= 1e-12);

    CHECK_THROWS_AS(radar::mvdr_weight(ComplexMatrix::Zero(4, 4), x), std::runtime_error);

    // SNR through the MVDR weight equals the analytic x^H V^H V x / sigma_r^2.
    const ComplexMatrix v = rand_mat(4, 4, rng);
    const double sigma2_r = 0.37;
    const ComplexVector wv = radar::mvdr_weight(v, x);
    const Complex num = wv.dot(v * x);  // w^H V x
    const double snr_w = std::norm(num) / (sigma2_r * wv.squaredNorm());
    const double snr_direct = std::real(x.dot(v.adjoint() * v * x)) / sigma2_r;
    CHECK(snr_w == Approx(snr_direct).epsilon(1e-10));
}

TEST_CASE("radar snr oracle and invariances") {
    RngStream rng(23);
    const Eigen::Index n_t = 4;
    const double sigma2_r = 0.8;

    BeamformerSet zero;
    zero.b = {ComplexMatrix::Zero(n_t, 2), ComplexMatrix::Zero(n_t, 2)};
    CHECK(radar::radar_snr(rand_mat(n_t, n_t, rng), zero, sigma2_r) == Approx(0.0));

    // V = I with total power P0: gamma = P0 / sigma2_r.
    BeamformerSet single;
    single.b = {rand_mat(n_t, 2, rng)};
    const double p0 = single.b[0].squaredNorm();
    CHECK(radar::radar_snr(ComplexMatrix::Identity(n_t, n_t), single, sigma2_r) ==
          Approx(p0 / sigma2_r).epsilon(1e-12));

    // Frobenius-norm oracle on a random instance.
    const ComplexMatrix v = rand_mat(n_t, n_t, rng);
    BeamformerSet beams;
    beams.b = {rand_mat(n_t, 2, rng), rand_mat(n_t, 1, rng)};
    double oracle = 0.0;
    for (const auto& bk : beams.b) oracle += (v * bk).squaredNorm();
    oracle /= sigma2_r;
    CHECK(radar::radar_snr(v, beams, sigma2_r) == Approx(oracle).epsilon(1e-12));

    // Invariance to right-multiplication by unitary Q_k.
    Eigen::JacobiSVD<ComplexMatrix> svd(rand_mat(2, 2, rng), Eigen::ComputeFullU);
    const ComplexMatrix q = svd.matrixU();
    BeamformerSet rotated = beams;
    rotated.b[0] = beams.b[0] * q;
    CHECK(radar::radar_snr(v, rotated, sigma2_r) ==
          Approx(radar::radar_snr(v, beams, sigma2_r)).epsilon(1e-9));

    // Linear scaling in |eta|^2 and in total power.
    CHECK(radar::radar_snr(Complex(0.0, 2.0) * v, beams, sigma2_r) ==
          Approx(4.0 * radar::radar_snr(v, beams, sigma2_r)).epsilon(1e-9));
    BeamformerSet scaled = beams;
    for (auto& bk : scaled.b) bk *= std::sqrt(3.0);
    CHECK(radar::radar_snr(v, scaled, sigma2_r) ==
          Approx(3.0 * radar::radar_snr(v, beams, sigma2_r)).epsilon(1e-9));
}

TEST_CASE("beampattern basics") {
    RngStream rng(24);
    const Eigen::Index l = 8, n_t = 4;
    const PhaseVector theta = rand_phase(l, rng);
    BeamformerSet beams;
    beams.b = {rand_mat(n_t, 2, rng)};

    std::vector<double> grid;
    for (double deg = -90.0; deg <= 90.0; deg += 1.0)
        grid.push_back(deg * std::numbers::pi / 180.0);

    // Zero channels give the all-zero pattern.
    const auto zero_pat =
        radar::beampattern(grid, theta, ComplexMatrix::Zero(l, n_t), beams);
    for (double v : zero_pat) CHECK(v == Approx(0.0));

    // Nonnegative everywhere on random instances.
    const ComplexMatrix g = rand_mat(l, n_t, rng);
    const auto pat = radar::beampattern(grid, theta, g, beams);
    for (double v : pat) CHECK(v >= -1e-12);

    CHECK_THROWS_AS(radar::beampattern({}, theta, g, beams), std::invalid_argument);
}

TEST_CASE("radar params dB conversion") {
    RadarParams p{30.0, 1e-3};
    CHECK(p.gamma0_linear() == Approx(1000.0));
    CHECK(p.snr_target() == Approx(1.0));

    RadarParams off{-std::numeric_limits<double>::infinity(), 1e-3};
    CHECK(std::isinf(off.gamma0_linear()));
    CHECK(off.gamma0_linear() < 0.0);
    CHECK(std::isinf(off.snr_target()));
    CHECK(off.snr_target() < 0.0);
}
