#include "risdfrc/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "risdfrc/config.hpp"

namespace risdfrc {

PhaseVector PhaseVector::checked(ComplexVector v, double tol) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(std::abs(v(i)) - 1.0) > tol)
            throw std::invalid_argument("PhaseVector: entry is not unit modulus");
    }
    return PhaseVector{std::move(v)};
}

PhaseVector PhaseVector::project(const ComplexVector& v) {
    ComplexVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        out(i) = a > 0.0 ? v(i) / a : Complex(1.0, 0.0);
    }
    return PhaseVector{std::move(out)};
}

namespace channel {

namespace {

double distance(const Position& a, const Position& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

/// Angle of the direction from `from` toward `to`, w.r.t. the x axis. All
/// arrays share the convention of broadside along +x.
double bearing(const Position& from, const Position& to) {
    return std::atan2(to[1] - from[1], to[0] - from[0]);
}

}  // namespace

double path_loss_db(double d, double alpha, const PathLossModel& model) {
    if (d <= 0.0) throw std::invalid_argument("path_loss_db: distance must be positive");
    return model.pl0_db - 10.0 * alpha * std::log10(d / model.d0);
}

double db_to_amplitude(double pl_db) { return std::pow(10.0, pl_db / 20.0); }

ComplexVector steering(double theta, Eigen::Index n, double spacing_ratio) {
    if (n < 1) throw std::invalid_argument("steering: n must be >= 1");
    ComplexVector a(n);
    const double phase_step = -2.0 * std::numbers::pi * spacing_ratio * std::sin(theta);
    for (Eigen::Index i = 0; i < n; ++i)
        a(i) = std::polar(1.0, phase_step * static_cast<double>(i));
    return a;
}

ComplexMatrix target_response(double theta0, Eigen::Index n, double spacing_ratio) {
    const ComplexVector a = steering(theta0, n, spacing_ratio);
    return a * a.adjoint();
}

ComplexMatrix gen_rician(Eigen::Index rows, Eigen::Index cols, double k_factor, double aoa,
                         double aod, double gain_linear, RngStream& rng, double spacing_ratio) {
    if (k_factor < 0.0) throw std::invalid_argument("gen_rician: K_R must be >= 0");
    ComplexMatrix w(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) w(i, j) = rng.cnormal();
    const double nlos_w = std::sqrt(1.0 / (1.0 + k_factor));
    if (k_factor == 0.0) return gain_linear * (nlos_w * w);
    const double los_w = std::sqrt(k_factor / (1.0 + k_factor));
    const ComplexMatrix los =
        steering(aoa, rows, spacing_ratio) * steering(aod, cols, spacing_ratio).adjoint();
    return gain_linear * (los_w * los + nlos_w * w);
}

ComplexMatrix gen_rayleigh(Eigen::Index rows, Eigen::Index cols, double gain_linear,
                           RngStream& rng) {
    return gen_rician(rows, cols, 0.0, 0.0, 0.0, gain_linear, rng);
}

ComplexMatrix effective_channel(const ComplexMatrix& h_bu, const ComplexMatrix& h_ru,
                                const PhaseVector& theta, const ComplexMatrix& g) {
    if (h_ru.cols() != theta.size() || g.rows() != theta.size() || h_bu.cols() != g.cols() ||
        h_bu.rows() != h_ru.rows())
        throw std::invalid_argument("effective_channel: dimension mismatch");
    return h_bu + h_ru * theta.theta.conjugate().asDiagonal() * g;
}

std::vector<ComplexMatrix> effective_channels(const ChannelSet& ch, const PhaseVector& theta) {
    std::vector<ComplexMatrix> out;
    out.reserve(ch.h_bu.size());
    for (std::size_t k = 0; k < ch.h_bu.size(); ++k)
        out.push_back(effective_channel(ch.h_bu[k], ch.h_ru[k], theta, ch.g));
    return out;
}

ChannelSet sample_scenario(const ScenarioConfig& config, const RngStream& rng) {
    config.validate();
    const auto& geo = config.geometry;
    const auto& pl = config.pathloss;
    ChannelSet out;

    out.sigma2 = config.noise_power_w();
    out.sigma2_r = out.sigma2;

    // BS-RIS link: Rician with geometric LoS angles.
    const double d_bi = distance(geo.bs_pos, geo.ris_pos);
    const double amp_bi = db_to_amplitude(path_loss_db(d_bi, pl.alpha_bi, pl));
    RngStream rng_g = rng.fork("g");
    out.g = gen_rician(config.l_elems, config.n_t, config.k_rician,
                       bearing(geo.ris_pos, geo.bs_pos), bearing(geo.bs_pos, geo.ris_pos),
                       amp_bi, rng_g, config.spacing_ratio);

    // CU positions: uniform over the disk.
    RngStream rng_pos = rng.fork("cu_pos");
    for (int k = 0; k < config.k_users; ++k) {
        const double r = geo.cu_radius_m * std::sqrt(rng_pos.uniform());
        const double phi = 2.0 * std::numbers::pi * rng_pos.uniform();
        const Position cu{geo.cu_center[0] + r * std::cos(phi),
                          geo.cu_center[1] + r * std::sin(phi)};

        const double amp_bu =
            db_to_amplitude(path_loss_db(distance(geo.bs_pos, cu), pl.alpha_bu, pl));
        RngStream rng_bu = rng.fork("h_bu_" + std::to_string(k));
        out.h_bu.push_back(gen_rayleigh(config.m_k, config.n_t, amp_bu, rng_bu));

        const double amp_ru =
            db_to_amplitude(path_loss_db(distance(geo.ris_pos, cu), pl.alpha_iu, pl));
        RngStream rng_ru = rng.fork("h_ru_" + std::to_string(k));
        out.h_ru.push_back(gen_rayleigh(config.m_k, config.l_elems, amp_ru, rng_ru));
    }

    out.a_resp = target_response(geo.target_angle_rad, config.l_elems, config.spacing_ratio);

    if (config.eta_override) {
        out.eta = Complex(*config.eta_override, 0.0);
    } else {
        // Two-way RIS <-> target amplitude from the RIS-link exponent.
        const double pl_rt =
            2.0 * path_loss_db(geo.target_distance_m, pl.alpha_bi, pl);
        out.eta = Complex(db_to_amplitude(pl_rt), 0.0);
    }
    return out;
}

}  // namespace channel
}  // namespace risdfrc
