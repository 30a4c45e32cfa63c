#include "risdfrc/phase.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace risdfrc::phase {

namespace {

/// B_bar = sum_k B_k B_k^H.
ComplexMatrix beam_covariance(const BeamformerSet& beams) {
    const Eigen::Index n_t = beams.b.front().rows();
    ComplexMatrix b_bar = ComplexMatrix::Zero(n_t, n_t);
    for (const auto& bk : beams.b) b_bar += bk * bk.adjoint();
    return b_bar;
}

}  // namespace

ComplexVector theta_hat(const PhaseVector& theta) {
    const Eigen::Index l = theta.size();
    ComplexVector out(l * l);
    for (Eigen::Index j = 0; j < l; ++j)
        for (Eigen::Index i = 0; i < l; ++i)
            out(j * l + i) = std::conj(theta.theta(j)) * theta.theta(i);
    return out;
}

PhaseQuadratic build_quadratic(const ChannelSet& channels, const BeamformerSet& beams,
                               const DecoderSet& decoders, const WeightSet& weights) {
    const Eigen::Index l = channels.g.rows();
    const ComplexMatrix b_bar = beam_covariance(beams);
    const ComplexMatrix d_mat = channels.g * b_bar * channels.g.adjoint();  // D = G Bbar G^H

    ComplexMatrix c_sum = ComplexMatrix::Zero(l, l);
    ComplexMatrix z_mat = ComplexMatrix::Zero(l, l);
    double const_term = 0.0;
    for (std::size_t k = 0; k < channels.h_bu.size(); ++k) {
        const ComplexMatrix& h_bu = channels.h_bu[k];
        const ComplexMatrix& h_ru = channels.h_ru[k];
        const ComplexMatrix uw = decoders.u[k] * weights.w[k];          // M_k x D_k
        const ComplexMatrix uwu = uw * decoders.u[k].adjoint();         // M_k x M_k
        c_sum += h_ru.adjoint() * uwu * h_ru;                            // C_k
        // E_k^H = G Bbar H_bu^H U W U^H H_ru ; F_k^H = G B_k W U^H H_ru.
        z_mat += channels.g * b_bar * h_bu.adjoint() * uwu * h_ru;
        z_mat -= channels.g * beams.b[k] * weights.w[k] * decoders.u[k].adjoint() * h_ru;
        // Theta-independent parts of (42) and (44).
        const_term += std::real((uwu.adjoint() * (h_bu * b_bar * h_bu.adjoint())).trace());
        const_term -=
            2.0 * std::real((weights.w[k] * decoders.u[k].adjoint() * h_bu * beams.b[k]).trace());
    }

    PhaseQuadratic quad;
    quad.xi = linalg::hadamard(d_mat, c_sum.transpose());
    quad.z = z_mat.diagonal();
    quad.const_term = const_term;
    return quad;
}

double objective(const PhaseQuadratic& quad, const PhaseVector& theta) {
    const Complex quad_part = theta.theta.dot(quad.xi * theta.theta);  // theta^H Xi theta
    return std::real(quad_part) + 2.0 * std::real(quad.z.dot(theta.theta)) + quad.const_term;
}

std::vector<ComplexMatrix> build_snr_lift(const BeamformerSet& beams, const ComplexMatrix& g,
                                          const ComplexMatrix& a_resp_scaled) {
    const ComplexMatrix p = g.conjugate() * g.transpose();  // G^* G^T
    const ComplexVector diag_a = linalg::vec(a_resp_scaled);
    std::vector<ComplexMatrix> q_list;
    q_list.reserve(beams.b.size());
    for (const auto& bk : beams.b) {
        const ComplexMatrix gb = g * bk;
        const ComplexMatrix s = gb * gb.adjoint();  // G B_k B_k^H G^H
        ComplexMatrix q = linalg::kron(p, s);
        // Diag(vec(A))^H (P kron S) Diag(vec(A)) as row/column scalings.
        q = diag_a.conjugate().asDiagonal() * q * diag_a.asDiagonal();
        q_list.push_back(std::move(q));
    }
    return q_list;
}

SurrogateConstraint mm_surrogate(const std::vector<ComplexMatrix>& q_list,
                                 const PhaseVector& theta_t, double snr_target) {
    const Eigen::Index l = theta_t.size();
    const ComplexVector th = theta_hat(theta_t);
    SurrogateConstraint surr;
    surr.gamma_hat = snr_target;
    for (const auto& q : q_list) {
        const ComplexVector q_bar = q * th;  // q_bar_k = Q_k theta_hat_t (Q_k Hermitian)
        // 2 Re(q_bar^H theta_hat) = 2 Re(theta^H M theta) with
        // M_(j,i) = conj(q_bar)_(j*L + i): the row-major reading of q_bar^H.
        ComplexMatrix m(l, l);
        for (Eigen::Index j = 0; j < l; ++j)
            for (Eigen::Index i = 0; i < l; ++i) m(j, i) = std::conj(q_bar(j * l + i));
        const double c_k = -std::real(th.dot(q_bar));  // -theta_hat_t^H Q_k theta_hat_t
        surr.m_list.push_back(std::move(m));
        surr.c_list.push_back(c_k);
        surr.gamma_hat -= c_k;
    }
    return surr;
}

double lifted_snr_value(const std::vector<ComplexMatrix>& q_list, const PhaseVector& theta) {
    const ComplexVector th = theta_hat(theta);
    double v = 0.0;
    for (const auto& q : q_list) v += std::real(th.dot(q * th));
    return v;
}

double surrogate_snr_value(const SurrogateConstraint& surr, const PhaseVector& theta) {
    double v = 0.0;
    for (const auto& m : surr.m_list) v += 2.0 * std::real(theta.theta.dot(m * theta.theta));
    return v;
}

SdpProblem assemble_sdr(const PhaseQuadratic& quad, const SurrogateConstraint& surr) {
    const Eigen::Index l = quad.z.size();
    SdpProblem prob;
    prob.dim = l + 1;
    prob.cost = ComplexMatrix::Zero(l + 1, l + 1);
    prob.cost.topLeftCorner(l, l) = quad.xi;
    prob.cost.block(0, l, l, 1) = quad.z;
    prob.cost.block(l, 0, 1, l) = quad.z.adjoint();
    prob.ineq_rhs = surr.gamma_hat;
    for (const auto& m : surr.m_list) {
        ComplexMatrix t = ComplexMatrix::Zero(l + 1, l + 1);
        t.topLeftCorner(l, l) = m;
        prob.ineq_matrices.push_back(std::move(t));
    }
    if (std::isinf(surr.gamma_hat) && surr.gamma_hat < 0.0) prob.ineq_matrices.clear();
    return prob;
}

RoundResult randomize_round(const ComplexMatrix& phi, int n_trials,
                            const SurrogateConstraint& surr, const PhaseQuadratic& quad,
                            RngStream& rng) {
    const Eigen::Index dim = phi.rows();
    const Eigen::Index l = dim - 1;
    const auto eig = linalg::herm_eig(phi);
    RealVector lam = eig.eigenvalues.cwiseMax(0.0);
    // Roundoff-level eigenvalues would inject sqrt-amplified noise into the
    // candidates; treat them as exact zeros.
    const double lam_floor = 1e-12 * lam.maxCoeff();
    lam = (lam.array() < lam_floor).select(0.0, lam);
    const ComplexMatrix factor = eig.eigenvectors * lam.cwiseSqrt().asDiagonal();

    const bool constrained = !surr.m_list.empty() &&
                             !(std::isinf(surr.gamma_hat) && surr.gamma_hat < 0.0);

    RoundResult best;
    double best_obj = std::numeric_limits<double>::infinity();
    PhaseVector fallback;
    double fallback_snr = -std::numeric_limits<double>::infinity();

    for (int trial = 0; trial < n_trials; ++trial) {
        ComplexVector r(dim);
        for (Eigen::Index i = 0; i < dim; ++i) r(i) = rng.cnormal();
        const ComplexVector bar = factor * r;
        // De-rotate by the last (auxiliary) entry, then project to unit modulus.
        const double ref = std::arg(bar(l));
        ComplexVector cand(l);
        for (Eigen::Index i = 0; i < l; ++i)
            cand(i) = std::polar(1.0, std::arg(bar(i)) - ref);
        PhaseVector theta{std::move(cand)};

        const double s = constrained ? surrogate_snr_value(surr, theta)
                                     : std::numeric_limits<double>::infinity();
        const bool feasible = !constrained || s >= surr.gamma_hat;
        if (feasible) {
            const double obj = objective(quad, theta);
            if (obj < best_obj) {
                best_obj = obj;
                best.theta = theta;
                best.feasible = true;
            }
        } else if (s > fallback_snr) {
            fallback_snr = s;
            fallback = theta;
        }
    }
    if (!best.feasible) best.theta = fallback;
    return best;
}

PhaseOptResult optimize_phase(const ChannelSet& channels, const BeamformerSet& beams,
                              const DecoderSet& decoders, const WeightSet& weights,
                              const RadarParams& radar, const PhaseVector& theta_init,
                              const MmOptions& mm, const SdpOptions& sdp_opts, RngStream& rng) {
    const double snr_target = radar.snr_target();
    const bool constrained = !(std::isinf(snr_target) && snr_target < 0.0);

    const PhaseQuadratic quad = build_quadratic(channels, beams, decoders, weights);
    // |eta| folded into the target response so the lifted route matches (11).
    const ComplexMatrix a_scaled = std::abs(channels.eta) * channels.a_resp;
    const std::vector<ComplexMatrix> q_list =
        constrained ? build_snr_lift(beams, channels.g, a_scaled)
                    : std::vector<ComplexMatrix>{};

    PhaseOptResult result;
    result.theta = theta_init;
    double best_obj = objective(quad, theta_init);
    if (constrained) {
        const double init_snr = lifted_snr_value(q_list, theta_init);
        result.init_feasible = init_snr >= snr_target * (1.0 - 1e-4);
    }

    PhaseVector theta_t = theta_init;
    double prev_obj = best_obj;
    for (int it = 0; it < mm.max_mm; ++it) {
        SurrogateConstraint surr;
        if (constrained) {
            surr = mm_surrogate(q_list, theta_t, snr_target);
        } else {
            surr.gamma_hat = -std::numeric_limits<double>::infinity();
        }
        const SdpProblem prob = assemble_sdr(quad, surr);
        const SdpSolution sol = sdp::solve(prob, sdp_opts.tol, sdp_opts.max_iter);
        // A feasible theta_t keeps its own lift surrogate-feasible (tangency),
        // so an infeasible SDR means the linearization point itself cannot
        // reach the target: keep the best point found so far.
        if (sol.status == SdpStatus::Infeasible) break;

        const RoundResult cand = randomize_round(sol.phi, mm.n_trials, surr, quad, rng);
        const double cand_obj = objective(quad, cand.theta);
        // Accept only candidates that hold the true constraint (12b); the
        // surrogate is a lower bound, so surrogate-feasible implies true-
        // feasible up to roundoff, but a failed randomization does not.
        const bool true_ok =
            !constrained || lifted_snr_value(q_list, cand.theta) >= snr_target * (1.0 - 1e-9);

        result.trace.push_back({it, cand_obj,
                                constrained ? surrogate_snr_value(surr, cand.theta)
                                            : std::numeric_limits<double>::infinity(),
                                constrained ? lifted_snr_value(q_list, cand.theta)
                                            : std::numeric_limits<double>::infinity()});

        if (cand.feasible && true_ok && cand_obj < best_obj) {
            best_obj = cand_obj;
            result.theta = cand.theta;
            result.improved = true;
            theta_t = cand.theta;
        } else {
            break;  // MM cannot improve from this linearization point
        }
        if (std::abs(prev_obj - cand_obj) <= mm.tol * std::max(1.0, std::abs(cand_obj))) break;
        prev_obj = cand_obj;
    }
    return result;
}

PhaseVector quantize_phase(const PhaseVector& theta, int bits) {
    if (bits < 1) throw std::invalid_argument("quantize_phase: bits must be >= 1");
    const auto levels = 1LL << bits;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(levels);
    ComplexVector out(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        double phi = std::arg(theta.theta(i));
        if (phi < 0.0) phi += 2.0 * std::numbers::pi;
        const auto lo = static_cast<long long>(std::floor(phi / step));
        long long best_m = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (long long cand : {lo % levels, (lo + 1) % levels}) {
            double d = std::abs(phi - step * static_cast<double>(cand));
            d = std::min(d, 2.0 * std::numbers::pi - d);  // circular distance
            // Strict improvement keeps ties on the smaller index (lo % levels
            // may exceed (lo+1) % levels after wrap, so compare explicitly).
            if (d < best_d - 1e-15 || (std::abs(d - best_d) <= 1e-15 && cand < best_m)) {
                best_d = d;
                best_m = cand;
            }
        }
        out(i) = std::polar(1.0, step * static_cast<double>(best_m));
    }
    return PhaseVector{std::move(out)};
}

}  // namespace risdfrc::phase
