#include "risdfrc/penalty.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace risdfrc::penalty {

namespace {

/// sum_m H_m^H U_m W_m U_m^H H_m, the shared quadratic coefficient of (23).
ComplexMatrix quadratic_coefficient(const std::vector<ComplexMatrix>& channels,
                                    const DecoderSet& decoders, const WeightSet& weights) {
    const Eigen::Index n_t = channels.front().cols();
    ComplexMatrix m = ComplexMatrix::Zero(n_t, n_t);
    for (std::size_t k = 0; k < channels.size(); ++k) {
        const ComplexMatrix hu = channels[k].adjoint() * decoders.u[k];  // N_t x D_k
        m += hu * weights.w[k] * hu.adjoint();
    }
    return m;
}

/// Bisection for a monotone scalar function. Runs until the constraint value
/// matches the target within rel_tol AND the bracket has collapsed, so the
/// returned multiplier is accurate well beyond the contracted tolerance.
/// `increasing` states the monotonicity of f on [lo, hi].
BisectionResult bisect(const std::function<double(double)>& f, double lo, double hi,
                       double target, double rel_tol, bool increasing) {
    const double span_tol = 1e-13 * std::max(1.0, hi - lo);
    double mid = 0.5 * (lo + hi);
    double val = f(mid);
    for (int it = 0; it < 200; ++it) {
        const bool above = val > target;
        if (above == increasing)
            hi = mid;
        else
            lo = mid;
        mid = 0.5 * (lo + hi);
        val = f(mid);
        if (std::abs(val - target) <= rel_tol * std::abs(target) && hi - lo <= span_tol) break;
    }
    return {mid, val};
}

}  // namespace

BeamformerSet update_beams(const PenaltyState& state, const std::vector<ComplexMatrix>& channels,
                           const DecoderSet& decoders, const WeightSet& weights,
                           const ComplexMatrix& v) {
    const Eigen::Index n_t = channels.front().cols();
    const double inv_rho = 1.0 / state.rho;
    const ComplexMatrix sys = 2.0 * quadratic_coefficient(channels, decoders, weights) +
                              inv_rho * (ComplexMatrix::Identity(n_t, n_t) + v.adjoint() * v);
    const Eigen::LLT<ComplexMatrix> llt(sys);
    BeamformerSet out;
    out.b.reserve(state.beams.b.size());
    for (std::size_t k = 0; k < state.beams.b.size(); ++k) {
        const ComplexMatrix rhs =
            inv_rho * (state.x_aux[k] + v.adjoint() * state.y_aux[k]) +
            2.0 * (channels[k].adjoint() * decoders.u[k] * weights.w[k]);
        out.b.push_back(llt.solve(rhs));
    }
    return out;
}

std::vector<ComplexMatrix> solve_y(const BeamformerSet& beams, const ComplexMatrix& v,
                                   double snr_target, double bisect_tol, BisectionResult* info) {
    std::vector<ComplexMatrix> vb;
    vb.reserve(beams.b.size());
    double tr_gamma = 0.0;
    for (const auto& bk : beams.b) {
        vb.push_back(v * bk);
        tr_gamma += vb.back().squaredNorm();
    }

    // h(0) = tr(Gamma) >= target: inactive constraint, mu = 0.
    if (tr_gamma >= snr_target) {
        if (info) *info = {0.0, tr_gamma};
        return vb;
    }
    if (tr_gamma <= 0.0) {
        std::ostringstream msg;
        msg << "solve_y: tr(Gamma) = 0 with SNR target " << snr_target
            << "; cascade matrix annihilates all beams";
        throw InfeasibleSubproblem(msg.str());
    }

    // h(mu) = tr(Gamma) / (1 - mu)^2 is strictly increasing on [0, 1).
    const auto h = [tr_gamma](double mu) { return tr_gamma / ((1.0 - mu) * (1.0 - mu)); };
    const auto res = bisect(h, 0.0, 1.0 - 1e-12, snr_target, bisect_tol, /*increasing=*/true);
    const double scale = 1.0 / (1.0 - res.multiplier);
    for (auto& yk : vb) yk *= scale;
    if (info) *info = res;
    return vb;
}

std::vector<ComplexMatrix> solve_x(const BeamformerSet& beams, double p0, double bisect_tol,
                                   BisectionResult* info) {
    const double tr_m = beams.total_power();
    if (tr_m <= p0) {
        if (info) *info = {0.0, tr_m};
        return beams.b;
    }
    // g(tau) = tr(M) / (1 + tau)^2 is strictly decreasing; tau < sqrt(tr(M)/P0).
    const double tau_ub = std::sqrt(tr_m / p0);
    const auto g = [tr_m](double tau) { return tr_m / ((1.0 + tau) * (1.0 + tau)); };
    const auto res = bisect(g, 0.0, tau_ub, p0, bisect_tol, /*increasing=*/false);
    std::vector<ComplexMatrix> out;
    out.reserve(beams.b.size());
    const double scale = 1.0 / (1.0 + res.multiplier);
    for (const auto& bk : beams.b) out.push_back(scale * bk);
    if (info) *info = res;
    return out;
}

double penalty_objective(const PenaltyState& state, const std::vector<ComplexMatrix>& channels,
                         const DecoderSet& decoders, const WeightSet& weights,
                         const ComplexMatrix& v) {
    const ComplexMatrix m = quadratic_coefficient(channels, decoders, weights);
    double obj = 0.0;
    for (std::size_t k = 0; k < channels.size(); ++k) {
        const ComplexMatrix& bk = state.beams.b[k];
        obj += std::real((bk.adjoint() * m * bk).trace());
        obj -= 2.0 * std::real((weights.w[k] * decoders.u[k].adjoint() * channels[k] * bk).trace());
    }
    const auto [pen_x, pen_y] = penalty_mismatch(state, v);
    return obj + (pen_x + pen_y) / (2.0 * state.rho);
}

std::pair<double, double> penalty_mismatch(const PenaltyState& state, const ComplexMatrix& v) {
    double pen_x = 0.0;
    double pen_y = 0.0;
    for (std::size_t k = 0; k < state.beams.b.size(); ++k) {
        pen_x += (state.x_aux[k] - state.beams.b[k]).squaredNorm();
        pen_y += (state.y_aux[k] - v * state.beams.b[k]).squaredNorm();
    }
    return {pen_x, pen_y};
}

BeamformerSet run_penalty(const BeamformerSet& init_beams,
                          const std::vector<ComplexMatrix>& channels, const DecoderSet& decoders,
                          const WeightSet& weights, const ComplexMatrix& v_raw,
                          const RadarParams& radar, double p0, const PenaltyConfig& config,
                          PenaltyTrace* trace) {
    // Normalize the SNR-coupled block to a unit target. Physical noise powers
    // put sigma_r^2 gamma_0 around 1e-11 W, far below any absolute penalty
    // tolerance; dividing V by sqrt(target) makes Y, its mismatch, and the
    // exit test dimensionless. Equivalent to a per-block penalty coefficient.
    const double raw_target = radar.snr_target();
    const double v_scale = raw_target > 0.0 ? std::sqrt(raw_target) : 1.0;
    const ComplexMatrix v = v_raw / v_scale;
    const double snr_target = raw_target > 0.0 ? 1.0 : raw_target;

    PenaltyState state;
    state.beams = init_beams;
    state.x_aux = init_beams.b;
    state.y_aux.clear();
    for (const auto& bk : init_beams.b) state.y_aux.push_back(v * bk);
    state.rho = config.rho0;

    double prev_outer_obj = std::numeric_limits<double>::infinity();

    for (state.outer_iter = 0; state.outer_iter < config.max_outer; ++state.outer_iter) {
        if (trace) trace->block_objectives.emplace_back();
        double prev_inner_obj = std::numeric_limits<double>::infinity();
        for (int inner = 0; inner < config.max_inner; ++inner) {
            state.beams = update_beams(state, channels, decoders, weights, v);
            if (trace)
                trace->block_objectives.back().push_back(
                    penalty_objective(state, channels, decoders, weights, v));
            state.y_aux = solve_y(state.beams, v, snr_target, config.bisect_tol);
            if (trace)
                trace->block_objectives.back().push_back(
                    penalty_objective(state, channels, decoders, weights, v));
            state.x_aux = solve_x(state.beams, p0, config.bisect_tol);
            const double obj = penalty_objective(state, channels, decoders, weights, v);
            if (trace) trace->block_objectives.back().push_back(obj);
            if (std::abs(obj - prev_inner_obj) <= config.tol_obj * std::max(1.0, std::abs(obj)))
                break;
            prev_inner_obj = obj;
        }

        const auto [pen_x, pen_y] = penalty_mismatch(state, v);
        const double obj = penalty_objective(state, channels, decoders, weights, v);
        if (trace)
            trace->rows.push_back({state.outer_iter, state.rho, obj, pen_x, pen_y});
        const bool penalties_met = std::max(pen_x, pen_y) <= config.tol_penalty;
        const bool obj_settled =
            std::abs(obj - prev_outer_obj) <= config.tol_obj * std::max(1.0, std::abs(obj));
        if (penalties_met && obj_settled) break;
        prev_outer_obj = obj;
        state.rho *= config.step_c;
    }

    // Snap to feasible: rescale into the power ball, then re-verify the SNR
    // constraint on the beams themselves (the penalty enforces it only
    // asymptotically).
    BeamformerSet out = state.beams;
    const double power = out.total_power();
    if (power > p0) {
        const double s = std::sqrt(p0 / power);
        for (auto& bk : out.b) bk *= s;
    }
    if (raw_target > 0.0) {
        const double snr = radar::radar_snr(v_raw, out, radar.sigma2_r);
        if (snr < radar.gamma0_linear() * (1.0 - 1e-4)) {
            const auto [pen_x, pen_y] = penalty_mismatch(state, v);
            std::ostringstream msg;
            msg << "run_penalty: did not converge to an SNR-feasible point (achieved " << snr
                << ", required " << radar.gamma0_linear() << "; final penalty terms " << pen_x
                << ", " << pen_y << ")";
            throw InfeasibleSubproblem(msg.str());
        }
    }
    return out;
}

}  // namespace risdfrc::penalty
