#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "risdfrc/radar.hpp"
#include "risdfrc/wmmse.hpp"

namespace risdfrc {

struct PenaltyConfig {
    double rho0 = 100.0;        // initial penalty coefficient
    double step_c = 0.7;        // multiplicative shrink, 0 < c < 1
    double tol_penalty = 1e-10; // xi: max allowed penalty-term value at exit
    double tol_obj = 1e-6;      // epsilon: relative objective change at exit
    int max_outer = 120;
    int max_inner = 30;
    double bisect_tol = 1e-9;   // relative accuracy of the dual bisections
};

/// Working state of the penalty method: beams plus the two auxiliary copies.
struct PenaltyState {
    BeamformerSet beams;
    std::vector<ComplexMatrix> x_aux;  // power-feasible copy of B_k
    std::vector<ComplexMatrix> y_aux;  // SNR-feasible copy of V B_k
    double rho = 0.0;
    int outer_iter = 0;
};

/// One trace row per outer iteration (convergence experiment CSV).
struct PenaltyTraceRow {
    int outer_iter;
    double rho;
    double objective;
    double penalty_x;
    double penalty_y;
};

struct PenaltyTrace {
    std::vector<PenaltyTraceRow> rows;
    /// Objective after every block update, one sequence per outer iteration
    /// (rho is fixed within a sequence), for monotonicity checks.
    std::vector<std::vector<double>> block_objectives;
};

/// Signals that constraint (20c) cannot be met for the current cascade matrix.
class InfeasibleSubproblem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace penalty {

/// Closed-form B_k update for the penalized quadratic, all users.
BeamformerSet update_beams(const PenaltyState& state,
                           const std::vector<ComplexMatrix>& channels,
                           const DecoderSet& decoders, const WeightSet& weights,
                           const ComplexMatrix& v);

/// Result of a dual bisection: multiplier plus the achieved constraint value.
struct BisectionResult {
    double multiplier = 0.0;
    double constraint_value = 0.0;
};

/// Y_k = V B_k / (1 - mu*) with mu* from bisection on h(mu) = tr(Gamma)/(1-mu)^2.
/// Throws InfeasibleSubproblem when Gamma = 0 but the SNR target is positive.
std::vector<ComplexMatrix> solve_y(const BeamformerSet& beams, const ComplexMatrix& v,
                                   double snr_target, double bisect_tol,
                                   BisectionResult* info = nullptr);

/// X_k = B_k / (1 + tau*) with tau* from bisection on g(tau) = tr(M)/(1+tau)^2.
std::vector<ComplexMatrix> solve_x(const BeamformerSet& beams, double p0, double bisect_tol,
                                   BisectionResult* info = nullptr);

/// Quadratic WMMSE part of (19a) plus the scaled penalty terms.
double penalty_objective(const PenaltyState& state, const std::vector<ComplexMatrix>& channels,
                         const DecoderSet& decoders, const WeightSet& weights,
                         const ComplexMatrix& v);

/// Sum of squared constraint mismatches (penalty_x, penalty_y).
std::pair<double, double> penalty_mismatch(const PenaltyState& state, const ComplexMatrix& v);

/// Two-layer penalty method for the beamforming subproblem. Returns beams that
/// are power feasible within (1 + 1e-5) P0 and, when the SNR constraint is
/// active, SNR feasible within gamma0 (1 - 1e-4).
BeamformerSet run_penalty(const BeamformerSet& init_beams,
                          const std::vector<ComplexMatrix>& channels,
                          const DecoderSet& decoders, const WeightSet& weights,
                          const ComplexMatrix& v, const RadarParams& radar, double p0,
                          const PenaltyConfig& config, PenaltyTrace* trace = nullptr);

}  // namespace penalty
}  // namespace risdfrc
