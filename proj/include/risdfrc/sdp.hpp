#pragma once

#include <string>
#include <vector>

#include "risdfrc/linalg.hpp"

namespace risdfrc {

/// The SDP family behind the relaxed phase problem: Hermitian PSD variable
/// with unit diagonal and one aggregated linear trace inequality,
///
///   min  tr(Phi R)
///   s.t. sum_k 2 Re(tr(Phi T_k)) >= gamma_hat,   diag(Phi) = 1,   Phi >= 0.
struct SdpProblem {
    ComplexMatrix cost;                        // R, Hermitian dim x dim
    std::vector<ComplexMatrix> ineq_matrices;  // T_k; empty or gamma_hat = -inf disables
    double ineq_rhs = 0.0;                     // gamma_hat
    Eigen::Index dim = 0;

    bool has_inequality() const;
    /// Aggregated Hermitian inequality matrix T = sum_k (T_k + T_k^H).
    ComplexMatrix aggregated_ineq() const;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter };

struct SdpSolution {
    ComplexMatrix phi;
    double primal_obj = 0.0;
    double dual_gap = 0.0;
    SdpStatus status = SdpStatus::MaxIter;
    int iterations = 0;
};

struct SdpCertificate {
    double diag_residual = 0.0;
    double min_eigenvalue = 0.0;
    double ineq_slack = 0.0;  // constraint value minus gamma_hat
    double obj_recomputed = 0.0;
    bool pass = false;
    std::string detail;
};

namespace sdp {

/// Primal-dual path-following solve over the real-symmetric embedding
/// [[Re, -Im], [Im, Re]] of the Hermitian problem. Deterministic.
SdpSolution solve(const SdpProblem& problem, double tol = 1e-7, int max_iter = 200);

/// Recomputes feasibility and objective of an Optimal solution from scratch.
SdpCertificate check_certificate(const SdpProblem& problem, const SdpSolution& solution,
                                 double tol = 1e-7);

/// Plain-text fixture format: dimension, gamma_hat, cost entries (re im,
/// row-major), then each T_k. Round-trips exactly through load_problem.
std::string dump_problem(const SdpProblem& problem);
SdpProblem load_problem(const std::string& text);

}  // namespace sdp
}  // namespace risdfrc
