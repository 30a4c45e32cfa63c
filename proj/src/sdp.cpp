#include "risdfrc/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace risdfrc {

bool SdpProblem::has_inequality() const {
    return !ineq_matrices.empty() && !(std::isinf(ineq_rhs) && ineq_rhs < 0.0);
}

ComplexMatrix SdpProblem::aggregated_ineq() const {
    ComplexMatrix t = ComplexMatrix::Zero(dim, dim);
    for (const auto& tk : ineq_matrices) t += tk + tk.adjoint();
    return t;
}

namespace sdp {

namespace {

/// Real-symmetric embedding J(M) = [[Re M, -Im M], [Im M, Re M]].
RealMatrix embed(const ComplexMatrix& m) {
    const Eigen::Index n = m.rows();
    RealMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = m.real();
    out.topRightCorner(n, n) = -m.imag();
    out.bottomLeftCorner(n, n) = m.imag();
    out.bottomRightCorner(n, n) = m.real();
    return out;
}

/// Inverse of embed, averaging the redundant blocks and Hermitian-symmetrizing.
ComplexMatrix unembed(const RealMatrix& z) {
    const Eigen::Index n = z.rows() / 2;
    ComplexMatrix phi(n, n);
    phi.real() = 0.5 * (z.topLeftCorner(n, n) + z.bottomRightCorner(n, n));
    phi.imag() = 0.5 * (z.bottomLeftCorner(n, n) - z.topRightCorner(n, n));
    return 0.5 * (phi + phi.adjoint());
}

/// Largest alpha such that X + alpha * dX stays positive definite, via the
/// minimum eigenvalue of L^{-1} dX L^{-T} with X = L L^T.
double max_psd_step(const RealMatrix& x, const RealMatrix& dx) {
    Eigen::LLT<RealMatrix> llt(x);
    if (llt.info() != Eigen::Success) return 0.0;
    const RealMatrix l = llt.matrixL();
    RealMatrix w = l.triangularView<Eigen::Lower>().solve(dx);
    w = l.triangularView<Eigen::Lower>().solve(w.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (w + w.transpose()),
                                                 Eigen::EigenvaluesOnly);
    const double lam_min = es.eigenvalues().minCoeff();
    if (lam_min >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / lam_min;
}

struct CoreResult {
    RealMatrix z;          // N x N primal block
    double slack = 0.0;    // scalar slack (inequality problems)
    double pobj = 0.0;     // <C, Z>
    double dobj = 0.0;     // b^T y
    double gap = 0.0;      // complementarity <X~, S~>
    bool converged = false;
    int iterations = 0;
};

/// Infeasible-start primal-dual HKM path following for
///   min <C, Z>  s.t.  diag(Z) = 1,  [ <T, Z> - s = gr, s >= 0 ],  Z >= 0.
/// The inequality row is present iff `t` is non-null.
CoreResult solve_core(const RealMatrix& c, const RealMatrix* t, double gr, double tol,
                      int max_iter) {
    const Eigen::Index n = c.rows();
    const bool ineq = t != nullptr;
    const Eigen::Index m = n + (ineq ? 1 : 0);
    const double nu = static_cast<double>(n + (ineq ? 1 : 0));

    RealMatrix z = RealMatrix::Identity(n, n);
    RealMatrix s = RealMatrix::Identity(n, n) * std::max(1.0, c.cwiseAbs().maxCoeff());
    double slack = 1.0;
    double slack_dual = s(0, 0);
    RealVector y = RealVector::Zero(m);

    RealVector b = RealVector::Ones(m);
    if (ineq) b(n) = gr;
    const double b_scale = 1.0 + b.cwiseAbs().maxCoeff();
    const double c_scale = 1.0 + c.cwiseAbs().maxCoeff();

    CoreResult res;
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it;
        // Residuals.
        RealVector r_p(m);
        for (Eigen::Index j = 0; j < n; ++j) r_p(j) = 1.0 - z(j, j);
        if (ineq) r_p(n) = gr - ((*t).cwiseProduct(z).sum() - slack);

        RealMatrix r_d = c - s;
        r_d.diagonal() -= y.head(n);
        if (ineq) r_d -= y(n) * (*t);
        const double r_ds = ineq ? (y(n) - slack_dual) : 0.0;

        const double gap = z.cwiseProduct(s).sum() + (ineq ? slack * slack_dual : 0.0);
        const double pobj = c.cwiseProduct(z).sum();
        const double dobj = b.dot(y);

        res.pobj = pobj;
        res.dobj = dobj;
        res.gap = gap;
        res.z = z;
        res.slack = slack;

        const double pinf = r_p.cwiseAbs().maxCoeff() / b_scale;
        const double dinf =
            std::max(r_d.cwiseAbs().maxCoeff(), std::abs(r_ds)) / c_scale;
        const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
        if (pinf <= tol && dinf <= tol && rel_gap <= tol) {
            res.converged = true;
            return res;
        }

        const double mu = gap / nu;

        // Shared factorizations for this iteration.
        Eigen::LLT<RealMatrix> llt_s(s);
        if (llt_s.info() != Eigen::Success) break;
        const RealMatrix s_inv = llt_s.solve(RealMatrix::Identity(n, n));
        const RealMatrix zts = ineq ? RealMatrix(z * (*t) * s_inv) : RealMatrix();

        // Schur complement M_jk = <A_j, X A_k S^{-1}> over both blocks.
        RealMatrix schur(m, m);
        schur.topLeftCorner(n, n) = z.cwiseProduct(s_inv);
        if (ineq) {
            for (Eigen::Index j = 0; j < n; ++j) {
                schur(j, n) = zts(j, j);
                schur(n, j) = zts(j, j);
            }
            schur(n, n) = (*t).cwiseProduct(zts).sum() + slack / slack_dual;
        }
        Eigen::LDLT<RealMatrix> ldlt(0.5 * (schur + schur.transpose()));
        if (ldlt.info() != Eigen::Success) break;

        const RealMatrix xrs = z * r_d * s_inv;
        // M dy = b - sigma mu A(S~^{-1}) + A(X~ R_d S~^{-1}); the slack block of
        // the inequality row carries coefficient -1.
        const auto assemble_rhs = [&](double sigma_mu) {
            RealVector rhs(m);
            for (Eigen::Index j = 0; j < n; ++j)
                rhs(j) = b(j) - sigma_mu * s_inv(j, j) + xrs(j, j);
            if (ineq) {
                rhs(n) = b(n) - sigma_mu * (*t).cwiseProduct(s_inv).sum() +
                         sigma_mu / slack_dual + (*t).cwiseProduct(xrs).sum() -
                         slack * r_ds / slack_dual;
            }
            return rhs;
        };

        struct Direction {
            RealVector dy;
            RealMatrix dz, ds;
            double dslack = 0.0, dslack_dual = 0.0;
            double alpha_p = 0.0, alpha_d = 0.0;
        };
        const auto compute_direction = [&](double sigma_mu) {
            Direction d;
            d.dy = ldlt.solve(assemble_rhs(sigma_mu));
            d.ds = r_d;
            d.ds.diagonal() -= d.dy.head(n);
            if (ineq) d.ds -= d.dy(n) * (*t);
            const RealMatrix dz_raw = sigma_mu * s_inv - z - z * d.ds * s_inv;
            d.dz = 0.5 * (dz_raw + dz_raw.transpose());
            if (ineq) {
                d.dslack_dual = r_ds + d.dy(n);
                d.dslack = sigma_mu / slack_dual - slack - slack * d.dslack_dual / slack_dual;
            }

            double ap = max_psd_step(z, d.dz);
            double ad = max_psd_step(s, d.ds);
            if (ineq) {
                if (d.dslack < 0.0) ap = std::min(ap, -slack / d.dslack);
                if (d.dslack_dual < 0.0) ad = std::min(ad, -slack_dual / d.dslack_dual);
            }
            d.alpha_p = std::min(1.0, 0.98 * ap);
            d.alpha_d = std::min(1.0, 0.98 * ad);
            return d;
        };

        // Predictor (affine) pass fixes the centering weight adaptively.
        const Direction aff = compute_direction(0.0);
        double gap_aff =
            (z + aff.alpha_p * aff.dz).cwiseProduct(s + aff.alpha_d * aff.ds).sum();
        if (ineq)
            gap_aff += (slack + aff.alpha_p * aff.dslack) *
                       (slack_dual + aff.alpha_d * aff.dslack_dual);
        const double ratio = std::clamp(gap_aff / gap, 0.0, 1.0);
        const double sigma = std::clamp(ratio * ratio * ratio, 1e-4, 0.8);

        const Direction dir = compute_direction(sigma * mu);
        z += dir.alpha_p * dir.dz;
        s += dir.alpha_d * dir.ds;
        y += dir.alpha_d * dir.dy;
        if (ineq) {
            slack += dir.alpha_p * dir.dslack;
            slack_dual += dir.alpha_d * dir.dslack_dual;
        }
    }

    // Loop exhausted: report the final iterate.
    res.z = z;
    res.slack = slack;
    res.pobj = c.cwiseProduct(z).sum();
    res.dobj = b.dot(y);
    res.gap = z.cwiseProduct(s).sum() + (ineq ? slack * slack_dual : 0.0);
    return res;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, double tol, int max_iter) {
    if (problem.dim < 1) throw std::invalid_argument("sdp::solve: dim must be >= 1");
    if (problem.cost.rows() != problem.dim || problem.cost.cols() != problem.dim)
        throw std::invalid_argument("sdp::solve: cost dimension mismatch");

    // Normalize scales so tolerances are meaningful for physical-unit data.
    const double cost_scale = std::max(problem.cost.cwiseAbs().maxCoeff(), 1e-100);
    const RealMatrix c = embed(problem.cost / cost_scale);

    RealMatrix t_real;
    double gr = 0.0;
    double t_scale = 1.0;
    const bool ineq = problem.has_inequality();
    if (ineq) {
        const ComplexMatrix t_c = problem.aggregated_ineq();
        t_scale = std::max(t_c.cwiseAbs().maxCoeff(), std::abs(problem.ineq_rhs));
        t_scale = std::max(t_scale, 1e-100);
        t_real = embed(t_c / t_scale);
        // <J(T), Z> = 2 tr(Phi T); the complex rhs doubles with it.
        gr = 2.0 * problem.ineq_rhs / t_scale;
    }

    SdpSolution sol;

    // Phase 1: when the inequality is violated at the identity, certify that a
    // feasible point exists by maximizing the constraint over the unit-diagonal
    // spectrahedron.
    if (ineq && t_real.trace() < gr) {
        const RealMatrix neg_t = -t_real;
        const CoreResult p1 = solve_core(neg_t, nullptr, 0.0, tol, max_iter);
        const double best = -p1.pobj;
        if (p1.converged && best < gr - 1e-9 * std::max(1.0, std::abs(gr))) {
            sol.status = SdpStatus::Infeasible;
            sol.phi = unembed(p1.z);
            sol.primal_obj = 0.0;
            sol.dual_gap = 0.0;
            sol.iterations = p1.iterations;
            return sol;
        }
    }

    const CoreResult main =
        solve_core(c, ineq ? &t_real : nullptr, gr, tol, max_iter);
    sol.phi = unembed(main.z);
    // <J(R/cs), Z> = 2 tr(Phi R)/cs.
    sol.primal_obj = 0.5 * main.pobj * cost_scale;
    sol.dual_gap = 0.5 * std::abs(main.pobj - main.dobj) * cost_scale;
    sol.iterations = main.iterations;
    sol.status = main.converged ? SdpStatus::Optimal : SdpStatus::MaxIter;
    return sol;
}

namespace {

void write_matrix(std::ostream& out, const ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << " " << std::real(m(i, j)) << " " << std::imag(m(i, j));
}

ComplexMatrix read_matrix(std::istream& in, Eigen::Index n) {
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double re = 0.0, im = 0.0;
            if (!(in >> re >> im)) throw std::invalid_argument("load_problem: truncated input");
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

}  // namespace

std::string dump_problem(const SdpProblem& problem) {
    std::ostringstream out;
    out.precision(17);
    out << "sdp 1\n";
    out << problem.dim << " " << problem.ineq_matrices.size() << " " << problem.ineq_rhs
        << "\n";
    write_matrix(out, problem.cost);
    out << "\n";
    for (const auto& tk : problem.ineq_matrices) {
        write_matrix(out, tk);
        out << "\n";
    }
    return out.str();
}

SdpProblem load_problem(const std::string& text) {
    std::istringstream in(text);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "sdp" || version != 1)
        throw std::invalid_argument("load_problem: unrecognized header");
    SdpProblem prob;
    std::size_t n_ineq = 0;
    in >> prob.dim >> n_ineq >> prob.ineq_rhs;
    if (!in || prob.dim < 1) throw std::invalid_argument("load_problem: bad dimensions");
    prob.cost = read_matrix(in, prob.dim);
    for (std::size_t k = 0; k < n_ineq; ++k)
        prob.ineq_matrices.push_back(read_matrix(in, prob.dim));
    return prob;
}

SdpCertificate check_certificate(const SdpProblem& problem, const SdpSolution& solution,
                                 double tol) {
    SdpCertificate cert;
    const ComplexMatrix& phi = solution.phi;
    cert.diag_residual = (phi.diagonal().real().array() - 1.0).abs().maxCoeff();
    cert.diag_residual =
        std::max(cert.diag_residual, phi.diagonal().imag().array().abs().maxCoeff());
    cert.min_eigenvalue = linalg::herm_eig(phi).eigenvalues.minCoeff();
    cert.obj_recomputed = std::real((phi * problem.cost).trace());

    double ineq_value = 0.0;
    if (problem.has_inequality()) {
        for (const auto& tk : problem.ineq_matrices)
            ineq_value += 2.0 * std::real((phi * tk).trace());
        cert.ineq_slack = ineq_value - problem.ineq_rhs;
    } else {
        cert.ineq_slack = std::numeric_limits<double>::infinity();
    }

    const double gr_scale = problem.has_inequality()
                                ? std::max(1.0, std::abs(problem.ineq_rhs))
                                : 1.0;
    std::ostringstream detail;
    bool pass = solution.status == SdpStatus::Optimal;
    if (cert.diag_residual > 1e-8) {
        pass = false;
        detail << "diag residual " << cert.diag_residual << "; ";
    }
    if (cert.min_eigenvalue < -1e-8) {
        pass = false;
        detail << "min eigenvalue " << cert.min_eigenvalue << "; ";
    }
    if (problem.has_inequality() && cert.ineq_slack < -1e-7 * gr_scale) {
        pass = false;
        detail << "inequality slack " << cert.ineq_slack << "; ";
    }
    if (std::abs(cert.obj_recomputed - solution.primal_obj) >
        std::max(tol * 10.0, 1e-6) * std::max(1.0, std::abs(cert.obj_recomputed))) {
        pass = false;
        detail << "objective mismatch " << cert.obj_recomputed << " vs "
               << solution.primal_obj << "; ";
    }
    if (solution.dual_gap > 1e-6 * std::max(1.0, std::abs(solution.primal_obj))) {
        pass = false;
        detail << "dual gap " << solution.dual_gap << "; ";
    }
    cert.pass = pass;
    cert.detail = detail.str();
    return cert;
}

}  // namespace sdp
}  // namespace risdfrc
