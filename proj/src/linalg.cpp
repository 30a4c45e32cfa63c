#include "risdfrc/linalg.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace risdfrc::linalg {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream msg;
        msg << "hadamard: dimension mismatch " << a.rows() << "x" << a.cols() << " vs "
            << b.rows() << "x" << b.cols();
        throw std::invalid_argument(msg.str());
    }
    return a.cwiseProduct(b);
}

ComplexVector vec(const ComplexMatrix& a) {
    // Eigen matrices are column-major by default, so this is a plain copy.
    return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

ComplexMatrix unvec(const ComplexVector& q, Eigen::Index n) {
    if (q.size() != n * n) {
        std::ostringstream msg;
        msg << "unvec: vector length " << q.size() << " != " << n << "^2";
        throw std::invalid_argument(msg.str());
    }
    return Eigen::Map<const ComplexMatrix>(q.data(), n, n);
}

HermitianEig herm_eig(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("herm_eig: matrix not square");
    const ComplexMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
    if (es.info() != Eigen::Success) throw std::runtime_error("herm_eig: eigensolver failed");
    return HermitianEig{es.eigenvalues(), es.eigenvectors()};
}

ComplexMatrix solve_hpd(const ComplexMatrix& a, const ComplexMatrix& rhs) {
    Eigen::LLT<ComplexMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
        // Report the offending pivot scale for diagnosis.
        const double min_eig = herm_eig(a).eigenvalues.minCoeff();
        std::ostringstream msg;
        msg << "solve_hpd: matrix not positive definite (min eigenvalue " << min_eig << ")";
        throw std::runtime_error(msg.str());
    }
    return llt.solve(rhs);
}

double logdet_hpd(const ComplexMatrix& a) {
    Eigen::LLT<ComplexMatrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("logdet_hpd: matrix not positive definite");
    double ld = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < a.rows(); ++i) ld += std::log(std::real(l(i, i)));
    return 2.0 * ld;
}

}  // namespace risdfrc::linalg
