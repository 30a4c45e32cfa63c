#pragma once

#include <Eigen/Dense>
#include <complex>

namespace risdfrc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

namespace linalg {

/// Eigendecomposition of a Hermitian matrix: A = U diag(lambda) U^H,
/// eigenvalues ascending, columns of U orthonormal.
struct HermitianEig {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;
};

/// Kronecker product, (m*p) x (n*q).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Elementwise (Hadamard) product. Throws std::invalid_argument on dimension mismatch.
ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-major stacking of a into a (rows*cols) x 1 vector.
ComplexVector vec(const ComplexMatrix& a);

/// Inverse of vec: reshapes a length-(n*n) vector into an n x n matrix,
/// column-major. Throws std::invalid_argument if q.size() != n*n.
ComplexMatrix unvec(const ComplexVector& q, Eigen::Index n);

/// Hermitian eigendecomposition. The input is symmetrized as (A + A^H)/2
/// before decomposition to absorb roundoff. Throws on non-square input.
HermitianEig herm_eig(const ComplexMatrix& a);

/// Solve a X = rhs for Hermitian positive definite a via Cholesky.
/// Throws std::runtime_error naming the smallest pivot if a is not HPD.
ComplexMatrix solve_hpd(const ComplexMatrix& a, const ComplexMatrix& rhs);

/// log det of a Hermitian positive definite matrix, via Cholesky.
double logdet_hpd(const ComplexMatrix& a);

}  // namespace linalg
}  // namespace risdfrc
