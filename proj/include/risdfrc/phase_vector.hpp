#pragma once

#include "risdfrc/linalg.hpp"

namespace risdfrc {

/// RIS reflecting coefficients, unit modulus per element.
struct PhaseVector {
    ComplexVector theta;

    Eigen::Index size() const { return theta.size(); }

    /// Validates |theta_l| = 1 within tol; throws std::invalid_argument otherwise.
    static PhaseVector checked(ComplexVector v, double tol = 1e-12);

    /// Projects each entry to unit modulus (zero entries map to 1).
    static PhaseVector project(const ComplexVector& v);
};

}  // namespace risdfrc
