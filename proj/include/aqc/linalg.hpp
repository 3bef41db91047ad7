#pragma once

#include <complex>

#include <Eigen/Dense>

#include "error.hpp"
#include "pauli.hpp"
#include "state_vector.hpp"

namespace aqc {

/// Eigen-decomposition H = V diag(E) V^dagger of a Hermitian matrix,
/// eigenvalues ascending.
struct HermitianEigen {
    Eigen::VectorXd energies;
    DenseMatrix vectors;

    explicit HermitianEigen(const DenseMatrix &h) {
        require(h.rows() == h.cols(), "HermitianEigen: matrix is not square");
        Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h);
        require(solver.info() == Eigen::Success, "HermitianEigen: eigensolver failed");
        energies = solver.eigenvalues();
        vectors = solver.eigenvectors();
    }

    /// exp(-i H t)
    DenseMatrix propagator(double t) const {
        Eigen::VectorXcd phases(energies.size());
        for (Eigen::Index i = 0; i < energies.size(); ++i) {
            phases[i] = std::exp(complex(0.0, -energies[i] * t));
        }
        return vectors * phases.asDiagonal() * vectors.adjoint();
    }

    /// exp(-i H t) |psi> without forming the full propagator.
    Eigen::VectorXcd evolve(const Eigen::VectorXcd &psi, double t) const {
        Eigen::VectorXcd c = vectors.adjoint() * psi;
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            c[i] *= std::exp(complex(0.0, -energies[i] * t));
        }
        return vectors * c;
    }
};

inline Eigen::VectorXcd to_eigen(const StateVector &s) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t i = 0; i < s.dim(); ++i) {
        v[static_cast<Eigen::Index>(i)] = s[i];
    }
    return v;
}

inline StateVector from_eigen(const Eigen::VectorXcd &v) {
    std::vector<complex> amps(v.data(), v.data() + v.size());
    return StateVector(std::move(amps));
}

/// <psi|H|psi> for Hermitian H.
inline double dense_expectation(const DenseMatrix &h, const StateVector &s) {
    const Eigen::VectorXcd v = to_eigen(s);
    return (v.adjoint() * h * v)(0, 0).real();
}

} // namespace aqc
