#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"

namespace aqc {

using complex = std::complex<double>;

/// Amplitudes over the 2^N computational basis states. Qubit q is bit q of the
/// basis index (qubit 0 least significant).
class StateVector {
  public:
    StateVector() = default;

    explicit StateVector(std::size_t num_qubits)
        : num_qubits_(num_qubits), amps_(std::size_t{1} << num_qubits) {
        require(num_qubits <= 30, "StateVector: register too large");
    }

    explicit StateVector(std::vector<complex> amplitudes)
        : amps_(std::move(amplitudes)) {
        const std::size_t dim = amps_.size();
        require(dim > 0 && (dim & (dim - 1)) == 0,
                "StateVector: amplitude count must be a power of two");
        while ((std::size_t{1} << num_qubits_) < dim) {
            ++num_qubits_;
        }
    }

    static StateVector basis(std::size_t num_qubits, std::uint64_t index) {
        StateVector s(num_qubits);
        require(index < s.dim(), "StateVector::basis: index out of range");
        s.amps_[index] = 1.0;
        return s;
    }

    /// Equal superposition 2^{-N/2} sum |b>.
    static StateVector uniform(std::size_t num_qubits) {
        StateVector s(num_qubits);
        const double a = 1.0 / std::sqrt(static_cast<double>(s.dim()));
        for (auto &amp : s.amps_) {
            amp = a;
        }
        return s;
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    std::span<const complex> amplitudes() const { return amps_; }
    std::span<complex> amplitudes() { return amps_; }

    complex operator[](std::size_t i) const { return amps_[i]; }
    complex &operator[](std::size_t i) { return amps_[i]; }

    double norm() const {
        double acc = 0.0;
        for (const auto &a : amps_) {
            acc += std::norm(a);
        }
        return std::sqrt(acc);
    }

    bool is_normalized(double tol = 1e-9) const {
        return std::abs(norm() - 1.0) <= tol;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            p[i] = std::norm(amps_[i]);
        }
        return p;
    }

    /// <this|other>
    complex inner(const StateVector &other) const {
        require(dim() == other.dim(), "StateVector::inner: dimension mismatch");
        complex acc = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            acc += std::conj(amps_[i]) * other.amps_[i];
        }
        return acc;
    }

    double fidelity(const StateVector &other) const {
        return std::norm(inner(other));
    }

  private:
    std::size_t num_qubits_ = 0;
    std::vector<complex> amps_;
};

} // namespace aqc
