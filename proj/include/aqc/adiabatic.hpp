#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "encodings.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "pauli.hpp"
#include "random.hpp"
#include "state_vector.hpp"

namespace aqc {

/// Largest register evolved by dense eigendecomposition.
inline constexpr std::size_t kDenseEvolutionCap = 10;

using Hamiltonian = std::variant<PauliPolynomial, DenseMatrix>;

inline std::size_t register_size(const Hamiltonian &h) {
    if (const auto *p = std::get_if<PauliPolynomial>(&h)) {
        return p->num_qubits();
    }
    const auto &m = std::get<DenseMatrix>(h);
    std::size_t n = 0;
    while ((Eigen::Index{1} << n) < m.rows()) {
        ++n;
    }
    require((Eigen::Index{1} << n) == m.rows() && m.rows() == m.cols(),
            "Hamiltonian: dense matrix is not 2^N x 2^N");
    return n;
}

inline DenseMatrix to_dense(const Hamiltonian &h, std::size_t cap = kDenseQubitCap) {
    if (const auto *p = std::get_if<PauliPolynomial>(&h)) {
        return to_matrix(*p, cap);
    }
    require(register_size(h) <= cap, "to_dense: register too large");
    return std::get<DenseMatrix>(h);
}

/// H0 = 1/2 sum_l (1 - X_l); ground state is the uniform superposition with energy 0.
inline PauliPolynomial transverse_h0(std::size_t num_qubits) {
    PauliPolynomial h(num_qubits);
    h += PauliPolynomial::identity(num_qubits, 0.5 * static_cast<double>(num_qubits));
    for (unsigned q = 0; q < num_qubits; ++q) {
        h += PauliPolynomial::single(num_qubits, q, PauliAxis::X, -0.5);
    }
    return h;
}

/// Ground state of transverse_h0.
inline StateVector initial_state(std::size_t num_qubits) { return StateVector::uniform(num_qubits); }

struct LinearSchedule {
    double t_final = 1.0;
};

using Schedule = std::variant<LinearSchedule>;

inline double schedule_value(const Schedule &schedule, double t) {
    return std::visit(
        [t](const auto &s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearSchedule>) {
                return std::clamp(t / s.t_final, 0.0, 1.0);
            }
        },
        schedule);
}

inline double schedule_duration(const Schedule &schedule) {
    return std::visit([](const auto &s) { return s.t_final; }, schedule);
}

enum class Propagation {
    /// Split product exp(-i s H dt) exp(-i (1-s) H0 dt) per substep; needs Pauli forms.
    trotter,
    /// exp(-i H_A(s_k) dt) by eigendecomposition of the full matrix each step.
    dense_exact,
};

struct AnnealSpec {
    Hamiltonian h0 = PauliPolynomial{};
    Hamiltonian h = PauliPolynomial{};
    Schedule schedule = LinearSchedule{10.0};
    std::size_t n_steps = 10;
    std::size_t substeps_per_step = 1;
    /// 0 disables intermediate snapshots.
    std::size_t snapshot_stride = 0;
    Propagation propagation = Propagation::trotter;
};

struct Snapshot {
    double t = 0.0;
    double s = 0.0;
    StateVector state;
};

struct EvolutionResult {
    StateVector final_state;
    std::vector<Snapshot> snapshots;
};

/// exp(-i theta Z_{i1}...Z_{ik}): phase exp(-+i theta) by parity of the masked bits.
inline void apply_z_string_rotation(StateVector &s, std::uint64_t z_mask, double theta) {
    const complex even = std::exp(complex(0.0, -theta));
    const complex odd = std::exp(complex(0.0, theta));
    for (std::size_t b = 0; b < s.dim(); ++b) {
        s[b] *= (std::popcount(z_mask & b) & 1) ? odd : even;
    }
}

/// exp(-i theta X_q)
inline void apply_x_rotation(StateVector &s, unsigned qubit, double theta) {
    const double c = std::cos(theta);
    const complex ms(0.0, -std::sin(theta));
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t b = 0; b < s.dim(); ++b) {
        if ((b & bit) == 0) {
            const complex a0 = s[b];
            const complex a1 = s[b | bit];
            s[b] = c * a0 + ms * a1;
            s[b | bit] = ms * a0 + c * a1;
        }
    }
}

/// Normalized Walsh-Hadamard transform on all qubits (its own inverse).
inline void walsh_hadamard(StateVector &s) {
    const double scale = 1.0 / std::sqrt(2.0);
    for (std::size_t bit = 1; bit < s.dim(); bit <<= 1) {
        for (std::size_t b = 0; b < s.dim(); ++b) {
            if ((b & bit) == 0) {
                const complex a0 = s[b];
                const complex a1 = s[b | bit];
                s[b] = scale * (a0 + a1);
                s[b | bit] = scale * (a0 - a1);
            }
        }
    }
}

/**
 * exp(-i theta H) for a fixed Pauli Hamiltonian.
 *
 * Z-diagonal H is applied exactly as one diagonal phase map (all terms
 * commute). X-only H is applied exactly: single-qubit X terms as independent
 * rotations, multi-qubit X strings as a diagonal phase in the Hadamard basis.
 * Anything else falls back to a cached dense eigendecomposition.
 */
class PauliExponential {
  public:
    explicit PauliExponential(const PauliPolynomial &h) : num_qubits_(h.num_qubits()) {
        require(h.is_hermitian(1e-12), "PauliExponential: Hamiltonian is not Hermitian");
        if (h.is_diagonal()) {
            kind_ = Kind::diagonal;
            diagonal_ = h.diagonal();
        } else if (h.is_x_only()) {
            bool single = true;
            for (const auto &[k, c] : h.terms()) {
                if (k.is_identity()) {
                    constant_ += c.real();
                } else if (k.weight() == 1) {
                    rotations_.emplace_back(static_cast<unsigned>(std::countr_zero(k.x)), c.real());
                } else {
                    single = false;
                }
            }
            if (single) {
                kind_ = Kind::x_rotations;
            } else {
                kind_ = Kind::hadamard_diagonal;
                PauliPolynomial rotated(num_qubits_);
                for (const auto &[k, c] : h.terms()) {
                    rotated.add_term(c, PauliKey{0, k.x});
                }
                diagonal_ = rotated.diagonal();
            }
        } else {
            require(num_qubits_ <= kDenseEvolutionCap,
                    "PauliExponential: mixed-axis Hamiltonian on more than 10 qubits");
            kind_ = Kind::dense;
            eigen_.emplace(to_matrix(h));
        }
    }

    std::size_t num_qubits() const { return num_qubits_; }

    void apply(StateVector &s, double theta) const {
        require(s.num_qubits() == num_qubits_, "PauliExponential: register mismatch");
        switch (kind_) {
        case Kind::diagonal:
            apply_diagonal(s, theta);
            break;
        case Kind::x_rotations: {
            const complex phase = std::exp(complex(0.0, -theta * constant_));
            for (const auto &[q, c] : rotations_) {
                apply_x_rotation(s, q, theta * c);
            }
            for (auto &a : s.amplitudes()) {
                a *= phase;
            }
            break;
        }
        case Kind::hadamard_diagonal:
            walsh_hadamard(s);
            apply_diagonal(s, theta);
            walsh_hadamard(s);
            break;
        case Kind::dense:
            s = from_eigen(eigen_->evolve(to_eigen(s), theta));
            break;
        }
    }

  private:
    enum class Kind { diagonal, x_rotations, hadamard_diagonal, dense };

    void apply_diagonal(StateVector &s, double theta) const {
        for (std::size_t b = 0; b < s.dim(); ++b) {
            s[b] *= std::exp(complex(0.0, -theta * diagonal_[b]));
        }
    }

    std::size_t num_qubits_ = 0;
    Kind kind_ = Kind::diagonal;
    std::vector<double> diagonal_;
    double constant_ = 0.0;
    std::vector<std::pair<unsigned, double>> rotations_;
    std::optional<HermitianEigen> eigen_;
};

namespace detail {

inline void check_initial(const StateVector &initial, std::size_t n) {
    require(initial.num_qubits() == n, "evolve: initial state register does not match Hamiltonian");
    require(initial.is_normalized(1e-9), "evolve: initial state is not normalized");
}

} // namespace detail

/**
 * Adiabatic evolution under H_A(t) = (1 - s(t)) H0 + s(t) H.
 *
 * Step k covers [k dt, (k+1) dt) with dt = t_final / n_steps and holds
 * s_k = s(k dt) fixed. Trotter propagation applies, per substep of length
 * dt / substeps, the H0 factor then the H factor.
 */
inline EvolutionResult evolve_adiabatic(const AnnealSpec &spec, const StateVector &initial) {
    require(spec.n_steps >= 1, "evolve_adiabatic: n_steps must be >= 1");
    require(spec.substeps_per_step >= 1, "evolve_adiabatic: substeps_per_step must be >= 1");
    const std::size_t n = register_size(spec.h0);
    require(register_size(spec.h) == n, "evolve_adiabatic: H0 and H act on different registers");
    detail::check_initial(initial, n);

    const double t_final = schedule_duration(spec.schedule);
    const double dt = t_final / static_cast<double>(spec.n_steps);
    EvolutionResult result{initial, {}};
    StateVector &state = result.final_state;
    if (spec.snapshot_stride > 0) {
        result.snapshots.push_back({0.0, schedule_value(spec.schedule, 0.0), state});
    }

    if (spec.propagation == Propagation::trotter) {
        const auto *h0 = std::get_if<PauliPolynomial>(&spec.h0);
        const auto *h = std::get_if<PauliPolynomial>(&spec.h);
        require(h0 != nullptr && h != nullptr,
                "evolve_adiabatic: Trotter propagation needs Pauli-form Hamiltonians");
        const PauliExponential u0(*h0);
        const PauliExponential u1(*h);
        const double sub_dt = dt / static_cast<double>(spec.substeps_per_step);
        for (std::size_t k = 0; k < spec.n_steps; ++k) {
            const double s = schedule_value(spec.schedule, static_cast<double>(k) * dt);
            for (std::size_t j = 0; j < spec.substeps_per_step; ++j) {
                u0.apply(state, (1.0 - s) * sub_dt);
                u1.apply(state, s * sub_dt);
            }
            const bool last = k + 1 == spec.n_steps;
            if (spec.snapshot_stride > 0 && ((k + 1) % spec.snapshot_stride == 0 || last)) {
                result.snapshots.push_back({static_cast<double>(k + 1) * dt, s, state});
            }
        }
        return result;
    }

    require(n <= kDenseEvolutionCap, "evolve_adiabatic: dense evolution capped at 10 qubits");
    const DenseMatrix m0 = to_dense(spec.h0);
    const DenseMatrix m1 = to_dense(spec.h);
    Eigen::VectorXcd psi = to_eigen(state);
    for (std::size_t k = 0; k < spec.n_steps; ++k) {
        const double s = schedule_value(spec.schedule, static_cast<double>(k) * dt);
        const HermitianEigen eig((1.0 - s) * m0 + s * m1);
        psi = eig.evolve(psi, dt);
        const bool last = k + 1 == spec.n_steps;
        if (spec.snapshot_stride > 0 && ((k + 1) % spec.snapshot_stride == 0 || last)) {
            result.snapshots.push_back({static_cast<double>(k + 1) * dt, s, from_eigen(psi)});
        }
    }
    state = from_eigen(psi);
    return result;
}

/**
 * Fixed-Hamiltonian evolution for t_total in steps of dt. Pauli forms use
 * exact commuting-group factors (a Z-diagonal part and an X-only part, one
 * first-order split per step); dense forms use one eigendecomposition.
 */
inline std::vector<Snapshot> evolve_real_time(const Hamiltonian &h, const StateVector &initial,
                                              double t_total, double dt, std::size_t stride = 1) {
    require(dt > 0.0 && t_total >= 0.0, "evolve_real_time: bad time grid");
    const std::size_t n = register_size(h);
    detail::check_initial(initial, n);
    const auto steps = static_cast<std::size_t>(std::llround(t_total / dt));
    std::vector<Snapshot> out;
    out.push_back({0.0, 1.0, initial});
    const bool record_all = stride > 0;

    std::function<void(StateVector &)> step;
    std::optional<PauliExponential> diag_part;
    std::optional<PauliExponential> x_part;
    DenseMatrix u;
    if (const auto *p = std::get_if<PauliPolynomial>(&h);
        p != nullptr && (p->is_diagonal() || p->is_x_only())) {
        diag_part.emplace(*p);
        step = [&](StateVector &s) { diag_part->apply(s, dt); };
    } else if (p != nullptr && n > kDenseEvolutionCap) {
        PauliPolynomial zpart(n);
        PauliPolynomial xpart(n);
        for (const auto &[k, c] : p->terms()) {
            if (k.is_diagonal()) {
                zpart.add_term(c, k);
            } else if (k.z == 0) {
                xpart.add_term(c, k);
            } else {
                throw Error("evolve_real_time: mixed-axis terms on a register above the dense cap");
            }
        }
        diag_part.emplace(zpart);
        x_part.emplace(xpart);
        step = [&](StateVector &s) {
            x_part->apply(s, dt);
            diag_part->apply(s, dt);
        };
    } else {
        u = HermitianEigen(to_dense(h, kDenseEvolutionCap)).propagator(dt);
        step = [&](StateVector &s) { s = from_eigen(u * to_eigen(s)); };
    }

    StateVector state = initial;
    for (std::size_t k = 1; k <= steps; ++k) {
        step(state);
        if ((record_all && k % stride == 0) || k == steps) {
            out.push_back({static_cast<double>(k) * dt, 1.0, state});
        }
    }
    return out;
}

/// Lowest k eigenvalues of H_A(s) for each s.
inline std::vector<std::vector<double>> instantaneous_spectrum(const AnnealSpec &spec,
                                                               const std::vector<double> &s_grid,
                                                               std::size_t k_lowest) {
    const std::size_t n = register_size(spec.h0);
    require(register_size(spec.h) == n, "instantaneous_spectrum: register mismatch");
    require(n <= kDenseQubitCap, "instantaneous_spectrum: register too large");
    const DenseMatrix m0 = to_dense(spec.h0);
    const DenseMatrix m1 = to_dense(spec.h);
    const std::size_t k = std::min<std::size_t>(k_lowest, std::size_t{1} << n);
    std::vector<std::vector<double>> out;
    out.reserve(s_grid.size());
    for (double s : s_grid) {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> solver((1.0 - s) * m0 + s * m1,
                                                          Eigen::EigenvaluesOnly);
        std::vector<double> e(k);
        for (std::size_t i = 0; i < k; ++i) {
            e[i] = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
        }
        out.push_back(std::move(e));
    }
    return out;
}

struct HistogramEntry {
    std::uint64_t basis = 0;
    std::string bits;
    std::vector<double> values;
    double probability = 0.0;
};

/// Probability of every decoded variable assignment, in basis-index order.
inline std::vector<HistogramEntry> measure_histogram(const StateVector &state,
                                                     const EncodingTable &table) {
    require(table.total_qubits() == state.num_qubits(),
            "measure_histogram: encoding table does not cover the register");
    table.check_complete();
    std::vector<HistogramEntry> out;
    out.reserve(state.dim());
    for (std::size_t b = 0; b < state.dim(); ++b) {
        out.push_back({b, report_bits(b, state.num_qubits()), table.decode_values(b),
                       std::norm(state[b])});
    }
    return out;
}

inline nlohmann::json histogram_json(const std::vector<HistogramEntry> &h) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto &e : h) {
        j[e.bits] = e.probability;
    }
    return j;
}

/// Seeded computational-basis measurements.
inline std::vector<std::uint64_t> sample_outcomes(const StateVector &state, std::size_t shots,
                                                  std::uint64_t seed) {
    std::vector<double> cdf(state.dim());
    double acc = 0.0;
    for (std::size_t b = 0; b < state.dim(); ++b) {
        acc += std::norm(state[b]);
        cdf[b] = acc;
    }
    require(acc > 0.0, "sample_outcomes: zero state");
    Rng rng(seed);
    std::vector<std::uint64_t> out(shots);
    for (auto &o : out) {
        const double u = rng.uniform() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        o = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                                static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    }
    return out;
}

} // namespace aqc
