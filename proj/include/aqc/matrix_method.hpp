#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "linalg.hpp"
#include "pauli.hpp"
#include "var_polynomial.hpp"

namespace aqc {

// Momentum-basis Schrodinger problems on the periodic interval w in [0, 1).
// Basis states <w|n> = exp(2 pi i n w), truncated to 2^N modes
// n in [-2^{N-1}, 2^{N-1} - 1]; mode n lives at basis index n + 2^{N-1}.

/// V(w) = 1 + cos(4 pi w); degenerate minima at 1/4 and 3/4.
struct CosinePotential {};

/// V(w) = lambda (18 w^4 - 35 w^3 + 22 w^2 - 5 w + 0.372573).
struct QuarticPotential {
    double lambda = 1.0;
};

/// V(w) = 1 + cos(4 pi w) + epsilon w.
struct TiltedCosinePotential {
    double epsilon = 0.0;
};

/// Any polynomial in a single variable (or a constant).
struct PolynomialPotential {
    VarPolynomial polynomial;
};

/// Samples on the uniform grid w_j = j / (n - 1), linearly interpolated.
struct TabulatedPotential {
    std::vector<double> samples;
};

using PotentialSpec = std::variant<CosinePotential, QuarticPotential, TiltedCosinePotential,
                                   PolynomialPotential, TabulatedPotential>;

/// The quartic as a polynomial in `variable`.
inline VarPolynomial quartic_polynomial(double lambda, const std::string &variable = "w") {
    const auto w = VarPolynomial::variable(variable);
    return (18.0 * w.pow(4) - 35.0 * w.pow(3) + 22.0 * w.pow(2) - 5.0 * w +
            VarPolynomial::constant(0.372573)) *
           lambda;
}

namespace detail {

inline std::vector<double> univariate_coefficients(const VarPolynomial &p) {
    const auto vars = p.variables();
    require(vars.size() <= 1, "PolynomialPotential: polynomial must have at most one variable");
    std::vector<double> c(static_cast<std::size_t>(p.degree()) + 1, 0.0);
    for (const auto &[powers, coef] : p.terms()) {
        const int k = powers.empty() ? 0 : powers.front().second;
        c[static_cast<std::size_t>(k)] += coef;
    }
    return c;
}

inline double horner(const std::vector<double> &c, double w) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * w + *it;
    }
    return acc;
}

inline double interpolate(const std::vector<double> &samples, double w) {
    require(samples.size() >= 2, "TabulatedPotential: need at least two samples");
    const double x = std::clamp(w, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
    const auto j = std::min(static_cast<std::size_t>(x), samples.size() - 2);
    const double f = x - static_cast<double>(j);
    return samples[j] * (1.0 - f) + samples[j + 1] * f;
}

inline complex simpson_recursive(const std::function<complex(double)> &f, double a, double b,
                                 complex fa, complex fm, complex fb, complex whole, double tol,
                                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const complex flm = f(lm);
    const complex frm = f(rm);
    const complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const complex delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_recursive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recursive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature of a complex integrand.
inline complex adaptive_simpson(const std::function<complex(double)> &f, double a, double b,
                                double tol = 1e-10, int max_depth = 30) {
    const complex fa = f(a);
    const complex fb = f(b);
    const complex fm = f(0.5 * (a + b));
    const complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_recursive(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

inline double evaluate_potential(const PotentialSpec &v, double w) {
    using std::numbers::pi;
    return std::visit(
        [w](const auto &p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, CosinePotential>) {
                return 1.0 + std::cos(4.0 * pi * w);
            } else if constexpr (std::is_same_v<T, QuarticPotential>) {
                return p.lambda *
                       (((18.0 * w - 35.0) * w + 22.0) * w * w - 5.0 * w + 0.372573);
            } else if constexpr (std::is_same_v<T, TiltedCosinePotential>) {
                return 1.0 + std::cos(4.0 * pi * w) + p.epsilon * w;
            } else if constexpr (std::is_same_v<T, PolynomialPotential>) {
                return detail::horner(detail::univariate_coefficients(p.polynomial), w);
            } else {
                return detail::interpolate(p.samples, w);
            }
        },
        v);
}

/// integral_0^1 w^p exp(-2 pi i k w) dw for p = 0..max_power.
inline std::vector<complex> monomial_fourier_integrals(int max_power, long k) {
    std::vector<complex> out(static_cast<std::size_t>(max_power) + 1);
    if (k == 0) {
        for (int p = 0; p <= max_power; ++p) {
            out[static_cast<std::size_t>(p)] = 1.0 / (p + 1.0);
        }
        return out;
    }
    // Integration by parts with exp(-2 pi i k) = 1: I_p = (1 - p I_{p-1}) / a.
    const complex a(0.0, -2.0 * std::numbers::pi * static_cast<double>(k));
    out[0] = 0.0;
    for (int p = 1; p <= max_power; ++p) {
        out[static_cast<std::size_t>(p)] = (1.0 - static_cast<double>(p) * out[static_cast<std::size_t>(p - 1)]) / a;
    }
    return out;
}

/// V~(k) = integral_0^1 V(w) exp(-2 pi i k w) dw.
inline complex fourier_coefficient(const PotentialSpec &v, long k) {
    const auto cosine_part = [k]() -> complex {
        if (k == 0) {
            return 1.0;
        }
        return (k == 2 || k == -2) ? 0.5 : 0.0;
    };
    const auto from_coefficients = [k](const std::vector<double> &c) {
        const auto integrals = monomial_fourier_integrals(static_cast<int>(c.size()) - 1, k);
        complex acc = 0.0;
        for (std::size_t p = 0; p < c.size(); ++p) {
            acc += c[p] * integrals[p];
        }
        return acc;
    };
    return std::visit(
        [&](const auto &p) -> complex {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, CosinePotential>) {
                return cosine_part();
            } else if constexpr (std::is_same_v<T, QuarticPotential>) {
                return from_coefficients({0.372573 * p.lambda, -5.0 * p.lambda, 22.0 * p.lambda,
                                          -35.0 * p.lambda, 18.0 * p.lambda});
            } else if constexpr (std::is_same_v<T, TiltedCosinePotential>) {
                return cosine_part() + from_coefficients({0.0, p.epsilon});
            } else if constexpr (std::is_same_v<T, PolynomialPotential>) {
                return from_coefficients(detail::univariate_coefficients(p.polynomial));
            } else {
                const auto &s = p.samples;
                require(s.size() >= 2, "TabulatedPotential: need at least two samples");
                const double two_pi_k = 2.0 * std::numbers::pi * static_cast<double>(k);
                const auto integrand = [&s, two_pi_k](double w) {
                    return detail::interpolate(s, w) * std::exp(complex(0.0, -two_pi_k * w));
                };
                const std::size_t segments = s.size() - 1;
                const double h = 1.0 / static_cast<double>(segments);
                complex acc = 0.0;
                for (std::size_t j = 0; j < segments; ++j) {
                    acc += adaptive_simpson(integrand, h * static_cast<double>(j),
                                            h * static_cast<double>(j + 1),
                                            1e-10 / static_cast<double>(segments), 30);
                }
                return acc;
            }
        },
        v);
}

struct MomentumTruncation {
    std::size_t num_qubits = 5;

    std::size_t dim() const { return std::size_t{1} << num_qubits; }
    long min_mode() const { return -static_cast<long>(dim() / 2); }
    long max_mode() const { return static_cast<long>(dim() / 2) - 1; }
    long mode_of_index(std::size_t i) const { return static_cast<long>(i) + min_mode(); }
    std::size_t index_of_mode(long n) const {
        require(n >= min_mode() && n <= max_mode(), "MomentumTruncation: mode out of range");
        return static_cast<std::size_t>(n - min_mode());
    }
};

struct SchrodingerProblem {
    PotentialSpec potential = CosinePotential{};
    double mass = 1.0;
    MomentumTruncation truncation;
};

/// H_{n l} = 4 pi^2 n^2 / (2m) delta_{nl} + V~(n - l).
inline DenseMatrix build_hamiltonian(const SchrodingerProblem &p, bool include_potential = true) {
    require(p.mass > 0.0, "build_hamiltonian: mass must be positive");
    require(p.truncation.num_qubits <= kDenseQubitCap, "build_hamiltonian: register too large");
    const std::size_t dim = p.truncation.dim();
    const auto d = static_cast<Eigen::Index>(dim);
    DenseMatrix h = DenseMatrix::Zero(d, d);
    const double kinetic = 4.0 * std::numbers::pi * std::numbers::pi / (2.0 * p.mass);
    for (std::size_t i = 0; i < dim; ++i) {
        const auto n = static_cast<double>(p.truncation.mode_of_index(i));
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = kinetic * n * n;
    }
    if (!include_potential) {
        return h;
    }
    // V real => V~(-k) = conj V~(k); fill from k >= 0 so H is exactly Hermitian.
    std::vector<complex> vk(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        vk[k] = fourier_coefficient(p.potential, static_cast<long>(k));
    }
    vk[0] = vk[0].real();
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            const auto ri = static_cast<Eigen::Index>(r);
            const auto ci = static_cast<Eigen::Index>(c);
            h(ri, ci) += r >= c ? vk[r - c] : std::conj(vk[c - r]);
        }
    }
    return h;
}

/// Kinetic-only Hamiltonian (V = 0) on the same truncation.
inline DenseMatrix kinetic_hamiltonian(double mass, const MomentumTruncation &t) {
    return build_hamiltonian(SchrodingerProblem{CosinePotential{}, mass, t}, false);
}

/// Basis state of the n = 0 mode.
inline StateVector zero_mode_state(const MomentumTruncation &t) {
    return StateVector::basis(t.num_qubits, t.index_of_mode(0));
}

struct PositionDensity {
    std::vector<double> w;
    std::vector<double> rho;

    double trapezoid(const std::function<double(double)> &weight) const {
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < w.size(); ++j) {
            acc += 0.5 * (w[j + 1] - w[j]) * (rho[j] * weight(w[j]) + rho[j + 1] * weight(w[j + 1]));
        }
        return acc;
    }

    /// Probability mass with |w - center| < half_width.
    double window_mass(double center, double half_width) const {
        return trapezoid([=](double x) { return std::abs(x - center) < half_width ? 1.0 : 0.0; });
    }

    /// (position, height) of the largest sample with |w - center| <= half_width.
    std::pair<double, double> peak_near(double center, double half_width) const {
        double best_w = center;
        double best = -1.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (std::abs(w[j] - center) <= half_width && rho[j] > best) {
                best = rho[j];
                best_w = w[j];
            }
        }
        return {best_w, best};
    }

    double max_density() const { return *std::max_element(rho.begin(), rho.end()); }
};

inline constexpr std::size_t kDensityGrid = 512;

/// rho(w_j) = |sum_n c_n exp(2 pi i n w_j)|^2 on w_j = j/(grid-1), normalized so
/// the trapezoid integral over [0, 1] is 1.
inline PositionDensity momentum_to_position(const StateVector &c, const MomentumTruncation &t,
                                            std::size_t grid = kDensityGrid) {
    require(c.dim() == t.dim(), "momentum_to_position: amplitude count != 2^N");
    require(grid >= 2, "momentum_to_position: grid too small");
    PositionDensity out;
    out.w.resize(grid);
    out.rho.resize(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        const double w = static_cast<double>(j) / static_cast<double>(grid - 1);
        complex psi = 0.0;
        for (std::size_t i = 0; i < c.dim(); ++i) {
            const double n = static_cast<double>(t.mode_of_index(i));
            psi += c[i] * std::exp(complex(0.0, 2.0 * std::numbers::pi * n * w));
        }
        out.w[j] = w;
        out.rho[j] = std::norm(psi);
    }
    const double total = out.trapezoid([](double) { return 1.0; });
    require(total > 0.0, "momentum_to_position: zero state");
    for (auto &r : out.rho) {
        r /= total;
    }
    return out;
}

/// Gaussian exponent alpha of the SHO ground state psi ~ exp(-alpha (w - w0)^2)
/// for a minimum with curvature V''(w0) and mass m: alpha = sqrt(V'' m) / 2.
inline double sho_alpha(double curvature, double mass) {
    require(curvature > 0.0 && mass > 0.0, "sho_alpha: curvature and mass must be positive");
    return 0.5 * std::sqrt(curvature * mass);
}

/**
 * Momentum amplitudes of psi(w) ~ exp(-alpha (w - center)^2), normalized to
 * unit 2-norm. The coefficients are the exact Fourier series of the
 * periodically continued Gaussian. Throws when the nearest periodic image
 * still has relative amplitude above 1e-6 at the packet centre
 * (exp(-alpha) > 1e-6), i.e. the packet is too wide for the unit cell.
 */
inline StateVector gaussian_packet(double center, double alpha, const MomentumTruncation &t) {
    require(alpha > 0.0, "gaussian_packet: alpha must be positive");
    require(std::exp(-alpha) <= 1e-6,
            "gaussian_packet: width too large (periodic-image overlap above 1e-6)");
    std::vector<complex> amps(t.dim());
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < t.dim(); ++i) {
        const double n = static_cast<double>(t.mode_of_index(i));
        amps[i] = std::exp(-pi * pi * n * n / alpha) * std::exp(complex(0.0, -2.0 * pi * n * center));
    }
    double norm = 0.0;
    for (const auto &a : amps) {
        norm += std::norm(a);
    }
    for (auto &a : amps) {
        a /= std::sqrt(norm);
    }
    return StateVector(std::move(amps));
}

struct GroundState {
    double energy = 0.0;
    StateVector amplitudes;
};

/// Lowest eigenpair; phase fixed so the largest-magnitude component is real positive.
inline GroundState ground_state(const DenseMatrix &h) {
    require(h.rows() <= 4096, "ground_state: dimension above 4096");
    const HermitianEigen eig(h);
    Eigen::VectorXcd v = eig.vectors.col(0);
    Eigen::Index best = 0;
    v.cwiseAbs().maxCoeff(&best);
    v *= std::conj(v[best]) / std::abs(v[best]);
    v[best] = std::abs(v[best]);
    return {eig.energies[0], from_eigen(v)};
}

} // namespace aqc
