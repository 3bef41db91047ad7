#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "error.hpp"
#include "state_vector.hpp"

namespace aqc {

using DenseMatrix = Eigen::MatrixXcd;

/// Coefficients smaller than this (absolute) are removed on canonicalization.
inline constexpr double kDropTolerance = 1e-12;

/// Largest register that to_matrix / decompose_matrix will render densely.
inline constexpr std::size_t kDenseQubitCap = 12;

enum class PauliAxis : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char axis_char(PauliAxis a) {
    switch (a) {
    case PauliAxis::X:
        return 'X';
    case PauliAxis::Y:
        return 'Y';
    case PauliAxis::Z:
        return 'Z';
    default:
        return 'I';
    }
}

inline PauliAxis axis_from_char(char c) {
    switch (c) {
    case 'I':
        return PauliAxis::I;
    case 'X':
        return PauliAxis::X;
    case 'Y':
        return PauliAxis::Y;
    case 'Z':
        return PauliAxis::Z;
    default:
        throw Error(std::string("unknown Pauli axis '") + c + "'");
    }
}

/**
 * Factor pattern of a Pauli string in symplectic form: bit q of `x` / `z` says
 * whether qubit q carries an X / Z component. X = (1,0), Z = (0,1), Y = (1,1).
 * Registers are limited to 64 qubits.
 */
struct PauliKey {
    std::uint64_t x = 0;
    std::uint64_t z = 0;

    std::uint64_t support() const { return x | z; }
    std::size_t weight() const { return static_cast<std::size_t>(std::popcount(support())); }
    bool is_identity() const { return support() == 0; }
    bool is_diagonal() const { return x == 0; }

    PauliAxis axis(unsigned qubit) const {
        const bool bx = (x >> qubit) & 1U;
        const bool bz = (z >> qubit) & 1U;
        if (bx && bz) {
            return PauliAxis::Y;
        }
        if (bx) {
            return PauliAxis::X;
        }
        return bz ? PauliAxis::Z : PauliAxis::I;
    }

    void set(unsigned qubit, PauliAxis a) {
        require(qubit < 64, "PauliKey: qubit index exceeds 64");
        const std::uint64_t bit = std::uint64_t{1} << qubit;
        x &= ~bit;
        z &= ~bit;
        if (a == PauliAxis::X || a == PauliAxis::Y) {
            x |= bit;
        }
        if (a == PauliAxis::Z || a == PauliAxis::Y) {
            z |= bit;
        }
    }

    /// (qubit, axis) factors in increasing qubit order.
    std::vector<std::pair<unsigned, PauliAxis>> factors() const {
        std::vector<std::pair<unsigned, PauliAxis>> out;
        for (std::uint64_t s = support(); s != 0; s &= s - 1) {
            const auto q = static_cast<unsigned>(std::countr_zero(s));
            out.emplace_back(q, axis(q));
        }
        return out;
    }

    bool operator==(const PauliKey &) const = default;
};

/// Lexicographic order on the factor sequence [(qubit, axis), ...]; a proper
/// prefix sorts first, so the identity leads.
struct PauliKeyLess {
    bool operator()(const PauliKey &a, const PauliKey &b) const {
        std::uint64_t sa = a.support();
        std::uint64_t sb = b.support();
        while (sa != 0 && sb != 0) {
            const auto qa = static_cast<unsigned>(std::countr_zero(sa));
            const auto qb = static_cast<unsigned>(std::countr_zero(sb));
            if (qa != qb) {
                return qa < qb;
            }
            const auto xa = a.axis(qa);
            const auto xb = b.axis(qb);
            if (xa != xb) {
                return xa < xb;
            }
            sa &= sa - 1;
            sb &= sb - 1;
        }
        return sa == 0 && sb != 0;
    }
};

struct PauliString {
    complex coefficient{1.0, 0.0};
    PauliKey key;

    PauliString() = default;
    PauliString(complex c, PauliKey k) : coefficient(c), key(k) {}
    PauliString(complex c, std::initializer_list<std::pair<unsigned, PauliAxis>> factors)
        : coefficient(c) {
        for (const auto &[q, a] : factors) {
            require(key.axis(q) == PauliAxis::I, "PauliString: qubit listed twice");
            key.set(q, a);
        }
    }
};

namespace detail {

inline complex i_power(int e) {
    switch (((e % 4) + 4) % 4) {
    case 0:
        return {1.0, 0.0};
    case 1:
        return {0.0, 1.0};
    case 2:
        return {-1.0, 0.0};
    default:
        return {0.0, -1.0};
    }
}

// P = i^{|x&z|} X^x Z^z, so the product phase follows from commuting Z^{z1}
// past X^{x2}.
inline std::pair<complex, PauliKey> multiply_keys(const PauliKey &a, const PauliKey &b) {
    const PauliKey c{a.x ^ b.x, a.z ^ b.z};
    const int e = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) -
                  std::popcount(c.x & c.z) + 2 * std::popcount(a.z & b.x);
    return {i_power(e), c};
}

// <b ^ x| P |b> for the string P with this key.
inline complex matrix_element(const PauliKey &k, std::uint64_t basis) {
    const int e = std::popcount(k.x & k.z) + 2 * std::popcount(k.z & basis);
    return i_power(e);
}

} // namespace detail

inline PauliString multiply(const PauliString &a, const PauliString &b) {
    const auto [phase, key] = detail::multiply_keys(a.key, b.key);
    return {a.coefficient * b.coefficient * phase, key};
}

/**
 * Canonical weighted sum of Pauli strings on a fixed register.
 *
 * No two terms share a factor pattern and no stored coefficient is below
 * kDropTolerance. Iteration follows PauliKeyLess.
 */
class PauliPolynomial {
  public:
    using TermMap = std::map<PauliKey, complex, PauliKeyLess>;

    PauliPolynomial() = default;
    explicit PauliPolynomial(std::size_t num_qubits) : num_qubits_(num_qubits) {
        require(num_qubits <= 64, "PauliPolynomial: at most 64 qubits");
    }

    static PauliPolynomial identity(std::size_t num_qubits, complex c = 1.0) {
        PauliPolynomial p(num_qubits);
        p.add_term(c, PauliKey{});
        return p;
    }

    static PauliPolynomial single(std::size_t num_qubits, unsigned qubit, PauliAxis axis,
                                  complex c = 1.0) {
        require(qubit < num_qubits, "PauliPolynomial::single: qubit out of range");
        PauliPolynomial p(num_qubits);
        PauliKey k;
        k.set(qubit, axis);
        p.add_term(c, k);
        return p;
    }

    static PauliPolynomial from_string(std::size_t num_qubits, const PauliString &s) {
        PauliPolynomial p(num_qubits);
        p.add_term(s.coefficient, s.key);
        return p;
    }

    std::size_t num_qubits() const { return num_qubits_; }
    const TermMap &terms() const { return terms_; }
    std::size_t num_terms() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    complex coefficient(const PauliKey &k) const {
        const auto it = terms_.find(k);
        return it == terms_.end() ? complex{} : it->second;
    }

    /// Largest number of non-identity factors in any term.
    std::size_t degree() const {
        std::size_t d = 0;
        for (const auto &[k, c] : terms_) {
            d = std::max(d, k.weight());
        }
        return d;
    }

    void add_term(complex c, const PauliKey &k) {
        require((k.support() >> num_qubits_) == 0 || num_qubits_ == 64,
                "PauliPolynomial: term addresses a qubit outside the register");
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
        }
        if (std::abs(it->second) < kDropTolerance) {
            terms_.erase(it);
        }
    }

    /// Every Pauli string is Hermitian, so the sum is iff all coefficients are real.
    bool is_hermitian(double tol = kDropTolerance) const {
        for (const auto &[k, c] : terms_) {
            if (std::abs(c.imag()) > tol) {
                return false;
            }
        }
        return true;
    }

    /// Only I/Z factors.
    bool is_diagonal() const {
        for (const auto &[k, c] : terms_) {
            if (!k.is_diagonal()) {
                return false;
            }
        }
        return true;
    }

    /// Only I/X factors.
    bool is_x_only() const {
        for (const auto &[k, c] : terms_) {
            if (k.z != 0) {
                return false;
            }
        }
        return true;
    }

    PauliPolynomial &operator+=(const PauliPolynomial &o) {
        check_same_register(o);
        for (const auto &[k, c] : o.terms_) {
            add_term(c, k);
        }
        return *this;
    }

    PauliPolynomial &operator-=(const PauliPolynomial &o) {
        check_same_register(o);
        for (const auto &[k, c] : o.terms_) {
            add_term(-c, k);
        }
        return *this;
    }

    PauliPolynomial &operator*=(complex s) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            it->second *= s;
            if (std::abs(it->second) < kDropTolerance) {
                it = terms_.erase(it);
            } else {
                ++it;
            }
        }
        return *this;
    }

    friend PauliPolynomial operator+(PauliPolynomial a, const PauliPolynomial &b) { return a += b; }
    friend PauliPolynomial operator-(PauliPolynomial a, const PauliPolynomial &b) { return a -= b; }
    friend PauliPolynomial operator*(PauliPolynomial a, complex s) { return a *= s; }
    friend PauliPolynomial operator*(complex s, PauliPolynomial a) { return a *= s; }

    friend PauliPolynomial operator*(const PauliPolynomial &a, const PauliPolynomial &b) {
        a.check_same_register(b);
        PauliPolynomial out(a.num_qubits_);
        for (const auto &[ka, ca] : a.terms_) {
            for (const auto &[kb, cb] : b.terms_) {
                const auto [phase, kc] = detail::multiply_keys(ka, kb);
                auto [it, inserted] = out.terms_.try_emplace(kc, ca * cb * phase);
                if (!inserted) {
                    it->second += ca * cb * phase;
                }
            }
        }
        out.drop_small();
        return out;
    }

    bool operator==(const PauliPolynomial &o) const {
        return num_qubits_ == o.num_qubits_ && terms_ == o.terms_;
    }

    /// Term-wise comparison with an absolute coefficient tolerance.
    bool approx_equal(const PauliPolynomial &o, double tol) const {
        if (num_qubits_ != o.num_qubits_) {
            return false;
        }
        for (const auto &[k, c] : terms_) {
            if (std::abs(c - o.coefficient(k)) > tol) {
                return false;
            }
        }
        for (const auto &[k, c] : o.terms_) {
            if (std::abs(c - coefficient(k)) > tol) {
                return false;
            }
        }
        return true;
    }

    /// Diagonal entries sum_k c_k (-1)^{|z_k & b|} for a Z-only polynomial.
    std::vector<double> diagonal() const {
        require(is_diagonal(), "PauliPolynomial::diagonal: polynomial has X/Y factors");
        require(num_qubits_ <= 30, "PauliPolynomial::diagonal: register too large");
        const std::size_t dim = std::size_t{1} << num_qubits_;
        std::vector<double> d(dim, 0.0);
        for (const auto &[k, c] : terms_) {
            const double v = c.real();
            for (std::size_t b = 0; b < dim; ++b) {
                d[b] += (std::popcount(k.z & b) & 1) ? -v : v;
            }
        }
        return d;
    }

    std::string to_string() const {
        if (terms_.empty()) {
            return "0";
        }
        std::string out;
        for (const auto &[k, c] : terms_) {
            if (!out.empty()) {
                out += " + ";
            }
            out += "(" + std::to_string(c.real());
            if (c.imag() != 0.0) {
                out += (c.imag() < 0 ? "-" : "+") + std::to_string(std::abs(c.imag())) + "i";
            }
            out += ")";
            if (k.is_identity()) {
                out += "I";
            }
            for (const auto &[q, a] : k.factors()) {
                out += axis_char(a) + std::to_string(q);
            }
        }
        return out;
    }

  private:
    void check_same_register(const PauliPolynomial &o) const {
        require(num_qubits_ == o.num_qubits_, "PauliPolynomial: mismatched register sizes (" +
                                                  std::to_string(num_qubits_) + " vs " +
                                                  std::to_string(o.num_qubits_) + ")");
    }

    void drop_small() {
        std::erase_if(terms_, [](const auto &kv) { return std::abs(kv.second) < kDropTolerance; });
    }

    std::size_t num_qubits_ = 0;
    TermMap terms_;
};

inline PauliPolynomial add(const PauliPolynomial &p, const PauliPolynomial &q) { return p + q; }

enum class Polarity { plus, minus };

/// T = (1 + Z)/2 for plus, Tbar = (1 - Z)/2 for minus. Under Z|0> = +|0>, T
/// has eigenvalue 1 on |0>.
inline PauliPolynomial binary_projector(std::size_t num_qubits, unsigned qubit, Polarity polarity) {
    const double sign = polarity == Polarity::plus ? 0.5 : -0.5;
    return PauliPolynomial::identity(num_qubits, 0.5) +
           PauliPolynomial::single(num_qubits, qubit, PauliAxis::Z, sign);
}

inline DenseMatrix to_matrix(const PauliPolynomial &p, std::size_t max_qubits = kDenseQubitCap) {
    require(p.num_qubits() <= max_qubits,
            "to_matrix: register of " + std::to_string(p.num_qubits()) +
                " qubits exceeds dense cap " + std::to_string(max_qubits));
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << p.num_qubits());
    DenseMatrix m = DenseMatrix::Zero(dim, dim);
    for (const auto &[k, c] : p.terms()) {
        for (Eigen::Index col = 0; col < dim; ++col) {
            const auto b = static_cast<std::uint64_t>(col);
            m(static_cast<Eigen::Index>(b ^ k.x), col) += c * detail::matrix_element(k, b);
        }
    }
    return m;
}

inline DenseMatrix to_matrix(const PauliString &s, std::size_t num_qubits) {
    return to_matrix(PauliPolynomial::from_string(num_qubits, s));
}

/// Pauli decomposition: coefficient of P is trace(P H) / 2^N.
inline PauliPolynomial decompose_matrix(const DenseMatrix &h, std::size_t num_qubits,
                                        double hermitian_tol = 1e-10) {
    require(h.rows() == h.cols(), "decompose_matrix: matrix is not square");
    require(num_qubits <= kDenseQubitCap, "decompose_matrix: register too large");
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
    require(h.rows() == dim, "decompose_matrix: dimension is not 2^num_qubits");
    require((h - h.adjoint()).cwiseAbs().maxCoeff() <= hermitian_tol,
            "decompose_matrix: matrix is not Hermitian");
    PauliPolynomial out(num_qubits);
    const auto udim = static_cast<std::uint64_t>(dim);
    for (std::uint64_t x = 0; x < udim; ++x) {
        for (std::uint64_t z = 0; z < udim; ++z) {
            const PauliKey k{x, z};
            complex tr = 0.0;
            for (std::uint64_t b = 0; b < udim; ++b) {
                tr += detail::matrix_element(k, b) *
                      h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b ^ x));
            }
            out.add_term(tr / static_cast<double>(udim), k);
        }
    }
    return out;
}

/// Apply p to a state (no normalization).
inline StateVector apply(const PauliPolynomial &p, const StateVector &s) {
    require(p.num_qubits() == s.num_qubits(), "apply: dimension mismatch");
    StateVector out(s.num_qubits());
    for (const auto &[k, c] : p.terms()) {
        for (std::size_t b = 0; b < s.dim(); ++b) {
            out[b ^ k.x] += c * detail::matrix_element(k, b) * s[b];
        }
    }
    return out;
}

inline complex expectation_complex(const PauliPolynomial &p, const StateVector &s) {
    require(p.num_qubits() == s.num_qubits(), "expectation: dimension mismatch");
    complex acc = 0.0;
    for (const auto &[k, c] : p.terms()) {
        complex term = 0.0;
        for (std::size_t b = 0; b < s.dim(); ++b) {
            term += std::conj(s[b ^ k.x]) * detail::matrix_element(k, b) * s[b];
        }
        acc += c * term;
    }
    return acc;
}

/// <s|p|s>; throws if a Hermitian p leaves an imaginary residual above 1e-9.
inline double expectation(const PauliPolynomial &p, const StateVector &s) {
    const complex v = expectation_complex(p, s);
    if (p.is_hermitian()) {
        require(std::abs(v.imag()) < 1e-9, "expectation: imaginary residual for Hermitian operator");
    }
    return v.real();
}

inline nlohmann::json to_json(const PauliPolynomial &p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto &[k, c] : p.terms()) {
        nlohmann::json ops = nlohmann::json::array();
        for (const auto &[q, a] : k.factors()) {
            ops.push_back({q, std::string(1, axis_char(a))});
        }
        terms.push_back({{"ops", ops}, {"re", c.real()}, {"im", c.imag()}});
    }
    return {{"num_qubits", p.num_qubits()}, {"terms", terms}};
}

inline PauliPolynomial pauli_from_json(const nlohmann::json &j) {
    PauliPolynomial p(j.at("num_qubits").get<std::size_t>());
    for (const auto &t : j.at("terms")) {
        PauliKey k;
        for (const auto &op : t.at("ops")) {
            const auto q = op.at(0).get<unsigned>();
            const auto a = op.at(1).get<std::string>();
            require(a.size() == 1, "pauli_from_json: bad axis");
            require(k.axis(q) == PauliAxis::I, "pauli_from_json: qubit listed twice");
            k.set(q, axis_from_char(a[0]));
        }
        p.add_term({t.at("re").get<double>(), t.value("im", 0.0)}, k);
    }
    return p;
}

} // namespace aqc
