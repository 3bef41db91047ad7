#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "encodings.hpp"
#include "error.hpp"
#include "pauli.hpp"

namespace aqc {

/// Sorted (variable, exponent) pairs; exponents are positive.
using Powers = std::vector<std::pair<std::string, int>>;

struct Monomial {
    double coefficient = 0.0;
    Powers powers;

    int degree() const {
        int d = 0;
        for (const auto &[n, k] : powers) {
            d += k;
        }
        return d;
    }
};

namespace detail {

inline Powers multiply_powers(const Powers &a, const Powers &b) {
    Powers out;
    out.reserve(a.size() + b.size());
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            out.push_back(*ia++);
        } else if (ib->first < ia->first) {
            out.push_back(*ib++);
        } else {
            out.emplace_back(ia->first, ia->second + ib->second);
            ++ia;
            ++ib;
        }
    }
    out.insert(out.end(), ia, a.end());
    out.insert(out.end(), ib, b.end());
    return out;
}

} // namespace detail

/**
 * Polynomial over named real variables in canonical form: one coefficient per
 * distinct power map, coefficients below kDropTolerance removed.
 */
class VarPolynomial {
  public:
    using TermMap = std::map<Powers, double>;

    VarPolynomial() = default;

    static VarPolynomial constant(double c) {
        VarPolynomial p;
        p.add_term(c, {});
        return p;
    }

    static VarPolynomial variable(const std::string &name, double c = 1.0) {
        require(!name.empty(), "VarPolynomial::variable: empty name");
        VarPolynomial p;
        p.add_term(c, {{name, 1}});
        return p;
    }

    void add_term(double c, Powers powers) {
        std::sort(powers.begin(), powers.end());
        Powers merged;
        for (const auto &[n, k] : powers) {
            require(k >= 0, "VarPolynomial: negative exponent");
            if (k == 0) {
                continue;
            }
            if (!merged.empty() && merged.back().first == n) {
                merged.back().second += k;
            } else {
                merged.emplace_back(n, k);
            }
        }
        auto [it, inserted] = terms_.try_emplace(std::move(merged), c);
        if (!inserted) {
            it->second += c;
        }
        if (std::abs(it->second) < kDropTolerance) {
            terms_.erase(it);
        }
    }

    const TermMap &terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    std::vector<Monomial> monomials() const {
        std::vector<Monomial> out;
        out.reserve(terms_.size());
        for (const auto &[p, c] : terms_) {
            out.push_back({c, p});
        }
        return out;
    }

    int degree() const {
        int d = 0;
        for (const auto &[p, c] : terms_) {
            d = std::max(d, Monomial{c, p}.degree());
        }
        return d;
    }

    double constant_term() const {
        const auto it = terms_.find(Powers{});
        return it == terms_.end() ? 0.0 : it->second;
    }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }

    std::set<std::string> variables() const {
        std::set<std::string> out;
        for (const auto &[p, c] : terms_) {
            for (const auto &[n, k] : p) {
                out.insert(n);
            }
        }
        return out;
    }

    VarPolynomial &operator+=(const VarPolynomial &o) {
        for (const auto &[p, c] : o.terms_) {
            add_term(c, p);
        }
        return *this;
    }

    VarPolynomial &operator-=(const VarPolynomial &o) {
        for (const auto &[p, c] : o.terms_) {
            add_term(-c, p);
        }
        return *this;
    }

    VarPolynomial &operator*=(double s) {
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

    friend VarPolynomial operator+(VarPolynomial a, const VarPolynomial &b) { return a += b; }
    friend VarPolynomial operator-(VarPolynomial a, const VarPolynomial &b) { return a -= b; }
    friend VarPolynomial operator*(VarPolynomial a, double s) { return a *= s; }
    friend VarPolynomial operator*(double s, VarPolynomial a) { return a *= s; }

    friend VarPolynomial operator*(const VarPolynomial &a, const VarPolynomial &b) {
        VarPolynomial out;
        for (const auto &[pa, ca] : a.terms_) {
            for (const auto &[pb, cb] : b.terms_) {
                auto key = detail::multiply_powers(pa, pb);
                auto [it, inserted] = out.terms_.try_emplace(std::move(key), ca * cb);
                if (!inserted) {
                    it->second += ca * cb;
                }
            }
        }
        std::erase_if(out.terms_, [](const auto &kv) { return std::abs(kv.second) < kDropTolerance; });
        return out;
    }

    VarPolynomial pow(int k) const {
        require(k >= 0, "VarPolynomial::pow: negative exponent");
        VarPolynomial result = constant(1.0);
        VarPolynomial base = *this;
        while (k > 0) {
            if (k & 1) {
                result = result * base;
            }
            k >>= 1;
            if (k > 0) {
                base = base * base;
            }
        }
        return result;
    }

    bool operator==(const VarPolynomial &) const = default;

    /// Exact evaluation; every variable must be assigned.
    double evaluate(const std::map<std::string, double> &assignment) const {
        double acc = 0.0;
        for (const auto &[p, c] : terms_) {
            double term = c;
            for (const auto &[n, k] : p) {
                const auto it = assignment.find(n);
                require(it != assignment.end(), "VarPolynomial::evaluate: missing variable " + n);
                for (int i = 0; i < k; ++i) {
                    term *= it->second;
                }
            }
            acc += term;
        }
        return acc;
    }

    /// Substitute polynomials for variables and re-expand. Unlisted variables stay.
    VarPolynomial compose(const std::map<std::string, VarPolynomial> &subs) const {
        VarPolynomial out;
        std::map<std::pair<std::string, int>, VarPolynomial> power_cache;
        for (const auto &[p, c] : terms_) {
            VarPolynomial term = constant(c);
            Powers kept;
            for (const auto &[n, k] : p) {
                const auto it = subs.find(n);
                if (it == subs.end()) {
                    kept.emplace_back(n, k);
                    continue;
                }
                auto cached = power_cache.find({n, k});
                if (cached == power_cache.end()) {
                    cached = power_cache.emplace(std::make_pair(n, k), it->second.pow(k)).first;
                }
                term = term * cached->second;
            }
            if (!kept.empty()) {
                VarPolynomial rest;
                rest.add_term(1.0, kept);
                term = term * rest;
            }
            out += term;
        }
        return out;
    }

    std::string to_string() const {
        if (terms_.empty()) {
            return "0";
        }
        std::ostringstream os;
        os.precision(17);
        bool first = true;
        for (const auto &[p, c] : terms_) {
            if (!first) {
                os << (c < 0 ? " - " : " + ");
            } else if (c < 0) {
                os << "-";
            }
            first = false;
            os << std::abs(c);
            for (const auto &[n, k] : p) {
                os << " * " << n;
                if (k != 1) {
                    os << "^" << k;
                }
            }
        }
        return os.str();
    }

    /// Parse `c * name^k * name ... + c * ...`. Factors may be numbers or
    /// names with an optional integer exponent; a leading sign applies per term.
    static VarPolynomial parse(const std::string &text);

  private:
    TermMap terms_;
};

namespace detail {

class PolynomialParser {
  public:
    explicit PolynomialParser(const std::string &text) : text_(text) {}

    VarPolynomial parse() {
        VarPolynomial out;
        skip_ws();
        require(pos_ < text_.size(), "polynomial parse: empty expression");
        bool first = true;
        while (pos_ < text_.size()) {
            double sign = 1.0;
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1.0 : 1.0;
                ++pos_;
                skip_ws();
            } else if (!first) {
                fail("expected '+' or '-'");
            }
            first = false;
            out += parse_term() * sign;
            skip_ws();
        }
        return out;
    }

  private:
    VarPolynomial parse_term() {
        VarPolynomial term = parse_factor();
        skip_ws();
        while (peek() == '*') {
            ++pos_;
            skip_ws();
            term = term * parse_factor();
            skip_ws();
        }
        return term;
    }

    VarPolynomial parse_factor() {
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(text_.substr(pos_), &used);
            pos_ += used;
            return VarPolynomial::constant(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                    text_[pos_] == '.' || text_[pos_] == '[' || text_[pos_] == ']')) {
                ++pos_;
            }
            const std::string name = text_.substr(start, pos_ - start);
            skip_ws();
            int k = 1;
            if (peek() == '^') {
                ++pos_;
                skip_ws();
                const std::size_t s = pos_;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    ++pos_;
                }
                if (s == pos_) {
                    fail("expected integer exponent");
                }
                k = std::stoi(text_.substr(s, pos_ - s));
            }
            VarPolynomial p;
            p.add_term(1.0, {{name, k}});
            return p;
        }
        fail("expected number or variable");
        return {};
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw Error("polynomial parse: " + what + " at offset " + std::to_string(pos_) + " in '" +
                    text_ + "'");
    }

    const std::string &text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline VarPolynomial VarPolynomial::parse(const std::string &text) {
    return detail::PolynomialParser(text).parse();
}

/// Replace each variable by its qubit encoding and expand in the Pauli algebra.
/// Idempotency (T^2 = T) and involution (Z^2 = 1) reductions fall out of the
/// Pauli product.
inline PauliPolynomial substitute_encodings(const VarPolynomial &p, const EncodingTable &table) {
    const std::size_t n = table.total_qubits();
    PauliPolynomial out(n);
    std::map<std::pair<std::string, int>, PauliPolynomial> cache;
    const auto power_of = [&](const std::string &name, int k) -> const PauliPolynomial & {
        auto it = cache.find({name, k});
        if (it != cache.end()) {
            return it->second;
        }
        const PauliPolynomial base = encode_variable(table.at(name), n);
        PauliPolynomial acc = base;
        for (int i = 1; i < k; ++i) {
            acc = acc * base;
        }
        return cache.emplace(std::make_pair(name, k), std::move(acc)).first->second;
    };
    for (const auto &[powers, c] : p.terms()) {
        PauliPolynomial term = PauliPolynomial::identity(n, c);
        for (const auto &[name, k] : powers) {
            term = term * power_of(name, k);
        }
        out += term;
    }
    return out;
}

} // namespace aqc
