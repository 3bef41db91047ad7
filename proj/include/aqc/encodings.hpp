#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pauli.hpp"

namespace aqc {

// Encodings of real variables on qubits.
//
// Raw basis labels follow the register convention Z|0> = +|0>: a qubit in |0>
// has T-eigenvalue 1 and a qubit in |1> has T-eigenvalue 0. Human-readable
// bit strings produced here (report_bits) print T-eigenvalues, most
// significant qubit first, so "1" always means "projector satisfied".

/// w = 2^{-N} sum_l 2^l T_{offset+l}; bins {0, 1/2^N, ..., 1 - 1/2^N}.
struct FractionalBinary {
    unsigned num_qubits = 1;
    unsigned qubit_offset = 0;
};

/// w = Z on one qubit, values {-1, +1}.
struct SpinPM1 {
    unsigned qubit = 0;
};

/// w = T on one qubit, values {0, 1}.
struct Binary01 {
    unsigned qubit = 0;
};

using VariableEncoding = std::variant<FractionalBinary, SpinPM1, Binary01>;

inline std::vector<unsigned> qubits_of(const VariableEncoding &e) {
    return std::visit(
        [](const auto &v) -> std::vector<unsigned> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FractionalBinary>) {
                std::vector<unsigned> q(v.num_qubits);
                for (unsigned l = 0; l < v.num_qubits; ++l) {
                    q[l] = v.qubit_offset + l;
                }
                return q;
            } else {
                return {v.qubit};
            }
        },
        e);
}

inline std::string variant_name(const VariableEncoding &e) {
    return std::visit(
        [](const auto &v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FractionalBinary>) {
                return "fractional_binary";
            } else if constexpr (std::is_same_v<T, SpinPM1>) {
                return "spin_pm1";
            } else {
                return "binary01";
            }
        },
        e);
}

inline PauliPolynomial encode_variable(const VariableEncoding &e, std::size_t num_qubits) {
    for (unsigned q : qubits_of(e)) {
        require(q < num_qubits, "encode_variable: qubit " + std::to_string(q) +
                                    " outside register of " + std::to_string(num_qubits));
    }
    return std::visit(
        [num_qubits](const auto &v) -> PauliPolynomial {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FractionalBinary>) {
                PauliPolynomial w(num_qubits);
                const double scale = std::ldexp(1.0, -static_cast<int>(v.num_qubits));
                for (unsigned l = 0; l < v.num_qubits; ++l) {
                    w += binary_projector(num_qubits, v.qubit_offset + l, Polarity::plus) *
                         complex(scale * std::ldexp(1.0, static_cast<int>(l)));
                }
                return w;
            } else if constexpr (std::is_same_v<T, SpinPM1>) {
                return PauliPolynomial::single(num_qubits, v.qubit, PauliAxis::Z);
            } else {
                return binary_projector(num_qubits, v.qubit, Polarity::plus);
            }
        },
        e);
}

/// T-eigenvalue of `qubit` in the basis state `basis`.
inline int t_eigenvalue(std::uint64_t basis, unsigned qubit) {
    return ((basis >> qubit) & 1U) ? 0 : 1;
}

/// Value of the encoded variable on a computational basis state.
inline double decode(const VariableEncoding &e, std::uint64_t basis) {
    return std::visit(
        [basis](const auto &v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FractionalBinary>) {
                std::uint64_t n = 0;
                for (unsigned l = 0; l < v.num_qubits; ++l) {
                    n |= static_cast<std::uint64_t>(t_eigenvalue(basis, v.qubit_offset + l)) << l;
                }
                return std::ldexp(static_cast<double>(n), -static_cast<int>(v.num_qubits));
            } else if constexpr (std::is_same_v<T, SpinPM1>) {
                return t_eigenvalue(basis, v.qubit) ? 1.0 : -1.0;
            } else {
                return static_cast<double>(t_eigenvalue(basis, v.qubit));
            }
        },
        e);
}

/// Raw qubit labels (bits[q] is the |0>/|1> label of qubit q).
inline double decode_bits(const VariableEncoding &e, std::span<const std::uint8_t> bits,
                          std::size_t total_qubits) {
    require(bits.size() == total_qubits, "decode_bits: bit count " + std::to_string(bits.size()) +
                                             " != register size " + std::to_string(total_qubits));
    require(total_qubits <= 64, "decode_bits: register too large");
    std::uint64_t basis = 0;
    for (std::size_t q = 0; q < bits.size(); ++q) {
        if (bits[q] != 0) {
            basis |= std::uint64_t{1} << q;
        }
    }
    return decode(e, basis);
}

inline std::vector<double> bin_centers(const VariableEncoding &e) {
    return std::visit(
        [](const auto &v) -> std::vector<double> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FractionalBinary>) {
                const std::size_t count = std::size_t{1} << v.num_qubits;
                std::vector<double> out(count);
                for (std::size_t r = 0; r < count; ++r) {
                    out[r] = std::ldexp(static_cast<double>(r), -static_cast<int>(v.num_qubits));
                }
                return out;
            } else if constexpr (std::is_same_v<T, SpinPM1>) {
                return {-1.0, 1.0};
            } else {
                return {0.0, 1.0};
            }
        },
        e);
}

/// T-eigenvalue string of a basis state, qubit N-1 leftmost.
inline std::string report_bits(std::uint64_t basis, std::size_t num_qubits) {
    std::string s(num_qubits, '0');
    for (std::size_t q = 0; q < num_qubits; ++q) {
        s[num_qubits - 1 - q] = t_eigenvalue(basis, static_cast<unsigned>(q)) ? '1' : '0';
    }
    return s;
}

inline std::uint64_t basis_from_report_bits(const std::string &bits) {
    std::uint64_t basis = 0;
    const std::size_t n = bits.size();
    for (std::size_t i = 0; i < n; ++i) {
        require(bits[i] == '0' || bits[i] == '1', "basis_from_report_bits: bad character");
        if (bits[i] == '0') {
            basis |= std::uint64_t{1} << (n - 1 - i);
        }
    }
    return basis;
}

/// Ordered variable -> encoding assignment whose qubit ranges tile [0, total).
class EncodingTable {
  public:
    struct Entry {
        std::string name;
        VariableEncoding encoding;
    };

    EncodingTable() = default;

    void add(const std::string &name, VariableEncoding e) {
        require(index_.find(name) == index_.end(), "EncodingTable: duplicate variable " + name);
        for (unsigned q : qubits_of(e)) {
            require(q < 64, "EncodingTable: qubit index exceeds 64");
            const std::uint64_t bit = std::uint64_t{1} << q;
            require((used_ & bit) == 0, "EncodingTable: qubit " + std::to_string(q) +
                                            " assigned to two variables");
            used_ |= bit;
        }
        index_.emplace(name, entries_.size());
        entries_.push_back({name, e});
    }

    /// One SpinPM1 / Binary01 qubit per name, in order.
    static EncodingTable one_qubit_each(const std::vector<std::string> &names, bool spin) {
        EncodingTable t;
        unsigned q = 0;
        for (const auto &n : names) {
            if (spin) {
                t.add(n, SpinPM1{q++});
            } else {
                t.add(n, Binary01{q++});
            }
        }
        return t;
    }

    const std::vector<Entry> &entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool contains(const std::string &name) const { return index_.count(name) != 0; }

    const VariableEncoding &at(const std::string &name) const {
        const auto it = index_.find(name);
        require(it != index_.end(), "EncodingTable: variable '" + name + "' is not encoded");
        return entries_[it->second].encoding;
    }

    std::size_t total_qubits() const {
        return static_cast<std::size_t>(std::bit_width(used_));
    }

    /// Qubit ranges jointly cover [0, total_qubits).
    bool is_complete() const {
        const std::size_t n = total_qubits();
        return n == 64 ? used_ == ~std::uint64_t{0} : used_ == (std::uint64_t{1} << n) - 1;
    }

    void check_complete() const {
        require(is_complete(), "EncodingTable: qubit ranges leave gaps in the register");
    }

    std::vector<double> decode_values(std::uint64_t basis) const {
        std::vector<double> out;
        out.reserve(entries_.size());
        for (const auto &e : entries_) {
            out.push_back(decode(e.encoding, basis));
        }
        return out;
    }

    std::map<std::string, double> decode_all(std::uint64_t basis) const {
        std::map<std::string, double> out;
        for (const auto &e : entries_) {
            out[e.name] = decode(e.encoding, basis);
        }
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::array();
        for (const auto &e : entries_) {
            j.push_back({{"name", e.name},
                         {"variant", variant_name(e.encoding)},
                         {"qubits", qubits_of(e.encoding)}});
        }
        return j;
    }

    static EncodingTable from_json(const nlohmann::json &j) {
        EncodingTable t;
        for (const auto &e : j) {
            const auto variant = e.at("variant").get<std::string>();
            const auto qubits = e.at("qubits").get<std::vector<unsigned>>();
            require(!qubits.empty(), "EncodingTable::from_json: empty qubit list");
            if (variant == "fractional_binary") {
                for (std::size_t l = 1; l < qubits.size(); ++l) {
                    require(qubits[l] == qubits[0] + l,
                            "EncodingTable::from_json: fractional qubits must be contiguous");
                }
                t.add(e.at("name"), FractionalBinary{static_cast<unsigned>(qubits.size()), qubits[0]});
            } else if (variant == "spin_pm1") {
                require(qubits.size() == 1, "EncodingTable::from_json: spin_pm1 takes one qubit");
                t.add(e.at("name"), SpinPM1{qubits[0]});
            } else if (variant == "binary01") {
                require(qubits.size() == 1, "EncodingTable::from_json: binary01 takes one qubit");
                t.add(e.at("name"), Binary01{qubits[0]});
            } else {
                throw Error("EncodingTable::from_json: unknown variant " + variant);
            }
        }
        return t;
    }

  private:
    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> index_;
    std::uint64_t used_ = 0;
};

} // namespace aqc
