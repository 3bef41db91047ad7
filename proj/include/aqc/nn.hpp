#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "adiabatic.hpp"
#include "datasets.hpp"
#include "encodings.hpp"
#include "error.hpp"
#include "pauli.hpp"
#include "random.hpp"
#include "var_polynomial.hpp"

namespace aqc {

struct IdentityActivation {};
struct SquareActivation {};
/// f(z) = sum_k coefficients[k] z^k
struct PolynomialActivation {
    std::vector<double> coefficients;
};
/// f = Theta(sum_j w_ij z_j - n/2) with Theta(0) = 1, on 0/1 weights and inputs.
struct StepMajority {};

using Activation = std::variant<IdentityActivation, SquareActivation, PolynomialActivation, StepMajority>;

inline int activation_degree(const Activation &a, std::size_t fan_in) {
    return std::visit(
        [fan_in](const auto &v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IdentityActivation>) {
                return 1;
            } else if constexpr (std::is_same_v<T, SquareActivation>) {
                return 2;
            } else if constexpr (std::is_same_v<T, PolynomialActivation>) {
                return std::max<int>(1, static_cast<int>(v.coefficients.size()) - 1);
            } else {
                return static_cast<int>(fan_in);
            }
        },
        a);
}

/// A weight or bias slot: a named trainable variable or a fixed constant.
using ParamEntry = std::variant<std::string, double>;

struct LayerSpec {
    /// weights[i][j] connects input j to output i.
    std::vector<std::vector<ParamEntry>> weights;
    std::vector<ParamEntry> biases;
    Activation activation = IdentityActivation{};

    std::size_t fan_out() const { return weights.size(); }
    std::size_t fan_in() const { return weights.empty() ? 0 : weights.front().size(); }
};

struct ModelSpec {
    std::vector<LayerSpec> layers;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().fan_in(); }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().fan_out(); }

    /// Variable names in declaration order (weights row-major, then biases, per layer).
    std::vector<std::string> variables() const {
        std::vector<std::string> out;
        const auto visit = [&out](const ParamEntry &e) {
            if (const auto *name = std::get_if<std::string>(&e)) {
                out.push_back(*name);
            }
        };
        for (const auto &l : layers) {
            for (const auto &row : l.weights) {
                for (const auto &e : row) {
                    visit(e);
                }
            }
            for (const auto &b : l.biases) {
                visit(b);
            }
        }
        return out;
    }

    bool uses_step() const {
        return std::any_of(layers.begin(), layers.end(), [](const LayerSpec &l) {
            return std::holds_alternative<StepMajority>(l.activation);
        });
    }

    void validate() const {
        require(!layers.empty(), "ModelSpec: no layers");
        std::size_t prev = layers.front().fan_in();
        require(prev > 0, "ModelSpec: first layer has no inputs");
        for (std::size_t k = 0; k < layers.size(); ++k) {
            const auto &l = layers[k];
            const std::string where = "ModelSpec: layer " + std::to_string(k + 1);
            require(l.fan_out() > 0, where + " has no outputs");
            require(l.biases.size() == l.fan_out(), where + " bias count != output count");
            for (const auto &row : l.weights) {
                require(row.size() == prev, where + " fan-in does not match previous layer");
            }
            if (std::holds_alternative<StepMajority>(l.activation)) {
                for (const auto &b : l.biases) {
                    const auto *c = std::get_if<double>(&b);
                    require(c != nullptr && *c == 0.0, where + ": step activation needs zero biases");
                }
            }
            prev = l.fan_out();
        }
        const auto vars = variables();
        const std::set<std::string> unique(vars.begin(), vars.end());
        require(unique.size() == vars.size(), "ModelSpec: variable names must be unique");
    }
};

enum class LossKind { mean_squared_error, linear_binary };

/// How a real output becomes a class label.
enum class DecisionRule {
    /// Y >= 0 is the positive class; labels compared by sign.
    sign,
    /// Y is already 0/1.
    binary,
};

/// Sum over input subsets with at most floor(n/2) zeros of prod T_j prod (1 - T_k);
/// equals Theta(sum inputs - n/2) on every 0/1 assignment.
inline VarPolynomial theta_polynomial(const std::vector<VarPolynomial> &inputs) {
    const std::size_t n = inputs.size();
    require(n >= 1, "theta_polynomial: fan-in must be >= 1");
    require(n <= 20, "theta_polynomial: fan-in too large");
    std::vector<VarPolynomial> complement;
    complement.reserve(n);
    for (const auto &t : inputs) {
        complement.push_back(VarPolynomial::constant(1.0) - t);
    }
    VarPolynomial out;
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;
    for (std::uint32_t zeros = 0; zeros <= full; ++zeros) {
        if (static_cast<std::size_t>(std::popcount(zeros)) > n / 2) {
            continue;
        }
        VarPolynomial term = VarPolynomial::constant(1.0);
        for (std::size_t j = 0; j < n && !term.is_zero(); ++j) {
            term = term * (((zeros >> j) & 1U) ? complement[j] : inputs[j]);
        }
        out += term;
    }
    return out;
}

namespace detail {

inline VarPolynomial entry_polynomial(const ParamEntry &e) {
    if (const auto *name = std::get_if<std::string>(&e)) {
        return VarPolynomial::variable(*name);
    }
    return VarPolynomial::constant(std::get<double>(e));
}

inline VarPolynomial apply_polynomial_activation(const Activation &a, const VarPolynomial &z) {
    return std::visit(
        [&z](const auto &v) -> VarPolynomial {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IdentityActivation>) {
                return z;
            } else if constexpr (std::is_same_v<T, SquareActivation>) {
                return z * z;
            } else if constexpr (std::is_same_v<T, PolynomialActivation>) {
                VarPolynomial acc;
                VarPolynomial power = VarPolynomial::constant(1.0);
                for (std::size_t k = 0; k < v.coefficients.size(); ++k) {
                    if (k > 0) {
                        power = power * z;
                    }
                    acc += power * v.coefficients[k];
                }
                return acc;
            } else {
                throw Error("apply_polynomial_activation: step activation has no pre-activation form");
            }
        },
        a);
}

} // namespace detail

/// Output polynomials in the weight variables for a numeric input.
inline std::vector<VarPolynomial> symbolic_forward_all(const ModelSpec &model,
                                                       const std::vector<double> &x) {
    require(x.size() == model.input_dim(), "symbolic_forward: input dimension mismatch");
    std::vector<VarPolynomial> z;
    z.reserve(x.size());
    for (double v : x) {
        z.push_back(VarPolynomial::constant(v));
    }
    for (const auto &layer : model.layers) {
        require(layer.fan_in() == z.size(), "symbolic_forward: layer dimension mismatch");
        std::vector<VarPolynomial> next;
        next.reserve(layer.fan_out());
        for (std::size_t i = 0; i < layer.fan_out(); ++i) {
            if (std::holds_alternative<StepMajority>(layer.activation)) {
                std::vector<VarPolynomial> products;
                products.reserve(z.size());
                for (std::size_t j = 0; j < z.size(); ++j) {
                    products.push_back(detail::entry_polynomial(layer.weights[i][j]) * z[j]);
                }
                next.push_back(theta_polynomial(products));
                continue;
            }
            VarPolynomial pre = detail::entry_polynomial(layer.biases[i]);
            for (std::size_t j = 0; j < z.size(); ++j) {
                pre += detail::entry_polynomial(layer.weights[i][j]) * z[j];
            }
            next.push_back(detail::apply_polynomial_activation(layer.activation, pre));
        }
        z = std::move(next);
    }
    return z;
}

inline VarPolynomial symbolic_forward(const ModelSpec &model, const std::vector<double> &x) {
    auto out = symbolic_forward_all(model, x);
    require(out.size() == 1, "symbolic_forward: model must have one output");
    return out.front();
}

/**
 * Numeric forward pass with variables bound to positions of a weight vector
 * ordered as ModelSpec::variables(). Independent of the symbolic path.
 */
class NumericModel {
  public:
    explicit NumericModel(const ModelSpec &model) : model_(model) {
        model_.validate();
        names_ = model_.variables();
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < names_.size(); ++i) {
            index[names_[i]] = i;
        }
        const auto bind = [&index](const ParamEntry &e) -> Slot {
            if (const auto *name = std::get_if<std::string>(&e)) {
                return {true, index.at(*name), 0.0};
            }
            return {false, 0, std::get<double>(e)};
        };
        for (const auto &l : model_.layers) {
            BoundLayer b;
            for (const auto &row : l.weights) {
                std::vector<Slot> r;
                for (const auto &e : row) {
                    r.push_back(bind(e));
                }
                b.weights.push_back(std::move(r));
            }
            for (const auto &e : l.biases) {
                b.biases.push_back(bind(e));
            }
            layers_.push_back(std::move(b));
        }
    }

    const std::vector<std::string> &variable_names() const { return names_; }
    const ModelSpec &spec() const { return model_; }

    std::vector<double> weights_from(const std::map<std::string, double> &assignment) const {
        std::vector<double> w(names_.size());
        for (std::size_t i = 0; i < names_.size(); ++i) {
            const auto it = assignment.find(names_[i]);
            require(it != assignment.end(), "predict: missing weight " + names_[i]);
            w[i] = it->second;
        }
        return w;
    }

    double forward(const std::vector<double> &w, const std::vector<double> &x) const {
        require(w.size() == names_.size(), "predict: weight vector has wrong length");
        require(x.size() == model_.input_dim(), "predict: input dimension mismatch");
        std::vector<double> z = x;
        for (std::size_t k = 0; k < layers_.size(); ++k) {
            const auto &bl = layers_[k];
            const auto &act = model_.layers[k].activation;
            std::vector<double> next(bl.weights.size());
            for (std::size_t i = 0; i < bl.weights.size(); ++i) {
                double pre = value(bl.biases[i], w);
                for (std::size_t j = 0; j < z.size(); ++j) {
                    pre += value(bl.weights[i][j], w) * z[j];
                }
                next[i] = activate(act, pre, z.size());
            }
            z = std::move(next);
        }
        require(z.size() == 1, "predict: model must have one output");
        return z.front();
    }

  private:
    struct Slot {
        bool variable = false;
        std::size_t index = 0;
        double constant = 0.0;
    };
    struct BoundLayer {
        std::vector<std::vector<Slot>> weights;
        std::vector<Slot> biases;
    };

    static double value(const Slot &s, const std::vector<double> &w) {
        return s.variable ? w[s.index] : s.constant;
    }

    static double activate(const Activation &a, double pre, std::size_t fan_in) {
        return std::visit(
            [pre, fan_in](const auto &v) -> double {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, IdentityActivation>) {
                    return pre;
                } else if constexpr (std::is_same_v<T, SquareActivation>) {
                    return pre * pre;
                } else if constexpr (std::is_same_v<T, PolynomialActivation>) {
                    double acc = 0.0;
                    for (auto it = v.coefficients.rbegin(); it != v.coefficients.rend(); ++it) {
                        acc = acc * pre + *it;
                    }
                    return acc;
                } else {
                    return pre - 0.5 * static_cast<double>(fan_in) >= 0.0 ? 1.0 : 0.0;
                }
            },
            a);
    }

    ModelSpec model_;
    std::vector<std::string> names_;
    std::vector<BoundLayer> layers_;
};

inline double predict(const ModelSpec &model, const std::map<std::string, double> &weights,
                      const std::vector<double> &x) {
    const NumericModel m(model);
    return m.forward(m.weights_from(weights), x);
}

inline int decide(double y, DecisionRule rule) {
    if (rule == DecisionRule::sign) {
        return y >= 0.0 ? 1 : -1;
    }
    return y >= 0.5 ? 1 : 0;
}

inline int label_class(int label, DecisionRule rule) {
    if (rule == DecisionRule::sign) {
        return label > 0 ? 1 : -1;
    }
    return label;
}

inline int decision(const ModelSpec &model, const std::map<std::string, double> &weights,
                    const std::vector<double> &x, DecisionRule rule) {
    return decide(predict(model, weights, x), rule);
}

inline double accuracy(const NumericModel &m, const std::vector<double> &w, const Dataset &data,
                       DecisionRule rule) {
    if (data.empty()) {
        return 0.0;
    }
    std::size_t correct = 0;
    for (const auto &s : data) {
        correct += decide(m.forward(w, s.features), rule) == label_class(s.label, rule) ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

inline double accuracy(const ModelSpec &model, const std::map<std::string, double> &weights,
                       const Dataset &data, DecisionRule rule) {
    const NumericModel m(model);
    return accuracy(m, m.weights_from(weights), data, rule);
}

inline void check_labels(const Dataset &data, LossKind loss) {
    if (loss == LossKind::linear_binary) {
        for (const auto &s : data) {
            require(s.label == 0 || s.label == 1, "linear-binary loss needs 0/1 labels");
        }
    }
}

/// Loss evaluated numerically through the forward pass.
inline double numeric_loss(const NumericModel &m, const std::vector<double> &w, const Dataset &data,
                           LossKind loss) {
    double acc = 0.0;
    for (const auto &s : data) {
        const double y = m.forward(w, s.features);
        if (loss == LossKind::mean_squared_error) {
            acc += (y - s.label) * (y - s.label);
        } else {
            acc += (s.label == 1 ? -1.0 : 1.0) * y;
        }
    }
    if (loss == LossKind::mean_squared_error && !data.empty()) {
        acc /= static_cast<double>(data.size());
    }
    return acc;
}

/// MSE = (1/N) sum (Y(x_a) - y_a)^2, or linear-binary = sum (-1)^{y_a} Y(x_a).
inline VarPolynomial build_loss(const ModelSpec &model, const Dataset &data, LossKind loss) {
    model.validate();
    check_labels(data, loss);
    if (loss == LossKind::linear_binary) {
        require(std::holds_alternative<StepMajority>(model.layers.back().activation),
                "linear-binary loss needs a 0/1-valued output activation");
    }
    VarPolynomial out;
    for (const auto &s : data) {
        const VarPolynomial y = symbolic_forward(model, s.features);
        if (loss == LossKind::mean_squared_error) {
            const VarPolynomial r = y - VarPolynomial::constant(static_cast<double>(s.label));
            out += r * r;
        } else {
            out += y * (s.label == 1 ? -1.0 : 1.0);
        }
    }
    if (loss == LossKind::mean_squared_error && !data.empty()) {
        out *= 1.0 / static_cast<double>(data.size());
    }
    return out;
}

/// Target Hamiltonian: the loss with every weight replaced by its qubit encoding.
inline PauliPolynomial compile_hamiltonian(const VarPolynomial &loss, const EncodingTable &table) {
    for (const auto &v : loss.variables()) {
        require(table.contains(v), "compile_hamiltonian: weight '" + v + "' has no encoding");
    }
    PauliPolynomial h = substitute_encodings(loss, table);
    require(h.is_hermitian(1e-12), "compile_hamiltonian: result is not Hermitian");
    return h;
}

/// The two-layer network Y(x) = sum_i w2_i (sum_j w1_ij x_j)^2 - 1.
inline ModelSpec toy_model() {
    LayerSpec l1;
    l1.weights = {{std::string("w1_11"), std::string("w1_12")},
                  {std::string("w1_21"), std::string("w1_22")}};
    l1.biases = {0.0, 0.0};
    l1.activation = SquareActivation{};
    LayerSpec l2;
    l2.weights = {{std::string("w2_1"), std::string("w2_2")}};
    l2.biases = {-1.0};
    l2.activation = IdentityActivation{};
    return ModelSpec{{l1, l2}};
}

/// 0/1-weight network with majority-step activations, 4 -> 2 -> 1 (10 weights).
inline ModelSpec binary_model() {
    LayerSpec l1;
    for (int i = 1; i <= 2; ++i) {
        std::vector<ParamEntry> row;
        for (int j = 1; j <= 4; ++j) {
            row.emplace_back("w1_" + std::to_string(i) + std::to_string(j));
        }
        l1.weights.push_back(row);
    }
    l1.biases = {0.0, 0.0};
    l1.activation = StepMajority{};
    LayerSpec l2;
    l2.weights = {{std::string("w2_1"), std::string("w2_2")}};
    l2.biases = {0.0};
    l2.activation = StepMajority{};
    return ModelSpec{{l1, l2}};
}

/// FNV-1a over quantized predictions, as 16 hex digits.
inline std::string prediction_hash(const std::vector<std::int64_t> &quantized) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t q : quantized) {
        auto u = static_cast<std::uint64_t>(q);
        for (int b = 0; b < 8; ++b) {
            h ^= (u >> (8 * b)) & 0xFFU;
            h *= 1099511628211ULL;
        }
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[h & 0xFU];
        h >>= 4;
    }
    return s;
}

struct DegeneracyClass {
    std::uint64_t representative = 0;
    std::string bits;
    std::map<std::string, double> weights;
    double probability = 0.0;
    double energy = 0.0;
    std::size_t degeneracy = 0;
    std::string hash;
    std::vector<std::uint64_t> members;
};

/// 21 x 21 uniform grid on [-1, 1]^2.
inline std::vector<std::vector<double>> square_probe_grid(std::size_t per_axis = 21) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < per_axis; ++i) {
        for (std::size_t j = 0; j < per_axis; ++j) {
            const double a = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(per_axis - 1);
            const double b = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(per_axis - 1);
            out.push_back({a, b});
        }
    }
    return out;
}

/**
 * Group basis states by identical prediction vectors on the probe inputs.
 * Each class carries its probability mass, degeneracy, the energy of its most
 * probable member under the diagonal Hamiltonian, and that member as the
 * representative. Sorted by descending probability.
 */
inline std::vector<DegeneracyClass> group_degenerate(const ModelSpec &model, const EncodingTable &table,
                                                     const PauliPolynomial &hamiltonian,
                                                     const StateVector &state,
                                                     const std::vector<std::vector<double>> &probe) {
    const std::size_t n = table.total_qubits();
    require(n <= 20, "group_degenerate: register above 20 qubits");
    require(state.num_qubits() == n && hamiltonian.num_qubits() == n,
            "group_degenerate: register mismatch");
    const NumericModel m(model);
    const std::vector<double> energy = hamiltonian.diagonal();
    std::map<std::vector<std::int64_t>, DegeneracyClass> classes;
    for (std::uint64_t b = 0; b < state.dim(); ++b) {
        const auto w = m.weights_from(table.decode_all(b));
        std::vector<std::int64_t> key;
        key.reserve(probe.size());
        for (const auto &x : probe) {
            key.push_back(static_cast<std::int64_t>(std::llround(m.forward(w, x) * 1e9)));
        }
        const double p = std::norm(state[b]);
        auto [it, inserted] = classes.try_emplace(key);
        auto &c = it->second;
        if (inserted || p > std::norm(state[c.representative])) {
            c.representative = b;
        }
        c.probability += p;
        c.degeneracy += 1;
        c.members.push_back(b);
    }
    std::vector<DegeneracyClass> out;
    out.reserve(classes.size());
    for (auto &[key, c] : classes) {
        c.bits = report_bits(c.representative, n);
        c.weights = table.decode_all(c.representative);
        c.energy = energy[c.representative];
        c.hash = prediction_hash(key);
        out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(), [](const DegeneracyClass &a, const DegeneracyClass &b) {
        if (a.probability != b.probability) {
            return a.probability > b.probability;
        }
        return a.energy < b.energy;
    });
    return out;
}

struct WeightspaceRow {
    std::uint64_t basis = 0;
    std::string bits;
    std::vector<double> weights;
    double loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

/// Exhaustive table over every basis state of the encoding register.
inline std::vector<WeightspaceRow> enumerate_weightspace(const ModelSpec &model, const EncodingTable &table,
                                                         const Dataset &train, const Dataset &test,
                                                         LossKind loss, DecisionRule rule) {
    const std::size_t n = table.total_qubits();
    require(n <= 20, "enumerate_weightspace: more than 2^20 configurations");
    check_labels(train, loss);
    const NumericModel m(model);
    for (const auto &v : m.variable_names()) {
        require(table.contains(v), "enumerate_weightspace: weight '" + v + "' has no encoding");
    }
    std::vector<WeightspaceRow> rows;
    const std::uint64_t count = std::uint64_t{1} << n;
    rows.reserve(count);
    for (std::uint64_t b = 0; b < count; ++b) {
        const auto w = m.weights_from(table.decode_all(b));
        rows.push_back({b, report_bits(b, n), w, numeric_loss(m, w, train, loss),
                        accuracy(m, w, train, rule), accuracy(m, w, test, rule)});
    }
    return rows;
}

struct PoolEntry {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

struct AccuracyCurvePoint {
    std::size_t n = 0;
    double train_mean = 0.0;
    double train_std = 0.0;
    double test_mean = 0.0;
    double test_std = 0.0;
};

/**
 * Best-of-n selection statistics. For each n, each repetition r draws n pool
 * entries (with replacement) from Rng(seed + r), keeps the first entry with
 * the highest training accuracy, and records its train and test accuracy.
 * Mean and population standard deviation are taken over repetitions.
 */
inline std::vector<AccuracyCurvePoint> accuracy_vs_runs(const std::vector<PoolEntry> &pool,
                                                        const std::vector<std::size_t> &n_grid,
                                                        std::size_t repetitions, std::uint64_t seed) {
    require(!pool.empty(), "accuracy_vs_runs: empty pool");
    require(repetitions > 0, "accuracy_vs_runs: repetitions must be positive");
    std::vector<AccuracyCurvePoint> out;
    for (std::size_t n : n_grid) {
        require(n >= 1, "accuracy_vs_runs: n must be >= 1");
        double st = 0.0, st2 = 0.0, se = 0.0, se2 = 0.0;
        for (std::size_t r = 0; r < repetitions; ++r) {
            Rng rng(seed + r);
            const PoolEntry *best = nullptr;
            for (std::size_t i = 0; i < n; ++i) {
                const PoolEntry &e = pool[rng.below(pool.size())];
                if (best == nullptr || e.train_accuracy > best->train_accuracy) {
                    best = &e;
                }
            }
            st += best->train_accuracy;
            st2 += best->train_accuracy * best->train_accuracy;
            se += best->test_accuracy;
            se2 += best->test_accuracy * best->test_accuracy;
        }
        const double k = static_cast<double>(repetitions);
        const auto sd = [k](double s, double s2) { return std::sqrt(std::max(0.0, s2 / k - (s / k) * (s / k))); };
        out.push_back({n, st / k, sd(st, st2), se / k, sd(se, se2)});
    }
    return out;
}

struct TermStats {
    std::size_t loss_terms = 0;
    int loss_degree = 0;
    std::size_t hamiltonian_terms = 0;
    std::size_t hamiltonian_degree = 0;
    std::size_t width = 0;
    int activation_degree = 0;
    std::size_t layers = 0;
    /// M^{d^L}
    double layer_bound = 0.0;
    /// 2^{N_q}
    double diagonal_bound = 0.0;
    bool polynomial_activations = true;

    bool within_bounds() const {
        const auto t = static_cast<double>(hamiltonian_terms);
        return t <= layer_bound && t <= diagonal_bound;
    }
};

/// Term counts of the loss and compiled Hamiltonian against the M^{d^L} and 2^{N_q} bounds.
/// M is the widest fan-in, d the largest activation degree (fan-in for step activations).
inline TermStats term_stats(const ModelSpec &model, const Dataset &data, LossKind loss,
                            const EncodingTable &table) {
    const VarPolynomial l = build_loss(model, data, loss);
    const PauliPolynomial h = compile_hamiltonian(l, table);
    TermStats s;
    s.loss_terms = l.term_count();
    s.loss_degree = l.degree();
    s.hamiltonian_terms = h.num_terms();
    s.hamiltonian_degree = h.degree();
    s.layers = model.layers.size();
    for (const auto &layer : model.layers) {
        s.width = std::max(s.width, layer.fan_in());
        s.activation_degree = std::max(s.activation_degree, activation_degree(layer.activation, layer.fan_in()));
        if (std::holds_alternative<StepMajority>(layer.activation)) {
            s.polynomial_activations = false;
        }
    }
    s.layer_bound = std::pow(static_cast<double>(s.width),
                             std::pow(static_cast<double>(s.activation_degree), static_cast<double>(s.layers)));
    s.diagonal_bound = std::ldexp(1.0, static_cast<int>(table.total_qubits()));
    return s;
}

} // namespace aqc
