#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "datasets.hpp"
#include "error.hpp"
#include "nn.hpp"
#include "random.hpp"

namespace aqc {

/// Continuous relaxation of a step-activation network: each unit is
/// sigma(k (sum_j w_ij z_j - n/2)), and the loss gains penalty * sum w^2 (w - 1)^2.
struct RelaxedModel {
    ModelSpec model;
    double steepness = 10.0;
    double penalty = 1.0;

    explicit RelaxedModel(ModelSpec m, double k = 10.0, double strength = 1.0)
        : model(std::move(m)), steepness(k), penalty(strength) {
        model.validate();
        for (const auto &l : model.layers) {
            require(std::holds_alternative<StepMajority>(l.activation),
                    "RelaxedModel: every layer must use the step activation");
            for (const auto &row : l.weights) {
                for (const auto &e : row) {
                    require(std::holds_alternative<std::string>(e),
                            "RelaxedModel: every weight must be trainable");
                }
            }
        }
        require(model.output_dim() == 1, "RelaxedModel: single output expected");
    }

    std::size_t num_weights() const { return model.variables().size(); }
};

namespace detail {

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Weight index of entry (layer, i, j) in ModelSpec::variables() order
/// (biases are constants here, so weights are contiguous row-major per layer).
struct RelaxedLayout {
    std::vector<std::size_t> offsets;

    explicit RelaxedLayout(const ModelSpec &m) {
        std::size_t off = 0;
        for (const auto &l : m.layers) {
            offsets.push_back(off);
            off += l.fan_out() * l.fan_in();
        }
    }
};

} // namespace detail

/// Relaxed network output for one input.
inline double relaxed_forward(const RelaxedModel &rm, const std::vector<double> &w,
                              const std::vector<double> &x) {
    const detail::RelaxedLayout layout(rm.model);
    std::vector<double> z = x;
    for (std::size_t k = 0; k < rm.model.layers.size(); ++k) {
        const auto &l = rm.model.layers[k];
        const std::size_t n = l.fan_in();
        std::vector<double> next(l.fan_out());
        for (std::size_t i = 0; i < l.fan_out(); ++i) {
            double pre = -0.5 * static_cast<double>(n);
            for (std::size_t j = 0; j < n; ++j) {
                pre += w[layout.offsets[k] + i * n + j] * z[j];
            }
            next[i] = detail::sigmoid(rm.steepness * pre);
        }
        z = std::move(next);
    }
    return z.front();
}

inline double relaxed_penalty(const RelaxedModel &rm, const std::vector<double> &w) {
    double acc = 0.0;
    for (double v : w) {
        acc += v * v * (v - 1.0) * (v - 1.0);
    }
    return rm.penalty * acc;
}

/// sum_a (-1)^{y_a} Y(x_a) + penalty * sum_w w^2 (w - 1)^2.
inline double relaxed_loss(const RelaxedModel &rm, const Dataset &data, const std::vector<double> &w) {
    require(w.size() == rm.num_weights(), "relaxed_loss: weight vector has wrong length");
    double acc = relaxed_penalty(rm, w);
    for (const auto &s : data) {
        acc += (s.label == 1 ? -1.0 : 1.0) * relaxed_forward(rm, w, s.features);
    }
    return acc;
}

/// Analytic gradient of relaxed_loss by backpropagation.
inline std::vector<double> gradient(const RelaxedModel &rm, const Dataset &data, const std::vector<double> &w) {
    require(w.size() == rm.num_weights(), "gradient: weight vector has wrong length");
    const detail::RelaxedLayout layout(rm.model);
    const auto &layers = rm.model.layers;
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        g[i] = rm.penalty * 2.0 * w[i] * (w[i] - 1.0) * (2.0 * w[i] - 1.0);
    }
    for (const auto &s : data) {
        // Forward, keeping each layer's input and output.
        std::vector<std::vector<double>> acts{s.features};
        for (std::size_t k = 0; k < layers.size(); ++k) {
            const auto &l = layers[k];
            const auto &z = acts.back();
            const std::size_t n = l.fan_in();
            std::vector<double> next(l.fan_out());
            for (std::size_t i = 0; i < l.fan_out(); ++i) {
                double pre = -0.5 * static_cast<double>(n);
                for (std::size_t j = 0; j < n; ++j) {
                    pre += w[layout.offsets[k] + i * n + j] * z[j];
                }
                next[i] = detail::sigmoid(rm.steepness * pre);
            }
            acts.push_back(std::move(next));
        }
        // Backward: delta holds dL/d(output) of the current layer.
        std::vector<double> delta{s.label == 1 ? -1.0 : 1.0};
        for (std::size_t k = layers.size(); k-- > 0;) {
            const auto &l = layers[k];
            const std::size_t n = l.fan_in();
            const auto &in = acts[k];
            const auto &out = acts[k + 1];
            std::vector<double> prev(n, 0.0);
            for (std::size_t i = 0; i < l.fan_out(); ++i) {
                const double dpre = delta[i] * rm.steepness * out[i] * (1.0 - out[i]);
                for (std::size_t j = 0; j < n; ++j) {
                    const std::size_t idx = layout.offsets[k] + i * n + j;
                    g[idx] += dpre * in[j];
                    prev[j] += dpre * w[idx];
                }
            }
            delta = std::move(prev);
        }
    }
    return g;
}

struct AdamConfig {
    double learning_rate = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t steps = 500;
};

struct AdamState {
    AdamConfig config;
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;

    AdamState(AdamConfig c, std::size_t n) : config(c), m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place.
inline void adam_step(AdamState &state, std::vector<double> &w, const std::vector<double> &g) {
    require(w.size() == g.size() && w.size() == state.m.size(), "adam_step: size mismatch");
    const auto &c = state.config;
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double b1t = 1.0 - std::pow(c.beta1, t);
    const double b2t = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < w.size(); ++i) {
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g[i];
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g[i] * g[i];
        const double mhat = state.m[i] / b1t;
        const double vhat = state.v[i] / b2t;
        w[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
    }
}

struct TrainResult {
    std::uint64_t seed = 0;
    std::vector<double> relaxed;
    std::vector<double> binary;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

/// Init U[0, 1) from seed, run the Adam budget, round at 1/2.
inline TrainResult train_run(const RelaxedModel &rm, const Dataset &train, const Dataset &test,
                             std::uint64_t seed, const AdamConfig &config = {}) {
    Rng rng(seed);
    std::vector<double> w(rm.num_weights());
    for (auto &v : w) {
        v = rng.uniform();
    }
    AdamState state(config, w.size());
    for (std::size_t step = 0; step < config.steps; ++step) {
        const auto g = gradient(rm, train, w);
        for (double v : g) {
            if (!std::isfinite(v)) {
                throw Error("train_run: non-finite gradient at step " + std::to_string(step) +
                            " (seed " + std::to_string(seed) + ")");
            }
        }
        adam_step(state, w, g);
    }
    TrainResult r;
    r.seed = seed;
    r.relaxed = w;
    r.binary.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        r.binary[i] = w[i] >= 0.5 ? 1.0 : 0.0;
    }
    const NumericModel m(rm.model);
    r.train_accuracy = accuracy(m, r.binary, train, DecisionRule::binary);
    r.test_accuracy = accuracy(m, r.binary, test, DecisionRule::binary);
    return r;
}

/// Runs with seeds base_seed, base_seed + 1, ...
inline std::vector<TrainResult> classical_pool(const RelaxedModel &rm, const Dataset &train,
                                               const Dataset &test, std::size_t runs,
                                               std::uint64_t base_seed, const AdamConfig &config = {}) {
    std::vector<TrainResult> out;
    out.reserve(runs);
    for (std::size_t i = 0; i < runs; ++i) {
        out.push_back(train_run(rm, train, test, base_seed + i, config));
    }
    return out;
}

inline std::vector<PoolEntry> to_pool(const std::vector<TrainResult> &runs) {
    std::vector<PoolEntry> out;
    out.reserve(runs.size());
    for (const auto &r : runs) {
        out.push_back({r.train_accuracy, r.test_accuracy});
    }
    return out;
}

/// seed, one column per weight, train_acc, test_acc.
inline std::string pool_csv(const std::vector<TrainResult> &runs, const std::vector<std::string> &names) {
    std::ostringstream os;
    os.precision(17);
    os << "seed";
    for (const auto &n : names) {
        os << "," << n;
    }
    os << ",train_acc,test_acc\n";
    for (const auto &r : runs) {
        os << r.seed;
        for (double b : r.binary) {
            os << "," << static_cast<int>(b);
        }
        os << "," << r.train_accuracy << "," << r.test_accuracy << "\n";
    }
    return os.str();
}

} // namespace aqc
