#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adiabatic.hpp"
#include "classical.hpp"
#include "datasets.hpp"
#include "encodings.hpp"
#include "error.hpp"
#include "matrix_method.hpp"
#include "nn.hpp"
#include "pauli.hpp"
#include "var_polynomial.hpp"

namespace aqc {

using json = nlohmann::json;

/// Largest register for Pauli-spin state-vector runs.
inline constexpr std::size_t kPauliSpinCap = 20;
/// Split seed used for the 2x2-pixel experiments unless a config overrides it.
inline constexpr std::uint64_t kDefaultSplitSeed = 0;

struct ExperimentInfo {
    std::string kind;
    std::string description;
};

inline const std::vector<ExperimentInfo> &experiment_kinds() {
    static const std::vector<ExperimentInfo> kinds = {
        {"tunnel", "real-time evolution of a Gaussian packet in a matrix-method potential"},
        {"anneal-matrix", "adiabatic sweep from the kinetic Hamiltonian to kinetic + V (momentum basis)"},
        {"anneal-paulispin", "adiabatic sweep from the transverse field to a fractional-binary encoded V(w)"},
        {"nn-toy", "adiabatic training of the 6-weight toy network on the circle or band data"},
        {"nn-binary", "adiabatic training of the 10-weight binary network on 2x2 pixel images"},
        {"spectrum", "lowest instantaneous eigenvalues of H_A(s) along the sweep"},
        {"mass-scan", "ground-state peak density against mass, with a power-law fit"},
        {"classical-pool", "sigmoid-relaxed binary network trained with Adam over many seeds"},
        {"accuracy-curves", "best-of-n train/test accuracy for quantum and classical pools"},
        {"enumerate", "exhaustive loss and accuracy table over every weight configuration"},
    };
    return kinds;
}

inline std::string fnv1a_hex(const std::string &text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> band_prob;
};

struct ValidatedConfig {
    json effective;
    std::vector<std::string> notes;

    std::string kind() const { return effective.at("kind").get<std::string>(); }
    std::string hash() const { return fnv1a_hex(effective.dump()); }
};

namespace detail {

/// Reads keys from a raw config object, fills defaults into the effective
/// config and records a note for every default, and rejects unknown keys.
class ConfigReader {
  public:
    ConfigReader(const json &raw, std::string where, std::vector<std::string> &notes)
        : raw_(raw), where_(std::move(where)), notes_(notes) {
        require(raw_.is_object(), where_ + ": expected a JSON object");
    }

    bool has(const std::string &key) const { return raw_.contains(key); }

    template <class T> T get(const std::string &key, const T &fallback) {
        seen_.insert(key);
        if (!raw_.contains(key)) {
            out_[key] = fallback;
            notes_.push_back(where_ + "." + key + " defaulted to " + json(fallback).dump());
            return fallback;
        }
        return take<T>(key);
    }

    template <class T> T need(const std::string &key) {
        seen_.insert(key);
        require(raw_.contains(key), where_ + ": missing required key '" + key + "'");
        return take<T>(key);
    }

    const json &raw(const std::string &key) {
        seen_.insert(key);
        return raw_.at(key);
    }

    void put(const std::string &key, json value) { out_[key] = std::move(value); }

    json finish() {
        for (const auto &[k, v] : raw_.items()) {
            require(seen_.count(k) != 0, where_ + ": unknown key '" + k + "'");
        }
        return out_;
    }

  private:
    template <class T> T take(const std::string &key) {
        try {
            T v = raw_.at(key).get<T>();
            out_[key] = v;
            return v;
        } catch (const json::exception &e) {
            throw Error(where_ + "." + key + ": wrong type (" + e.what() + ")");
        }
    }

    const json &raw_;
    std::string where_;
    std::vector<std::string> &notes_;
    std::set<std::string> seen_;
    json out_ = json::object();
};

inline void positive(double v, const std::string &what) {
    require(std::isfinite(v) && v > 0.0, what + " must be positive and finite");
}

inline json read_potential(const json &raw, const std::string &where, std::vector<std::string> &notes,
                           const std::string &fallback_type, double fallback_lambda) {
    json in = raw;
    if (in.is_string()) {
        in = json{{"type", in}};
    }
    ConfigReader r(in, where, notes);
    const auto type = r.get<std::string>("type", fallback_type);
    if (type == "cosine") {
    } else if (type == "quartic") {
        const double lambda = r.get<double>("lambda", fallback_lambda);
        positive(lambda, where + ".lambda");
    } else if (type == "tilted_cosine") {
        const double eps = r.get<double>("epsilon", 0.02);
        require(std::isfinite(eps), where + ".epsilon must be finite");
    } else if (type == "polynomial") {
        const auto expr = r.need<std::string>("expression");
        const auto p = VarPolynomial::parse(expr);
        require(p.variables().size() <= 1, where + ".expression must use at most one variable");
    } else if (type == "tabulated") {
        const auto s = r.need<std::vector<double>>("samples");
        require(s.size() >= 2, where + ".samples needs at least two values");
    } else {
        throw Error(where + ".type: unknown potential '" + type + "'");
    }
    return r.finish();
}

inline PotentialSpec make_potential(const json &p) {
    const auto type = p.at("type").get<std::string>();
    if (type == "cosine") {
        return CosinePotential{};
    }
    if (type == "quartic") {
        return QuarticPotential{p.at("lambda").get<double>()};
    }
    if (type == "tilted_cosine") {
        return TiltedCosinePotential{p.at("epsilon").get<double>()};
    }
    if (type == "polynomial") {
        return PolynomialPotential{VarPolynomial::parse(p.at("expression").get<std::string>())};
    }
    return TabulatedPotential{p.at("samples").get<std::vector<double>>()};
}

/// Potential as a polynomial in `w`, for Pauli-spin encoding.
inline VarPolynomial potential_polynomial(const json &p) {
    const auto type = p.at("type").get<std::string>();
    if (type == "quartic") {
        return quartic_polynomial(p.at("lambda").get<double>(), "w");
    }
    if (type == "polynomial") {
        VarPolynomial v = VarPolynomial::parse(p.at("expression").get<std::string>());
        const auto vars = v.variables();
        if (!vars.empty() && *vars.begin() != "w") {
            v = v.compose({{*vars.begin(), VarPolynomial::variable("w")}});
        }
        return v;
    }
    throw Error("anneal-paulispin: potential must be 'quartic' or 'polynomial'");
}

inline double curvature(const PotentialSpec &v, double w) {
    const double h = 1e-4;
    return (evaluate_potential(v, w + h) - 2.0 * evaluate_potential(v, w) + evaluate_potential(v, w - h)) /
           (h * h);
}

inline Propagation read_propagation(const std::string &s) {
    if (s == "trotter") {
        return Propagation::trotter;
    }
    require(s == "dense_exact", "propagation must be 'trotter' or 'dense_exact'");
    return Propagation::dense_exact;
}

inline void check_dense_register(std::size_t n, std::size_t cap, const std::string &what) {
    require(n >= 1, what + ": num_qubits must be >= 1");
    require(n <= cap, what + ": num_qubits = " + std::to_string(n) + " exceeds the dense cap of " +
                          std::to_string(cap) + " qubits");
}

inline std::string csv_header(const std::string &hash) { return "# config_hash=" + hash + "\n"; }

inline std::ostringstream csv_stream() {
    std::ostringstream os;
    os.precision(12);
    return os;
}

inline ModelSpec parse_model(const json &j) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "toy") {
            return toy_model();
        }
        if (name == "binary") {
            return binary_model();
        }
        throw Error("model: unknown preset '" + name + "'");
    }
    ModelSpec m;
    for (const auto &lj : j.at("layers")) {
        LayerSpec l;
        const auto entry = [](const json &e) -> ParamEntry {
            if (e.is_string()) {
                return e.get<std::string>();
            }
            require(e.is_number(), "model: weight entries must be names or numbers");
            return e.get<double>();
        };
        for (const auto &row : lj.at("weights")) {
            std::vector<ParamEntry> r;
            for (const auto &e : row) {
                r.push_back(entry(e));
            }
            l.weights.push_back(std::move(r));
        }
        for (const auto &b : lj.at("biases")) {
            l.biases.push_back(entry(b));
        }
        const auto &a = lj.at("activation");
        if (a.is_object()) {
            l.activation = PolynomialActivation{a.at("polynomial").get<std::vector<double>>()};
        } else {
            const auto s = a.get<std::string>();
            if (s == "identity") {
                l.activation = IdentityActivation{};
            } else if (s == "square") {
                l.activation = SquareActivation{};
            } else if (s == "step") {
                l.activation = StepMajority{};
            } else {
                throw Error("model: unknown activation '" + s + "'");
            }
        }
        m.layers.push_back(std::move(l));
    }
    m.validate();
    return m;
}

inline EncodingTable parse_encoding(const json &j, const ModelSpec &model) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        require(s == "spin_pm1" || s == "binary01", "encoding must be 'spin_pm1', 'binary01' or a table");
        return EncodingTable::one_qubit_each(model.variables(), s == "spin_pm1");
    }
    return EncodingTable::from_json(j);
}

inline LossKind parse_loss(const std::string &s) {
    if (s == "mse") {
        return LossKind::mean_squared_error;
    }
    require(s == "linear_binary", "loss must be 'mse' or 'linear_binary'");
    return LossKind::linear_binary;
}

inline DecisionRule parse_decision(const std::string &s) {
    if (s == "sign") {
        return DecisionRule::sign;
    }
    require(s == "binary", "decision must be 'sign' or 'binary'");
    return DecisionRule::binary;
}

inline BandProbability parse_band(const std::string &s) {
    if (s == "min") {
        return BandProbability::min;
    }
    require(s == "max", "band_prob must be 'min' or 'max'");
    return BandProbability::max;
}

struct NnSetup {
    ModelSpec model;
    EncodingTable table;
    LossKind loss = LossKind::mean_squared_error;
    DecisionRule rule = DecisionRule::sign;
    Dataset train;
    Dataset test;
    std::vector<std::vector<double>> probe;
    std::vector<std::string> feature_names;
};

/// Reads the model/dataset block shared by nn-*, enumerate and the pool kinds.
inline void read_nn_block(ConfigReader &r, const std::string &kind, const Overrides &ov,
                          std::vector<std::string> &notes) {
    const bool toy_default = kind == "nn-toy";
    const auto dataset = r.get<std::string>("dataset", toy_default ? "circle" : "pixels");
    require(dataset == "circle" || dataset == "band" || dataset == "pixels",
            kind + ".dataset must be 'circle', 'band' or 'pixels'");
    const bool pixels = dataset == "pixels";
    r.get<std::uint64_t>("seed", pixels ? kDefaultSplitSeed : 0);
    if (ov.seed) {
        r.put("seed", *ov.seed);
        notes.push_back(kind + ".seed set to " + std::to_string(*ov.seed) + " from the command line");
    }
    if (!pixels) {
        require(r.get<std::size_t>("n_samples", 1000) >= 1, kind + ".n_samples must be >= 1");
    }
    if (dataset == "band") {
        parse_band(r.get<std::string>("band_prob", "min"));
        if (ov.band_prob) {
            parse_band(*ov.band_prob);
            r.put("band_prob", *ov.band_prob);
            notes.push_back(kind + ".band_prob set to '" + *ov.band_prob + "' from the command line");
        }
    } else if (ov.band_prob) {
        notes.push_back(kind + ": --band-prob ignored (dataset is '" + dataset + "')");
    }
    const json model = r.get<json>("model", json(pixels ? "binary" : "toy"));
    const ModelSpec m = parse_model(model);
    const EncodingTable t = parse_encoding(r.get<json>("encoding", json(pixels ? "binary01" : "spin_pm1")), m);
    t.check_complete();
    for (const auto &name : m.variables()) {
        require(t.contains(name), kind + ": weight '" + name + "' has no encoding");
    }
    require(t.total_qubits() <= kPauliSpinCap,
            kind + ": weight register of " + std::to_string(t.total_qubits()) + " qubits exceeds the cap of " +
                std::to_string(kPauliSpinCap));
    parse_loss(r.get<std::string>("loss", pixels ? "linear_binary" : "mse"));
    parse_decision(r.get<std::string>("decision", pixels ? "binary" : "sign"));
}

inline NnSetup make_nn_setup(const json &c) {
    NnSetup s;
    s.model = parse_model(c.at("model"));
    s.table = parse_encoding(c.at("encoding"), s.model);
    s.loss = parse_loss(c.at("loss").get<std::string>());
    s.rule = parse_decision(c.at("decision").get<std::string>());
    const auto dataset = c.at("dataset").get<std::string>();
    const auto seed = c.at("seed").get<std::uint64_t>();
    if (dataset == "pixels") {
        const Split sp = balanced_split(seed);
        s.train = sp.train;
        s.test = sp.test;
        s.feature_names = {"p00", "p01", "p10", "p11"};
        for (const auto &img : pixel2x2_dataset()) {
            s.probe.push_back(img.features);
        }
    } else {
        const auto n = c.at("n_samples").get<std::size_t>();
        s.train = dataset == "circle"
                      ? circle_dataset(n, seed)
                      : band_dataset(n, seed, parse_band(c.at("band_prob").get<std::string>()));
        s.feature_names = {"x1", "x2"};
        for (const auto &smp : s.train) {
            s.probe.push_back(smp.features);
        }
        for (auto &g : square_probe_grid()) {
            s.probe.push_back(std::move(g));
        }
    }
    require(s.model.input_dim() == s.feature_names.size(),
            "model input dimension does not match the dataset features");
    return s;
}

inline Propagation read_schedule_block(ConfigReader &r, const std::string &kind, double t_final,
                                       std::size_t n_steps, std::size_t substeps, const std::string &propagation) {
    positive(r.get<double>("t_final", t_final), kind + ".t_final");
    require(r.get<std::size_t>("n_steps", n_steps) >= 1, kind + ".n_steps must be >= 1");
    require(r.get<std::size_t>("substeps_per_step", substeps) >= 1, kind + ".substeps_per_step must be >= 1");
    return read_propagation(r.get<std::string>("propagation", propagation));
}

inline void read_adam_block(ConfigReader &r, const std::string &kind) {
    positive(r.get<double>("learning_rate", 0.05), kind + ".learning_rate");
    r.get<double>("beta1", 0.9);
    r.get<double>("beta2", 0.999);
    positive(r.get<double>("adam_epsilon", 1e-8), kind + ".adam_epsilon");
    r.get<std::size_t>("adam_steps", 500);
    positive(r.get<double>("steepness", 10.0), kind + ".steepness");
    r.get<double>("penalty", 1.0);
}

inline AdamConfig make_adam(const json &c) {
    AdamConfig a;
    a.learning_rate = c.at("learning_rate").get<double>();
    a.beta1 = c.at("beta1").get<double>();
    a.beta2 = c.at("beta2").get<double>();
    a.epsilon = c.at("adam_epsilon").get<double>();
    a.steps = c.at("adam_steps").get<std::size_t>();
    return a;
}

inline AnnealSpec make_nn_anneal(const json &c, const PauliPolynomial &h) {
    AnnealSpec spec;
    spec.h0 = transverse_h0(h.num_qubits());
    spec.h = h;
    spec.schedule = LinearSchedule{c.at("t_final").get<double>()};
    spec.n_steps = c.at("n_steps").get<std::size_t>();
    spec.substeps_per_step = c.at("substeps_per_step").get<std::size_t>();
    spec.propagation = read_propagation(c.at("propagation").get<std::string>());
    return spec;
}

} // namespace detail

/// Schema check and default filling; no experiment work beyond cheap setup.
inline ValidatedConfig validate_config(const json &raw, const Overrides &ov = {}) {
    ValidatedConfig v;
    require(raw.is_object(), "config: expected a JSON object");
    require(raw.contains("kind"), "config: missing 'kind'");
    const auto kind = raw.at("kind").get<std::string>();
    const auto &kinds = experiment_kinds();
    require(std::any_of(kinds.begin(), kinds.end(), [&](const ExperimentInfo &k) { return k.kind == kind; }),
            "config: unknown kind '" + kind + "'");
    detail::ConfigReader r(raw, kind, v.notes);
    r.need<std::string>("kind");
    r.get<std::string>("name", kind);

    const auto seed_field = [&](std::uint64_t fallback) {
        r.get<std::uint64_t>("seed", ov.seed.value_or(fallback));
        if (ov.seed) {
            r.put("seed", *ov.seed);
            v.notes.push_back(kind + ".seed set to " + std::to_string(*ov.seed) + " from the command line");
        }
    };

    if (kind == "tunnel") {
        seed_field(0);
        const json pot = detail::read_potential(r.has("potential") ? r.raw("potential") : json("cosine"),
                                                kind + ".potential", v.notes, "cosine", 4.0);
        r.put("potential", pot);
        const double mass = r.get<double>("mass", 10.0);
        detail::positive(mass, "tunnel.mass");
        const auto n = r.get<std::size_t>("num_qubits", 5);
        detail::check_dense_register(n, kDenseEvolutionCap, "tunnel");
        const double center = r.get<double>("center", 0.25);
        const PotentialSpec v_spec = detail::make_potential(pot);
        const double k2 = detail::curvature(v_spec, center);
        require(k2 > 0.0, "tunnel.center is not at a potential minimum (curvature <= 0)");
        const double alpha = r.get<double>("alpha", sho_alpha(k2, mass));
        detail::positive(alpha, "tunnel.alpha");
        require(std::exp(-alpha) <= 1e-6, "tunnel.alpha: packet too wide (periodic-image overlap above 1e-6)");
        double period = 1.0;
        {
            const auto eig = HermitianEigen(build_hamiltonian({v_spec, mass, MomentumTruncation{n}}));
            const double gap = eig.energies[1] - eig.energies[0];
            period = gap > 1e-12 ? 2.0 * std::numbers::pi / gap : 1.0;
        }
        const double t_total = r.get<double>("t_total", period);
        detail::positive(t_total, "tunnel.t_total");
        detail::positive(r.get<double>("dt", t_total / 200.0), "tunnel.dt");
        r.get<std::size_t>("stride", 4);
        require(r.get<std::size_t>("grid", kDensityGrid) >= 2, "tunnel.grid must be >= 2");
    } else if (kind == "anneal-matrix") {
        seed_field(0);
        const json pot = detail::read_potential(r.has("potential") ? r.raw("potential") : json("cosine"),
                                                kind + ".potential", v.notes, "cosine", 4.0);
        r.put("potential", pot);
        detail::positive(r.get<double>("mass", 100.0), "anneal-matrix.mass");
        detail::check_dense_register(r.get<std::size_t>("num_qubits", 5), kDenseEvolutionCap, "anneal-matrix");
        require(detail::read_schedule_block(r, kind, 400.0, 1000, 1, "dense_exact") == Propagation::dense_exact,
                "anneal-matrix: only dense_exact propagation applies to momentum-basis Hamiltonians");
        r.get<std::size_t>("snapshot_stride", 100);
        require(r.get<std::size_t>("grid", kDensityGrid) >= 2, "anneal-matrix.grid must be >= 2");
        r.get<double>("window_half_width", 0.1);
    } else if (kind == "anneal-paulispin") {
        seed_field(0);
        const json pot = detail::read_potential(r.has("potential") ? r.raw("potential") : json("quartic"),
                                                kind + ".potential", v.notes, "quartic", 10.0);
        r.put("potential", pot);
        detail::potential_polynomial(pot);
        const auto n = r.get<std::size_t>("num_qubits", 7);
        require(n >= 1 && n <= kPauliSpinCap, "anneal-paulispin: num_qubits = " + std::to_string(n) +
                                                  " outside [1, " + std::to_string(kPauliSpinCap) + "]");
        if (detail::read_schedule_block(r, kind, 50.0, 500, 1, "trotter") == Propagation::dense_exact) {
            detail::check_dense_register(n, kDenseEvolutionCap, "anneal-paulispin");
        }
        r.get<std::size_t>("shots", 0);
    } else if (kind == "spectrum") {
        seed_field(0);
        const auto problem = r.get<std::string>("problem", "paulispin");
        require(problem == "paulispin" || problem == "matrix", "spectrum.problem must be 'paulispin' or 'matrix'");
        const bool ps = problem == "paulispin";
        const json pot = detail::read_potential(r.has("potential") ? r.raw("potential") : json(ps ? "quartic" : "cosine"),
                                                kind + ".potential", v.notes, ps ? "quartic" : "cosine", 10.0);
        r.put("potential", pot);
        if (ps) {
            detail::potential_polynomial(pot);
        } else {
            detail::positive(r.get<double>("mass", 100.0), "spectrum.mass");
        }
        detail::check_dense_register(r.get<std::size_t>("num_qubits", ps ? 7 : 5), kDenseQubitCap, "spectrum");
        require(r.get<std::size_t>("s_points", 101) >= 2, "spectrum.s_points must be >= 2");
        require(r.get<std::size_t>("k_lowest", 4) >= 2, "spectrum.k_lowest must be >= 2");
    } else if (kind == "mass-scan") {
        seed_field(0);
        const json pot = detail::read_potential(r.has("potential") ? r.raw("potential") : json("cosine"),
                                                kind + ".potential", v.notes, "cosine", 4.0);
        r.put("potential", pot);
        const auto masses = r.get<std::vector<double>>("masses", {25.0, 100.0, 400.0});
        require(masses.size() >= 2, "mass-scan.masses needs at least two values");
        for (double m : masses) {
            detail::positive(m, "mass-scan.masses entry");
        }
        detail::check_dense_register(r.get<std::size_t>("num_qubits", 5), kDenseQubitCap, "mass-scan");
        require(r.get<std::size_t>("grid", kDensityGrid) >= 2, "mass-scan.grid must be >= 2");
    } else if (kind == "nn-toy" || kind == "nn-binary" || kind == "enumerate") {
        detail::read_nn_block(r, kind, ov, v.notes);
        if (kind != "enumerate") {
            detail::read_schedule_block(r, kind, 10.0, 10, 64, "trotter");
            r.get<std::size_t>("top_classes", 10);
        }
    } else if (kind == "classical-pool") {
        detail::read_nn_block(r, kind, ov, v.notes);
        require(r.get<std::size_t>("runs", 1000) >= 1, "classical-pool.runs must be >= 1");
        detail::read_adam_block(r, kind);
    } else if (kind == "accuracy-curves") {
        detail::read_nn_block(r, kind, ov, v.notes);
        detail::read_schedule_block(r, kind, 10.0, 10, 64, "trotter");
        detail::read_adam_block(r, kind);
        require(r.get<std::size_t>("pool_size", 1000) >= 1, "accuracy-curves.pool_size must be >= 1");
        require(r.get<std::size_t>("repetitions", 1000) >= 1, "accuracy-curves.repetitions must be >= 1");
        require(r.get<std::size_t>("n_max", 20) >= 1, "accuracy-curves.n_max must be >= 1");
        r.get<std::uint64_t>("sample_seed", 0);
        r.get<std::uint64_t>("classical_seed", 1000);
    }
    v.effective = r.finish();
    if (kind == "classical-pool" || kind == "accuracy-curves") {
        const RelaxedModel relaxed(detail::parse_model(v.effective.at("model")));
        require(relaxed.model.output_dim() == 1 && v.effective.at("loss") == "linear_binary",
                kind + ": the relaxed classical model uses the linear-binary loss");
    }
    return v;
}

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunResult {
    json summary;
    std::vector<OutputFile> files;
};

namespace detail {

inline void density_rows(std::ostringstream &os, double t, const PositionDensity &d) {
    for (std::size_t j = 0; j < d.w.size(); ++j) {
        os << t << "," << d.w[j] << "," << d.rho[j] << "\n";
    }
}

inline void check_finite(double v, const std::string &what) {
    require(std::isfinite(v), "non-finite numerics in " + what);
}

inline RunResult run_tunnel(const json &c, const std::string &hash) {
    const PotentialSpec pot = make_potential(c.at("potential"));
    const MomentumTruncation tr{c.at("num_qubits").get<std::size_t>()};
    const double mass = c.at("mass").get<double>();
    const double center = c.at("center").get<double>();
    const auto grid = c.at("grid").get<std::size_t>();
    const DenseMatrix h = build_hamiltonian({pot, mass, tr});
    const StateVector psi0 = gaussian_packet(center, c.at("alpha").get<double>(), tr);
    const auto snaps = evolve_real_time(h, psi0, c.at("t_total").get<double>(), c.at("dt").get<double>(),
                                        c.at("stride").get<std::size_t>());
    auto dens = csv_stream();
    auto mass_csv = csv_stream();
    dens << csv_header(hash) << "t,w,rho\n";
    mass_csv << csv_header(hash) << "t,mass_left,mass_right\n";
    const bool start_left = center < 0.5;
    double best_far = 0.0;
    double best_far_t = 0.0;
    double max_drift = 0.0;
    for (const auto &s : snaps) {
        const auto d = momentum_to_position(s.state, tr, grid);
        density_rows(dens, s.t, d);
        const double left = d.trapezoid([](double w) { return w < 0.5 ? 1.0 : 0.0; });
        const double right = 1.0 - left;
        mass_csv << s.t << "," << left << "," << right << "\n";
        const double far = start_left ? right : left;
        if (far > best_far) {
            best_far = far;
            best_far_t = s.t;
        }
        max_drift = std::max(max_drift, std::abs(s.state.norm() - 1.0));
    }
    const auto final_d = momentum_to_position(snaps.back().state, tr, grid);
    const double final_left = final_d.trapezoid([](double w) { return w < 0.5 ? 1.0 : 0.0; });
    json summary = {{"max_far_side_mass", best_far},
                    {"time_of_max_far_side_mass", best_far_t},
                    {"final_mass_left", final_left},
                    {"final_mass_right", 1.0 - final_left},
                    {"max_norm_drift", max_drift},
                    {"snapshots", snaps.size()}};
    return {summary, {{"density.csv", dens.str()}, {"masses.csv", mass_csv.str()}}};
}

inline RunResult run_anneal_matrix(const json &c, const std::string &hash) {
    const PotentialSpec pot = make_potential(c.at("potential"));
    const MomentumTruncation tr{c.at("num_qubits").get<std::size_t>()};
    const double mass = c.at("mass").get<double>();
    const auto grid = c.at("grid").get<std::size_t>();
    AnnealSpec spec;
    spec.h0 = kinetic_hamiltonian(mass, tr);
    const DenseMatrix h = build_hamiltonian({pot, mass, tr});
    spec.h = h;
    spec.schedule = LinearSchedule{c.at("t_final").get<double>()};
    spec.n_steps = c.at("n_steps").get<std::size_t>();
    spec.substeps_per_step = c.at("substeps_per_step").get<std::size_t>();
    spec.snapshot_stride = c.at("snapshot_stride").get<std::size_t>();
    spec.propagation = Propagation::dense_exact;
    const auto result = evolve_adiabatic(spec, zero_mode_state(tr));
    auto dens = csv_stream();
    dens << csv_header(hash) << "t,w,rho\n";
    for (const auto &s : result.snapshots) {
        density_rows(dens, s.t, momentum_to_position(s.state, tr, grid));
    }
    const auto gs = ground_state(h);
    const auto final_d = momentum_to_position(result.final_state, tr, grid);
    const auto ground_d = momentum_to_position(gs.amplitudes, tr, grid);
    auto fin = csv_stream();
    fin << csv_header(hash) << "w,rho_final,rho_ground\n";
    for (std::size_t j = 0; j < final_d.w.size(); ++j) {
        fin << final_d.w[j] << "," << final_d.rho[j] << "," << ground_d.rho[j] << "\n";
    }
    const double hw = c.at("window_half_width").get<double>();
    const auto [wl, pl] = final_d.peak_near(0.25, hw);
    const auto [wr, pr] = final_d.peak_near(0.75, hw);
    const double energy = dense_expectation(h, result.final_state);
    check_finite(energy, "anneal-matrix final energy");
    json summary = {{"ground_energy", gs.energy},
                    {"final_energy", energy},
                    {"ground_state_fidelity", result.final_state.fidelity(gs.amplitudes)},
                    {"peak_left", {{"w", wl}, {"rho", pl}}},
                    {"peak_right", {{"w", wr}, {"rho", pr}}},
                    {"peak_relative_difference", std::abs(pl - pr) / std::max(pl, pr)},
                    {"mass_near_0.25", final_d.window_mass(0.25, hw)},
                    {"mass_near_0.75", final_d.window_mass(0.75, hw)},
                    {"ground_mass_near_0.25", ground_d.window_mass(0.25, hw)}};
    return {summary, {{"density.csv", dens.str()}, {"final_density.csv", fin.str()}}};
}

inline PauliPolynomial paulispin_hamiltonian(const json &c, EncodingTable &table) {
    const auto n = c.at("num_qubits").get<std::size_t>();
    table.add("w", FractionalBinary{static_cast<unsigned>(n), 0});
    return substitute_encodings(potential_polynomial(c.at("potential")), table);
}

inline RunResult run_anneal_paulispin(const json &c, const std::string &hash) {
    EncodingTable table;
    const PauliPolynomial h = paulispin_hamiltonian(c, table);
    const std::size_t n = h.num_qubits();
    AnnealSpec spec;
    spec.h0 = transverse_h0(n);
    spec.h = h;
    spec.schedule = LinearSchedule{c.at("t_final").get<double>()};
    spec.n_steps = c.at("n_steps").get<std::size_t>();
    spec.substeps_per_step = c.at("substeps_per_step").get<std::size_t>();
    spec.propagation = read_propagation(c.at("propagation").get<std::string>());
    const auto result = evolve_adiabatic(spec, initial_state(n));
    const auto hist = measure_histogram(result.final_state, table);
    const auto energy = h.diagonal();
    std::size_t arg = 0;
    std::size_t ground = 0;
    double mean_energy = 0.0;
    for (std::size_t b = 0; b < hist.size(); ++b) {
        if (hist[b].probability > hist[arg].probability) {
            arg = b;
        }
        if (energy[b] < energy[ground]) {
            ground = b;
        }
        mean_energy += hist[b].probability * energy[b];
    }
    check_finite(mean_energy, "anneal-paulispin final energy");
    auto csv = csv_stream();
    csv << csv_header(hash) << "bits,w,probability,energy\n";
    for (std::size_t b = 0; b < hist.size(); ++b) {
        csv << hist[b].bits << "," << hist[b].values[0] << "," << hist[b].probability << "," << energy[b] << "\n";
    }
    std::vector<OutputFile> files{{"histogram.json", histogram_json(hist).dump(2) + "\n"},
                                  {"histogram.csv", csv.str()}};
    const auto shots = c.at("shots").get<std::size_t>();
    if (shots > 0) {
        std::map<std::string, std::size_t> counts;
        for (auto o : sample_outcomes(result.final_state, shots, c.at("seed").get<std::uint64_t>())) {
            counts[report_bits(o, n)] += 1;
        }
        files.push_back({"samples.json", json(counts).dump(2) + "\n"});
    }
    const double width = std::ldexp(1.0, -static_cast<int>(n));
    json summary = {{"argmax_bits", hist[arg].bits},
                    {"argmax_w", hist[arg].values[0]},
                    {"argmax_probability", hist[arg].probability},
                    {"bin_width", width},
                    {"ground_bits", hist[ground].bits},
                    {"ground_w", hist[ground].values[0]},
                    {"ground_energy", energy[ground]},
                    {"ground_probability", hist[ground].probability},
                    {"final_energy", mean_energy}};
    return {summary, files};
}

inline RunResult run_spectrum(const json &c, const std::string &hash) {
    const auto n = c.at("num_qubits").get<std::size_t>();
    AnnealSpec spec;
    if (c.at("problem") == "paulispin") {
        EncodingTable table;
        const PauliPolynomial h = paulispin_hamiltonian(c, table);
        spec.h0 = transverse_h0(n);
        spec.h = h;
    } else {
        const MomentumTruncation tr{n};
        const double mass = c.at("mass").get<double>();
        spec.h0 = kinetic_hamiltonian(mass, tr);
        spec.h = build_hamiltonian({make_potential(c.at("potential")), mass, tr});
    }
    const auto points = c.at("s_points").get<std::size_t>();
    std::vector<double> s_grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        s_grid[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    }
    const auto k = c.at("k_lowest").get<std::size_t>();
    const auto spectra = instantaneous_spectrum(spec, s_grid, k);
    auto csv = csv_stream();
    csv << csv_header(hash) << "s";
    for (std::size_t i = 0; i < spectra.front().size(); ++i) {
        csv << ",E" << i;
    }
    csv << "\n";
    double min_gap = std::numeric_limits<double>::infinity();
    double min_gap_s = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        csv << s_grid[i];
        for (double e : spectra[i]) {
            csv << "," << e;
        }
        csv << "\n";
        const double gap = spectra[i][1] - spectra[i][0];
        if (gap < min_gap) {
            min_gap = gap;
            min_gap_s = s_grid[i];
        }
    }
    json summary = {{"min_gap", min_gap},
                    {"min_gap_s", min_gap_s},
                    {"ground_energy_s0", spectra.front()[0]},
                    {"ground_energy_s1", spectra.back()[0]}};
    return {summary, {{"spectrum.csv", csv.str()}}};
}

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(const std::vector<double> &x, const std::vector<double> &y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline RunResult run_mass_scan(const json &c, const std::string &hash) {
    const PotentialSpec pot = make_potential(c.at("potential"));
    const MomentumTruncation tr{c.at("num_qubits").get<std::size_t>()};
    const auto grid = c.at("grid").get<std::size_t>();
    const auto masses = c.at("masses").get<std::vector<double>>();
    auto table = csv_stream();
    auto dens = csv_stream();
    table << csv_header(hash) << "m,ground_energy,peak_density\n";
    dens << csv_header(hash) << "m,w,rho\n";
    std::vector<double> peaks;
    json per_mass = json::array();
    for (double m : masses) {
        const auto gs = ground_state(build_hamiltonian({pot, m, tr}));
        const auto d = momentum_to_position(gs.amplitudes, tr, grid);
        const double peak = d.max_density();
        peaks.push_back(peak);
        table << m << "," << gs.energy << "," << peak << "\n";
        for (std::size_t j = 0; j < d.w.size(); ++j) {
            dens << m << "," << d.w[j] << "," << d.rho[j] << "\n";
        }
        per_mass.push_back({{"m", m}, {"ground_energy", gs.energy}, {"peak_density", peak}});
    }
    json summary = {{"fitted_exponent", log_log_slope(masses, peaks)}, {"masses", per_mass}};
    return {summary, {{"mass_scan.csv", table.str()}, {"densities.csv", dens.str()}}};
}

inline json class_json(const DegeneracyClass &k, const NnSetup &s) {
    const NumericModel m(s.model);
    const auto w = m.weights_from(k.weights);
    json j = {{"bits", k.bits},
              {"probability", k.probability},
              {"energy", k.energy},
              {"degeneracy", k.degeneracy},
              {"prediction_hash", k.hash},
              {"weights", k.weights},
              {"train_accuracy", accuracy(m, w, s.train, s.rule)}};
    if (!s.test.empty()) {
        j["test_accuracy"] = accuracy(m, w, s.test, s.rule);
    }
    return j;
}

inline json term_stats_json(const TermStats &t) {
    return {{"loss_terms", t.loss_terms},
            {"loss_degree", t.loss_degree},
            {"hamiltonian_terms", t.hamiltonian_terms},
            {"hamiltonian_degree", t.hamiltonian_degree},
            {"layer_bound", t.layer_bound},
            {"diagonal_bound", t.diagonal_bound},
            {"polynomial_activations", t.polynomial_activations},
            {"within_bounds", t.within_bounds()}};
}

struct NnAnneal {
    NnSetup setup;
    PauliPolynomial hamiltonian;
    StateVector final_state;
    std::vector<DegeneracyClass> classes;
    TermStats stats;
};

inline NnAnneal anneal_nn(const json &c) {
    NnAnneal a;
    a.setup = make_nn_setup(c);
    a.stats = term_stats(a.setup.model, a.setup.train, a.setup.loss, a.setup.table);
    a.hamiltonian = compile_hamiltonian(build_loss(a.setup.model, a.setup.train, a.setup.loss), a.setup.table);
    const std::size_t n = a.setup.table.total_qubits();
    a.final_state = evolve_adiabatic(make_nn_anneal(c, a.hamiltonian), initial_state(n)).final_state;
    a.classes = group_degenerate(a.setup.model, a.setup.table, a.hamiltonian, a.final_state, a.setup.probe);
    return a;
}

inline RunResult run_nn(const json &c, const std::string &hash) {
    const NnAnneal a = anneal_nn(c);
    const auto &s = a.setup;
    const auto energy = a.hamiltonian.diagonal();
    const double e_min = *std::min_element(energy.begin(), energy.end());
    const auto top_n = std::min(c.at("top_classes").get<std::size_t>(), a.classes.size());
    json classes = json::array();
    for (std::size_t i = 0; i < top_n; ++i) {
        classes.push_back(class_json(a.classes[i], s));
    }
    double ground_mass = 0.0;
    for (std::size_t b = 0; b < energy.size(); ++b) {
        if (energy[b] <= e_min + 1e-9) {
            ground_mass += std::norm(a.final_state[b]);
        }
    }
    const auto &top = a.classes.front();
    std::uint64_t arg = 0;
    for (std::uint64_t b = 0; b < a.final_state.dim(); ++b) {
        if (std::norm(a.final_state[b]) > std::norm(a.final_state[arg])) {
            arg = b;
        }
    }
    json most_probable;
    for (const auto &k : a.classes) {
        if (std::find(k.members.begin(), k.members.end(), arg) != k.members.end()) {
            DegeneracyClass single = k;
            single.representative = arg;
            single.bits = report_bits(arg, s.table.total_qubits());
            single.weights = s.table.decode_all(arg);
            most_probable = class_json(single, s);
            most_probable["probability"] = std::norm(a.final_state[arg]);
            most_probable["class_probability"] = k.probability;
            most_probable["energy"] = energy[arg];
        }
    }
    json summary = {{"top_class", class_json(top, s)},
                    {"most_probable_config", most_probable},
                    {"top_class_probability", top.probability},
                    {"top_class_is_loss_minimum", top.energy <= e_min + 1e-9},
                    {"ground_energy", e_min},
                    {"ground_probability", ground_mass},
                    {"num_classes", a.classes.size()},
                    {"term_stats", term_stats_json(a.stats)}};
    std::vector<std::string> cols = s.feature_names;
    std::vector<OutputFile> files{{"classes.json", classes.dump(2) + "\n"},
                                  {"train.csv", csv_header(hash) + dataset_csv(s.train, c.at("seed").get<std::uint64_t>(), cols)}};
    if (!s.test.empty()) {
        files.push_back({"test.csv", csv_header(hash) + dataset_csv(s.test, c.at("seed").get<std::uint64_t>(), cols)});
    }
    const auto hist = measure_histogram(a.final_state, s.table);
    files.push_back({"histogram.json", histogram_json(hist).dump(2) + "\n"});
    return {summary, files};
}

inline RunResult run_enumerate(const json &c, const std::string &hash) {
    const NnSetup s = make_nn_setup(c);
    const auto rows = enumerate_weightspace(s.model, s.table, s.train, s.test, s.loss, s.rule);
    const NumericModel m(s.model);
    auto csv = csv_stream();
    csv << csv_header(hash) << "bits";
    for (const auto &name : m.variable_names()) {
        csv << "," << name;
    }
    csv << ",loss,train_acc,test_acc\n";
    double min_loss = std::numeric_limits<double>::infinity();
    for (const auto &r : rows) {
        min_loss = std::min(min_loss, r.loss);
    }
    std::size_t argmin = 0;
    std::size_t perfect = 0;
    std::size_t perfect_train = 0;
    for (const auto &r : rows) {
        csv << r.bits;
        for (double w : r.weights) {
            csv << "," << w;
        }
        csv << "," << r.loss << "," << r.train_accuracy << "," << r.test_accuracy << "\n";
        argmin += r.loss <= min_loss + 1e-9 ? 1 : 0;
        perfect_train += r.train_accuracy == 1.0 ? 1 : 0;
        perfect += (r.train_accuracy == 1.0 && (s.test.empty() || r.test_accuracy == 1.0)) ? 1 : 0;
    }
    const auto total = static_cast<double>(rows.size());
    json summary = {{"configurations", rows.size()},
                    {"min_loss", min_loss},
                    {"argmin_count", argmin},
                    {"perfect_count", perfect},
                    {"perfect_fraction", static_cast<double>(perfect) / total},
                    {"perfect_train_fraction", static_cast<double>(perfect_train) / total}};
    return {summary, {{"enumeration.csv", csv.str()}}};
}

inline RunResult run_classical_pool(const json &c, const std::string &hash) {
    const NnSetup s = make_nn_setup(c);
    const RelaxedModel rm(s.model, c.at("steepness").get<double>(), c.at("penalty").get<double>());
    const auto runs = classical_pool(rm, s.train, s.test, c.at("runs").get<std::size_t>(),
                                     c.at("seed").get<std::uint64_t>(), make_adam(c));
    double train = 0.0, test = 0.0, best = 0.0;
    std::size_t near_binary = 0, total_w = 0;
    for (const auto &r : runs) {
        train += r.train_accuracy;
        test += r.test_accuracy;
        best = std::max(best, r.train_accuracy);
        for (double w : r.relaxed) {
            near_binary += (std::abs(w) < 0.1 || std::abs(w - 1.0) < 0.1) ? 1 : 0;
            ++total_w;
        }
    }
    const auto k = static_cast<double>(runs.size());
    json summary = {{"runs", runs.size()},
                    {"mean_train_accuracy", train / k},
                    {"mean_test_accuracy", test / k},
                    {"best_train_accuracy", best},
                    {"binarized_fraction", static_cast<double>(near_binary) / static_cast<double>(total_w)}};
    return {summary, {{"pool.csv", csv_header(hash) + pool_csv(runs, rm.model.variables())}}};
}

inline std::string curves_csv(const std::vector<AccuracyCurvePoint> &pts, const std::string &hash) {
    auto os = csv_stream();
    os << csv_header(hash) << "n,train_mean,train_std,test_mean,test_std\n";
    for (const auto &p : pts) {
        os << p.n << "," << p.train_mean << "," << p.train_std << "," << p.test_mean << "," << p.test_std << "\n";
    }
    return os.str();
}

/// Pool of pool_size measured weight configurations from the annealed state.
inline std::vector<PoolEntry> quantum_pool(const NnAnneal &a, std::size_t pool_size, std::uint64_t seed) {
    const NumericModel m(a.setup.model);
    std::vector<PoolEntry> pool;
    pool.reserve(pool_size);
    for (auto b : sample_outcomes(a.final_state, pool_size, seed)) {
        const auto w = m.weights_from(a.setup.table.decode_all(b));
        pool.push_back({accuracy(m, w, a.setup.train, a.setup.rule), accuracy(m, w, a.setup.test, a.setup.rule)});
    }
    return pool;
}

inline RunResult run_accuracy_curves(const json &c, const std::string &hash) {
    const NnAnneal a = anneal_nn(c);
    const auto seed = c.at("sample_seed").get<std::uint64_t>();
    const auto pool_size = c.at("pool_size").get<std::size_t>();
    const auto reps = c.at("repetitions").get<std::size_t>();
    std::vector<std::size_t> grid;
    for (std::size_t n = 1; n <= c.at("n_max").get<std::size_t>(); ++n) {
        grid.push_back(n);
    }
    const auto qpool = quantum_pool(a, pool_size, seed);
    const RelaxedModel rm(a.setup.model, c.at("steepness").get<double>(), c.at("penalty").get<double>());
    const auto runs = classical_pool(rm, a.setup.train, a.setup.test, pool_size,
                                     c.at("classical_seed").get<std::uint64_t>(), make_adam(c));
    const auto cpool = to_pool(runs);
    const auto qc = accuracy_vs_runs(qpool, grid, reps, seed);
    const auto cc = accuracy_vs_runs(cpool, grid, reps, seed);
    bool ordered = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= 2 && !(qc[i].train_mean > cc[i].train_mean)) {
            ordered = false;
        }
    }
    const auto at = [&](const std::vector<AccuracyCurvePoint> &v, std::size_t n) {
        for (const auto &p : v) {
            if (p.n == n) {
                return json{{"train_mean", p.train_mean}, {"test_mean", p.test_mean}};
            }
        }
        return json(nullptr);
    };
    json summary = {{"quantum_top_class_probability", a.classes.front().probability},
                    {"quantum_n1", at(qc, 1)},
                    {"quantum_n8", at(qc, 8)},
                    {"classical_n1", at(cc, 1)},
                    {"classical_plateau_train_mean", cc.back().train_mean},
                    {"classical_plateau_n", cc.back().n},
                    {"quantum_above_classical_for_n_ge_2", ordered}};
    return {summary,
            {{"quantum_curves.csv", curves_csv(qc, hash)},
             {"classical_curves.csv", curves_csv(cc, hash)},
             {"classical_pool.csv", csv_header(hash) + pool_csv(runs, rm.model.variables())}}};
}

} // namespace detail

/// Runs a validated experiment. Data files carry the config hash, never a timestamp.
inline RunResult run_experiment(const ValidatedConfig &v) {
    const auto &c = v.effective;
    const std::string kind = v.kind();
    const std::string hash = v.hash();
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    if (kind == "tunnel") {
        r = detail::run_tunnel(c, hash);
    } else if (kind == "anneal-matrix") {
        r = detail::run_anneal_matrix(c, hash);
    } else if (kind == "anneal-paulispin") {
        r = detail::run_anneal_paulispin(c, hash);
    } else if (kind == "spectrum") {
        r = detail::run_spectrum(c, hash);
    } else if (kind == "mass-scan") {
        r = detail::run_mass_scan(c, hash);
    } else if (kind == "nn-toy" || kind == "nn-binary") {
        r = detail::run_nn(c, hash);
    } else if (kind == "enumerate") {
        r = detail::run_enumerate(c, hash);
    } else if (kind == "classical-pool") {
        r = detail::run_classical_pool(c, hash);
    } else if (kind == "accuracy-curves") {
        r = detail::run_accuracy_curves(c, hash);
    } else {
        throw Error("run: unknown kind '" + kind + "'");
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.summary = json{{"kind", kind},
                     {"name", c.at("name")},
                     {"config_hash", hash},
                     {"wall_time_s", wall},
                     {"metrics", r.summary},
                     {"effective_config", c}};
    return r;
}

/// Write via a temporary file and rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path &path, const std::string &content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(os), "cannot open " + tmp + " for writing");
        os << content;
        os.flush();
        require(static_cast<bool>(os), "write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline void write_outputs(const std::filesystem::path &dir, const RunResult &r) {
    std::filesystem::create_directories(dir);
    for (const auto &f : r.files) {
        write_atomic(dir / f.name, f.content);
    }
    write_atomic(dir / "summary.json", r.summary.dump(2) + "\n");
}

inline json load_config(const std::filesystem::path &path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), "cannot open config " + path.string());
    try {
        return json::parse(is);
    } catch (const json::parse_error &e) {
        throw Error("config " + path.string() + ": invalid JSON (" + e.what() + ")");
    }
}

} // namespace aqc
