#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "aqc/classical.hpp"

using namespace aqc;

namespace {

std::vector<double> perfect_weights(const Split &split) {
    const auto model = binary_model();
    const NumericModel m(model);
    for (std::uint32_t b = 0; b < 1024; ++b) {
        std::vector<double> w(10);
        for (std::size_t q = 0; q < 10; ++q) {
            w[q] = (b >> q) & 1U;
        }
        if (accuracy(m, w, split.train, DecisionRule::binary) == 1.0) {
            return w;
        }
    }
    return {};
}

// Pre-activation sums of every unit for one input at the given weights.
bool has_tie(const std::vector<double> &w, const std::vector<double> &x) {
    double h[2];
    for (int i = 0; i < 2; ++i) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) {
            s += w[static_cast<std::size_t>(4 * i + j)] * x[static_cast<std::size_t>(j)];
        }
        if (s == 2.0) {
            return true;
        }
        h[i] = s >= 2.0 ? 1.0 : 0.0;
    }
    return w[8] * h[0] + w[9] * h[1] == 1.0;
}

} // namespace

TEST_CASE("penalty term") {
    const RelaxedModel rm(binary_model(), 10.0, 1.5);
    std::vector<double> w(10, 0.0);
    w[2] = 1.0;
    CHECK(relaxed_penalty(rm, w) == 0.0);
    CHECK(relaxed_penalty(rm, std::vector<double>(10, 0.5)) == Catch::Approx(10.0 * 1.5 / 16.0));
}

TEST_CASE("relaxed model requirements") {
    CHECK_THROWS_AS(RelaxedModel(toy_model()), Error);
    auto fixed = binary_model();
    fixed.layers[0].weights[0][0] = 1.0;
    CHECK_THROWS_AS(RelaxedModel(fixed), Error);
}

TEST_CASE("large steepness recovers the exact loss away from threshold ties") {
    const auto split = balanced_split(0);
    const auto w = perfect_weights(split);
    REQUIRE(w.size() == 10);
    const NumericModel m(binary_model());
    std::size_t ties = 0;
    for (const auto &s : pixel2x2_dataset()) {
        const double exact = m.forward(w, s.features);
        const double r10 = relaxed_forward(RelaxedModel(binary_model(), 10.0), w, s.features);
        const double r100 = relaxed_forward(RelaxedModel(binary_model(), 100.0), w, s.features);
        if (has_tie(w, s.features)) {
            // sigma(0) = 1/2 exactly at a threshold tie, for every steepness.
            ++ties;
            continue;
        }
        CHECK(std::abs(r100 - exact) < 1e-12);
        CHECK(std::abs(r100 - exact) <= std::abs(r10 - exact));
        CHECK(std::abs(r10 - exact) < 1e-3);
    }
    CHECK(ties > 0);

    // On the tie-free samples the relaxed loss converges to the exact loss.
    Dataset clean;
    for (const auto &s : split.train) {
        if (!has_tie(w, s.features)) {
            clean.push_back(s);
        }
    }
    REQUIRE(!clean.empty());
    const double exact = numeric_loss(m, w, clean, LossKind::linear_binary);
    const double l10 = relaxed_loss(RelaxedModel(binary_model(), 10.0), clean, w);
    const double l100 = relaxed_loss(RelaxedModel(binary_model(), 100.0), clean, w);
    CHECK(std::abs(l100 - exact) < 1e-12);
    CHECK(std::abs(l100 - exact) <= std::abs(l10 - exact));
}

TEST_CASE("gradient matches finite differences") {
    const auto split = balanced_split(2);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(-0.2, 1.2);
    for (double k : {3.0, 10.0}) {
        const RelaxedModel rm(binary_model(), k, 0.7);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> w(10);
            for (auto &v : w) {
                v = u(gen);
            }
            const auto g = gradient(rm, split.train, w);
            for (std::size_t i = 0; i < w.size(); ++i) {
                auto wp = w, wm = w;
                const double h = 1e-5;
                wp[i] += h;
                wm[i] -= h;
                const double fd = (relaxed_loss(rm, split.train, wp) - relaxed_loss(rm, split.train, wm)) / (2 * h);
                CHECK(std::abs(g[i] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST_CASE("penalty-only gradient") {
    const RelaxedModel rm(binary_model(), 10.0, 2.0);
    const std::vector<double> w{0.0, 0.5, 1.0, 0.0, 0.5, 1.0, 0.0, 0.5, 1.0, 0.0};
    for (double g : gradient(rm, {}, w)) {
        CHECK(g == 0.0);
    }
    const std::vector<double> v{0.2, -0.3, 1.4, 0.7, 0.1, 0.9, 0.5, 0.6, 1.0, 2.0};
    const auto g = gradient(rm, {}, v);
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(g[i] == Catch::Approx(2.0 * 2.0 * v[i] * (v[i] - 1.0) * (2.0 * v[i] - 1.0)));
    }
}

TEST_CASE("Adam") {
    AdamState still({}, 3);
    std::vector<double> w{0.1, 0.2, 0.3};
    for (int i = 0; i < 100; ++i) {
        adam_step(still, w, {0.0, 0.0, 0.0});
    }
    CHECK(w == std::vector<double>{0.1, 0.2, 0.3});

    // f(x) = 3 (x - 1.7)^2 has its minimum at 1.7.
    AdamConfig c;
    c.learning_rate = 0.01;
    AdamState state(c, 1);
    std::vector<double> x{-2.0};
    for (int i = 0; i < 5000; ++i) {
        adam_step(state, x, {6.0 * (x[0] - 1.7)});
    }
    CHECK(std::abs(x[0] - 1.7) < 1e-4);
    CHECK_THROWS_AS(adam_step(state, x, {1.0, 2.0}), Error);
}

TEST_CASE("training runs") {
    const auto split = balanced_split(0);
    const RelaxedModel rm(binary_model());
    const auto a = train_run(rm, split.train, split.test, 12);
    const auto b = train_run(rm, split.train, split.test, 12);
    CHECK(a.relaxed == b.relaxed);
    CHECK(a.binary == b.binary);
    CHECK(a.train_accuracy == b.train_accuracy);
    for (std::size_t i = 0; i < a.binary.size(); ++i) {
        CHECK(a.binary[i] == (a.relaxed[i] >= 0.5 ? 1.0 : 0.0));
    }
    const NumericModel m(binary_model());
    CHECK(a.train_accuracy == accuracy(m, a.binary, split.train, DecisionRule::binary));

    const auto pool = classical_pool(rm, split.train, split.test, 3, 12);
    CHECK(pool[0].relaxed == a.relaxed);
    const auto csv = pool_csv(pool, rm.model.variables());
    CHECK(csv.rfind("seed,w1_11,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("classical pool plateaus below perfect accuracy") {
    const auto split = balanced_split(0);
    const RelaxedModel rm(binary_model());
    const auto runs = classical_pool(rm, split.train, split.test, 1000, 0);
    const auto curve = accuracy_vs_runs(to_pool(runs), {1, 20}, 1000, 0);
    INFO("n=1 " << curve[0].train_mean << " n=20 " << curve[1].train_mean);
    CHECK(curve[1].train_mean > curve[0].train_mean);
    CHECK(curve[1].train_mean >= 0.75);
    CHECK(curve[1].train_mean <= 0.90);
}

TEST_CASE("penalty drives binarization", "[binarization]") {
    const auto split = balanced_split(0);
    const RelaxedModel rm(binary_model());
    const auto runs = classical_pool(rm, split.train, split.test, 1000, 0);
    std::size_t near = 0, total = 0;
    for (const auto &r : runs) {
        for (double w : r.relaxed) {
            near += std::abs(w) < 0.1 || std::abs(w - 1.0) < 0.1;
            ++total;
        }
    }
    const double fraction = static_cast<double>(near) / static_cast<double>(total);
    INFO("fraction of weights within 0.1 of {0, 1}: " << fraction);
    CHECK(fraction >= 0.9);
}
