#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

#include "aqc/datasets.hpp"

using namespace aqc;

TEST_CASE("circle labels") {
    CHECK(circle_label(0.0, 0.0) == -1);
    CHECK(circle_label(1.0, 1.0) == 1);
    const auto d = circle_dataset(1000, 17);
    double signal = 0.0;
    for (const auto &s : d) {
        CHECK((s.label == 1 || s.label == -1));
        CHECK(std::abs(s.features[0]) <= 1.0);
        CHECK(std::abs(s.features[1]) <= 1.0);
        CHECK(s.label == circle_label(s.features[0], s.features[1]));
        signal += s.label == 1;
    }
    CHECK(std::abs(signal / 1000.0 - (1.0 - std::numbers::pi / 8.0)) < 0.05);
}

TEST_CASE("band labels") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        CHECK(band_label(0.3, -0.3, rng.uniform(), BandProbability::min) == -2);
        CHECK(band_label(1.0, 1.0, rng.uniform(), BandProbability::min) == 2);
        CHECK(band_label(0.1, 0.1, rng.uniform(), BandProbability::max) == 2);
    }
    // Thin shell around |x1 + x2| = 0.5, where the signal probability is 0.25.
    std::size_t in_shell = 0, signal = 0;
    const auto d = band_dataset(400000, 8);
    for (const auto &s : d) {
        CHECK((s.label == 2 || s.label == -2));
        const double a = std::abs(s.features[0] + s.features[1]);
        if (a >= 0.49 && a <= 0.51) {
            ++in_shell;
            signal += s.label == 2;
        }
    }
    REQUIRE(in_shell > 1000);
    CHECK(std::abs(static_cast<double>(signal) / static_cast<double>(in_shell) - 0.25) < 0.05);
    for (const auto &s : band_dataset(200, 1, BandProbability::max)) {
        CHECK(s.label == 2);
    }
}

TEST_CASE("pixel images") {
    CHECK(pixel_label({1, 0, 1, 0}) == 1);
    CHECK(pixel_label({0, 1, 0, 1}) == 1);
    CHECK(pixel_label({1, 1, 0, 0}) == 0);
    CHECK(pixel_label({0, 0, 0, 0}) == 0);
    const auto all = pixel2x2_dataset();
    REQUIRE(all.size() == 16);
    int signal = 0;
    for (const auto &s : all) {
        signal += s.label;
    }
    CHECK(signal == 7);
    CHECK_THROWS_AS(pixel_label({1, 0}), Error);
}

TEST_CASE("balanced split") {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL, 99ULL}) {
        const auto s = balanced_split(seed);
        REQUIRE(s.train.size() == 10);
        REQUIRE(s.test.size() == 4);
        std::set<std::vector<double>> train, test;
        int train_signal = 0, test_signal = 0;
        for (const auto &x : s.train) {
            train.insert(x.features);
            train_signal += x.label;
        }
        for (const auto &x : s.test) {
            test.insert(x.features);
            test_signal += x.label;
        }
        CHECK(train.size() == 10);
        CHECK(test.size() == 4);
        CHECK(train_signal == 5);
        CHECK(test_signal == 2);
        for (const auto &f : test) {
            CHECK(train.count(f) == 0);
        }
        CHECK(balanced_split(seed).train == s.train);
        CHECK(balanced_split(seed).test == s.test);
    }
    CHECK(balanced_split(0).train != balanced_split(1).train);
}

TEST_CASE("determinism") {
    CHECK(circle_dataset(100, 4) == circle_dataset(100, 4));
    CHECK(band_dataset(100, 4) == band_dataset(100, 4));
    CHECK(circle_dataset(100, 4) != circle_dataset(100, 5));
    // The generator sequence is fixed by the standard engine.
    Rng rng(5489);
    CHECK(rng.next() == 14514284786278117030ULL);
    Rng r2(1);
    for (int i = 0; i < 1000; ++i) {
        const auto v = r2.below(7);
        CHECK(v < 7);
        const double u = r2.uniform();
        CHECK((u >= 0.0 && u < 1.0));
    }
}

TEST_CASE("CSV round trip") {
    const auto d = circle_dataset(50, 6);
    const auto text = dataset_csv(d, 6, {"x1", "x2"});
    CHECK(text.rfind("# seed=6\nx1,x2,label\n", 0) == 0);
    CHECK(parse_dataset_csv(text) == d);
    const auto p = balanced_split(3).train;
    CHECK(parse_dataset_csv(dataset_csv(p, 3, {"p00", "p01", "p10", "p11"})) == p);
    CHECK_THROWS_AS(dataset_csv(d, 6, {"x1"}), Error);
}
