#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace aqc {

struct Sample {
    std::vector<double> features;
    int label = 0;

    bool operator==(const Sample &) const = default;
};

using Dataset = std::vector<Sample>;

/// Label +1 iff x1^2 + x2^2 > 1/2, else -1.
inline int circle_label(double x1, double x2) { return x1 * x1 + x2 * x2 > 0.5 ? 1 : -1; }

/// n points uniform on [-1, 1]^2 with circle labels.
inline Dataset circle_dataset(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = rng.uniform(-1.0, 1.0);
        const double x2 = rng.uniform(-1.0, 1.0);
        out.push_back({{x1, x2}, circle_label(x1, x2)});
    }
    return out;
}

enum class BandProbability {
    /// P(signal) = min(1, (x1 + x2)^2)
    min,
    /// P(signal) = max(1, (x1 + x2)^2), which labels every point signal
    max,
};

inline double band_signal_probability(double x1, double x2, BandProbability rule) {
    const double s = (x1 + x2) * (x1 + x2);
    return rule == BandProbability::min ? std::min(1.0, s) : std::max(1.0, s);
}

/// Label for one point given a uniform draw u in [0, 1).
inline int band_label(double x1, double x2, double u, BandProbability rule) {
    return u < band_signal_probability(x1, x2, rule) ? 2 : -2;
}

/// n points uniform on [-1, 1]^2; label +2 with the band probability, else -2.
inline Dataset band_dataset(std::size_t n, std::uint64_t seed,
                            BandProbability rule = BandProbability::min) {
    Rng rng(seed);
    Dataset out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = rng.uniform(-1.0, 1.0);
        const double x2 = rng.uniform(-1.0, 1.0);
        out.push_back({{x1, x2}, band_label(x1, x2, rng.uniform(), rule)});
    }
    return out;
}

// 2x2 images are stored as (p00, p01, p10, p11): row-major, p{row}{column}.
// Image index i has pixel k = bit k of i.

/// Signal iff some column has both pixels set.
inline int pixel_label(const std::vector<double> &p) {
    require(p.size() == 4, "pixel_label: expected 4 pixels");
    const bool left = p[0] > 0.5 && p[2] > 0.5;
    const bool right = p[1] > 0.5 && p[3] > 0.5;
    return (left || right) ? 1 : 0;
}

inline std::vector<double> pixel_image(unsigned index) {
    std::vector<double> p(4);
    for (unsigned k = 0; k < 4; ++k) {
        p[k] = static_cast<double>((index >> k) & 1U);
    }
    return p;
}

/// All 16 labelled 2x2 images in index order.
inline Dataset pixel2x2_dataset() {
    Dataset out;
    for (unsigned i = 0; i < 16; ++i) {
        auto p = pixel_image(i);
        const int y = pixel_label(p);
        out.push_back({std::move(p), y});
    }
    return out;
}

struct Split {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
};

/**
 * Balanced 7 + 7 selection from the 16 images split 5 + 5 train / 2 + 2 test.
 * The seeded generator shuffles the background indices (first 7 kept), then
 * the signal indices, then the kept backgrounds; train takes the first 5 of
 * each shuffled list.
 */
inline Split balanced_split(std::uint64_t seed) {
    const Dataset all = pixel2x2_dataset();
    std::vector<std::size_t> signal;
    std::vector<std::size_t> background;
    for (std::size_t i = 0; i < all.size(); ++i) {
        (all[i].label == 1 ? signal : background).push_back(i);
    }
    Rng rng(seed);
    rng.shuffle(background);
    background.resize(7);
    rng.shuffle(signal);
    rng.shuffle(background);
    Split s;
    s.seed = seed;
    for (std::size_t i = 0; i < 7; ++i) {
        (i < 5 ? s.train : s.test).push_back(all[signal[i]]);
    }
    for (std::size_t i = 0; i < 7; ++i) {
        (i < 5 ? s.train : s.test).push_back(all[background[i]]);
    }
    return s;
}

/// CSV with a `# seed=...` header comment, feature columns, then `label`.
inline std::string dataset_csv(const Dataset &d, std::uint64_t seed,
                               const std::vector<std::string> &columns) {
    std::ostringstream os;
    os.precision(17);
    os << "# seed=" << seed << "\n";
    for (const auto &c : columns) {
        os << c << ",";
    }
    os << "label\n";
    for (const auto &s : d) {
        require(s.features.size() == columns.size(), "dataset_csv: column count mismatch");
        for (double f : s.features) {
            os << f << ",";
        }
        os << s.label << "\n";
    }
    return os.str();
}

/// Inverse of dataset_csv; comment lines and the header row are skipped.
inline Dataset parse_dataset_csv(const std::string &text) {
    Dataset out;
    std::istringstream is(text);
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(std::stod(cell));
        }
        require(!cells.empty(), "parse_dataset_csv: empty row");
        const int label = static_cast<int>(cells.back());
        cells.pop_back();
        out.push_back({std::move(cells), label});
    }
    return out;
}

} // namespace aqc
