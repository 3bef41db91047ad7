#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aqc/experiments.hpp"

namespace {

aqc::Overrides overrides_from(const std::optional<std::uint64_t> &seed, const std::string &band) {
    aqc::Overrides ov;
    ov.seed = seed;
    if (!band.empty()) {
        ov.band_prob = band;
    }
    return ov;
}

void print_notes(const aqc::ValidatedConfig &v) {
    for (const auto &n : v.notes) {
        std::cout << "  note: " << n << "\n";
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Adiabatic quantum training and optimization simulator"};
    app.require_subcommand(1);

    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string band;
    std::string config_path;

    const auto add_common = [&](CLI::App *sub) {
        sub->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Override the config's seed");
        sub->add_option("--band-prob", band, "Band-label probability reading")
            ->check(CLI::IsMember({"min", "max"}));
    };

    auto *run = app.add_subcommand("run", "Run one experiment and write its outputs");
    add_common(run);
    run->add_option("--out", out_dir, "Output directory (default: out/<name>)");

    auto *validate = app.add_subcommand("validate", "Check a config and print its effective parameters");
    add_common(validate);

    auto *list = app.add_subcommand("list-experiments", "List the experiment kinds");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto &k : aqc::experiment_kinds()) {
            std::cout << k.kind << "\t" << k.description << "\n";
        }
        return 0;
    }

    try {
        const auto raw = aqc::load_config(config_path);
        const auto v = aqc::validate_config(raw, overrides_from(seed, band));
        if (validate->parsed()) {
            std::cout << "ok: " << config_path << " (kind " << v.kind() << ", hash " << v.hash() << ")\n";
            print_notes(v);
            std::cout << v.effective.dump(2) << "\n";
            return 0;
        }
        const std::filesystem::path dir =
            out_dir.empty() ? std::filesystem::path("out") / v.effective.at("name").get<std::string>()
                            : std::filesystem::path(out_dir);
        const auto result = aqc::run_experiment(v);
        aqc::write_outputs(dir, result);
        std::cout << result.summary.at("metrics").dump(2) << "\n";
        std::cout << "wrote " << result.files.size() + 1 << " files to " << dir.string() << " in "
                  << result.summary.at("wall_time_s").get<double>() << " s\n";
        return 0;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
