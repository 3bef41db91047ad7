#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aqc/experiments.hpp"

using namespace aqc;
namespace fs = std::filesystem;

namespace {

fs::path configs_dir() {
    const char *d = std::getenv("AQC_CONFIGS");
    return d != nullptr ? fs::path(d) : fs::path("configs");
}

std::string cli() {
    const char *c = std::getenv("AQC_CLI");
    return c != nullptr ? std::string(c) : std::string("aqc");
}

struct Output {
    int status;
    std::string text;
};

Output shell(const std::string &cmd) {
    Output o{0, {}};
    FILE *p = popen((cmd + " 2>&1").c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) {
        o.text.append(buf, n);
    }
    o.status = pclose(p);
    return o;
}

std::string slurp(const fs::path &p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path temp_dir(const std::string &name) {
    const auto d = fs::temp_directory_path() / ("aqc_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

bool has_note(const ValidatedConfig &v, const std::string &needle) {
    for (const auto &n : v.notes) {
        if (n.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("every shipped config validates") {
    std::size_t count = 0;
    for (const auto &e : fs::directory_iterator(configs_dir())) {
        if (e.path().extension() != ".json") {
            continue;
        }
        INFO(e.path().string());
        const auto v = validate_config(load_config(e.path()));
        CHECK(v.hash().size() == 16);
        CHECK(validate_config(v.effective).effective == v.effective);
        ++count;
    }
    CHECK(count >= 10);
}

TEST_CASE("validation fills and reports defaults") {
    const auto v = validate_config(json{{"kind", "tunnel"}});
    CHECK(v.effective.at("seed") == 0);
    CHECK(has_note(v, "tunnel.seed defaulted to 0"));
    CHECK(v.effective.at("mass") == 10.0);
    CHECK(v.effective.at("num_qubits") == 5);

    const auto nn = validate_config(json{{"kind", "nn-binary"}});
    CHECK(nn.effective.at("dataset") == "pixels");
    CHECK(nn.effective.at("seed") == kDefaultSplitSeed);
    CHECK(has_note(nn, "nn-binary.seed defaulted"));
    CHECK(nn.effective.at("substeps_per_step") == 64);
}

TEST_CASE("validation rejects bad requests") {
    try {
        validate_config(json{{"kind", "anneal-matrix"}, {"num_qubits", 30}});
        FAIL("expected rejection");
    } catch (const Error &e) {
        CHECK(std::string(e.what()).find("exceeds the dense cap") != std::string::npos);
    }
    CHECK_THROWS_AS(validate_config(json{{"kind", "spectrum"}, {"num_qubits", 30}}), Error);
    CHECK_THROWS_AS(validate_config(json{{"kind", "tunnel"}, {"masss", 3.0}}), Error);
    CHECK_THROWS_AS(validate_config(json{{"kind", "nope"}}), Error);
    CHECK_THROWS_AS(validate_config(json{{"name", "x"}}), Error);
    CHECK_THROWS_AS(validate_config(json{{"kind", "anneal-matrix"}, {"propagation", "trotter"}}), Error);
    CHECK_THROWS_AS(validate_config(json{{"kind", "tunnel"}, {"mass", -1.0}}), Error);
    CHECK_THROWS_AS(validate_config(json{{"kind", "nn-toy"}, {"band_prob", "max"}}), Error);
    CHECK_THROWS_AS(validate_config(json{{"kind", "classical-pool"}, {"model", "toy"}, {"dataset", "circle"}}),
                    Error);
}

TEST_CASE("command-line overrides are echoed") {
    Overrides ov;
    ov.band_prob = "max";
    const auto v = validate_config(json{{"kind", "nn-toy"}, {"dataset", "band"}}, ov);
    CHECK(v.effective.at("band_prob") == "max");
    CHECK(has_note(v, "band_prob set to 'max'"));
    const auto plain = validate_config(json{{"kind", "nn-toy"}, {"dataset", "band"}});
    CHECK(plain.effective.at("band_prob") == "min");
    CHECK(plain.hash() != v.hash());

    Overrides s;
    s.seed = 42;
    CHECK(validate_config(json{{"kind", "nn-toy"}}, s).effective.at("seed") == 42);
}

TEST_CASE("CLI validate and list-experiments") {
    const auto list = shell(cli() + " list-experiments");
    CHECK(list.status == 0);
    for (const auto &k : experiment_kinds()) {
        CHECK(list.text.find(k.kind) != std::string::npos);
    }

    const auto ok = shell(cli() + " validate " + (configs_dir() / "toy_band.json").string() + " --band-prob max");
    CHECK(ok.status == 0);
    CHECK(ok.text.rfind("ok: ", 0) == 0);
    CHECK(ok.text.find("\"band_prob\": \"max\"") != std::string::npos);

    const auto dir = temp_dir("validate");
    {
        std::ofstream os(dir / "big.json");
        os << R"({"kind": "anneal-matrix", "num_qubits": 30})";
    }
    const auto bad = shell(cli() + " validate " + (dir / "big.json").string());
    CHECK(bad.status != 0);
    CHECK(bad.text.find("error: ") != std::string::npos);
    CHECK(bad.text.find("dense cap") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("reruns write byte-identical data files") {
    for (const std::string name : {"tunnel_cosine", "binary_enumerate", "toy_circle"}) {
        INFO(name);
        const auto a = temp_dir(name + "_a");
        const auto b = temp_dir(name + "_b");
        const auto cfg = (configs_dir() / (name + ".json")).string();
        REQUIRE(shell(cli() + " run " + cfg + " --out " + a.string()).status == 0);
        REQUIRE(shell(cli() + " run " + cfg + " --out " + b.string()).status == 0);
        std::size_t files = 0;
        for (const auto &e : fs::directory_iterator(a)) {
            const auto file = e.path().filename();
            if (file == "summary.json") {
                continue;
            }
            INFO(file.string());
            REQUIRE(fs::exists(b / file));
            const auto content = slurp(e.path());
            CHECK(content == slurp(b / file));
            if (e.path().extension() == ".csv") {
                CHECK(content.rfind("# config_hash=", 0) == 0);
            }
            ++files;
        }
        CHECK(files >= 1);
        const auto sa = json::parse(slurp(a / "summary.json"));
        const auto sb = json::parse(slurp(b / "summary.json"));
        CHECK(sa.at("metrics") == sb.at("metrics"));
        CHECK(sa.at("config_hash") == sb.at("config_hash"));
        fs::remove_all(a);
        fs::remove_all(b);
    }
}
