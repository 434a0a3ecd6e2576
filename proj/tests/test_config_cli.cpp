#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dirac/experiments.hpp"
#include "dirac/io.hpp"

using namespace dirac;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults parse and the experiment line is honored")
{
    ExperimentConfig c = ExperimentConfig::parse("experiment = decay\n");
    CHECK(c.experiment == ExperimentKind::decay);
    CHECK(c.grid.n == 64);
    CHECK(c.mass == 1.0);
    CHECK(c.sampler.seed == 1);
    CHECK(c.lambdas == std::vector<double>{0.5, 1.0, 2.0});
}

TEST_CASE("sections and values")
{
    const char* text = R"(
experiment = ensemble
[grid]
n = 32
length = 32
[model]
mass = 2.5
[sampler]
kind = moving_average
seed = 99
kernel_radius = 1.5
[phi]
kind = point
radius = 1
component = 3
normalize_variance = true
[ensemble]
times = 0, 11
samples = 64
lambdas = 1
spot_checks = 2
)";
    ExperimentConfig c = ExperimentConfig::parse(text);
    CHECK(c.grid.n == 32);
    CHECK(c.mass == 2.5);
    CHECK(c.sampler.kind == SamplerKind::finite_range_moving_average);
    CHECK(c.sampler.seed == 99);
    CHECK(c.phi.bump.kind == BumpKind::point);
    CHECK(c.phi.bump.component == 3);
    CHECK(c.phi.normalize_variance);
    CHECK(c.ensemble_times == std::vector<double>{0.0, 11.0});
    CHECK(c.ensemble_samples == 64);
    c.validate();
}

TEST_CASE("unknown keys and sections are rejected")
{
    CHECK_THROWS_AS(ExperimentConfig::parse("[grid]\nn = 64\ntypo_key = 3\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[nosuchsection]\nn = 64\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("experiment = nosuch\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[grid]\nn = 64\nn = 32\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("not a key value line\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[grid]\nn = sixty-four\n"), ConfigError);
}

TEST_CASE("serialization round-trips losslessly")
{
    ExperimentConfig c = ExperimentConfig::parse(R"(
experiment = rooms
[grid]
n = 32
length = 32
[sampler]
kind = moving_average
seed = 123456789
kernel_radius = 1.5
[rooms]
times = 4, 8.25
delta = 0.6
samples = 500
)");
    ExperimentConfig back = ExperimentConfig::parse(c.serialize());
    CHECK(back == c);
    CHECK(back.rooms_times == std::vector<double>{4.0, 8.25});
    CHECK(back.rooms_delta == 0.6);
}

TEST_CASE("validation catches precondition violations")
{
    // local seminorm radius past L/2
    ExperimentConfig a = ExperimentConfig::parse(
        "experiment = verify\n[verify]\nseminorm_radius = 40\n");
    CHECK_THROWS_AS(a.validate(), ConfigError);

    // ensemble time past the no-wraparound budget
    ExperimentConfig b = ExperimentConfig::parse(
        "experiment = ensemble\n[sampler]\nkind = moving_average\nkernel_radius = 1.5\n"
        "[phi]\nradius = 2\n[ensemble]\ntimes = 0, 40\n");
    CHECK_THROWS_AS(b.validate(), ConfigError);

    // kernel wider than L/4
    ExperimentConfig d = ExperimentConfig::parse(
        "experiment = ensemble\n[sampler]\nkind = moving_average\nkernel_radius = 17\n");
    CHECK_THROWS_AS(d.validate(), ConfigError);

    // nonpositive mass
    ExperimentConfig e = ExperimentConfig::parse("experiment = verify\n[model]\nmass = -1\n");
    CHECK_THROWS_AS(e.validate(), ConfigError);
}

TEST_CASE("reports are deterministic for a fixed seed and differ across seeds")
{
    ExperimentConfig c = ExperimentConfig::parse(R"(
experiment = ensemble
[grid]
n = 16
length = 16
[sampler]
kind = moving_average
seed = 7
kernel_radius = 1.5
[phi]
kind = smooth
radius = 1.2
normalize_variance = true
[ensemble]
times = 0, 2
samples = 48
lambdas = 1
spot_checks = 2
)");
    c.validate();
    ExperimentOutput a = run_ensemble_experiment(c);
    ExperimentOutput b = run_ensemble_experiment(c);
    CHECK(a.summary.dump() == b.summary.dump());
    CHECK(a.tables.at("projections.csv") == b.tables.at("projections.csv"));

    ExperimentConfig c2 = c;
    c2.sampler.seed = 8;
    ExperimentOutput d = run_ensemble_experiment(c2);
    CHECK(a.tables.at("projections.csv") != d.tables.at("projections.csv"));
}

TEST_CASE("emit_report writes summary, tables and manifest with content hashes")
{
    namespace fs = std::filesystem;
    ExperimentConfig c = ExperimentConfig::parse(R"(
experiment = ensemble
[grid]
n = 16
length = 16
[sampler]
kind = moving_average
seed = 7
kernel_radius = 1.5
[phi]
kind = smooth
radius = 1.2
normalize_variance = true
[ensemble]
times = 0, 2
samples = 48
lambdas = 1
spot_checks = 0
)");
    c.out_dir = "emit_test_out";
    ExperimentOutput out = run_ensemble_experiment(c);
    std::ostringstream log;
    emit_report(c, out, log, 1.25);

    CHECK(fs::exists("emit_test_out/summary.json"));
    CHECK(fs::exists("emit_test_out/manifest.json"));
    CHECK(fs::exists("emit_test_out/projections.csv"));
    CHECK(log.str().find("ensemble/") != std::string::npos);

    auto manifest = nlohmann::json::parse(read_text_file("emit_test_out/manifest.json"));
    CHECK(manifest["files"].contains("summary.json"));
    std::string recorded = manifest["files"]["summary.json"];
    CHECK(recorded == hash_hex(fnv1a_hash(read_text_file("emit_test_out/summary.json"))));
    CHECK(manifest["version"] == kVersion);

    fs::remove_all("emit_test_out");
}

TEST_CASE("csv writer and hashing basics")
{
    CsvWriter w({"a", "b"});
    w.add_row(std::vector<double>{1.5, 2.0});
    CHECK(w.str() == "a,b\n1.5,2\n");
    CHECK_THROWS_AS(w.add_row(std::vector<double>{1.0}), std::invalid_argument);

    CHECK(fnv1a_hash("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a_hash("abc") != fnv1a_hash("abd"));
    CHECK(hash_hex(0x1234).size() == 16);
}

TEST_SUITE_END();
