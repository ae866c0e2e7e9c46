#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ocp2d/io.hpp"
#include "ocp2d/rng.hpp"

using namespace ocp2d;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ocp2d_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("potential JSON round trip") {
    const Potential p = Potential::radial({0.5, 0.25})
                            .scaled(2.0)
                            .with_log_charges({{{1.5, -0.5}, 0.7, 0.1}})
                            .restricted_to({{0, 0}, 1.2});
    const Potential q = potential_from_json(potential_to_json(p));
    Rng rng(61);
    for (int i = 0; i < 50; ++i) {
        const PlanePoint z{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        CHECK(p.value(z) == q.value(z));
        if (p.finite_at(z)) CHECK(p.laplacian(z) == q.laplacian(z));
    }
    CHECK(p.wall()->radius == q.wall()->radius);
}

TEST_CASE("config parsing and unknown-key rejection") {
    const ExperimentConfig cfg = parse_config(R"({
        "potential": {"kind": "radial", "coefficients": [0, 1]},
        "gas": {"N": [16, 32], "beta": [0.5, 1.0]},
        "chain": {"steps": 100, "burn_in": 10, "thinning": 2, "algorithm": "gradient"},
        "equilibrium": {"n": 64, "half_width": 1.5},
        "observables": {"scales": [0.25, 0.4], "profile": "cos"},
        "output_dir": "/tmp/x",
        "seed": 99
    })");
    CHECK(cfg.particle_counts == std::vector<int>{16, 32});
    CHECK(cfg.betas == std::vector<double>{0.5, 1.0});
    CHECK(cfg.chain.algorithm == ChainAlgorithm::GradientProposal);
    CHECK(cfg.equilibrium.n == 64);
    CHECK(cfg.observables.profile == BumpProfile::Cos);
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.has_seed);

    CHECK_THROWS_AS(parse_config(R"({"gsa": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"gas": {"N": 16, "bta": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"observables": {"scales": [0.6]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"gas": {"beta": -1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    // error message names the offending field
    try {
        parse_config(R"({"chain": {"stps": 5}})");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("stps") != std::string::npos);
    }
}

TEST_CASE("equilibrium result round trip") {
    const TempDir tmp;
    const EquilibriumResult eq = solve_obstacle(Potential::quadratic(), GridSpec({0, 0}, 2.0, 32));
    const fs::path file = tmp.path / "eq.bin";
    write_equilibrium_result(file.string(), eq);
    const EquilibriumResult back = read_equilibrium_result(file.string());
    CHECK(back.u.grid == eq.u.grid);
    CHECK(back.F == eq.F);
    CHECK(back.u.values == eq.u.values);
    CHECK(back.measure.density == eq.measure.density);
    CHECK(back.support_mask == eq.support_mask);
    CHECK(back.residuals.sweeps == eq.residuals.sweeps);

    // deterministic bytes on rewrite
    const fs::path file2 = tmp.path / "eq2.bin";
    write_equilibrium_result(file2.string(), eq);
    CHECK(slurp(file) == slurp(file2));
}

TEST_CASE("sample batch round trip, determinism, and truncation recovery") {
    const TempDir tmp;
    GasParams params{6, 1.0, Potential::quadratic()};
    ChainConfig chain;
    chain.steps = 200;
    chain.burn_in = 50;
    chain.thinning = 5;
    chain.seed = 4242;
    const SampleBatch batch =
        run_chain(params, chain, solve_equilibrium_radial(params.potential));

    const fs::path file = tmp.path / "batch.bin";
    write_sample_batch(file.string(), batch);
    const SampleBatch back = read_sample_batch(file.string());
    CHECK(back.params.N == 6);
    CHECK(back.chain.seed == 4242);
    REQUIRE(back.configs.size() == batch.configs.size());
    for (std::size_t t = 0; t < batch.configs.size(); ++t)
        for (int k = 0; k < 6; ++k) {
            CHECK(back.configs[t].points[k].x == batch.configs[t].points[k].x);
            CHECK(back.configs[t].points[k].y == batch.configs[t].points[k].y);
        }
    CHECK(back.energies == batch.energies);
    CHECK(back.acceptance_rate == batch.acceptance_rate);

    const fs::path file2 = tmp.path / "batch2.bin";
    write_sample_batch(file2.string(), batch);
    CHECK(slurp(file) == slurp(file2));

    // chop the footer and half a frame off: reader recovers whole frames
    std::string bytes = slurp(file);
    const std::size_t frame_bytes = 6 * 2 * sizeof(double);
    std::string cut = bytes.substr(0, bytes.size() - 1200);
    const fs::path trunc = tmp.path / "trunc.bin";
    std::ofstream(trunc, std::ios::binary) << cut;
    const SampleBatch partial = read_sample_batch(trunc.string());
    CHECK(partial.configs.size() < batch.configs.size());
    CHECK(partial.configs.size() > 0);
    CHECK(partial.energies.size() == partial.configs.size());
    for (std::size_t t = 0; t < partial.configs.size(); ++t)
        CHECK(partial.configs[t].points[0].x == batch.configs[t].points[0].x);
    (void)frame_bytes;
}

TEST_CASE("corrupt files are rejected") {
    const TempDir tmp;
    const fs::path junk = tmp.path / "junk.bin";
    std::ofstream(junk, std::ios::binary) << "definitely not a batch";
    CHECK_THROWS(read_sample_batch(junk.string()));
    CHECK_THROWS(read_equilibrium_result(junk.string()));
    CHECK_THROWS(load_config((tmp.path / "missing.json").string()));
}
