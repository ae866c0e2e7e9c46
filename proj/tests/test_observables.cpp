#include <doctest.h>

#include <cmath>
#include <complex>

#include "ocp2d/observables.hpp"
#include "ocp2d/stats.hpp"

using namespace ocp2d;

namespace {

SampleBatch quick_batch(int N, double beta, int steps, std::uint64_t seed) {
    GasParams params{N, beta, Potential::quadratic()};
    ChainConfig chain;
    chain.steps = steps;
    chain.burn_in = steps / 10;
    chain.thinning = 10;
    chain.seed = seed;
    return run_chain(params, chain, solve_equilibrium_radial(params.potential));
}

} // namespace

TEST_CASE("bump test function values, support, and derivative audit") {
    const TestFunction f = TestFunction::with_scale({0.3, -0.2}, 0.8, BumpProfile::Poly, 2.0);
    CHECK(f.value(f.center()) == doctest::Approx(2.0));
    CHECK(f.support_radius() == doctest::Approx(0.4));
    CHECK(f.value({0.3 + 0.41, -0.2}) == doctest::Approx(0.0));
    CHECK(f.value({0.3, -0.2 - 0.5}) == doctest::Approx(0.0));

    // gradient and laplacian agree with finite differences
    Rng rng(51);
    const double h = 1e-5;
    for (int i = 0; i < 60; ++i) {
        const double r = rng.uniform(0.0, 0.38);
        const double th = rng.uniform(0.0, 2 * M_PI);
        const PlanePoint z{0.3 + r * std::cos(th), -0.2 + r * std::sin(th)};
        const PlanePoint g = f.gradient(z);
        const double gx = (f.value({z.x + h, z.y}) - f.value({z.x - h, z.y})) / (2 * h);
        const double gy = (f.value({z.x, z.y + h}) - f.value({z.x, z.y - h})) / (2 * h);
        CHECK(g.x == doctest::Approx(gx).epsilon(1e-4).scale(1.0));
        CHECK(g.y == doctest::Approx(gy).epsilon(1e-4).scale(1.0));
        const double lap_fd = (f.value({z.x + h, z.y}) + f.value({z.x - h, z.y}) +
                               f.value({z.x, z.y + h}) + f.value({z.x, z.y - h}) -
                               4 * f.value(z)) /
                              (h * h);
        CHECK(f.laplacian(z) == doctest::Approx(lap_fd).epsilon(1e-3).scale(1.0));
        // Wirtinger derivatives compose back to the real gradient
        const std::complex<double> db = f.dbar(z);
        CHECK(db.real() == doctest::Approx(0.5 * g.x));
        CHECK(db.imag() == doctest::Approx(0.5 * g.y));
        CHECK(f.dz(z) == std::conj(db));
    }
}

TEST_CASE("recorded norm bounds dominate sampled derivatives") {
    for (BumpProfile prof : {BumpProfile::Poly, BumpProfile::Cos}) {
        const TestFunction f = TestFunction::with_scale({0, 0}, 0.6, prof, 1.5);
        double max_f = 0, max_g = 0, max_lap = 0;
        for (int i = 0; i <= 600; ++i) {
            const double r = f.support_radius() * i / 600.0;
            const PlanePoint z{r, 0};
            max_f = std::max(max_f, std::abs(f.value(z)));
            max_g = std::max(max_g, norm(f.gradient(z)));
            max_lap = std::max(max_lap, std::abs(f.laplacian(z)));
        }
        CHECK(max_f <= f.norm_bound(0) * (1 + 1e-9));
        CHECK(max_g <= f.norm_bound(1) * (1 + 1e-9));
        CHECK(max_lap <= 2 * f.norm_bound(2) * (1 + 1e-9));
        CHECK(f.knorm(2) >= f.norm_bound(1) * f.scale());

        // closed-form gradient L2 norm against 2D quadrature
        double acc = 0.0;
        const int n = 500;
        const double cell = 2 * f.support_radius() / n;
        for (int j = 0; j < n; ++j)
            for (int i2 = 0; i2 < n; ++i2) {
                const PlanePoint z{-f.support_radius() + (i2 + 0.5) * cell,
                                   -f.support_radius() + (j + 0.5) * cell};
                if (norm(z) < f.support_radius()) acc += norm2(f.gradient(z)) * cell * cell;
            }
        CHECK(std::sqrt(acc) == doctest::Approx(f.grad_l2_norm()).epsilon(1e-3));
    }
}

TEST_CASE("bump scale ties to N") {
    const TestFunction f = TestFunction::make_bump({0, 0}, 0.25, 256, BumpProfile::Poly, 1.0);
    CHECK(f.scale() == doctest::Approx(0.25)); // 256^{-1/4}
    CHECK_THROWS_AS(TestFunction::make_bump({0, 0}, 0.5, 64, BumpProfile::Poly, 1.0),
                    std::invalid_argument);
}

TEST_CASE("counts and equilibrium masses") {
    Configuration c{{{0, 0}, {0.4, 0}, {2, 2}}};
    CHECK(count_in_disk(c, {0, 0}, 0.5) == 2);
    CHECK(count_in_disk(c, {0, 0}, 5.0) == 3);

    const RadialEquilibrium eq = solve_equilibrium_radial(Potential::quadratic());
    CHECK(equilibrium_mass_in_disk(eq, {0, 0}, 0.5) == doctest::Approx(0.25).epsilon(1e-9));
    // off-center disk inside the bulk has mass area / pi
    CHECK(equilibrium_mass_in_disk(eq, {0.3, 0.1}, 0.2) ==
          doctest::Approx(0.04).epsilon(1e-6));
    // grid path agrees
    EquilibriumResult grid_eq;
    grid_eq.measure = radial_to_grid(eq, GridSpec({0, 0}, 2.0, 128));
    CHECK(equilibrium_mass_in_disk(grid_eq, {0.3, 0.1}, 0.2) ==
          doctest::Approx(0.04).epsilon(1e-3));
}

TEST_CASE("linear statistic is centered under the iid null") {
    const RadialEquilibrium eq = solve_equilibrium_radial(Potential::quadratic());
    const TestFunction f = TestFunction::with_scale({0, 0}, 1.0, BumpProfile::Poly, 1.0);
    Rng rng(53);
    std::vector<double> xs;
    for (int d = 0; d < 500; ++d)
        xs.push_back(linear_statistic(iid_null_sample(eq, 64, rng), f, eq));
    CHECK(std::abs(mean(xs)) <= 3 * std_error_iid(xs));
}

TEST_CASE("disjoint disk cover recovers every particle") {
    const SampleBatch batch = quick_batch(16, 1.0, 2000, 99);
    // disks of radius r on a hex-ish square lattice covering |z| <= 1.3 would
    // overlap; instead cover by one big disk and check the complement is empty
    for (const auto& c : batch.configs) {
        const int inside = count_in_disk(c, {0, 0}, 2.5);
        CHECK(inside == 16);
    }
}

TEST_CASE("loop residual: h = z reduction and linearity") {
    const SampleBatch batch = quick_batch(16, 1.0, 20000, 101);
    const Potential V = Potential::quadratic();

    HFunction hz;
    hz.value = [](PlanePoint z) { return std::complex<double>(z.x, z.y); };
    hz.dz = [](PlanePoint) { return std::complex<double>(1.0, 0.0); };
    const LoopReport r = loop_residual(batch, hz, V, 1.0);
    CHECK(r.sample_count == static_cast<int>(batch.configs.size()));
    CHECK(r.skipped_frames == 0);
    CHECK(std::abs(r.estimate) <= 3 * r.std_error + 1e-9);
    // pair term is exactly N(N-1)/2 and the derivative term N/beta
    CHECK(r.pair_term.real() == doctest::Approx(120.0));
    CHECK(r.dh_term.real() == doctest::Approx(16.0));

    // multiplying h by a complex scalar scales the estimate
    const std::complex<double> c{2.0, -3.0};
    HFunction hc;
    hc.value = [c](PlanePoint z) { return c * std::complex<double>(z.x, z.y); };
    hc.dz = [c](PlanePoint) { return c; };
    const LoopReport rc = loop_residual(batch, hc, V, 1.0);
    CHECK(rc.estimate.real() == doctest::Approx((c * r.estimate).real()).epsilon(1e-9));
    CHECK(rc.estimate.imag() == doctest::Approx((c * r.estimate).imag()).epsilon(1e-9));

    // constant h: only the confinement term survives and centers at zero
    HFunction hconst;
    hconst.value = [](PlanePoint) { return std::complex<double>(1.0, 0.0); };
    hconst.dz = [](PlanePoint) { return std::complex<double>(0.0, 0.0); };
    const LoopReport r0 = loop_residual(batch, hconst, V, 1.0);
    CHECK(std::abs(r0.estimate) <= 3 * r0.std_error + 1e-9);
}

TEST_CASE("build_h rejects a vanishing laplacian and matches the bump") {
    const TestFunction f = TestFunction::with_scale({0, 0}, 1.0, BumpProfile::Poly, 1.0);
    CHECK_THROWS_AS(build_h(f, Potential::radial({0, 1})), std::domain_error);

    const HFunction h = build_h(f, Potential::quadratic());
    // for quadratic V: h = dbar f, and dz h = lap f / 4
    const PlanePoint z{0.2, -0.1};
    CHECK(h.value(z).real() == doctest::Approx(f.dbar(z).real()));
    CHECK(h.value(z).imag() == doctest::Approx(f.dbar(z).imag()));
    CHECK(h.dz(z).real() == doctest::Approx(f.laplacian(z) / 4.0));
    CHECK(h.dz(z).imag() == doctest::Approx(0.0));
    CHECK(std::abs(h.value({3, 3})) == doctest::Approx(0.0));
}

TEST_CASE("K_V identity converges on grid refinement") {
    const Potential V = Potential::quadratic();
    const TestFunction f = TestFunction::with_scale({0, 0}, 1.0, BumpProfile::Poly, 1.0);
    const RadialEquilibrium eq = solve_equilibrium_radial(V);
    std::vector<PlanePoint> stencil{{0, 0}, {0.3, 0}, {0, 0.3}, {-0.2, 0.2}};

    const double e64 =
        kv_identity_check(f, radial_to_grid(eq, GridSpec({0, 0}, 2.0, 64)), V, stencil).sup_norm;
    const double e128 =
        kv_identity_check(f, radial_to_grid(eq, GridSpec({0, 0}, 2.0, 128)), V, stencil).sup_norm;
    CHECK(e128 < e64);
    CHECK(e128 <= 1e-2);

    // f = 0 gives an identically zero residual
    const TestFunction zero = TestFunction::with_scale({0, 0}, 1.0, BumpProfile::Poly, 0.0);
    CHECK(kv_identity_check(zero, radial_to_grid(eq, GridSpec({0, 0}, 2.0, 64)), V, stencil)
              .sup_norm == doctest::Approx(0.0));

    const std::complex<double> companion =
        elff_residual(f, radial_to_grid(eq, GridSpec({0, 0}, 2.0, 128)), V);
    CHECK(std::abs(companion) <= 1e-6);
}

TEST_CASE("local law report contract") {
    const SampleBatch batch = quick_batch(64, 1.0, 4000, 103);
    const RadialEquilibrium eq = solve_equilibrium_radial(Potential::quadratic());
    const LocalLawReport rep = local_law_report(batch, eq, {0, 0}, 0.25);
    CHECK(rep.frames == static_cast<int>(batch.configs.size()));
    CHECK(rep.disk_radius == doctest::Approx(0.5 * std::pow(64.0, -0.25)));
    CHECK(rep.expected_count ==
          doctest::Approx(64 * eq.mass_in_radius(rep.disk_radius)).epsilon(1e-9));
    CHECK(rep.theorem_bound > 0.0);
    CHECK(rep.mean_count > 0.0);
}

TEST_CASE("rigidity scan produces rows and slopes") {
    std::vector<SampleBatch> batches;
    batches.push_back(quick_batch(16, 1.0, 4000, 105));
    batches.push_back(quick_batch(32, 1.0, 4000, 106));
    const RadialEquilibrium eq = solve_equilibrium_radial(Potential::quadratic());
    const FluctuationReport rep =
        rigidity_scan(batches, {0, 0}, 0.0, BumpProfile::Poly, 1.0, eq, 200, 7);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].N == 16);
    CHECK(rep.rows[1].N == 32);
    for (const auto& row : rep.rows) {
        CHECK(row.var_gas > 0.0);
        CHECK(row.var_null > 0.0);
        CHECK(row.ratio == doctest::Approx(row.var_gas / row.var_null));
    }
    CHECK(rep.null_slope > 0.0); // null variance grows with N
}
