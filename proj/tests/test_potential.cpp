#include <doctest.h>

#include <cmath>

#include "ocp2d/potential.hpp"
#include "ocp2d/rng.hpp"

using namespace ocp2d;

namespace {

// central-difference gradient and five-point laplacian of V
PlanePoint fd_gradient(const Potential& p, PlanePoint z, double h) {
    return {(p.value({z.x + h, z.y}) - p.value({z.x - h, z.y})) / (2 * h),
            (p.value({z.x, z.y + h}) - p.value({z.x, z.y - h})) / (2 * h)};
}

double fd_laplacian(const Potential& p, PlanePoint z, double h) {
    return (p.value({z.x + h, z.y}) + p.value({z.x - h, z.y}) + p.value({z.x, z.y + h}) +
            p.value({z.x, z.y - h}) - 4 * p.value(z)) /
           (h * h);
}

} // namespace

TEST_CASE("quadratic potential") {
    const Potential p = Potential::quadratic();
    CHECK(p.value({1, 0}) == doctest::Approx(1.0));
    CHECK(p.laplacian({0.3, -0.7}) == doctest::Approx(4.0));
    CHECK(p.gradient({0.3, -0.4}).x == doctest::Approx(0.6));
    CHECK(p.gradient({0.3, -0.4}).y == doctest::Approx(-0.8));
}

TEST_CASE("radial family") {
    const Potential quartic = Potential::radial({0, 1});
    for (double r : {0.3, 0.9, 1.7})
        CHECK(quartic.laplacian({r, 0}) == doctest::Approx(16 * r * r));
    CHECK(Potential::radial({1, 1}).value({1, 0}) == doctest::Approx(2.0));

    // pure |z|^2 coincides with the quadratic factory
    const Potential a = Potential::radial({1});
    const Potential b = Potential::quadratic();
    Rng rng(19);
    for (int i = 0; i < 50; ++i) {
        const PlanePoint z{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        CHECK(a.value(z) == doctest::Approx(b.value(z)));
    }

    CHECK_THROWS_AS(Potential::radial({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Potential::radial({}), std::invalid_argument);
}

TEST_CASE("finite-difference consistency at random interior points") {
    const Potential p = Potential::radial({0.5, 0.25, 0.1})
                            .with_external_charges({{{3, 0}, 1.0}, {{0, -3}, 0.5}}, 1.0);
    Rng rng(23);
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
        const PlanePoint z{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        const PlanePoint g = p.gradient(z);
        const PlanePoint gfd = fd_gradient(p, z, h);
        const double scale = std::max(1.0, norm(g));
        CHECK(std::abs(g.x - gfd.x) / scale <= 1e-5);
        CHECK(std::abs(g.y - gfd.y) / scale <= 1e-5);
        const double lap = p.laplacian(z);
        CHECK(std::abs(lap - fd_laplacian(p, z, h)) / std::max(1.0, std::abs(lap)) <= 1e-5);
    }
}

TEST_CASE("external charges") {
    const Potential base = Potential::quadratic();
    const Potential same = base.with_external_charges({}, 1.0);
    Rng rng(29);
    for (int i = 0; i < 20; ++i) {
        const PlanePoint z{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        CHECK(same.value(z) == doctest::Approx(base.value(z)));
    }

    const Potential one = base.with_external_charges({{{2, 0}, 1.0}}, 1.0);
    CHECK(one.value({0, 0}) - base.value({0, 0}) == doctest::Approx(2 * std::log(0.5)));
    CHECK(one.laplacian({0, 0}) == doctest::Approx(base.laplacian({0, 0})));
    CHECK(one.value({2, 0}) == Potential::infinity);
    CHECK_THROWS(one.gradient({2, 0}));

    // composing two charge lists equals composing their concatenation
    const std::vector<DiscreteCharge> l1{{{2, 0}, 1.0}}, l2{{{0, 2}, 0.5}};
    std::vector<DiscreteCharge> both = l1;
    both.insert(both.end(), l2.begin(), l2.end());
    const Potential chained = base.with_external_charges(l1, 1.0).with_external_charges(l2, 1.0);
    const Potential merged = base.with_external_charges(both, 1.0);
    for (int i = 0; i < 20; ++i) {
        const PlanePoint z{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        CHECK(chained.value(z) == doctest::Approx(merged.value(z)));
    }
}

TEST_CASE("hard wall") {
    const Disk B{{0, 0}, 1.0};
    const Potential p = Potential::quadratic().restricted_to(B);
    CHECK(p.value({0.5, 0}) == doctest::Approx(0.25));
    CHECK(p.value({1.5, 0}) == Potential::infinity);
    CHECK(p.gradient({0.5, 0}).x == doctest::Approx(1.0));
    CHECK_FALSE(p.finite_at({2, 0}));
    CHECK(p.finite_at({1.0, 0})); // closed disk

    const Potential q = Potential::quadratic().restricted_outside(B);
    CHECK(q.value({0.5, 0}) == Potential::infinity);
    CHECK(q.value({1.5, 0}) == doctest::Approx(2.25));
}

TEST_CASE("growth check") {
    Potential p = Potential::quadratic();
    p.growth_margin = 1.0;
    const GrowthReport rep = check_growth(p, {2, 5, 10});
    CHECK(rep.increasing);
    CHECK(rep.samples.back().min_margin == doctest::Approx(100 - 3 * std::log(10.0)));

    // log-type decay built from charges only: margin trend must fail
    const Potential bad =
        Potential::radial({1e-12}).with_log_charges({{{0, 0}, 5.0, 0.0}});
    CHECK_FALSE(check_growth(bad, {2, 5, 10, 20}).increasing);

    // hard-walled potential passes vacuously (V = +inf out there)
    const Potential walled = Potential::quadratic().restricted_to({{0, 0}, 1.0});
    CHECK(check_growth(walled, {2, 5, 10}).increasing);
}
