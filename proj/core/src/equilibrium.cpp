#include <algorithm>
#include <cmath>
#include <sstream>

#include "ocp2d/equilibrium.hpp"

namespace ocp2d {

namespace {

// 64-node Gauss-Legendre on [a, b]
template <typename F>
double gauss_legendre(F f, double a, double b, int panels = 8) {
    static const double xs[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                 -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double ws[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    double acc = 0.0;
    const double hp = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * hp;
        const double mid = lo + 0.5 * hp;
        for (int k = 0; k < 8; ++k) acc += ws[k] * f(mid + 0.5 * hp * xs[k]);
    }
    return acc * 0.5 * hp;
}

// fraction of the cell centered at c (side h) lying inside the disk, 4x4 subcells
double cell_fraction_in_disk(PlanePoint c, double h, const Disk& B) {
    // quick accept/reject by the cell circumradius
    const double d = dist(c, B.center);
    const double circum = h * 0.70710678118654752;
    if (d + circum <= B.radius) return 1.0;
    if (d - circum >= B.radius) return 0.0;
    int inside = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const PlanePoint s{c.x + (-0.375 + 0.25 * a) * h, c.y + (-0.375 + 0.25 * b) * h};
            if (B.contains(s)) ++inside;
        }
    return inside / 16.0;
}

} // namespace

double RadialEquilibrium::density(double r) const {
    if (r > support_radius) return 0.0;
    return potential.laplacian({r, 0.0}) / (4.0 * M_PI);
}

double RadialEquilibrium::mass_in_radius(double r) const {
    const double rr = std::min(r, support_radius);
    // (1/2) int_0^r Delta V s ds = scale * sum_k k c_k r^{2k}, exact for the radial family
    const auto& c = potential.radial_coeffs();
    double m = 0.0;
    double p = 1.0;
    const double r2 = rr * rr;
    for (std::size_t k = 1; k <= c.size(); ++k) {
        p *= r2;
        m += static_cast<double>(k) * c[k - 1] * p;
    }
    return potential.radial_scale() * m;
}

RadialEquilibrium solve_equilibrium_radial(const Potential& p) {
    if (!p.is_pure_radial())
        throw std::invalid_argument("solve_equilibrium_radial: potential must be pure radial");

    RadialEquilibrium eq;
    eq.potential = p;
    eq.support_radius = 1.0;

    // bracket the support radius, then bisect mass(R) = 1 to 1e-10
    double lo = 0.0, hi = 1.0;
    while (eq.mass_in_radius(hi) < 1.0) {
        hi *= 2.0;
        if (hi > 1e8)
            throw std::runtime_error("solve_equilibrium_radial: normalization unreachable");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        eq.support_radius = mid;
        if (eq.mass_in_radius(mid) < 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
    }
    eq.support_radius = 0.5 * (lo + hi);

    // F = U^mu(0) + V(0)/2; U^mu(0) = int_0^R log(1/r) rho(r) 2 pi r dr
    const double R = eq.support_radius;
    const double umu0 = gauss_legendre(
        [&](double r) { return -std::log(r) * eq.density(r) * 2.0 * M_PI * r; }, 0.0, R, 64);
    eq.F = umu0 + 0.5 * p.value({0.0, 0.0});
    return eq;
}

double potential_pairing(const GridMeasure& m, const Potential& p) {
    const double h2 = m.grid.cell_area();
    double acc = 0.0;
    for (int j = 0; j < m.grid.n; ++j)
        for (int i = 0; i < m.grid.n; ++i) {
            const double rho = m.at(i, j);
            if (rho == 0.0) continue;
            const double v = p.value(m.grid.cell_center(i, j));
            if (!std::isfinite(v))
                throw std::domain_error("potential pairing: measure has mass where V = +inf");
            acc += rho * v;
        }
    return acc * h2;
}

double test_function_pairing(const GridMeasure& m, const TestFunction& f) {
    const double h2 = m.grid.cell_area();
    double acc = 0.0;
    for (int j = 0; j < m.grid.n; ++j)
        for (int i = 0; i < m.grid.n; ++i) {
            const double rho = m.at(i, j);
            if (rho == 0.0) continue;
            acc += rho * f.value(m.grid.cell_center(i, j));
        }
    return acc * h2;
}

double energy_functional(const GridMeasure& m, const Potential& p) {
    const GridField u = log_potential_of_measure(m, m.grid);
    const double h2 = m.grid.cell_area();
    double dd = 0.0;
    for (std::size_t idx = 0; idx < m.density.size(); ++idx) dd += u.values[idx] * m.density[idx];
    return dd * h2 + potential_pairing(m, p);
}

EulerLagrangeReport euler_lagrange_residual(const EquilibriumResult& eq, const Potential& p) {
    const GridField u = log_potential_of_measure(eq.measure, eq.measure.grid);
    const GridSpec& g = eq.measure.grid;
    EulerLagrangeReport rep;
    rep.min_off_support = Potential::infinity;
    for (int j = 1; j < g.n - 1; ++j) {
        for (int i = 1; i < g.n - 1; ++i) {
            const double v = p.value(g.cell_center(i, j));
            if (!std::isfinite(v)) continue;
            const double zeta = u.at(i, j) + 0.5 * v - eq.F;
            if (eq.mask_at(i, j))
                rep.max_on_support = std::max(rep.max_on_support, std::abs(zeta));
            else
                rep.min_off_support = std::min(rep.min_off_support, zeta);
        }
    }
    return rep;
}

GridMeasure perturb_equilibrium(const EquilibriumResult& eq, const Potential& p,
                                const TestFunction& f) {
    const GridSpec& g = eq.measure.grid;
    std::vector<std::pair<int, int>> offenders;
    GridMeasure out = eq.measure;
    for (int j = 0; j < g.n; ++j) {
        for (int i = 0; i < g.n; ++i) {
            const PlanePoint z = g.cell_center(i, j);
            const double lapf = f.laplacian(z);
            if (lapf == 0.0) continue;
            if (!eq.mask_at(i, j) || lapf > p.laplacian(z)) {
                if (offenders.size() < 8) offenders.emplace_back(i, j);
                continue;
            }
            out.at(i, j) -= lapf / (4.0 * M_PI);
        }
    }
    if (!offenders.empty()) {
        std::ostringstream msg;
        msg << "perturb_equilibrium: precondition violated (supp lap f outside support mask "
               "or lap f > lap V) at cells:";
        for (auto [i, j] : offenders) msg << " (" << i << "," << j << ")";
        throw std::domain_error(msg.str());
    }
    out.recompute_mass();
    return out;
}

EnergyIdentity perturbation_energy_identity(const EquilibriumResult& eq, const Potential& p,
                                            const TestFunction& f) {
    const GridMeasure perturbed = perturb_equilibrium(eq, p, f);
    EnergyIdentity id;
    id.lhs = energy_functional(perturbed, p) - test_function_pairing(perturbed, f);

    // (f, -lap f) by grid quadrature of the analytic values
    const GridSpec& g = eq.measure.grid;
    const double h2 = g.cell_area();
    double f_nlapf = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const PlanePoint z = g.cell_center(i, j);
            f_nlapf += f.value(z) * (-f.laplacian(z));
        }
    f_nlapf *= h2;

    id.rhs = energy_functional(eq.measure, p) - test_function_pairing(eq.measure, f) -
             f_nlapf / (8.0 * M_PI);
    return id;
}

double grid_mass_in_disk(const GridMeasure& m, const Disk& B) {
    const double h = m.grid.spacing();
    double acc = 0.0;
    for (int j = 0; j < m.grid.n; ++j)
        for (int i = 0; i < m.grid.n; ++i) {
            const double rho = m.at(i, j);
            if (rho == 0.0) continue;
            acc += rho * cell_fraction_in_disk(m.grid.cell_center(i, j), h, B);
        }
    return acc * m.grid.cell_area();
}

Potential restriction_potential(const EquilibriumResult& eq, const Potential& p, const Disk& B) {
    const GridSpec& g = eq.measure.grid;
    const double h = g.spacing();

    // B must sit inside the support: every cell meeting B has to be masked
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            if (cell_fraction_in_disk(g.cell_center(i, j), h, B) == 1.0 && !eq.mask_at(i, j))
                throw std::domain_error("restriction_potential: disk escapes the support");

    const double muB = grid_mass_in_disk(eq.measure, B);
    if (!(muB > 0.0))
        throw std::domain_error("restriction_potential: mu_V(B) must be positive");

    std::vector<LogCharge> charges;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const double rho = eq.measure.at(i, j);
            if (rho == 0.0) continue;
            const PlanePoint c = g.cell_center(i, j);
            const double outside = 1.0 - cell_fraction_in_disk(c, h, B);
            if (outside == 0.0) continue;
            charges.push_back({c, 2.0 * rho * g.cell_area() * outside / muB, 0.5 * h});
        }

    return p.scaled(1.0 / muB).with_log_charges(std::move(charges)).restricted_to(B);
}

} // namespace ocp2d
