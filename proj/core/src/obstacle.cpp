#include <algorithm>
#include <cmath>
#include <sstream>

#include "ocp2d/equilibrium.hpp"

namespace ocp2d {

namespace {

struct ObstacleWorkspace {
    GridSpec grid;
    std::vector<double> psi;      // obstacle V/2, +inf allowed
    std::vector<double> log_dist; // log|z - center| on the boundary ring (0 elsewhere)
    std::vector<double> u;
    double omega = 1.9;
};

// One PSOR pass over cells of the given color; returns max |update|.
double sweep_color(ObstacleWorkspace& w, int color) {
    const int n = w.grid.n;
    double max_upd = 0.0;
    for (int j = 1; j < n - 1; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * n;
        int i = 1 + ((j + 1 + color) % 2);
        for (; i < n - 1; i += 2) {
            const std::size_t idx = row + i;
            const double gs = 0.25 * (w.u[idx - 1] + w.u[idx + 1] + w.u[idx - n] + w.u[idx + n]);
            const double old = w.u[idx];
            double candidate = old + w.omega * (gs - old);
            candidate = std::min(candidate, w.psi[idx]);
            w.u[idx] = candidate;
            max_upd = std::max(max_upd, std::abs(candidate - old));
        }
    }
    return max_upd;
}

double complementarity_residual(const ObstacleWorkspace& w) {
    const int n = w.grid.n;
    double res = 0.0;
    for (int j = 1; j < n - 1; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * n;
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t idx = row + i;
            const double defect =
                w.u[idx - 1] + w.u[idx + 1] + w.u[idx - n] + w.u[idx + n] - 4.0 * w.u[idx];
            const double slack = w.psi[idx] - w.u[idx];
            res = std::max(res, std::abs(std::min(slack, defect)));
        }
    }
    return res;
}

void set_boundary(ObstacleWorkspace& w, double c_far) {
    const int n = w.grid.n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1)
                w.u[w.grid.index(i, j)] = w.log_dist[w.grid.index(i, j)] + c_far;
}

// PSOR to tolerance at fixed far-field constant; returns sweeps used.
int solve_at_constant(ObstacleWorkspace& w, double c_far, double tol, int max_sweeps,
                      double* out_res) {
    set_boundary(w, c_far);
    int sweeps = 0;
    double res = 0.0;
    while (sweeps < max_sweeps) {
        sweep_color(w, 0);
        const double upd = sweep_color(w, 1);
        ++sweeps;
        if (upd < 0.2 * tol || sweeps % 25 == 0) {
            res = complementarity_residual(w);
            if (res < tol) break;
        }
    }
    *out_res = complementarity_residual(w);
    return sweeps;
}

struct Extraction {
    GridMeasure measure;
    std::vector<std::uint8_t> mask;
    bool touches_border = false;
};

Extraction extract_measure(const ObstacleWorkspace& w, double tol) {
    const int n = w.grid.n;
    const double h = w.grid.spacing();
    Extraction ex;
    ex.measure = GridMeasure(w.grid);
    ex.mask.assign(w.grid.cell_count(), 0);
    const double tol_mask = 10.0 * tol;
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t idx = w.grid.index(i, j);
            const double defect =
                w.u[idx - 1] + w.u[idx + 1] + w.u[idx - n] + w.u[idx + n] - 4.0 * w.u[idx];
            ex.measure.density[idx] = std::max(0.0, defect / (h * h) / (2.0 * M_PI));
            if (std::isfinite(w.psi[idx]) && w.psi[idx] - w.u[idx] <= tol_mask) {
                ex.mask[idx] = 1;
                if (i <= 1 || j <= 1 || i >= n - 2 || j >= n - 2) ex.touches_border = true;
            }
        }
    }
    ex.measure.recompute_mass();
    return ex;
}

} // namespace

namespace {

EquilibriumResult solve_obstacle_impl(const Potential& p, const TestFunction* minus_f,
                                      const GridSpec& grid, double tol, int max_iter,
                                      double mass_tol) {
    const int n = grid.n;
    ObstacleWorkspace w;
    w.grid = grid;
    w.psi.resize(grid.cell_count());
    w.log_dist.assign(grid.cell_count(), 0.0);
    w.u.assign(grid.cell_count(), 0.0);
    w.omega = 2.0 / (1.0 + std::sin(M_PI / n));

    bool any_finite_lap = false;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const PlanePoint z = grid.cell_center(i, j);
            const std::size_t idx = grid.index(i, j);
            double v = p.value(z);
            if (minus_f && std::isfinite(v)) v -= minus_f->value(z);
            w.psi[idx] = 0.5 * v;
            if (std::isfinite(v)) any_finite_lap = true;
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1)
                w.log_dist[idx] = std::log(dist(z, grid.center));
        }
    }
    if (!any_finite_lap)
        throw std::invalid_argument("solve_obstacle: potential is infinite on the whole grid");

    // initial guess: obstacle where finite, far-field data elsewhere
    for (std::size_t idx = 0; idx < w.u.size(); ++idx)
        w.u[idx] = std::isfinite(w.psi[idx]) ? w.psi[idx] : 0.0;

    ObstacleDiagnostics diag;
    int sweeps_left = max_iter;

    // outer secant on the far-field constant, enforcing total mass 1;
    // mass is monotone increasing in c
    double c0 = 0.0, c1 = 1.0;
    Extraction ex;
    auto run = [&](double c) {
        double res = 0.0;
        const int used = solve_at_constant(w, c, tol, sweeps_left, &res);
        sweeps_left -= used;
        diag.sweeps += used;
        diag.complementarity_residual = res;
        ++diag.outer_iterations;
        if (sweeps_left <= 0 && res >= tol) {
            diag.mass = extract_measure(w, tol).measure.mass;
            std::ostringstream msg;
            msg << "solve_obstacle: PSOR did not converge within " << max_iter
                << " sweeps (residual " << res << ")";
            throw SolverError(msg.str(), diag);
        }
        ex = extract_measure(w, tol);
        diag.mass = ex.measure.mass;
        return ex.measure.mass;
    };

    const double m0 = run(c0);
    double c = c1;
    double m = run(c1);
    double c_prev = c0, m_prev = m0;
    int outer = 0;
    while (std::abs(m - 1.0) > mass_tol) {
        if (++outer > 40) {
            std::ostringstream msg;
            msg << "solve_obstacle: mass iteration failed to reach 1 (mass " << m << ")";
            throw SolverError(msg.str(), diag);
        }
        double c_next;
        if (m != m_prev) {
            c_next = c + (1.0 - m) * (c - c_prev) / (m - m_prev);
        } else {
            c_next = c + (1.0 - m); // fallback step
        }
        c_prev = c;
        m_prev = m;
        c = c_next;
        m = run(c);
    }

    if (ex.touches_border)
        throw SolverError("solve_obstacle: support touches the outer boundary ring; "
                          "grid box too small",
                          diag);

    EquilibriumResult out;
    out.u = GridField(grid);
    out.u.values = w.u;
    out.measure = std::move(ex.measure);
    out.support_mask = std::move(ex.mask);
    out.F = c;
    out.residuals = diag;
    return out;
}

} // namespace

EquilibriumResult solve_obstacle(const Potential& p, const GridSpec& grid, double tol,
                                 int max_iter, double mass_tol) {
    return solve_obstacle_impl(p, nullptr, grid, tol, max_iter, mass_tol);
}

EquilibriumResult solve_obstacle_perturbed(const Potential& p, const TestFunction& f,
                                           const GridSpec& grid, double tol, int max_iter,
                                           double mass_tol) {
    return solve_obstacle_impl(p, &f, grid, tol, max_iter, mass_tol);
}

} // namespace ocp2d
