#ifndef OCP2D_EQUILIBRIUM_HPP
#define OCP2D_EQUILIBRIUM_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocp2d/grid.hpp"
#include "ocp2d/potential.hpp"
#include "ocp2d/test_function.hpp"

// Equilibrium measures three ways: radial closed form, grid obstacle problem
// (PSOR on the complementarity system), and closed-form perturbation /
// restriction identities. Plus the weighted energy functional, logarithmic
// potentials of grid measures, and Euler-Lagrange residuals.

namespace ocp2d {

/// Disk-supported radial equilibrium: density Delta V / (4 pi) on [0, R].
struct RadialEquilibrium {
    Potential potential;
    double support_radius = 1.0; // R
    double F = 0.0;              // Robin-type constant

    double density(double r) const; // Delta V(r) / (4 pi) for r <= R, else 0
    double mass_in_radius(double r) const; // closed form, origin-centered
};

/// Solves (1/2) int_0^R Delta V r dr = 1 by bisection (1e-10) and computes F
/// from U^mu(0) + V(0)/2 by radial quadrature. Requires a pure radial
/// potential with positive Laplacian off the origin (disk-support regime).
RadialEquilibrium solve_equilibrium_radial(const Potential& p);

struct ObstacleDiagnostics {
    double complementarity_residual = 0.0; // max |min(V/2 - u, h^2 lap u)|
    double mass = 0.0;
    int sweeps = 0;
    int outer_iterations = 0;
};

struct EquilibriumResult {
    GridField u;
    GridMeasure measure;
    std::vector<std::uint8_t> support_mask; // 1 on the coincidence set
    double F = 0.0;
    ObstacleDiagnostics residuals;

    bool mask_at(int i, int j) const { return support_mask[u.grid.index(i, j)] != 0; }
};

class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& msg, ObstacleDiagnostics diag)
        : std::runtime_error(msg), diagnostics(diag) {}
    ObstacleDiagnostics diagnostics;
};

/// Projected SOR (red-black) on min(V/2 - u, lap_h u) = 0 with far-field
/// Dirichlet data log|z - center| + c; c is adjusted by an outer secant
/// iteration until the extracted measure has mass 1. Returns F = c.
EquilibriumResult solve_obstacle(const Potential& p, const GridSpec& grid, double tol = 1e-7,
                                 int max_iter = 200000, double mass_tol = 1e-5);

/// Same solver with obstacle (V - f)/2: the independent route to mu_{V-f}.
EquilibriumResult solve_obstacle_perturbed(const Potential& p, const TestFunction& f,
                                           const GridSpec& grid, double tol = 1e-7,
                                           int max_iter = 200000, double mass_tol = 1e-5);

/// U^mu on eval_grid by direct cell summation. The self cell uses the exact
/// integral of log over a square; cells within 2 spacings use a 4-point
/// subcell rule.
GridField log_potential_of_measure(const GridMeasure& m, const GridSpec& eval_grid);

/// U^mu at a single point (generic path, any location).
double log_potential_at(const GridMeasure& m, PlanePoint z);

/// I_V(m) = D(m, m) + (V, m); error if m puts mass where V = +inf.
double energy_functional(const GridMeasure& m, const Potential& p);

/// (V, m) alone (same quadrature rule as energy_functional).
double potential_pairing(const GridMeasure& m, const Potential& p);

/// (f, m) for a test function.
double test_function_pairing(const GridMeasure& m, const TestFunction& f);

struct EulerLagrangeReport {
    double max_on_support = 0.0;  // max |U + V/2 - F| over support cells
    double min_off_support = 0.0; // min of U + V/2 - F over off-support cells
};

EulerLagrangeReport euler_lagrange_residual(const EquilibriumResult& eq, const Potential& p);

/// Closed-form perturbed measure mu_{V-f} = mu_V - lap f / (4 pi).
/// Preconditions (checked cell-wise): supp lap f inside the support mask and
/// lap f <= lap V there.
GridMeasure perturb_equilibrium(const EquilibriumResult& eq, const Potential& p,
                                const TestFunction& f);

struct EnergyIdentity {
    double lhs = 0.0; // I_{V-f}(mu_{V-f})
    double rhs = 0.0; // I_V(mu_V) - (f, mu_V) - (1/8pi)(f, -lap f)
};

EnergyIdentity perturbation_energy_identity(const EquilibriumResult& eq, const Potential& p,
                                            const TestFunction& f);

/// W = (V + 2 int_{S \ B} log 1/|z-w| dmu_V(w)) / mu_V(B), hard-walled to B.
/// Grid cells outside B become smeared log charges (radius h/2).
Potential restriction_potential(const EquilibriumResult& eq, const Potential& p, const Disk& B);

/// mu(B) for a grid measure, with subcell area weighting at the disk boundary.
double grid_mass_in_disk(const GridMeasure& m, const Disk& B);

} // namespace ocp2d

#endif
