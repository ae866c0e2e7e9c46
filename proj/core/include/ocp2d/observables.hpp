#ifndef OCP2D_OBSERVABLES_HPP
#define OCP2D_OBSERVABLES_HPP

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "ocp2d/sampler.hpp"
#include "ocp2d/test_function.hpp"

// Counts, linear statistics, local-law and rigidity reports, the loop-equation
// residual, and the K_V operator identity. All observables are pure over
// immutable batches; sums use a fixed deterministic order.

namespace ocp2d {

int count_in_disk(const Configuration& c, PlanePoint z0, double r);

double equilibrium_mass_in_disk(const RadialEquilibrium& eq, PlanePoint z0, double r);
double equilibrium_mass_in_disk(const EquilibriumResult& eq, PlanePoint z0, double r);

/// int f dmu by midpoint quadrature over the bump support.
double integrate_against(const RadialEquilibrium& eq, const TestFunction& f);
double integrate_against(const EquilibriumResult& eq, const TestFunction& f);

/// Centered linear statistic X_f = sum_j f(z_j) - N int f dmu_V.
double linear_statistic(const Configuration& c, const TestFunction& f, double f_integral);
double linear_statistic(const Configuration& c, const TestFunction& f,
                        const RadialEquilibrium& eq);
double linear_statistic(const Configuration& c, const TestFunction& f,
                        const EquilibriumResult& eq);

/// Discretize a radial equilibrium onto a grid (subcell weights at the edge).
GridMeasure radial_to_grid(const RadialEquilibrium& eq, const GridSpec& grid);

struct LocalLawReport {
    double scale_s = 0.0;
    double disk_radius = 0.0;      // t/2 = N^{-s}/2
    double expected_count = 0.0;   // N mu_V(B)
    double mean_count = 0.0;
    double mean_rel_count_dev = 0.0;
    double mean_abs_statistic = 0.0; // mean |N^{-1} sum f - int f dmu|
    double theorem_bound = 0.0;      // displayed with implicit constant 1
    double exceed_10x_fraction = 0.0;
    int frames = 0;
};

LocalLawReport local_law_report(const SampleBatch& batch, const RadialEquilibrium& eq,
                                PlanePoint z0, double s);

struct FluctuationRow {
    int N = 0;
    double scale_s = 0.0;
    double var_gas = 0.0;
    double var_null = 0.0;
    double ratio = 0.0;
};

struct FluctuationReport {
    std::vector<FluctuationRow> rows;
    double gas_slope = 0.0;  // fitted log Var vs log N
    double null_slope = 0.0;
};

/// Variance scan of X_f across batches at different N versus the i.i.d. null
/// (null_draws independent configurations per N, seeded from null_seed).
/// The bump is rebuilt per batch with scale t = N^{-s}.
FluctuationReport rigidity_scan(std::span<const SampleBatch> batches, PlanePoint z0, double s,
                                BumpProfile profile, double amplitude,
                                const RadialEquilibrium& eq, int null_draws,
                                std::uint64_t null_seed);

/// h = 4 dbar f / Delta V with its Wirtinger z-derivative.
struct HFunction {
    std::function<std::complex<double>(PlanePoint)> value;
    std::function<std::complex<double>(PlanePoint)> dz;
};

HFunction build_h(const TestFunction& f, const Potential& p);

struct LoopReport {
    std::complex<double> estimate;   // Monte Carlo mean of the loop bracket
    double std_error = 0.0;          // combined (re, im) frame-to-frame error
    int sample_count = 0;
    int skipped_frames = 0;
    std::complex<double> pair_term;  // averages of the three bracket pieces
    std::complex<double> dh_term;
    std::complex<double> v_term;
};

LoopReport loop_residual(const SampleBatch& batch, const HFunction& h, const Potential& p,
                         double beta);

struct KvReport {
    double sup_norm = 0.0; // sup over the stencil of |K_V(dbar f / Delta V) - f/4|
    int stencil_points = 0;
};

/// K_V g(z) = -int (g(z) - g(w))/(z - w) dmu(w) + dV(z) g(z) with g = dbar f / Delta V;
/// the diagonal cell uses the Wirtinger derivative of g.
KvReport kv_identity_check(const TestFunction& f, const GridMeasure& mu, const Potential& p,
                           std::span<const PlanePoint> stencil);

/// Residual of 1/2 iint (f(z)-f(w))/(z-w) dmu dmu - int f dV' dmu (should vanish).
std::complex<double> elff_residual(const TestFunction& f, const GridMeasure& mu,
                                   const Potential& p);

} // namespace ocp2d

#endif
