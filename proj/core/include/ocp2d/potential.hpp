#ifndef OCP2D_POTENTIAL_HPP
#define OCP2D_POTENTIAL_HPP

#include <limits>
#include <optional>
#include <vector>

#include "ocp2d/geometry.hpp"

// Confining potentials V as closed compositional values: an even radial
// polynomial plus logarithmic point-charge terms, optionally hard-walled to a
// disk (or its complement) and rescaled. Values, gradients, and Laplacians are
// exact by construction, so the equilibrium density Delta V / (4 pi) never
// relies on numerical differentiation.

namespace ocp2d {

struct DiscreteCharge {
    PlanePoint location;
    double weight = 1.0; // >= 0
};

/// One additive term coeff * l(z - location), where l is log 1/|.| for
/// smear_radius == 0 and the smoothed kernel l_r for smear_radius > 0.
struct LogCharge {
    PlanePoint location;
    double coeff = 0.0;
    double smear_radius = 0.0;
};

class Potential {
  public:
    static constexpr double infinity = std::numeric_limits<double>::infinity();

    /// V(z) = |z|^2 (Ginibre case)
    static Potential quadratic();

    /// V(z) = sum_k coeffs[k-1] |z|^{2k}, k = 1, 2, ...
    /// Requires at least one strictly positive coefficient.
    static Potential radial(std::vector<double> coeffs);

    /// Adds scale * 2 * sum_i w_i log 1/|z - c_i|.
    Potential with_external_charges(const std::vector<DiscreteCharge>& charges,
                                    double scale) const;

    /// Adds raw logarithmic terms (used for grid-derived charge clouds).
    Potential with_log_charges(std::vector<LogCharge> charges) const;

    /// Hard wall: V unchanged inside the closed disk, +inf outside.
    Potential restricted_to(const Disk& disk) const;

    /// Hard wall on the complement: +inf inside the open disk.
    Potential restricted_outside(const Disk& disk) const;

    /// s * V (multiplies the radial part and every charge term).
    Potential scaled(double s) const;

    double value(PlanePoint z) const;
    PlanePoint gradient(PlanePoint z) const; // throws at a charge pole or outside finite region
    double laplacian(PlanePoint z) const;
    PlanePoint laplacian_gradient(PlanePoint z) const; // gradient of Delta V (radial part)

    bool finite_at(PlanePoint z) const;
    bool is_pure_radial() const { return charges_.empty() && !wall_; }
    const std::vector<double>& radial_coeffs() const { return coeffs_; }
    double radial_scale() const { return scale_; }
    const std::vector<LogCharge>& charges() const { return charges_; }
    const std::optional<Disk>& wall() const { return wall_; }
    bool wall_keeps_inside() const { return wall_keep_inside_; }

    double growth_margin = 1.0; // epsilon in the growth condition, advisory

  private:
    double scale_ = 1.0;
    std::vector<double> coeffs_; // radial polynomial, c_1 first
    std::vector<LogCharge> charges_;
    std::optional<Disk> wall_;
    bool wall_keep_inside_ = true;
};

struct GrowthSample {
    double radius = 0.0;
    double min_margin = 0.0; // min over sampled angles of V(z) - (2+eps) log|z|
};

struct GrowthReport {
    std::vector<GrowthSample> samples;
    bool increasing = false; // advisory trend flag
};

/// Samples V(z) - (2+eps) log|z| on circles of the given radii (all > 1,
/// increasing) and reports whether the minima trend upward. Advisory only.
GrowthReport check_growth(const Potential& p, const std::vector<double>& radii,
                          int angles_per_radius = 64);

} // namespace ocp2d

#endif
