#ifndef OCP2D_KERNEL_HPP
#define OCP2D_KERNEL_HPP

#include <cmath>
#include <stdexcept>
#include <utility>

#include "ocp2d/geometry.hpp"

// Logarithmic interaction kernel log 1/|z-w| and its smoothed variant
// l_r = (-log|.|) * uniform(B(0,r)), shared by every other module.

namespace ocp2d {

/// log(1/|z-w|); throws std::domain_error on coincident points.
/// Energy routines map that case to +infinity instead of throwing.
inline double log_kernel(PlanePoint z, PlanePoint w) {
    const double d = dist(z, w);
    if (d == 0.0)
        throw std::domain_error("log_kernel: coincident points");
    return -std::log(d);
}

/// Smoothed kernel: 1/2 + log(1/r) - |z|^2/(2r^2) for |z| <= r, log(1/|z|) outside.
/// Continuous across |z| = r; inner branch wins at the seam.
inline double smoothed_log(PlanePoint z, double r) {
    if (!(r > 0.0))
        throw std::invalid_argument("smoothed_log: r must be positive");
    const double a2 = norm2(z);
    const double r2 = r * r;
    if (a2 <= r2)
        return 0.5 - std::log(r) - a2 / (2.0 * r2);
    return -0.5 * std::log(a2);
}

struct SmoothedLogDerivs {
    PlanePoint gradient;
    double laplacian;
};

/// gradient = -z / (r^2 v |z|^2); laplacian = -2/r^2 inside B(0,r), 0 outside
/// (inner branch at |z| = r).
inline SmoothedLogDerivs smoothed_log_derivatives(PlanePoint z, double r) {
    if (!(r > 0.0))
        throw std::invalid_argument("smoothed_log_derivatives: r must be positive");
    const double a2 = norm2(z);
    const double r2 = r * r;
    const double denom = std::max(r2, a2);
    SmoothedLogDerivs out;
    out.gradient = {-z.x / denom, -z.y / denom};
    out.laplacian = (a2 <= r2) ? -2.0 / r2 : 0.0;
    return out;
}

} // namespace ocp2d

#endif
