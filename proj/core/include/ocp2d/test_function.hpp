#ifndef OCP2D_TEST_FUNCTION_HPP
#define OCP2D_TEST_FUNCTION_HPP

#include <array>
#include <complex>
#include <string>

#include "ocp2d/geometry.hpp"

// Compactly supported C^3,1 bumps with closed-form derivatives and recorded
// sup-norm bounds for every derivative order up to 4. Profiles are radial so
// all norms reduce to profile constants scaled by amplitude / radius^l.

namespace ocp2d {

enum class BumpProfile {
    Poly, // (1 - u^2)^4
    Cos,  // cos^4(pi u / 2)
};

class TestFunction {
  public:
    /// Bump centered at z0 with scale t = N^{-s}; support radius t/2.
    static TestFunction make_bump(PlanePoint z0, double s, int N, BumpProfile profile,
                                  double amplitude);

    /// Bump with an explicitly given scale t.
    static TestFunction with_scale(PlanePoint z0, double t, BumpProfile profile, double amplitude);

    double value(PlanePoint z) const;
    PlanePoint gradient(PlanePoint z) const;
    double laplacian(PlanePoint z) const;
    std::complex<double> dbar(PlanePoint z) const; // (f_x + i f_y) / 2
    std::complex<double> dz(PlanePoint z) const;   // (f_x - i f_y) / 2

    PlanePoint center() const { return center_; }
    double scale() const { return t_; }
    double support_radius() const { return 0.5 * t_; }
    double amplitude() const { return amplitude_; }
    BumpProfile profile() const { return profile_; }

    /// Recorded bound on sup |partial^l f| (max over l-th order partials), l = 0..4.
    double norm_bound(int l) const;

    /// || f ||_{k,t} = sum_{l=1..k} t^l ||grad^l f||_inf
    double knorm(int k) const;

    /// L2 norm of the gradient, closed form via the radial profile.
    double grad_l2_norm() const;

  private:
    PlanePoint center_;
    double t_ = 1.0;
    double amplitude_ = 1.0;
    BumpProfile profile_ = BumpProfile::Poly;
};

std::string to_string(BumpProfile p);
BumpProfile bump_profile_from_string(const std::string& s);

} // namespace ocp2d

#endif
