#include "ocp2d/potential.hpp"

#include <cmath>
#include <stdexcept>

#include "ocp2d/kernel.hpp"

namespace ocp2d {

Potential Potential::quadratic() {
    Potential p;
    p.coeffs_ = {1.0};
    return p;
}

Potential Potential::radial(std::vector<double> coeffs) {
    bool any_positive = false;
    for (double c : coeffs) {
        if (c < 0.0) throw std::invalid_argument("Potential::radial: coefficients must be nonnegative");
        if (c > 0.0) any_positive = true;
    }
    if (!any_positive)
        throw std::invalid_argument("Potential::radial: need a strictly positive coefficient");
    Potential p;
    p.coeffs_ = std::move(coeffs);
    return p;
}

Potential Potential::with_external_charges(const std::vector<DiscreteCharge>& charges,
                                           double scale) const {
    Potential p = *this;
    for (const auto& c : charges) {
        if (c.weight < 0.0)
            throw std::invalid_argument("with_external_charges: weight must be nonnegative");
        if (!is_finite(c.location))
            throw std::invalid_argument("with_external_charges: non-finite charge location");
        p.charges_.push_back({c.location, 2.0 * scale * c.weight, 0.0});
    }
    return p;
}

Potential Potential::with_log_charges(std::vector<LogCharge> charges) const {
    Potential p = *this;
    for (auto& c : charges) p.charges_.push_back(c);
    return p;
}

Potential Potential::restricted_to(const Disk& disk) const {
    if (!(disk.radius > 0.0))
        throw std::invalid_argument("restricted_to: disk radius must be positive");
    if (wall_) throw std::invalid_argument("restricted_to: potential already hard-walled");
    Potential p = *this;
    p.wall_ = disk;
    p.wall_keep_inside_ = true;
    return p;
}

Potential Potential::restricted_outside(const Disk& disk) const {
    if (!(disk.radius > 0.0))
        throw std::invalid_argument("restricted_outside: disk radius must be positive");
    if (wall_) throw std::invalid_argument("restricted_outside: potential already hard-walled");
    Potential p = *this;
    p.wall_ = disk;
    p.wall_keep_inside_ = false;
    return p;
}

Potential Potential::scaled(double s) const {
    if (!(s > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
    Potential p = *this;
    p.scale_ *= s;
    for (auto& c : p.charges_) c.coeff *= s;
    return p;
}

bool Potential::finite_at(PlanePoint z) const {
    if (!wall_) return true;
    const bool inside = wall_->contains(z);
    return wall_keep_inside_ ? inside : !inside;
}

double Potential::value(PlanePoint z) const {
    if (!finite_at(z)) return infinity;
    const double r2 = norm2(z);
    double v = 0.0;
    double p = 1.0; // (r^2)^k running power
    for (double c : coeffs_) {
        p *= r2;
        v += c * p;
    }
    v *= scale_;
    for (const auto& c : charges_) {
        const PlanePoint d = z - c.location;
        if (c.smear_radius > 0.0) {
            v += c.coeff * smoothed_log(d, c.smear_radius);
        } else {
            const double dd = norm2(d);
            if (dd == 0.0) return infinity;
            v += c.coeff * (-0.5 * std::log(dd));
        }
    }
    return v;
}

PlanePoint Potential::gradient(PlanePoint z) const {
    if (!finite_at(z))
        throw std::domain_error("Potential::gradient: point outside finite region");
    const double r2 = norm2(z);
    double radial = 0.0; // dV/d(r^2) summed, gradient = 2 * radial * z
    double p = 1.0;
    for (std::size_t k = 1; k <= coeffs_.size(); ++k) {
        radial += coeffs_[k - 1] * static_cast<double>(k) * p;
        p *= r2;
    }
    PlanePoint g{2.0 * scale_ * radial * z.x, 2.0 * scale_ * radial * z.y};
    for (const auto& c : charges_) {
        const PlanePoint d = z - c.location;
        if (c.smear_radius > 0.0) {
            const auto sd = smoothed_log_derivatives(d, c.smear_radius);
            g.x += c.coeff * sd.gradient.x;
            g.y += c.coeff * sd.gradient.y;
        } else {
            const double dd = norm2(d);
            if (dd == 0.0)
                throw std::domain_error("Potential::gradient: evaluation at a charge location");
            g.x += c.coeff * (-d.x / dd);
            g.y += c.coeff * (-d.y / dd);
        }
    }
    return g;
}

double Potential::laplacian(PlanePoint z) const {
    if (!finite_at(z))
        throw std::domain_error("Potential::laplacian: point outside finite region");
    const double r2 = norm2(z);
    double lap = 0.0;
    double p = 1.0; // (r^2)^{k-1}
    for (std::size_t k = 1; k <= coeffs_.size(); ++k) {
        lap += 4.0 * static_cast<double>(k * k) * coeffs_[k - 1] * p;
        p *= r2;
    }
    lap *= scale_;
    // log charges are harmonic off their pole; smeared ones carry -2/r^2 inside
    for (const auto& c : charges_) {
        if (c.smear_radius > 0.0 && dist(z, c.location) <= c.smear_radius)
            lap += c.coeff * (-2.0 / (c.smear_radius * c.smear_radius));
    }
    return lap;
}

PlanePoint Potential::laplacian_gradient(PlanePoint z) const {
    const double r2 = norm2(z);
    double radial = 0.0; // d(DeltaV)/d(r^2), gradient = 2 * radial * z
    double p = 1.0;      // (r^2)^{k-2}
    for (std::size_t k = 2; k <= coeffs_.size(); ++k) {
        radial += 4.0 * static_cast<double>(k * k) * static_cast<double>(k - 1) * coeffs_[k - 1] * p;
        p *= r2;
    }
    return {2.0 * scale_ * radial * z.x, 2.0 * scale_ * radial * z.y};
}

GrowthReport check_growth(const Potential& p, const std::vector<double>& radii,
                          int angles_per_radius) {
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] <= 1.0) throw std::invalid_argument("check_growth: radii must exceed 1");
        if (i > 0 && radii[i] <= radii[i - 1])
            throw std::invalid_argument("check_growth: radii must be increasing");
    }
    GrowthReport rep;
    const double eps = p.growth_margin;
    for (double r : radii) {
        double mn = Potential::infinity;
        for (int a = 0; a < angles_per_radius; ++a) {
            const double th = 2.0 * M_PI * a / angles_per_radius;
            const PlanePoint z{r * std::cos(th), r * std::sin(th)};
            const double margin = p.value(z) - (2.0 + eps) * std::log(r);
            mn = std::min(mn, margin);
        }
        rep.samples.push_back({r, mn});
    }
    rep.increasing = rep.samples.size() >= 2;
    for (std::size_t i = 1; i < rep.samples.size(); ++i) {
        const double a = rep.samples[i - 1].min_margin;
        const double b = rep.samples[i].min_margin;
        if (std::isinf(a) && std::isinf(b)) continue; // outside a hard wall: vacuously fine
        if (b <= a) rep.increasing = false;
    }
    return rep;
}

} // namespace ocp2d
