#ifndef OCP2D_GEOMETRY_HPP
#define OCP2D_GEOMETRY_HPP

#include <cmath>
#include <complex>

namespace ocp2d {

struct PlanePoint {
    double x = 0.0;
    double y = 0.0;

    friend PlanePoint operator+(PlanePoint a, PlanePoint b) { return {a.x + b.x, a.y + b.y}; }
    friend PlanePoint operator-(PlanePoint a, PlanePoint b) { return {a.x - b.x, a.y - b.y}; }
    friend PlanePoint operator*(double s, PlanePoint a) { return {s * a.x, s * a.y}; }
    friend bool operator==(PlanePoint a, PlanePoint b) { return a.x == b.x && a.y == b.y; }
};

inline double norm2(PlanePoint p) { return p.x * p.x + p.y * p.y; }
inline double norm(PlanePoint p) { return std::hypot(p.x, p.y); }
inline double dist(PlanePoint a, PlanePoint b) { return norm(a - b); }
inline bool is_finite(PlanePoint p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline std::complex<double> to_complex(PlanePoint p) { return {p.x, p.y}; }
inline PlanePoint from_complex(std::complex<double> z) { return {z.real(), z.imag()}; }

struct Disk {
    PlanePoint center;
    double radius = 1.0;

    // closed-disk convention: boundary points count as inside
    bool contains(PlanePoint p) const { return dist(p, center) <= radius; }
};

} // namespace ocp2d

#endif
