#ifndef OCP2D_GRID_HPP
#define OCP2D_GRID_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ocp2d/geometry.hpp"

namespace ocp2d {

/// Uniform n x n cell-centered grid on the square [center - L, center + L]^2.
struct GridSpec {
    PlanePoint center;
    double half_width = 2.0; // L
    int n = 64;              // cells per side

    GridSpec() = default;
    GridSpec(PlanePoint c, double L, int n_) : center(c), half_width(L), n(n_) {
        if (n < 16) throw std::invalid_argument("GridSpec: n must be >= 16");
        if (!(half_width > 0.0)) throw std::invalid_argument("GridSpec: half_width must be positive");
    }

    double spacing() const { return 2.0 * half_width / n; }
    double cell_area() const { double h = spacing(); return h * h; }

    /// center of cell (i, j); i indexes x, j indexes y
    PlanePoint cell_center(int i, int j) const {
        const double h = spacing();
        return {center.x - half_width + (i + 0.5) * h,
                center.y - half_width + (j + 0.5) * h};
    }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n + i; }
    std::size_t cell_count() const { return static_cast<std::size_t>(n) * n; }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.center == b.center && a.half_width == b.half_width && a.n == b.n;
    }
};

struct GridField {
    GridSpec grid;
    std::vector<double> values; // row-major, values[j*n + i]

    GridField() = default;
    explicit GridField(const GridSpec& g) : grid(g), values(g.cell_count(), 0.0) {}

    double& at(int i, int j) { return values[grid.index(i, j)]; }
    double at(int i, int j) const { return values[grid.index(i, j)]; }
};

/// Nonnegative cell-centered density with its quadrature mass kept in sync.
struct GridMeasure {
    GridSpec grid;
    std::vector<double> density;
    double mass = 0.0; // = sum(density) * h^2

    GridMeasure() = default;
    explicit GridMeasure(const GridSpec& g) : grid(g), density(g.cell_count(), 0.0) {}

    double& at(int i, int j) { return density[grid.index(i, j)]; }
    double at(int i, int j) const { return density[grid.index(i, j)]; }

    void recompute_mass() {
        double s = 0.0;
        for (double d : density) s += d;
        mass = s * grid.cell_area();
    }
};

} // namespace ocp2d

#endif
