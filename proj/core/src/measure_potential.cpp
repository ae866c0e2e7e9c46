#include <cmath>
#include <vector>

#include "ocp2d/equilibrium.hpp"

namespace ocp2d {

namespace {

// exact integral of log(1/|x|) over the square of side h centered at 0
double self_cell_integral(double h) {
    const double b = 0.5 * h;
    return -2.0 * b * b * (2.0 * std::log(b) + std::log(2.0) + 0.5 * M_PI - 3.0);
}

// 4-point subcell midpoint rule for a cell at offset d from the evaluation point
double near_cell_integral(PlanePoint d, double h) {
    const double q = 0.25 * h;
    double s = 0.0;
    s += -std::log(std::hypot(d.x - q, d.y - q));
    s += -std::log(std::hypot(d.x - q, d.y + q));
    s += -std::log(std::hypot(d.x + q, d.y - q));
    s += -std::log(std::hypot(d.x + q, d.y + q));
    return 0.25 * h * h * s;
}

// table of cell-averaged kernel integrals per integer offset (di, dj), di/dj >= 0
std::vector<double> build_kernel_table(const GridSpec& g) {
    const int n = g.n;
    const double h = g.spacing();
    std::vector<double> table(static_cast<std::size_t>(n) * n);
    for (int dj = 0; dj < n; ++dj) {
        for (int di = 0; di < n; ++di) {
            const std::size_t idx = static_cast<std::size_t>(dj) * n + di;
            if (di == 0 && dj == 0) {
                table[idx] = self_cell_integral(h);
            } else if (di <= 2 && dj <= 2) {
                table[idx] = near_cell_integral({di * h, dj * h}, h);
            } else {
                table[idx] = -h * h * std::log(h * std::hypot(di, dj));
            }
        }
    }
    return table;
}

} // namespace

GridField log_potential_of_measure(const GridMeasure& m, const GridSpec& eval_grid) {
    GridField out(eval_grid);
    if (eval_grid == m.grid) {
        // same-grid fast path via the offset table
        const int n = m.grid.n;
        const std::vector<double> table = build_kernel_table(m.grid);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int sj = 0; sj < n; ++sj) {
                    const double* trow = table.data() + static_cast<std::size_t>(std::abs(sj - j)) * n;
                    const double* drow = m.density.data() + static_cast<std::size_t>(sj) * n;
                    // split the row at i so the |si - i| index runs contiguously
                    double row_acc = 0.0;
                    for (int si = 0; si <= i; ++si) row_acc += drow[si] * trow[i - si];
                    for (int si = i + 1; si < n; ++si) row_acc += drow[si] * trow[si - i];
                    acc += row_acc;
                }
                out.at(i, j) = acc;
            }
        }
        // the table entries already include the h^2 cell weight
        return out;
    }
    for (int j = 0; j < eval_grid.n; ++j)
        for (int i = 0; i < eval_grid.n; ++i)
            out.at(i, j) = log_potential_at(m, eval_grid.cell_center(i, j));
    return out;
}

double log_potential_at(const GridMeasure& m, PlanePoint z) {
    const int n = m.grid.n;
    const double h = m.grid.spacing();
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double rho = m.density[m.grid.index(i, j)];
            if (rho == 0.0) continue;
            const PlanePoint d = z - m.grid.cell_center(i, j);
            const double dd = norm(d);
            if (dd < 0.5 * h) {
                acc += rho * self_cell_integral(h); // evaluation inside the cell
            } else if (dd < 2.5 * h) {
                acc += rho * near_cell_integral(d, h);
            } else {
                acc += rho * h * h * (-std::log(dd));
            }
        }
    }
    return acc;
}

} // namespace ocp2d
