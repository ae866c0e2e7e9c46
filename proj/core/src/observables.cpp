#include "ocp2d/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ocp2d/stats.hpp"

namespace ocp2d {

namespace {

using cplx = std::complex<double>;

cplx to_cplx(PlanePoint z) { return {z.x, z.y}; }

// d V = (V_x - i V_y) / 2 as a complex number
cplx dz_of_potential(const Potential& p, PlanePoint z) {
    const PlanePoint g = p.gradient(z);
    return {0.5 * g.x, -0.5 * g.y};
}

// polar midpoint/Gauss quadrature of `fn` over the disk B(z0, r)
template <typename F>
double disk_quadrature(F fn, PlanePoint z0, double r, int radial_panels = 32, int angles = 256) {
    static const double xs[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                 -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double ws[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    const double hp = r / radial_panels;
    const double dth = 2.0 * M_PI / angles;
    double acc = 0.0;
    for (int p = 0; p < radial_panels; ++p) {
        const double mid = (p + 0.5) * hp;
        for (int k = 0; k < 8; ++k) {
            const double s = mid + 0.5 * hp * xs[k];
            double ring = 0.0;
            for (int a = 0; a < angles; ++a) {
                const double th = (a + 0.5) * dth;
                ring += fn(PlanePoint{z0.x + s * std::cos(th), z0.y + s * std::sin(th)});
            }
            acc += ws[k] * 0.5 * hp * s * ring * dth;
        }
    }
    return acc;
}

double max_abs_laplacian(const TestFunction& f) {
    const PlanePoint z0 = f.center();
    const double rho = f.support_radius();
    double m = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double r = rho * i / 2000.0;
        m = std::max(m, std::abs(f.laplacian({z0.x + r, z0.y})));
    }
    return m;
}

} // namespace

int count_in_disk(const Configuration& c, PlanePoint z0, double r) {
    const Disk B{z0, r};
    int n = 0;
    for (const auto& z : c.points)
        if (B.contains(z)) ++n;
    return n;
}

double equilibrium_mass_in_disk(const RadialEquilibrium& eq, PlanePoint z0, double r) {
    if (norm(z0) < 1e-14) return eq.mass_in_radius(r);
    return disk_quadrature([&](PlanePoint z) { return eq.density(norm(z)); }, z0, r);
}

double equilibrium_mass_in_disk(const EquilibriumResult& eq, PlanePoint z0, double r) {
    return grid_mass_in_disk(eq.measure, Disk{z0, r});
}

double integrate_against(const RadialEquilibrium& eq, const TestFunction& f) {
    return disk_quadrature([&](PlanePoint z) { return f.value(z) * eq.density(norm(z)); },
                           f.center(), f.support_radius());
}

double integrate_against(const EquilibriumResult& eq, const TestFunction& f) {
    return test_function_pairing(eq.measure, f);
}

double linear_statistic(const Configuration& c, const TestFunction& f, double f_integral) {
    double acc = 0.0;
    for (const auto& z : c.points) acc += f.value(z);
    return acc - c.size() * f_integral;
}

double linear_statistic(const Configuration& c, const TestFunction& f,
                        const RadialEquilibrium& eq) {
    return linear_statistic(c, f, integrate_against(eq, f));
}

double linear_statistic(const Configuration& c, const TestFunction& f,
                        const EquilibriumResult& eq) {
    return linear_statistic(c, f, integrate_against(eq, f));
}

GridMeasure radial_to_grid(const RadialEquilibrium& eq, const GridSpec& grid) {
    GridMeasure m;
    m.grid = grid;
    m.density.assign(static_cast<std::size_t>(grid.n) * grid.n, 0.0);
    const double h = grid.spacing();
    // 4x4 subcell averaging smooths the jump at the support edge
    for (int j = 0; j < grid.n; ++j)
        for (int i = 0; i < grid.n; ++i) {
            const PlanePoint c = grid.cell_center(i, j);
            double acc = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const PlanePoint s{c.x + (-0.375 + 0.25 * a) * h,
                                       c.y + (-0.375 + 0.25 * b) * h};
                    acc += eq.density(norm(s));
                }
            m.at(i, j) = acc / 16.0;
        }
    m.recompute_mass();
    if (!(m.mass > 0.0)) throw std::invalid_argument("radial_to_grid: measure vanishes on grid");
    const double inv = 1.0 / m.mass;
    for (auto& d : m.density) d *= inv;
    m.recompute_mass();
    return m;
}

LocalLawReport local_law_report(const SampleBatch& batch, const RadialEquilibrium& eq,
                                PlanePoint z0, double s) {
    const int N = batch.params.N;
    const double beta = batch.params.beta;
    const TestFunction f = TestFunction::make_bump(z0, s, N, BumpProfile::Poly, 1.0);

    LocalLawReport rep;
    rep.scale_s = s;
    rep.disk_radius = f.support_radius();
    rep.frames = static_cast<int>(batch.configs.size());
    rep.expected_count = N * equilibrium_mass_in_disk(eq, z0, rep.disk_radius);
    rep.theorem_bound = (1.0 + 1.0 / beta) * std::log(static_cast<double>(N)) *
                        (std::pow(N, -1.0 - 2.0 * s) * max_abs_laplacian(f) +
                         std::pow(N, -0.5 - s) * f.grad_l2_norm());

    const double f_int = integrate_against(eq, f);
    double count_acc = 0.0, rel_acc = 0.0, stat_acc = 0.0;
    int exceed = 0;
    for (const auto& c : batch.configs) {
        const int cnt = count_in_disk(c, z0, rep.disk_radius);
        count_acc += cnt;
        if (rep.expected_count > 0.0)
            rel_acc += std::abs(cnt - rep.expected_count) / rep.expected_count;
        const double stat = std::abs(linear_statistic(c, f, f_int)) / N;
        stat_acc += stat;
        if (stat > 10.0 * rep.theorem_bound) ++exceed;
    }
    if (rep.frames > 0) {
        rep.mean_count = count_acc / rep.frames;
        rep.mean_rel_count_dev = rel_acc / rep.frames;
        rep.mean_abs_statistic = stat_acc / rep.frames;
        rep.exceed_10x_fraction = static_cast<double>(exceed) / rep.frames;
    }
    return rep;
}

FluctuationReport rigidity_scan(std::span<const SampleBatch> batches, PlanePoint z0, double s,
                                BumpProfile profile, double amplitude,
                                const RadialEquilibrium& eq, int null_draws,
                                std::uint64_t null_seed) {
    if (batches.empty()) throw std::invalid_argument("rigidity_scan: no batches");
    if (null_draws < 2) throw std::invalid_argument("rigidity_scan: need null_draws >= 2");

    FluctuationReport rep;
    std::vector<double> log_n, log_gas, log_null;
    for (const auto& batch : batches) {
        const int N = batch.params.N;
        const TestFunction f = TestFunction::make_bump(z0, s, N, profile, amplitude);
        const double f_int = integrate_against(eq, f);

        std::vector<double> xs;
        xs.reserve(batch.configs.size());
        for (const auto& c : batch.configs) xs.push_back(linear_statistic(c, f, f_int));

        Rng rng = Rng::derive(null_seed, "null/" + std::to_string(N));
        std::vector<double> xs_null;
        xs_null.reserve(null_draws);
        for (int d = 0; d < null_draws; ++d)
            xs_null.push_back(linear_statistic(iid_null_sample(eq, N, rng), f, f_int));

        FluctuationRow row;
        row.N = N;
        row.scale_s = s;
        row.var_gas = xs.size() >= 2 ? variance(xs) : 0.0;
        row.var_null = variance(xs_null);
        row.ratio = row.var_null > 0.0 ? row.var_gas / row.var_null : 0.0;
        rep.rows.push_back(row);

        if (row.var_gas > 0.0 && row.var_null > 0.0) {
            log_n.push_back(std::log(static_cast<double>(N)));
            log_gas.push_back(std::log(row.var_gas));
            log_null.push_back(std::log(row.var_null));
        }
    }
    if (log_n.size() >= 2) {
        rep.gas_slope = fit_line(log_n, log_gas).slope;
        rep.null_slope = fit_line(log_n, log_null).slope;
    }
    return rep;
}

HFunction build_h(const TestFunction& f, const Potential& p) {
    // Delta V must be strictly positive on supp f
    const PlanePoint z0 = f.center();
    const double rho = f.support_radius();
    for (int ir = 0; ir <= 16; ++ir)
        for (int ia = 0; ia < 16; ++ia) {
            const double r = rho * ir / 16.0;
            const double th = 2.0 * M_PI * ia / 16.0;
            const PlanePoint z{z0.x + r * std::cos(th), z0.y + r * std::sin(th)};
            if (!(p.laplacian(z) > 0.0))
                throw std::domain_error("build_h: Delta V vanishes on supp f");
        }

    HFunction h;
    h.value = [f, p](PlanePoint z) -> cplx {
        const cplx db = f.dbar(z);
        if (db == cplx{0.0, 0.0}) return {0.0, 0.0};
        return 4.0 * db / p.laplacian(z);
    };
    h.dz = [f, p](PlanePoint z) -> cplx {
        const cplx db = f.dbar(z);
        const double lapf = f.laplacian(z);
        if (db == cplx{0.0, 0.0} && lapf == 0.0) return {0.0, 0.0};
        const double lapV = p.laplacian(z);
        const PlanePoint lg = p.laplacian_gradient(z);
        const cplx dlapV{0.5 * lg.x, -0.5 * lg.y};
        return (lapf * lapV - 4.0 * db * dlapV) / (lapV * lapV);
    };
    return h;
}

LoopReport loop_residual(const SampleBatch& batch, const HFunction& h, const Potential& p,
                         double beta) {
    const int N = batch.params.N;
    LoopReport rep;
    std::vector<double> re, im;
    cplx pair_acc{}, dh_acc{}, v_acc{};
    for (const auto& c : batch.configs) {
        bool bad = false;
        cplx pair{}, dh{}, vterm{};
        std::vector<cplx> hv(c.points.size());
        for (std::size_t j = 0; j < c.points.size(); ++j) hv[j] = h.value(c.points[j]);
        for (std::size_t j = 0; j < c.points.size() && !bad; ++j) {
            for (std::size_t k = j + 1; k < c.points.size(); ++k) {
                const cplx dzjk = to_cplx(c.points[j]) - to_cplx(c.points[k]);
                if (dzjk == cplx{0.0, 0.0}) {
                    bad = true;
                    break;
                }
                pair += (hv[j] - hv[k]) / dzjk; // symmetric: covers both ordered pairs / 2
            }
        }
        if (!bad) {
            try {
                for (std::size_t j = 0; j < c.points.size(); ++j) {
                    dh += h.dz(c.points[j]);
                    vterm += hv[j] * dz_of_potential(p, c.points[j]);
                }
            } catch (const std::exception&) {
                bad = true;
            }
        }
        if (bad) {
            ++rep.skipped_frames;
            continue;
        }
        dh /= beta;
        vterm *= static_cast<double>(N);
        const cplx total = pair + dh - vterm;
        pair_acc += pair;
        dh_acc += dh;
        v_acc += vterm;
        re.push_back(total.real());
        im.push_back(total.imag());
    }
    rep.sample_count = static_cast<int>(re.size());
    if (rep.sample_count > 0) {
        const double inv = 1.0 / rep.sample_count;
        rep.estimate = {mean(re), mean(im)};
        rep.pair_term = pair_acc * inv;
        rep.dh_term = dh_acc * inv;
        rep.v_term = v_acc * inv;
        const double se_re = std_error_batch_means(re);
        const double se_im = std_error_batch_means(im);
        rep.std_error = std::sqrt(se_re * se_re + se_im * se_im);
    }
    return rep;
}

KvReport kv_identity_check(const TestFunction& f, const GridMeasure& mu, const Potential& p,
                           std::span<const PlanePoint> stencil) {
    const HFunction h = build_h(f, p); // g = h / 4, dg = h.dz / 4
    const GridSpec& g = mu.grid;
    const double w0 = g.cell_area();

    KvReport rep;
    rep.stencil_points = static_cast<int>(stencil.size());
    for (const PlanePoint z : stencil) {
        const cplx gz = 0.25 * h.value(z);
        const cplx dgz = 0.25 * h.dz(z);
        const cplx zc = to_cplx(z);

        // nearest grid cell gets the continuous-extension value dg(z)
        std::size_t diag = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int jj = 0; jj < g.n; ++jj)
            for (int ii = 0; ii < g.n; ++ii) {
                const double d = norm2(z - g.cell_center(ii, jj));
                if (d < best) {
                    best = d;
                    diag = g.index(ii, jj);
                }
            }

        cplx integral{};
        for (int jj = 0; jj < g.n; ++jj)
            for (int ii = 0; ii < g.n; ++ii) {
                const std::size_t idx = g.index(ii, jj);
                const double rho = mu.density[idx];
                if (rho == 0.0) continue;
                const PlanePoint w = g.cell_center(ii, jj);
                if (idx == diag) {
                    integral += rho * dgz;
                    continue;
                }
                integral += rho * (gz - 0.25 * h.value(w)) / (zc - to_cplx(w));
            }
        integral *= w0;

        const cplx kv = -integral + dz_of_potential(p, z) * gz;
        rep.sup_norm = std::max(rep.sup_norm, std::abs(kv - 0.25 * f.value(z)));
    }
    return rep;
}

std::complex<double> elff_residual(const TestFunction& f, const GridMeasure& mu,
                                   const Potential& p) {
    const GridSpec& g = mu.grid;
    const double w0 = g.cell_area();

    struct Cell {
        cplx z;
        double w; // rho * h^2
        double fv;
    };
    std::vector<Cell> supp_f, rest;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const double rho = mu.at(i, j);
            if (rho == 0.0) continue;
            const PlanePoint c = g.cell_center(i, j);
            const double fv = f.value(c);
            const Cell cell{to_cplx(c), rho * w0, fv};
            if (fv != 0.0 || dist(c, f.center()) <= f.support_radius())
                supp_f.push_back(cell);
            else
                rest.push_back(cell);
        }

    cplx s{};
    // both points in supp f: diagonal takes the Wirtinger derivative of f
    for (std::size_t a = 0; a < supp_f.size(); ++a) {
        for (std::size_t b = a + 1; b < supp_f.size(); ++b)
            s += supp_f[a].w * supp_f[b].w * (supp_f[a].fv - supp_f[b].fv) /
                 (supp_f[a].z - supp_f[b].z);
        const PlanePoint za{supp_f[a].z.real(), supp_f[a].z.imag()};
        s += 0.5 * supp_f[a].w * supp_f[a].w * f.dz(za);
    }
    // one point outside supp f (f vanishes there)
    for (const Cell& a : supp_f) {
        cplx inner{};
        for (const Cell& b : rest) inner += b.w / (a.z - b.z);
        s += a.w * a.fv * inner;
    }

    cplx t{};
    for (const Cell& a : supp_f) {
        const PlanePoint za{a.z.real(), a.z.imag()};
        t += a.w * a.fv * dz_of_potential(p, za);
    }
    return s - t;
}

} // namespace ocp2d
