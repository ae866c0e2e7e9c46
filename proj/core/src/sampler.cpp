#include "ocp2d/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocp2d {

namespace {

constexpr double kInf = Potential::infinity;

// pair term between a point and every other particle, skipping index j;
// +inf on a coincidence
double pair_energy_of_site(const Configuration& c, int j, PlanePoint z) {
    double acc = 0.0;
    for (int k = 0; k < c.size(); ++k) {
        if (k == j) continue;
        const double dd = norm2(z - c.points[k]);
        if (dd == 0.0) return kInf;
        acc += -std::log(dd); // = 2 * log 1/|.|, the ordered-pair double count
    }
    return acc;
}

} // namespace

double total_energy(const Configuration& c, const Potential& p, int N_scale) {
    double acc = 0.0;
    const int n = c.size();
    for (int j = 0; j < n; ++j) {
        const double v = p.value(c.points[j]);
        if (!std::isfinite(v)) return kInf;
        acc += N_scale * v;
        for (int k = j + 1; k < n; ++k) {
            const double dd = norm2(c.points[j] - c.points[k]);
            if (dd == 0.0) return kInf;
            acc += -std::log(dd); // both ordered pairs at once
        }
    }
    return acc;
}

double energy_delta_move(const Configuration& c, int j, PlanePoint new_point, const Potential& p,
                         int N_scale) {
    if (j < 0 || j >= c.size()) throw std::out_of_range("energy_delta_move: bad index");
    const double v_new = p.value(new_point);
    if (!std::isfinite(v_new)) return kInf;
    const double pair_new = pair_energy_of_site(c, j, new_point);
    if (!std::isfinite(pair_new)) return kInf;
    const double pair_old = pair_energy_of_site(c, j, c.points[j]);
    const double v_old = p.value(c.points[j]);
    return pair_new - pair_old + N_scale * (v_new - v_old);
}

std::vector<PlanePoint> grad_energy(const Configuration& c, const Potential& p, int N_scale) {
    const int n = c.size();
    std::vector<PlanePoint> g(n);
    for (int j = 0; j < n; ++j) {
        PlanePoint acc = p.gradient(c.points[j]);
        acc = {N_scale * acc.x, N_scale * acc.y};
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const PlanePoint d = c.points[j] - c.points[k];
            const double dd = norm2(d);
            if (dd == 0.0) throw std::domain_error("grad_energy: coincident points");
            acc.x += -2.0 * d.x / dd;
            acc.y += -2.0 * d.y / dd;
        }
        g[j] = acc;
    }
    return g;
}

double default_step_size(const GasParams& params) {
    return 0.8 / std::sqrt(params.beta * params.N);
}

SampleBatch run_chain(const GasParams& params, const ChainConfig& chain, Configuration init) {
    if (params.N < 1) throw std::invalid_argument("run_chain: N must be >= 1");
    if (!(params.beta > 0.0)) throw std::invalid_argument("run_chain: beta must be positive");
    if (chain.steps <= chain.burn_in || chain.burn_in < 0)
        throw std::invalid_argument("run_chain: need steps > burn_in >= 0");
    if (chain.thinning < 1) throw std::invalid_argument("run_chain: thinning must be >= 1");
    if (init.size() != params.N)
        throw std::invalid_argument("run_chain: initial configuration size mismatch");
    if (!std::isfinite(total_energy(init, params.potential, params.N)))
        throw std::invalid_argument("run_chain: non-finite initial energy");

    const double step = chain.step_size > 0.0 ? chain.step_size : default_step_size(params);
    const Potential& V = params.potential;
    const int N = params.N;
    const double beta = params.beta;
    Rng rng(chain.seed);

    SampleBatch batch;
    batch.params = params;
    batch.chain = chain;
    batch.chain.step_size = step;

    Configuration c = std::move(init);
    std::uint64_t proposals = 0, accepted = 0;

    const bool langevin = chain.algorithm == ChainAlgorithm::GradientProposal;
    const double tau = 0.5 * step * step; // Langevin time step

    for (int sweep = 0; sweep < chain.steps; ++sweep) {
        for (int j = 0; j < N; ++j) {
            PlanePoint proposal;
            double log_q_ratio = 0.0; // log q(x|y) - log q(y|x)
            if (!langevin) {
                proposal = {c.points[j].x + step * rng.normal(), c.points[j].y + step * rng.normal()};
            } else {
                // site-wise MALA: drift by -tau * beta * grad_j H
                PlanePoint gj = V.gradient(c.points[j]);
                PlanePoint drift{N * gj.x, N * gj.y};
                for (int k = 0; k < N; ++k) {
                    if (k == j) continue;
                    const PlanePoint d = c.points[j] - c.points[k];
                    const double dd = norm2(d);
                    drift.x += -2.0 * d.x / dd;
                    drift.y += -2.0 * d.y / dd;
                }
                const PlanePoint mean_fwd{c.points[j].x - tau * beta * drift.x,
                                          c.points[j].y - tau * beta * drift.y};
                proposal = {mean_fwd.x + step * rng.normal(), mean_fwd.y + step * rng.normal()};
                if (V.finite_at(proposal)) {
                    PlanePoint gp = V.gradient(proposal);
                    PlanePoint drift_rev{N * gp.x, N * gp.y};
                    bool ok = true;
                    for (int k = 0; k < N; ++k) {
                        if (k == j) continue;
                        const PlanePoint d = proposal - c.points[k];
                        const double dd = norm2(d);
                        if (dd == 0.0) { ok = false; break; }
                        drift_rev.x += -2.0 * d.x / dd;
                        drift_rev.y += -2.0 * d.y / dd;
                    }
                    if (ok) {
                        const PlanePoint mean_rev{proposal.x - tau * beta * drift_rev.x,
                                                  proposal.y - tau * beta * drift_rev.y};
                        const double fwd = norm2(proposal - mean_fwd);
                        const double rev = norm2(c.points[j] - mean_rev);
                        log_q_ratio = (fwd - rev) / (2.0 * step * step);
                    }
                }
            }
            ++proposals;
            const double delta = energy_delta_move(c, j, proposal, V, N);
            if (std::isfinite(delta)) {
                const double log_alpha = -beta * delta + log_q_ratio;
                if (log_alpha >= 0.0 || std::log(rng.uniform_pos()) < log_alpha) {
                    c.points[j] = proposal;
                    ++accepted;
                }
            }
        }
        if (sweep >= chain.burn_in && (sweep - chain.burn_in + 1) % chain.thinning == 0) {
            batch.configs.push_back(c);
            batch.energies.push_back(total_energy(c, V, N));
        }
    }

    batch.acceptance_rate = proposals ? static_cast<double>(accepted) / proposals : 0.0;
    batch.low_acceptance_warning = batch.acceptance_rate < 0.01;
    return batch;
}

SampleBatch run_chain(const GasParams& params, const ChainConfig& chain,
                      const RadialEquilibrium& eq) {
    Rng rng = Rng::derive(chain.seed, "init/equilibrium-iid");
    return run_chain(params, chain, iid_null_sample(eq, params.N, rng));
}

Configuration iid_null_sample(const RadialEquilibrium& eq, int N, Rng& rng) {
    Configuration c;
    c.points.reserve(N);
    for (int i = 0; i < N; ++i) {
        const double target = rng.uniform();
        double lo = 0.0, hi = eq.support_radius;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (eq.mass_in_radius(mid) < target ? lo : hi) = mid;
        }
        const double r = 0.5 * (lo + hi);
        const double th = 2.0 * M_PI * rng.uniform();
        c.points.push_back({r * std::cos(th), r * std::sin(th)});
    }
    return c;
}

Configuration iid_null_sample(const EquilibriumResult& eq, int N, Rng& rng) {
    const GridSpec& g = eq.measure.grid;
    // cumulative cell weights, then jitter inside the chosen cell
    std::vector<double> cum(eq.measure.density.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cum.size(); ++i) {
        acc += eq.measure.density[i];
        cum[i] = acc;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("iid_null_sample: empty measure");

    Configuration c;
    c.points.reserve(N);
    const double h = g.spacing();
    for (int k = 0; k < N; ++k) {
        const double target = rng.uniform() * acc;
        const auto it = std::lower_bound(cum.begin(), cum.end(), target);
        const std::size_t idx = static_cast<std::size_t>(it - cum.begin());
        const int i = static_cast<int>(idx % g.n);
        const int j = static_cast<int>(idx / g.n);
        const PlanePoint cc = g.cell_center(i, j);
        c.points.push_back({cc.x + (rng.uniform() - 0.5) * h, cc.y + (rng.uniform() - 0.5) * h});
    }
    return c;
}

ConditionalPotential conditional_potential(const std::vector<PlanePoint>& outside, const Disk& B,
                                           int N, const Potential& p) {
    const int M = N - static_cast<int>(outside.size());
    if (M < 1) throw std::invalid_argument("conditional_potential: no particles left inside B");
    std::vector<DiscreteCharge> charges;
    charges.reserve(outside.size());
    for (const auto& z : outside) {
        if (B.contains(z))
            throw std::invalid_argument("conditional_potential: outside point lies inside B");
        charges.push_back({z, 1.0});
    }
    ConditionalPotential out{M, p.scaled(static_cast<double>(N) / M)
                                    .with_external_charges(charges, 1.0 / M)
                                    .restricted_to(B)};
    return out;
}

EnergySplit energy_decomposition_check(const Configuration& c, const Disk& B, const Potential& p) {
    Configuration inside, outside;
    for (const auto& z : c.points)
        (B.contains(z) ? inside : outside).points.push_back(z);
    if (inside.points.empty() || outside.points.empty())
        throw std::invalid_argument("energy_decomposition_check: need particles on both sides");

    const int N = c.size();
    const int M = inside.size();
    const auto cond = conditional_potential(outside.points, B, N, p);

    EnergySplit split;
    split.lhs = total_energy(c, p, N);
    const Potential U = p.scaled(static_cast<double>(N) / (N - M)).restricted_outside(B);
    split.rhs = total_energy(inside, cond.W, M) + total_energy(outside, U, N - M);
    return split;
}

} // namespace ocp2d
