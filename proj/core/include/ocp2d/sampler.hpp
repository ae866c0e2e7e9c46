#ifndef OCP2D_SAMPLER_HPP
#define OCP2D_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ocp2d/equilibrium.hpp"
#include "ocp2d/potential.hpp"
#include "ocp2d/rng.hpp"

// Metropolis sampling of the Gibbs measure exp(-beta H) with
// H(z) = sum_{j != k} log 1/|z_j - z_k| + N sum_j V(z_j),
// the exact beta = 1 radial oracle, the i.i.d. equilibrium null model,
// and the conditional potential for a disk.

namespace ocp2d {

struct GasParams {
    int N = 1;
    double beta = 1.0;
    Potential potential = Potential::quadratic();
};

struct Configuration {
    std::vector<PlanePoint> points;

    int size() const { return static_cast<int>(points.size()); }
};

enum class ChainAlgorithm {
    RandomWalk,       // Gaussian single-site proposal
    GradientProposal, // Langevin-informed single-site proposal with MH correction
};

struct ChainConfig {
    ChainAlgorithm algorithm = ChainAlgorithm::RandomWalk;
    int steps = 10000; // sweeps of N single-site proposals
    int burn_in = 1000;
    int thinning = 10; // record every `thinning` sweeps
    double step_size = 0.0; // <= 0 picks the default 0.8 / sqrt(beta N)
    std::uint64_t seed = 0;
};

struct SampleBatch {
    GasParams params;
    ChainConfig chain;
    std::vector<Configuration> configs;
    std::vector<double> energies;
    double acceptance_rate = 0.0;
    bool low_acceptance_warning = false;
};

/// H with the confinement scaled by N_scale (decoupled from the configuration
/// length to support conditional energies). Ordered-pair convention: each
/// unordered pair is counted twice. Returns +inf for coincident points or
/// points where V = +inf.
double total_energy(const Configuration& c, const Potential& p, int N_scale);

/// total_energy(after move) - total_energy(before), O(N).
double energy_delta_move(const Configuration& c, int j, PlanePoint new_point, const Potential& p,
                         int N_scale);

/// Real gradient of H per particle; throws on coincident points.
std::vector<PlanePoint> grad_energy(const Configuration& c, const Potential& p, int N_scale);

double default_step_size(const GasParams& params);

SampleBatch run_chain(const GasParams& params, const ChainConfig& chain, Configuration init);

/// "equilibrium-iid" initialization from the radial equilibrium measure.
SampleBatch run_chain(const GasParams& params, const ChainConfig& chain,
                      const RadialEquilibrium& eq);

/// Exact beta = 1 quadratic-potential radial law: {N |z_i|^2} is distributed
/// as independent gamma variables with shapes 1..N. Returns sorted radii.
std::vector<double> ginibre_radii_sample(int N, Rng& rng);

Configuration iid_null_sample(const RadialEquilibrium& eq, int N, Rng& rng);
Configuration iid_null_sample(const EquilibriumResult& eq, int N, Rng& rng);

struct ConditionalPotential {
    int M = 0; // particles remaining inside B
    Potential W;
};

/// W = (N/M)(V - V_o(.|outside)) on B, +inf outside B.
ConditionalPotential conditional_potential(const std::vector<PlanePoint>& outside, const Disk& B,
                                           int N, const Potential& p);

struct EnergySplit {
    double lhs = 0.0; // H_N of the full configuration
    double rhs = 0.0; // conditional inside energy + outside energy
};

/// Checks the inclusion-exclusion identity H_N = H(inside | outside) + H(outside).
EnergySplit energy_decomposition_check(const Configuration& c, const Disk& B, const Potential& p);

} // namespace ocp2d

#endif
