#ifndef OCP2D_IO_HPP
#define OCP2D_IO_HPP

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocp2d/equilibrium.hpp"
#include "ocp2d/sampler.hpp"
#include "ocp2d/test_function.hpp"

// Serialization: potentials and experiment configs as JSON, EquilibriumResult
// and SampleBatch as JSON-header + little-endian float64 binary blocks. The
// batch format is streaming-append with a footer so an interrupted run still
// leaves a readable file. All writers are byte-deterministic for fixed inputs.

namespace ocp2d {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// JSON text for a potential: kind, scale, coefficients, charges, wall.
std::string potential_to_json(const Potential& p);
Potential potential_from_json(const std::string& text);

struct EquilibriumConfig {
    PlanePoint center{0.0, 0.0};
    double half_width = 2.0;
    int n = 256;
    double tol = 1e-7;
    int max_iter = 200000;
    double mass_tol = 1e-5;
};

struct ObservablesConfig {
    std::vector<double> scales;           // values of s, each < 1/2
    BumpProfile profile = BumpProfile::Poly;
    double amplitude = 1.0;
    PlanePoint bump_center{0.0, 0.0};
    std::vector<Disk> disks;              // count probes
    int null_draws = 200;
};

struct ExperimentConfig {
    Potential potential = Potential::quadratic();
    std::vector<int> particle_counts{64};
    std::vector<double> betas{1.0};
    ChainConfig chain;
    EquilibriumConfig equilibrium;
    ObservablesConfig observables;
    std::string output_dir = ".";
    std::uint64_t master_seed = 0;
    bool has_seed = false;
};

/// Parses the declarative config file. Unknown keys anywhere are errors.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

/// "OCP2DEQ1" + u64 header length + JSON header (grid, F, diagnostics)
/// + u block + density block (row-major f64 LE) + mask block (u8).
void write_equilibrium_result(const std::string& path, const EquilibriumResult& eq);
EquilibriumResult read_equilibrium_result(const std::string& path);

/// Streaming batch writer: header first, frames appended one at a time,
/// footer (frame count, energies, acceptance) written by finalize(). A file
/// missing its footer is still readable; frames are recovered from the size.
class SampleBatchWriter {
  public:
    SampleBatchWriter(const std::string& path, const GasParams& params, const ChainConfig& chain);
    ~SampleBatchWriter();
    SampleBatchWriter(const SampleBatchWriter&) = delete;
    SampleBatchWriter& operator=(const SampleBatchWriter&) = delete;

    void append(const Configuration& c, double energy);
    void finalize(double acceptance_rate, bool low_acceptance_warning);

  private:
    std::FILE* file_ = nullptr;
    int n_ = 0;
    std::vector<double> energies_;
    bool finalized_ = false;
};

void write_sample_batch(const std::string& path, const SampleBatch& batch);

/// Reads a batch; if the footer is missing (truncated file) the frame count is
/// derived from the file size and energies are recomputed.
SampleBatch read_sample_batch(const std::string& path);

} // namespace ocp2d

#endif
