#include "ocp2d/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace ocp2d {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");
static_assert(sizeof(PlanePoint) == 2 * sizeof(double) &&
                  std::is_trivially_copyable_v<PlanePoint>,
              "frame blocks are raw (x, y) float64 pairs");

constexpr char kEqMagic[8] = {'O', 'C', 'P', '2', 'D', 'E', 'Q', '1'};
constexpr char kSbMagic[8] = {'O', 'C', 'P', '2', 'D', 'S', 'B', '1'};
constexpr char kSbFooterMagic[8] = {'O', 'C', 'P', '2', 'D', 'S', 'B', 'F'};

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& context) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError(context + ": unknown key \"" + key + "\"");
    }
}

json disk_to_json(const Disk& d) {
    return json{{"x", d.center.x}, {"y", d.center.y}, {"radius", d.radius}};
}

Disk disk_from_json(const json& j, const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": expected an object");
    reject_unknown_keys(j, {"x", "y", "radius"}, context);
    Disk d;
    d.center = {j.at("x").get<double>(), j.at("y").get<double>()};
    d.radius = j.at("radius").get<double>();
    if (!(d.radius > 0.0)) throw ConfigError(context + ": radius must be positive");
    return d;
}

json potential_to_json_obj(const Potential& p) {
    json j;
    j["kind"] = "radial";
    j["scale"] = p.radial_scale();
    j["coefficients"] = p.radial_coeffs();
    json charges = json::array();
    for (const auto& c : p.charges())
        charges.push_back(json{{"x", c.location.x},
                               {"y", c.location.y},
                               {"coeff", c.coeff},
                               {"smear_radius", c.smear_radius}});
    j["charges"] = std::move(charges);
    if (p.wall()) {
        json w = disk_to_json(*p.wall());
        w["keep_inside"] = p.wall_keeps_inside();
        j["wall"] = std::move(w);
    }
    j["growth_margin"] = p.growth_margin;
    return j;
}

Potential potential_from_json_obj(const json& j, const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": expected an object");
    reject_unknown_keys(j, {"kind", "scale", "coefficients", "charges", "wall", "growth_margin"},
                        context);
    const std::string kind = j.value("kind", "radial");
    Potential p;
    if (kind == "quadratic") {
        p = Potential::quadratic();
    } else if (kind == "radial") {
        p = Potential::radial(j.at("coefficients").get<std::vector<double>>());
    } else {
        throw ConfigError(context + ": unknown kind \"" + kind + "\"");
    }
    if (j.contains("scale")) p = p.scaled(j.at("scale").get<double>());
    if (j.contains("charges")) {
        std::vector<LogCharge> charges;
        for (const auto& c : j.at("charges")) {
            reject_unknown_keys(c, {"x", "y", "coeff", "smear_radius"}, context + ".charges");
            charges.push_back({{c.at("x").get<double>(), c.at("y").get<double>()},
                               c.at("coeff").get<double>(),
                               c.value("smear_radius", 0.0)});
        }
        if (!charges.empty()) p = p.with_log_charges(std::move(charges));
    }
    if (j.contains("wall")) {
        const json& w = j.at("wall");
        reject_unknown_keys(w, {"x", "y", "radius", "keep_inside"}, context + ".wall");
        const Disk d{{w.at("x").get<double>(), w.at("y").get<double>()},
                     w.at("radius").get<double>()};
        p = w.value("keep_inside", true) ? p.restricted_to(d) : p.restricted_outside(d);
    }
    if (j.contains("growth_margin")) p.growth_margin = j.at("growth_margin").get<double>();
    return p;
}

json chain_to_json(const ChainConfig& c) {
    return json{{"algorithm", c.algorithm == ChainAlgorithm::RandomWalk ? "random_walk"
                                                                        : "gradient"},
                {"steps", c.steps},
                {"burn_in", c.burn_in},
                {"thinning", c.thinning},
                {"step_size", c.step_size},
                {"seed", c.seed}};
}

ChainConfig chain_from_json(const json& j, const std::string& context) {
    reject_unknown_keys(j, {"algorithm", "steps", "burn_in", "thinning", "step_size", "seed"},
                        context);
    ChainConfig c;
    if (j.contains("algorithm")) {
        const std::string a = j.at("algorithm").get<std::string>();
        if (a == "random_walk")
            c.algorithm = ChainAlgorithm::RandomWalk;
        else if (a == "gradient")
            c.algorithm = ChainAlgorithm::GradientProposal;
        else
            throw ConfigError(context + ": unknown algorithm \"" + a + "\"");
    }
    c.steps = j.value("steps", c.steps);
    c.burn_in = j.value("burn_in", c.burn_in);
    c.thinning = j.value("thinning", c.thinning);
    c.step_size = j.value("step_size", c.step_size);
    c.seed = j.value("seed", c.seed);
    return c;
}

void write_exact(std::FILE* f, const void* data, std::size_t bytes) {
    if (std::fwrite(data, 1, bytes, f) != bytes)
        throw std::runtime_error("io: short write");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("io: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string potential_to_json(const Potential& p) { return potential_to_json_obj(p).dump(2); }

Potential potential_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("potential: ") + e.what());
    }
    return potential_from_json_obj(j, "potential");
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown_keys(j,
                        {"potential", "gas", "chain", "equilibrium", "observables", "output_dir",
                         "seed"},
                        "config");

    ExperimentConfig cfg;
    if (j.contains("potential"))
        cfg.potential = potential_from_json_obj(j.at("potential"), "config.potential");
    if (j.contains("gas")) {
        const json& g = j.at("gas");
        reject_unknown_keys(g, {"N", "beta"}, "config.gas");
        if (g.contains("N")) {
            if (g.at("N").is_array())
                cfg.particle_counts = g.at("N").get<std::vector<int>>();
            else
                cfg.particle_counts = {g.at("N").get<int>()};
        }
        if (g.contains("beta")) {
            if (g.at("beta").is_array())
                cfg.betas = g.at("beta").get<std::vector<double>>();
            else
                cfg.betas = {g.at("beta").get<double>()};
        }
        for (int n : cfg.particle_counts)
            if (n < 1) throw ConfigError("config.gas: N must be >= 1");
        for (double b : cfg.betas)
            if (!(b > 0.0)) throw ConfigError("config.gas: beta must be positive");
    }
    if (j.contains("chain")) cfg.chain = chain_from_json(j.at("chain"), "config.chain");
    if (j.contains("equilibrium")) {
        const json& e = j.at("equilibrium");
        reject_unknown_keys(e, {"center_x", "center_y", "half_width", "n", "tol", "max_iter",
                                "mass_tol"},
                            "config.equilibrium");
        cfg.equilibrium.center = {e.value("center_x", 0.0), e.value("center_y", 0.0)};
        cfg.equilibrium.half_width = e.value("half_width", cfg.equilibrium.half_width);
        cfg.equilibrium.n = e.value("n", cfg.equilibrium.n);
        cfg.equilibrium.tol = e.value("tol", cfg.equilibrium.tol);
        cfg.equilibrium.max_iter = e.value("max_iter", cfg.equilibrium.max_iter);
        cfg.equilibrium.mass_tol = e.value("mass_tol", cfg.equilibrium.mass_tol);
    }
    if (j.contains("observables")) {
        const json& o = j.at("observables");
        reject_unknown_keys(o, {"scales", "profile", "amplitude", "bump_center_x",
                                "bump_center_y", "disks", "null_draws"},
                            "config.observables");
        if (o.contains("scales")) cfg.observables.scales = o.at("scales").get<std::vector<double>>();
        for (double s : cfg.observables.scales)
            if (!(s >= 0.0 && s < 0.5))
                throw ConfigError("config.observables: each scale s must lie in [0, 1/2)");
        if (o.contains("profile"))
            cfg.observables.profile = bump_profile_from_string(o.at("profile").get<std::string>());
        cfg.observables.amplitude = o.value("amplitude", cfg.observables.amplitude);
        cfg.observables.bump_center = {o.value("bump_center_x", 0.0), o.value("bump_center_y", 0.0)};
        if (o.contains("disks"))
            for (const auto& d : o.at("disks"))
                cfg.observables.disks.push_back(disk_from_json(d, "config.observables.disks"));
        cfg.observables.null_draws = o.value("null_draws", cfg.observables.null_draws);
    }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    if (j.contains("seed")) {
        cfg.master_seed = j.at("seed").get<std::uint64_t>();
        cfg.has_seed = true;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

void write_equilibrium_result(const std::string& path, const EquilibriumResult& eq) {
    json header;
    header["grid"] = {{"center_x", eq.u.grid.center.x},
                      {"center_y", eq.u.grid.center.y},
                      {"half_width", eq.u.grid.half_width},
                      {"n", eq.u.grid.n}};
    header["F"] = eq.F;
    header["mass"] = eq.measure.mass;
    header["diagnostics"] = {{"complementarity_residual", eq.residuals.complementarity_residual},
                             {"mass", eq.residuals.mass},
                             {"sweeps", eq.residuals.sweeps},
                             {"outer_iterations", eq.residuals.outer_iterations}};
    const std::string htext = header.dump();

    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("io: cannot write " + path);
    try {
        write_exact(f, kEqMagic, 8);
        const std::uint64_t hlen = htext.size();
        write_exact(f, &hlen, 8);
        write_exact(f, htext.data(), htext.size());
        write_exact(f, eq.u.values.data(), eq.u.values.size() * sizeof(double));
        write_exact(f, eq.measure.density.data(), eq.measure.density.size() * sizeof(double));
        write_exact(f, eq.support_mask.data(), eq.support_mask.size());
    } catch (...) {
        std::fclose(f);
        throw;
    }
    std::fclose(f);
}

EquilibriumResult read_equilibrium_result(const std::string& path) {
    const std::string data = read_file(path);
    if (data.size() < 16 || std::memcmp(data.data(), kEqMagic, 8) != 0)
        throw std::runtime_error("io: " + path + " is not an equilibrium file");
    std::uint64_t hlen = 0;
    std::memcpy(&hlen, data.data() + 8, 8);
    if (data.size() < 16 + hlen) throw std::runtime_error("io: truncated header in " + path);
    const json header = json::parse(data.substr(16, hlen));

    const json& g = header.at("grid");
    const GridSpec grid({g.at("center_x").get<double>(), g.at("center_y").get<double>()},
                        g.at("half_width").get<double>(), g.at("n").get<int>());
    const std::size_t cells = grid.cell_count();
    const std::size_t need = 16 + hlen + 2 * cells * sizeof(double) + cells;
    if (data.size() < need) throw std::runtime_error("io: truncated blocks in " + path);

    EquilibriumResult eq;
    eq.u = GridField(grid);
    eq.measure = GridMeasure(grid);
    eq.support_mask.resize(cells);
    const char* p = data.data() + 16 + hlen;
    std::memcpy(eq.u.values.data(), p, cells * sizeof(double));
    p += cells * sizeof(double);
    std::memcpy(eq.measure.density.data(), p, cells * sizeof(double));
    p += cells * sizeof(double);
    std::memcpy(eq.support_mask.data(), p, cells);
    eq.measure.recompute_mass();
    eq.F = header.at("F").get<double>();
    const json& d = header.at("diagnostics");
    eq.residuals.complementarity_residual = d.at("complementarity_residual").get<double>();
    eq.residuals.mass = d.at("mass").get<double>();
    eq.residuals.sweeps = d.at("sweeps").get<int>();
    eq.residuals.outer_iterations = d.at("outer_iterations").get<int>();
    return eq;
}

SampleBatchWriter::SampleBatchWriter(const std::string& path, const GasParams& params,
                                     const ChainConfig& chain) {
    json header;
    header["params"] = {{"N", params.N},
                        {"beta", params.beta},
                        {"potential", potential_to_json_obj(params.potential)}};
    header["chain"] = chain_to_json(chain);
    const std::string htext = header.dump();

    file_ = std::fopen(path.c_str(), "wb");
    if (!file_) throw std::runtime_error("io: cannot write " + path);
    n_ = params.N;
    try {
        write_exact(file_, kSbMagic, 8);
        const std::uint64_t hlen = htext.size();
        write_exact(file_, &hlen, 8);
        write_exact(file_, htext.data(), htext.size());
    } catch (...) {
        std::fclose(file_);
        file_ = nullptr;
        throw;
    }
}

SampleBatchWriter::~SampleBatchWriter() {
    if (file_) std::fclose(file_);
}

void SampleBatchWriter::append(const Configuration& c, double energy) {
    if (!file_ || finalized_) throw std::logic_error("SampleBatchWriter: not open");
    if (c.size() != n_) throw std::invalid_argument("SampleBatchWriter: frame size mismatch");
    std::vector<double> flat;
    flat.reserve(2 * static_cast<std::size_t>(n_));
    for (const auto& z : c.points) {
        flat.push_back(z.x);
        flat.push_back(z.y);
    }
    write_exact(file_, flat.data(), flat.size() * sizeof(double));
    std::fflush(file_); // keep the file readable after an interrupt
    energies_.push_back(energy);
}

void SampleBatchWriter::finalize(double acceptance_rate, bool low_acceptance_warning) {
    if (!file_ || finalized_) throw std::logic_error("SampleBatchWriter: not open");
    json footer;
    footer["frame_count"] = energies_.size();
    footer["energies"] = energies_;
    footer["acceptance_rate"] = acceptance_rate;
    footer["low_acceptance_warning"] = low_acceptance_warning;
    const std::string ftext = footer.dump();
    write_exact(file_, ftext.data(), ftext.size());
    const std::uint64_t flen = ftext.size();
    write_exact(file_, &flen, 8);
    write_exact(file_, kSbFooterMagic, 8);
    std::fclose(file_);
    file_ = nullptr;
    finalized_ = true;
}

void write_sample_batch(const std::string& path, const SampleBatch& batch) {
    SampleBatchWriter w(path, batch.params, batch.chain);
    for (std::size_t i = 0; i < batch.configs.size(); ++i)
        w.append(batch.configs[i], batch.energies[i]);
    w.finalize(batch.acceptance_rate, batch.low_acceptance_warning);
}

SampleBatch read_sample_batch(const std::string& path) {
    const std::string data = read_file(path);
    if (data.size() < 16 || std::memcmp(data.data(), kSbMagic, 8) != 0)
        throw std::runtime_error("io: " + path + " is not a sample batch file");
    std::uint64_t hlen = 0;
    std::memcpy(&hlen, data.data() + 8, 8);
    if (data.size() < 16 + hlen) throw std::runtime_error("io: truncated header in " + path);
    const json header = json::parse(data.substr(16, hlen));

    SampleBatch batch;
    const json& pj = header.at("params");
    batch.params.N = pj.at("N").get<int>();
    batch.params.beta = pj.at("beta").get<double>();
    batch.params.potential = potential_from_json_obj(pj.at("potential"), "batch.potential");
    batch.chain = chain_from_json(header.at("chain"), "batch.chain");

    const std::size_t frames_start = 16 + hlen;
    const std::size_t frame_bytes = 2 * static_cast<std::size_t>(batch.params.N) * sizeof(double);

    // locate the footer; absent or corrupt means a truncated file
    bool have_footer = false;
    json footer;
    std::size_t frames_end = data.size();
    if (data.size() >= frames_start + 16 &&
        std::memcmp(data.data() + data.size() - 8, kSbFooterMagic, 8) == 0) {
        std::uint64_t flen = 0;
        std::memcpy(&flen, data.data() + data.size() - 16, 8);
        if (data.size() >= frames_start + 16 + flen) {
            footer = json::parse(data.substr(data.size() - 16 - flen, flen));
            frames_end = data.size() - 16 - flen;
            have_footer = true;
        }
    }

    std::size_t frame_count = (frames_end - frames_start) / frame_bytes;
    if (have_footer) frame_count = std::min<std::size_t>(frame_count, footer.at("frame_count"));

    batch.configs.resize(frame_count);
    for (std::size_t t = 0; t < frame_count; ++t) {
        Configuration& c = batch.configs[t];
        c.points.resize(batch.params.N);
        std::memcpy(c.points.data(), data.data() + frames_start + t * frame_bytes, frame_bytes);
    }

    if (have_footer) {
        batch.energies = footer.at("energies").get<std::vector<double>>();
        batch.energies.resize(frame_count);
        batch.acceptance_rate = footer.at("acceptance_rate").get<double>();
        batch.low_acceptance_warning = footer.at("low_acceptance_warning").get<bool>();
    } else {
        batch.energies.reserve(frame_count);
        for (const auto& c : batch.configs)
            batch.energies.push_back(total_energy(c, batch.params.potential, batch.params.N));
    }
    return batch;
}

} // namespace ocp2d
