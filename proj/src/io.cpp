#include "clothtrack/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace clothtrack {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path.string());
    out << std::setprecision(17);
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("cannot parse " + what + " from '" + s + "'");
    }
}

long parse_long(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("cannot parse " + what + " from '" + s + "'");
    }
}

}  // namespace

// --- Config ----------------------------------------------------------

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.values_.count(full))
            throw ValidationError("config line " + std::to_string(lineno) + ": duplicate key " + full);
        cfg.values_[full] = value;
    }
    return cfg;
}

double Config::get_double(const std::string& key, double fallback) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_double(it->second, key);
}

int Config::get_int(const std::string& key, int fallback) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return static_cast<int>(parse_long(it->second, key));
}

uint64_t Config::get_u64(const std::string& key, uint64_t fallback) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ValidationError("cannot parse " + key + " from '" + it->second + "'");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ValidationError("cannot parse boolean " + key + " from '" + it->second + "'");
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::optional<double> Config::get_optional_double(const std::string& key) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return parse_double(it->second, key);
}

void Config::reject_unknown() const {
    std::string unknown;
    for (const auto& [key, _] : values_)
        if (!consumed_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    if (!unknown.empty()) throw ValidationError("unknown config keys: " + unknown);
}

// --- RunConfig -------------------------------------------------------

RunConfig RunConfig::load(const std::filesystem::path& path) {
    Config cfg = Config::load(path);
    return parse(cfg);
}

RunConfig RunConfig::parse(Config& cfg) {
    RunConfig rc;
    rc.format_version = cfg.get_int("format_version", 1);
    if (rc.format_version != 1) throw ValidationError("unsupported format_version");

    rc.cam.f = cfg.get_double("camera.f", rc.cam.f);
    rc.pose.translation.z() = cfg.get_double("camera.tz", rc.pose.translation.z());
    rc.img.width = cfg.get_int("camera.image_width", rc.img.width);
    rc.img.height = cfg.get_int("camera.image_height", rc.img.height);
    if (!(rc.cam.f > 0.0)) throw ValidationError("camera.f must be positive");
    rc.pose.validate();

    rc.mesh_rows = cfg.get_int("mesh.rows", rc.mesh_rows);
    rc.mesh_cols = cfg.get_int("mesh.cols", rc.mesh_cols);
    rc.mesh_spacing = cfg.get_double("mesh.spacing", rc.mesh_spacing);
    rc.mesh_origin_x = cfg.get_double("mesh.origin_x", -0.5 * (rc.mesh_cols - 1) * rc.mesh_spacing);
    rc.mesh_origin_y = cfg.get_double("mesh.origin_y", -0.5 * (rc.mesh_rows - 1) * rc.mesh_spacing);

    ClothParams& p = rc.cloth;
    p.k_structural = cfg.get_double("cloth.k_structural", p.k_structural);
    p.k_shear = cfg.get_double("cloth.k_shear", p.k_shear);
    p.k_flexion = cfg.get_double("cloth.k_flexion", p.k_flexion);
    p.node_mass = cfg.get_double("cloth.node_mass", p.node_mass);
    p.damping = cfg.get_double("cloth.damping", p.damping);
    p.gravity = cfg.get_double("cloth.gravity", 0.0);  // scenarios default planar
    p.tau_c = cfg.get_double("cloth.tau_c", p.tau_c);
    p.bend_stiffness = cfg.get_double("cloth.bend_stiffness", p.bend_stiffness);
    p.stretch_stiffness = cfg.get_double("cloth.stretch_stiffness", p.stretch_stiffness);
    p.thickness = cfg.get_double("cloth.thickness", p.thickness);
    p.friction = cfg.get_double("cloth.friction", p.friction);
    p.substeps = cfg.get_int("cloth.substeps", p.substeps);
    p.limit_sweeps = cfg.get_int("cloth.limit_sweeps", p.limit_sweeps);
    p.ground_contact = cfg.get_bool("cloth.ground_contact", p.ground_contact);
    p.planar_constraint = cfg.get_bool("cloth.planar_constraint", p.planar_constraint);
    p.validate();

    if (cfg.has("rigid.mass") || cfg.has("rigid.inertia")) {
        RigidParams rp;
        rp.mass = cfg.get_double("rigid.mass", rp.mass);
        rp.inertia = cfg.get_double("rigid.inertia", rp.inertia);
        rp.linear_damping = cfg.get_double("rigid.linear_damping", rp.linear_damping);
        rp.angular_damping = cfg.get_double("rigid.angular_damping", rp.angular_damping);
        rp.validate();
        rc.rigid_override = rp;
    } else {
        // Still consume the keys so partial [rigid] sections report cleanly.
        cfg.get_double("rigid.linear_damping", 0.0);
        cfg.get_double("rigid.angular_damping", 0.0);
    }

    rc.scenario.kind = scenario_kind_from_string(cfg.get_string("scenario.kind", "translation_y"));
    rc.scenario.frames = cfg.get_int(
        "scenario.frames", ScenarioSpec::defaults(rc.scenario.kind).frames);
    rc.scenario.fps = cfg.get_double("scenario.fps", rc.scenario.fps);
    rc.scenario.n_features = cfg.get_int("scenario.n_features", rc.scenario.n_features);
    rc.scenario.noise_sigma = cfg.get_double("scenario.noise_sigma", rc.scenario.noise_sigma);
    rc.scenario.seed = cfg.get_u64("scenario.seed", rc.scenario.seed);
    rc.scenario.force_magnitude = cfg.get_double("scenario.force_magnitude", rc.scenario.force_magnitude);
    rc.scenario.validate();

    rc.ekf_q_rigid = cfg.get_double("ekf.q_rigid", rc.ekf_q_rigid);
    rc.ekf_q_mesh = cfg.get_double("ekf.q_mesh", rc.ekf_q_mesh);
    rc.ekf_r_sigma = cfg.get_double("ekf.r_sigma", rc.ekf_r_sigma);
    rc.ekf_p0 = cfg.get_double("ekf.p0", rc.ekf_p0);

    rc.ga.population = cfg.get_int("ga.population", rc.ga.population);
    rc.ga.generations = cfg.get_int("ga.generations", rc.ga.generations);
    rc.ga.tournament = cfg.get_int("ga.tournament", rc.ga.tournament);
    rc.ga.crossover_rate = cfg.get_double("ga.crossover_rate", rc.ga.crossover_rate);
    rc.ga.mutation_rate = cfg.get_double("ga.mutation_rate", rc.ga.mutation_rate);
    rc.ga.mutation_scale = cfg.get_double("ga.mutation_scale", rc.ga.mutation_scale);
    rc.ga.elitism = cfg.get_int("ga.elitism", rc.ga.elitism);
    rc.ga.top_k = cfg.get_int("ga.top_k", rc.ga.top_k);
    rc.ga.seed = cfg.get_u64("ga.seed", rc.ga.seed);
    rc.ga.worst_weight = cfg.get_double("ga.worst_weight", rc.ga.worst_weight);
    rc.ga.validate();

    static const char* gene_names[GeneCount] = {"bend_stiffness", "stretch_stiffness", "density",
                                                "thickness",      "damping",           "solver_iterations",
                                                "friction",       "gravity"};
    for (int i = 0; i < GeneCount; ++i)
        rc.ga_fixed[i] = cfg.get_optional_double(std::string("ga.fix_") + gene_names[i]);

    cfg.reject_unknown();
    return rc;
}

std::pair<MeshTopology, MeshState> RunConfig::make_mesh() const {
    return build_mesh(mesh_rows, mesh_cols, mesh_spacing, {mesh_origin_x, mesh_origin_y, 0.0});
}

RigidParams RunConfig::make_rigid(const MeshTopology& topo, const MeshState& rest) const {
    if (rigid_override) return *rigid_override;
    return rigid_equivalent_params(topo, rest, cloth);
}

// --- Measurement exchange format -------------------------------------

void write_measurements(const std::filesystem::path& path,
                        const std::vector<FrameMeasurement>& frames, int n_features) {
    std::ofstream out = open_out(path);
    out << "n_features " << n_features << "\n";
    for (const auto& fm : frames) {
        const int n = static_cast<int>(fm.ids.size());
        for (int j = 0; j < n; ++j)
            out << fm.frame << "," << fm.ids[j] << "," << fm.meas.values[j] << ","
                << fm.meas.values[n + j] << "\n";
    }
}

std::vector<FrameMeasurement> read_measurements(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    int lineno = 0;

    if (!std::getline(in, line)) throw ValidationError("empty measurement file: " + path.string());
    ++lineno;
    {
        std::stringstream hs(line);
        std::string tag;
        int n = -1;
        hs >> tag >> n;
        if (tag != "n_features" || n < 1)
            throw ValidationError("measurement file line 1: expected 'n_features <n>' header");
    }

    struct Row {
        int id;
        double u, v;
    };
    std::map<int, std::vector<Row>> by_frame;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cols = split_csv(line);
        if (cols.size() != 4)
            throw ValidationError("measurement file line " + std::to_string(lineno) +
                                  ": expected frame,feature_id,u,v");
        const std::string where = "measurement file line " + std::to_string(lineno);
        const int frame = static_cast<int>(parse_long(cols[0], where));
        by_frame[frame].push_back({static_cast<int>(parse_long(cols[1], where)),
                                   parse_double(cols[2], where), parse_double(cols[3], where)});
    }
    if (by_frame.empty()) throw ValidationError("measurement file has no data lines");

    std::vector<FrameMeasurement> frames;
    const int last = by_frame.rbegin()->first;
    for (int k = 0; k <= last; ++k) {
        FrameMeasurement fm;
        fm.frame = k;
        const auto it = by_frame.find(k);
        if (it != by_frame.end()) {
            const int n = static_cast<int>(it->second.size());
            fm.meas.n = n;
            fm.meas.values.resize(2 * n);
            for (int j = 0; j < n; ++j) {
                fm.ids.push_back(it->second[j].id);
                fm.meas.values[j] = it->second[j].u;
                fm.meas.values[n + j] = it->second[j].v;
            }
        }
        frames.push_back(std::move(fm));
    }
    return frames;
}

std::vector<FrameMeasurement> frames_from_scenario(const ScenarioData& data) {
    std::vector<FrameMeasurement> frames;
    for (size_t k = 0; k < data.measurements.size(); ++k) {
        FrameMeasurement fm;
        fm.frame = static_cast<int>(k);
        for (const auto& a : data.features.anchors) fm.ids.push_back(a.id);
        fm.meas = data.measurements[k];
        frames.push_back(std::move(fm));
    }
    return frames;
}

// --- Force schedule --------------------------------------------------

void write_forces(const std::filesystem::path& path, const std::vector<PlanarWrench>& wrenches,
                  const std::vector<NodeForces>& node_forces) {
    std::ofstream out = open_out(path);
    out << "force_schedule v1\n";
    for (size_t k = 0; k < wrenches.size(); ++k)
        out << "W," << k << "," << wrenches[k].Fx << "," << wrenches[k].Fy << ","
            << wrenches[k].tau << "\n";
    for (size_t k = 0; k < node_forces.size(); ++k) {
        const auto& f = node_forces[k].forces;
        for (int i = 0; i < f.rows(); ++i)
            if (f.row(i).norm() != 0.0)
                out << "N," << k << "," << i << "," << f(i, 0) << "," << f(i, 1) << ","
                    << f(i, 2) << "\n";
    }
}

ForceSchedule read_forces(const std::filesystem::path& path, int node_count) {
    std::ifstream in = open_in(path);
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line) || trim(line) != "force_schedule v1")
        throw ValidationError("force file missing 'force_schedule v1' header");
    ++lineno;

    ForceSchedule fs;
    const auto ensure = [&](size_t frames) {
        while (fs.wrenches.size() < frames) fs.wrenches.push_back({});
        while (fs.node_forces.size() < frames) fs.node_forces.push_back(NodeForces::zero(node_count));
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cols = split_csv(line);
        const std::string where = "force file line " + std::to_string(lineno);
        if (cols.empty()) continue;
        if (cols[0] == "W") {
            if (cols.size() != 5) throw ValidationError(where + ": expected W,frame,Fx,Fy,tau");
            const size_t k = static_cast<size_t>(parse_long(cols[1], where));
            ensure(k + 1);
            fs.wrenches[k] = {parse_double(cols[2], where), parse_double(cols[3], where),
                              parse_double(cols[4], where)};
        } else if (cols[0] == "N") {
            if (cols.size() != 6) throw ValidationError(where + ": expected N,frame,node,fx,fy,fz");
            const size_t k = static_cast<size_t>(parse_long(cols[1], where));
            const int node = static_cast<int>(parse_long(cols[2], where));
            if (node < 0 || node >= node_count)
                throw ValidationError(where + ": node index out of range");
            ensure(k + 1);
            fs.node_forces[k].forces(node, 0) = parse_double(cols[3], where);
            fs.node_forces[k].forces(node, 1) = parse_double(cols[4], where);
            fs.node_forces[k].forces(node, 2) = parse_double(cols[5], where);
        } else {
            throw ValidationError(where + ": unknown record type '" + cols[0] + "'");
        }
    }
    return fs;
}

// --- Truth, estimates, residuals, GA trace ---------------------------

void write_rigid_truth(const std::filesystem::path& path,
                       const std::vector<RigidStateVector>& states) {
    std::ofstream out = open_out(path);
    out << "frame,X,Y,theta,vx,vy,omega\n";
    for (size_t k = 0; k < states.size(); ++k) {
        out << k;
        for (int i = 0; i < 6; ++i) out << "," << states[k][i];
        out << "\n";
    }
}

void write_mesh_truth(const std::filesystem::path& path, const std::vector<MeshState>& states) {
    std::ofstream out = open_out(path);
    out << "frame";
    if (!states.empty())
        for (int i = 0; i < states.front().node_count(); ++i)
            out << ",n" << i << "_x,n" << i << "_y,n" << i << "_z";
    out << "\n";
    for (size_t k = 0; k < states.size(); ++k) {
        out << k;
        const auto& p = states[k].positions;
        for (int i = 0; i < p.rows(); ++i)
            out << "," << p(i, 0) << "," << p(i, 1) << "," << p(i, 2);
        out << "\n";
    }
}

void write_residual_report(const std::filesystem::path& path, const TrackResult& result) {
    std::ofstream out = open_out(path);
    out << "frame,avg_px,worst_px\n";
    for (const auto& f : result.frames) {
        if (std::isnan(f.avg_residual)) continue;  // dropped frames carry no residual
        out << f.frame << "," << f.avg_residual << "," << f.worst_residual << "\n";
    }
}

void write_feature_residuals(const std::filesystem::path& path, const TrackResult& result) {
    std::ofstream out = open_out(path);
    out << "frame,feature_index,px\n";
    for (const auto& f : result.frames)
        for (Eigen::Index j = 0; j < f.per_feature.size(); ++j)
            out << f.frame << "," << j << "," << f.per_feature[j] << "\n";
}

void write_estimates(const std::filesystem::path& path, const TrackResult& result,
                     ModelKind model) {
    std::ofstream out = open_out(path);
    if (model == ModelKind::Rigid) {
        out << "frame,X,Y,theta,vx,vy,omega\n";
    } else {
        out << "frame";
        if (!result.frames.empty())
            for (Eigen::Index i = 0; i < result.frames.front().state.size() / 3; ++i)
                out << ",n" << i << "_x,n" << i << "_y,n" << i << "_z";
        out << "\n";
    }
    for (const auto& f : result.frames) {
        out << f.frame;
        for (Eigen::Index i = 0; i < f.state.size(); ++i) out << "," << f.state[i];
        out << "\n";
    }
}

void write_ga_trace(const std::filesystem::path& path, const GaResult& result) {
    std::ofstream out = open_out(path);
    out << "generation,best_fitness,mean_fitness,bend_stiffness,stretch_stiffness,density,"
           "thickness,damping,solver_iterations,friction,gravity\n";
    for (const auto& row : result.trace) {
        out << row.generation << "," << row.best_fitness << "," << row.mean_fitness;
        for (double g : row.best) out << "," << g;
        out << "\n";
    }
}

void write_best_params(const std::filesystem::path& path, const GaResult& result,
                       const RunConfig& rc, const MeshTopology& topo) {
    const ClothParams p = apply_genes(rc.cloth, result.best.genes, topo);
    std::ofstream out = open_out(path);
    out << "# best GA individual, fitness " << result.best.fitness << "\n";
    out << "[cloth]\n";
    out << "k_structural = " << p.k_structural << "\n";
    out << "k_shear = " << p.k_shear << "\n";
    out << "k_flexion = " << p.k_flexion << "\n";
    out << "node_mass = " << p.node_mass << "\n";
    out << "damping = " << p.damping << "\n";
    out << "gravity = " << p.gravity << "\n";
    out << "bend_stiffness = " << p.bend_stiffness << "\n";
    out << "stretch_stiffness = " << p.stretch_stiffness << "\n";
    out << "thickness = " << p.thickness << "\n";
    out << "friction = " << p.friction << "\n";
    out << "limit_sweeps = " << p.limit_sweeps << "\n";
}

}  // namespace clothtrack
