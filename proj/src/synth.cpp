#include "clothtrack/synth.hpp"

#include <cmath>

namespace clothtrack {

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::TranslationY: return "translation_y";
        case ScenarioKind::AppliedMoment: return "applied_moment";
        case ScenarioKind::CompressionTension: return "compression_tension";
    }
    return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
    if (s == "translation_y") return ScenarioKind::TranslationY;
    if (s == "applied_moment") return ScenarioKind::AppliedMoment;
    if (s == "compression_tension") return ScenarioKind::CompressionTension;
    throw ValidationError("unknown scenario kind: " + s);
}

ScenarioSpec ScenarioSpec::defaults(ScenarioKind kind) {
    ScenarioSpec s;
    s.kind = kind;
    s.frames = (kind == ScenarioKind::CompressionTension) ? 45 : 30;
    return s;
}

StackedMeasurement add_noise(const StackedMeasurement& clean, double sigma, std::mt19937_64& rng) {
    if (sigma < 0.0) throw ValidationError("noise sigma must be non-negative");
    StackedMeasurement out = clean;
    if (sigma == 0.0) return out;
    std::normal_distribution<double> dist(0.0, sigma);
    for (Eigen::Index i = 0; i < out.values.size(); ++i) out.values[i] += dist(rng);
    return out;
}

std::vector<MeshState> rollout_mesh(const MeshState& initial, const MeshTopology& topo,
                                    const ClothParams& params,
                                    const std::vector<NodeForces>& schedule, double dt,
                                    int substep_multiplier) {
    ClothParams p = params;
    p.substeps = params.substeps * std::max(1, substep_multiplier);
    std::vector<MeshState> out;
    out.reserve(schedule.size() + 1);
    out.push_back(initial);
    for (const auto& f : schedule) out.push_back(step_mesh(out.back(), topo, p, f, dt));
    return out;
}

RigidParams rigid_equivalent_params(const MeshTopology& topo, const MeshState& rest,
                                    const ClothParams& p) {
    RigidParams rp;
    const int n = topo.node_count();
    rp.mass = n * p.node_mass;
    const Eigen::RowVector3d com = rest.positions.colwise().mean();
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
        const Eigen::RowVector3d r = rest.positions.row(i) - com;
        inertia += p.node_mass * (r.x() * r.x() + r.y() * r.y());
    }
    rp.inertia = inertia;
    rp.linear_damping = p.damping / p.node_mass;
    rp.angular_damping = p.damping / p.node_mass;
    return rp;
}

namespace {

// Per-frame force schedule for each scenario kind; also the equivalent
// rigid wrench about the mesh center of mass.
void build_schedule(const ScenarioSpec& spec, const MeshTopology& topo, const MeshState& rest,
                    std::vector<NodeForces>& node_forces, std::vector<PlanarWrench>& wrenches) {
    const int n = topo.node_count();
    const int steps = spec.frames - 1;
    const double F = spec.force_magnitude;
    const Eigen::RowVector3d com = rest.positions.colwise().mean();
    node_forces.clear();
    wrenches.clear();

    for (int k = 0; k < steps; ++k) {
        NodeForces f = NodeForces::zero(n);
        PlanarWrench w;
        switch (spec.kind) {
            case ScenarioKind::TranslationY: {
                f.forces.col(1).setConstant(F / n);
                w.Fy = F;
                break;
            }
            case ScenarioKind::AppliedMoment: {
                const int node = topo.node_index(topo.rows / 2, topo.cols - 1);
                f.forces(node, 1) = F;
                const Eigen::RowVector3d r = rest.positions.row(node) - com;
                w.Fy = F;
                w.tau = r.x() * F;
                break;
            }
            case ScenarioKind::CompressionTension: {
                // Inward edge forces for the first half, outward after.
                const double sign = (k < (spec.frames + 1) / 2) ? 1.0 : -1.0;
                const double per_node = F / topo.rows;
                for (int r = 0; r < topo.rows; ++r) {
                    f.forces(topo.node_index(r, 0), 0) += sign * per_node;
                    f.forces(topo.node_index(r, topo.cols - 1), 0) -= sign * per_node;
                }
                break;
            }
        }
        node_forces.push_back(std::move(f));
        wrenches.push_back(w);
    }
}

}  // namespace

ScenarioData generate_scenario(const ScenarioSpec& spec, const MeshTopology& topo,
                               const MeshState& initial, const ClothParams& params,
                               const CameraIntrinsics& cam, const CameraPose& pose,
                               const ImageGeometry& img) {
    spec.validate();
    params.validate();

    ScenarioData data;
    data.spec = spec;
    data.topo = topo;
    data.base_params = params;

    std::mt19937_64 rng(spec.seed);

    // Features scattered uniformly over the cloth interior.
    const double margin = 0.1;
    std::uniform_real_distribution<double> us(topo.origin.x() + margin * topo.width(),
                                              topo.origin.x() + (1.0 - margin) * topo.width());
    std::uniform_real_distribution<double> ut(topo.origin.y() + margin * topo.height(),
                                              topo.origin.y() + (1.0 - margin) * topo.height());
    for (int i = 0; i < spec.n_features; ++i) {
        ClothCoord c{us(rng), ut(rng)};
        const CellLocation loc = locate_feature(c, topo);
        data.features.anchors.push_back({i, c, loc.row, loc.col, loc.nat_x, loc.nat_y});
    }

    build_schedule(spec, topo, initial, data.node_forces, data.wrenches);

    data.true_states = rollout_mesh(initial, topo, params, data.node_forces, data.dt());

    const RigidParams rp = rigid_equivalent_params(topo, initial, params);
    RigidStateVector rs = RigidStateVector::Zero();
    data.true_rigid.push_back(rs);
    for (const auto& w : data.wrenches) {
        rs = step_rigid<double>(rs, rp, w, data.dt());
        data.true_rigid.push_back(rs);
    }

    for (int k = 0; k < spec.frames; ++k) {
        const StackedMeasurement clean =
            measure_mesh(data.true_states[k], topo, data.features, cam, pose, img);
        data.measurements.push_back(add_noise(clean, spec.noise_sigma, rng));
    }
    return data;
}

}  // namespace clothtrack
