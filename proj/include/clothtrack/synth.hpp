#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "clothtrack/camera.hpp"
#include "clothtrack/measurement.hpp"
#include "clothtrack/mesh.hpp"
#include "clothtrack/rigid.hpp"

namespace clothtrack {

enum class ScenarioKind { TranslationY, AppliedMoment, CompressionTension };

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::TranslationY;
    int frames = 30;  // compression-tension defaults to 45
    double fps = 30.0;
    int n_features = 20;
    double noise_sigma = 0.5;  // px
    uint64_t seed = 0;
    double force_magnitude = 1.0;  // total applied force, N

    static ScenarioSpec defaults(ScenarioKind kind);

    void validate() const {
        if (frames < 2) throw ValidationError("scenario needs at least 2 frames");
        if (noise_sigma < 0.0) throw ValidationError("noise sigma must be non-negative");
        if (n_features < 1) throw ValidationError("scenario needs at least one feature");
        if (!(fps > 0.0)) throw ValidationError("fps must be positive");
    }
};

// Everything a tracking or tuning run needs: ground truth, the force
// schedule that produced it, and noisy measurements with perfect data
// association.
struct ScenarioData {
    ScenarioSpec spec;
    MeshTopology topo;
    ClothParams base_params;
    FeatureSet features;
    std::vector<MeshState> true_states;          // one per frame
    std::vector<RigidStateVector> true_rigid;    // rigid-model reference rollout
    std::vector<NodeForces> node_forces;         // force applied stepping frame k -> k+1
    std::vector<PlanarWrench> wrenches;          // rigid-equivalent wrench per frame
    std::vector<StackedMeasurement> measurements;

    double dt() const { return 1.0 / spec.fps; }
};

// Adds i.i.d. zero-mean Gaussian pixel noise; the generator state
// advances deterministically.
StackedMeasurement add_noise(const StackedMeasurement& clean, double sigma, std::mt19937_64& rng);

// Open-loop mesh rollout under a per-frame force schedule, with the
// substep count multiplied by `substep_multiplier`. Both the scenario
// generator and the GA fitness evaluation go through this one routine so
// a candidate with the true parameters reproduces the reference exactly.
std::vector<MeshState> rollout_mesh(const MeshState& initial, const MeshTopology& topo,
                                    const ClothParams& params,
                                    const std::vector<NodeForces>& schedule, double dt,
                                    int substep_multiplier = 10);

ScenarioData generate_scenario(const ScenarioSpec& spec, const MeshTopology& topo,
                               const MeshState& initial, const ClothParams& params,
                               const CameraIntrinsics& cam, const CameraPose& pose,
                               const ImageGeometry& img = {});

// Rigid-body parameters equivalent to a uniformly loaded mesh: total
// mass, planar inertia about the center of mass, damping per unit mass.
RigidParams rigid_equivalent_params(const MeshTopology& topo, const MeshState& rest,
                                    const ClothParams& p);

}  // namespace clothtrack
