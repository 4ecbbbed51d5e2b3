#pragma once

#include <optional>
#include <vector>

#include "clothtrack/camera.hpp"
#include "clothtrack/ekf.hpp"
#include "clothtrack/measurement.hpp"
#include "clothtrack/mesh.hpp"
#include "clothtrack/rigid.hpp"

namespace clothtrack {

enum class ModelKind { Rigid, Mesh };

// One frame of tracked pixels. Features may be missing (dropped by the
// upstream tracker); ids select the surviving anchors.
struct FrameMeasurement {
    int frame = 0;
    std::vector<int> ids;
    StackedMeasurement meas;  // stacked over `ids`, u-block then v-block
};

struct ResidualStats {
    double avg = 0.0;
    double worst = 0.0;
    Eigen::VectorXd per_feature;
};

// Euclidean pixel distances between two equally laid out stacked
// measurements, with their average and max.
ResidualStats residual_stats(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

struct TrackOptions {
    ModelKind model = ModelKind::Rigid;
    bool use_true_force = true;
    double dt = 1.0 / 30.0;
    double q_rigid = 1e-4;     // process noise per rigid state
    double q_mesh = 1e-5;      // process noise per node coordinate
    double r_sigma = 1.0;      // measurement noise std, px
    double p0 = 1e-2;          // initial covariance per state
    JacobianConfig jac_rigid;  // complex-step by default
    JacobianConfig jac_mesh{JacobianMethod::CentralDifference, 1e-20, 1e-6};
};

struct FrameEstimate {
    int frame = 0;
    Eigen::VectorXd state;
    double avg_residual = 0.0;    // a priori predicted vs measured, px
    double worst_residual = 0.0;
    Eigen::VectorXd per_feature;  // residual per surviving feature
    bool updated = false;         // false on dropped (predict-only) frames
};

struct TrackResult {
    std::vector<FrameEstimate> frames;
    FeatureSet features;
    double aggregate_mean = 0.0;
    double aggregate_max = 0.0;
};

// Runs the predict-measure-correct cycle over a measurement sequence.
// Features are initialized by backprojecting the first frame's pixels
// onto the rest mesh. The force schedules index the step from frame k to
// k+1; zero-force runs ignore them.
TrackResult run_tracker(const std::vector<FrameMeasurement>& measurements,
                        const std::vector<PlanarWrench>& wrenches,
                        const std::vector<NodeForces>& node_forces, const MeshTopology& topo,
                        const MeshState& rest, const ClothParams& cloth, const RigidParams& rigid,
                        const CameraIntrinsics& cam, const CameraPose& pose,
                        const ImageGeometry& img, const TrackOptions& opt);

// Baseline with no model and no force: the frame-0 prediction is scored
// against every frame's measurements.
TrackResult run_no_model_baseline(const std::vector<FrameMeasurement>& measurements,
                                  const MeshTopology& topo, const MeshState& rest,
                                  const CameraIntrinsics& cam, const CameraPose& pose,
                                  const ImageGeometry& img);

}  // namespace clothtrack
