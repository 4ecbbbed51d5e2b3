#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clothtrack/camera.hpp"
#include "clothtrack/error.hpp"
#include "clothtrack/mesh.hpp"
#include "clothtrack/rigid.hpp"

namespace clothtrack {

// 2D cloth-space coordinate; coincides with world XY in the flat initial
// frame.
struct ClothCoord {
    double s = 0.0;
    double t = 0.0;
};

// A tracked feature bound to its initial cloth coordinate and the mesh
// cell containing it. The anchor is permanent: features are never
// re-binned, corrections flow through the filter instead.
struct FeatureAnchor {
    int id = 0;
    ClothCoord coord;
    int cell_row = 0;
    int cell_col = 0;
    double nat_x = 0.0;  // natural coordinates in [-1, 1]^2
    double nat_y = 0.0;
};

struct FeatureSet {
    std::vector<FeatureAnchor> anchors;

    int size() const { return static_cast<int>(anchors.size()); }
};

// Stacked 2n pixel measurement: all u components first, then all v's.
struct StackedMeasurement {
    Eigen::VectorXd values;
    int n = 0;

    double u(int j) const { return values[j]; }
    double v(int j) const { return values[n + j]; }
};

// Bilinear shape functions over the [-1,1]^2 natural square, corners
// counterclockwise from (-1,-1):
//   N1 = (1-x)(1-y)/4, N2 = (1+x)(1-y)/4, N3 = (1+x)(1+y)/4, N4 = (1-x)(1+y)/4
template <typename T>
std::array<T, 4> shape_weights_t(T x, T y) {
    return {T(0.25) * (T(1) - x) * (T(1) - y), T(0.25) * (T(1) + x) * (T(1) - y),
            T(0.25) * (T(1) + x) * (T(1) + y), T(0.25) * (T(1) - x) * (T(1) + y)};
}

std::array<double, 4> shape_weights(double x, double y);

// Locates a cloth coordinate within the rest mesh: enclosing cell plus
// natural coordinates. Boundary coordinates are assigned to the last
// interior cell (so the natural component becomes +1 there).
struct CellLocation {
    int row;
    int col;
    double nat_x;
    double nat_y;
};

CellLocation locate_feature(const ClothCoord& coord, const MeshTopology& topo);

// Backprojects first-frame pixels onto the flat cloth and anchors each
// against the rest mesh. Pixels outside the mesh footprint are rejected
// with their index reported.
FeatureSet init_features(const std::vector<ImagePoint>& pixels, const CameraIntrinsics& cam,
                         const CameraPose& pose, const MeshTopology& topo,
                         const ImageGeometry& img = {});

// Rigid measurement: rotate each initial cloth coordinate about Z by
// theta, translate by (X, Y), project, stack u-block then v-block.
// `state` is the 6-vector (X, Y, theta, vx, vy, omega); only the pose
// entries enter the measurement.
template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, 1> measure_rigid_t(const Eigen::Matrix<T, Eigen::Dynamic, 1>& state,
                                                    const FeatureSet& features,
                                                    const CameraIntrinsics& cam,
                                                    const CameraPose& pose,
                                                    const ImageGeometry& img = {}) {
    const int n = features.size();
    Eigen::Matrix<T, Eigen::Dynamic, 1> out(2 * n);
    using std::cos;
    using std::sin;
    const T c = cos(state[2]);
    const T s = sin(state[2]);
    for (int j = 0; j < n; ++j) {
        const auto& a = features.anchors[j];
        const T wx = c * a.coord.s - s * a.coord.t + state[0];
        const T wy = s * a.coord.s + c * a.coord.t + state[1];
        const PixelT<T> px = project<T>(wx, wy, T(0), cam, pose, img);
        out[j] = px.u;
        out[n + j] = px.v;
    }
    return out;
}

StackedMeasurement measure_rigid(const RigidStateVector& state, const FeatureSet& features,
                                 const CameraIntrinsics& cam, const CameraPose& pose,
                                 const ImageGeometry& img = {});

// Mesh measurement: each feature's world position is the shape-weighted
// sum of its cell's four corner nodes, projected and stacked u-then-v.
// `positions` is the 3N stacked node position vector, node i at
// [3i, 3i+1, 3i+2].
template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, 1> measure_mesh_t(const Eigen::Matrix<T, Eigen::Dynamic, 1>& positions,
                                                   const MeshTopology& topo,
                                                   const FeatureSet& features,
                                                   const CameraIntrinsics& cam,
                                                   const CameraPose& pose,
                                                   const ImageGeometry& img = {}) {
    if (positions.size() != 3 * topo.node_count())
        throw ValidationError("node position vector has wrong dimension");
    const int n = features.size();
    Eigen::Matrix<T, Eigen::Dynamic, 1> out(2 * n);
    for (int j = 0; j < n; ++j) {
        const auto& a = features.anchors[j];
        const std::array<T, 4> w = shape_weights_t<T>(T(a.nat_x), T(a.nat_y));
        const int corners[4] = {topo.node_index(a.cell_row, a.cell_col),
                                topo.node_index(a.cell_row, a.cell_col + 1),
                                topo.node_index(a.cell_row + 1, a.cell_col + 1),
                                topo.node_index(a.cell_row + 1, a.cell_col)};
        T wx = T(0), wy = T(0), wz = T(0);
        for (int k = 0; k < 4; ++k) {
            wx += w[k] * positions[3 * corners[k]];
            wy += w[k] * positions[3 * corners[k] + 1];
            wz += w[k] * positions[3 * corners[k] + 2];
        }
        const PixelT<T> px = project<T>(wx, wy, wz, cam, pose, img);
        out[j] = px.u;
        out[n + j] = px.v;
    }
    return out;
}

StackedMeasurement measure_mesh(const MeshState& state, const MeshTopology& topo,
                                const FeatureSet& features, const CameraIntrinsics& cam,
                                const CameraPose& pose, const ImageGeometry& img = {});

// Stacks node positions into the 3N mesh filter state and back.
Eigen::VectorXd flatten_positions(const MeshState& state);
void unflatten_positions(const Eigen::VectorXd& v, MeshState& state);

}  // namespace clothtrack
