#include "clothtrack/measurement.hpp"

#include <algorithm>
#include <cmath>

namespace clothtrack {

std::array<double, 4> shape_weights(double x, double y) {
    constexpr double eps = 1e-9;
    if (x < -1.0 - eps || x > 1.0 + eps || y < -1.0 - eps || y > 1.0 + eps)
        throw ValidationError("natural coordinates outside [-1,1]^2");
    return shape_weights_t<double>(x, y);
}

CellLocation locate_feature(const ClothCoord& coord, const MeshTopology& topo) {
    constexpr double eps = 1e-9;
    const double sx = (coord.s - topo.origin.x()) / topo.spacing;
    const double sy = (coord.t - topo.origin.y()) / topo.spacing;
    if (sx < -eps || sx > topo.cols - 1 + eps || sy < -eps || sy > topo.rows - 1 + eps)
        throw ValidationError("cloth coordinate (" + std::to_string(coord.s) + ", " +
                              std::to_string(coord.t) + ") outside the mesh footprint");
    // Boundary coordinates fall into the last interior cell.
    const int col = std::clamp(static_cast<int>(std::floor(sx)), 0, topo.cols - 2);
    const int row = std::clamp(static_cast<int>(std::floor(sy)), 0, topo.rows - 2);
    CellLocation loc;
    loc.row = row;
    loc.col = col;
    loc.nat_x = std::clamp(2.0 * (sx - col) - 1.0, -1.0, 1.0);
    loc.nat_y = std::clamp(2.0 * (sy - row) - 1.0, -1.0, 1.0);
    return loc;
}

FeatureSet init_features(const std::vector<ImagePoint>& pixels, const CameraIntrinsics& cam,
                         const CameraPose& pose, const MeshTopology& topo,
                         const ImageGeometry& img) {
    FeatureSet set;
    set.anchors.reserve(pixels.size());
    for (size_t i = 0; i < pixels.size(); ++i) {
        const WorldPoint wp = backproject_flat(pixels[i], cam, pose, img);
        const ClothCoord coord{wp.X, wp.Y};
        CellLocation loc;
        try {
            loc = locate_feature(coord, topo);
        } catch (const ValidationError&) {
            throw ValidationError("feature " + std::to_string(i) + " backprojects outside the mesh");
        }
        FeatureAnchor a;
        a.id = static_cast<int>(i);
        a.coord = coord;
        a.cell_row = loc.row;
        a.cell_col = loc.col;
        a.nat_x = loc.nat_x;
        a.nat_y = loc.nat_y;
        set.anchors.push_back(a);
    }
    return set;
}

StackedMeasurement measure_rigid(const RigidStateVector& state, const FeatureSet& features,
                                 const CameraIntrinsics& cam, const CameraPose& pose,
                                 const ImageGeometry& img) {
    StackedMeasurement m;
    m.n = features.size();
    m.values = measure_rigid_t<double>(state, features, cam, pose, img);
    return m;
}

StackedMeasurement measure_mesh(const MeshState& state, const MeshTopology& topo,
                                const FeatureSet& features, const CameraIntrinsics& cam,
                                const CameraPose& pose, const ImageGeometry& img) {
    StackedMeasurement m;
    m.n = features.size();
    m.values = measure_mesh_t<double>(flatten_positions(state), topo, features, cam, pose, img);
    return m;
}

Eigen::VectorXd flatten_positions(const MeshState& state) {
    const int n = state.node_count();
    Eigen::VectorXd v(3 * n);
    for (int i = 0; i < n; ++i) {
        v[3 * i] = state.positions(i, 0);
        v[3 * i + 1] = state.positions(i, 1);
        v[3 * i + 2] = state.positions(i, 2);
    }
    return v;
}

void unflatten_positions(const Eigen::VectorXd& v, MeshState& state) {
    const int n = state.node_count();
    if (v.size() != 3 * n) throw ValidationError("position vector has wrong dimension");
    for (int i = 0; i < n; ++i) {
        state.positions(i, 0) = v[3 * i];
        state.positions(i, 1) = v[3 * i + 1];
        state.positions(i, 2) = v[3 * i + 2];
    }
}

}  // namespace clothtrack
