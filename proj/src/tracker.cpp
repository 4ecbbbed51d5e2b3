#include "clothtrack/tracker.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

namespace clothtrack {

ResidualStats residual_stats(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
    if (predicted.size() != actual.size() || predicted.size() % 2 != 0)
        throw ValidationError("residual layouts do not match");
    const int n = static_cast<int>(predicted.size()) / 2;
    ResidualStats st;
    st.per_feature.resize(n);
    for (int j = 0; j < n; ++j) {
        const double du = predicted[j] - actual[j];
        const double dv = predicted[n + j] - actual[n + j];
        st.per_feature[j] = std::hypot(du, dv);
    }
    st.avg = (n > 0) ? st.per_feature.mean() : 0.0;
    st.worst = (n > 0) ? st.per_feature.maxCoeff() : 0.0;
    return st;
}

namespace {

FeatureSet subset_features(const FeatureSet& all, const std::vector<int>& ids) {
    std::unordered_map<int, int> index;
    for (int j = 0; j < all.size(); ++j) index[all.anchors[j].id] = j;
    FeatureSet sub;
    for (int id : ids) {
        const auto it = index.find(id);
        if (it == index.end())
            throw ValidationError("measurement references unknown feature id " + std::to_string(id));
        sub.anchors.push_back(all.anchors[it->second]);
    }
    return sub;
}

FeatureSet init_from_first_frame(const FrameMeasurement& first, const CameraIntrinsics& cam,
                                 const CameraPose& pose, const MeshTopology& topo,
                                 const ImageGeometry& img) {
    if (first.ids.empty()) throw ValidationError("first frame carries no measurements");
    std::vector<ImagePoint> pixels;
    const int n = static_cast<int>(first.ids.size());
    for (int j = 0; j < n; ++j) pixels.push_back({first.meas.values[j], first.meas.values[n + j]});
    FeatureSet set = init_features(pixels, cam, pose, topo, img);
    for (int j = 0; j < n; ++j) set.anchors[j].id = first.ids[j];
    return set;
}

void finalize_aggregates(TrackResult& res) {
    double sum = 0.0;
    int count = 0;
    double worst = 0.0;
    for (const auto& f : res.frames) {
        if (std::isnan(f.avg_residual)) continue;
        sum += f.avg_residual;
        worst = std::max(worst, f.worst_residual);
        ++count;
    }
    res.aggregate_mean = (count > 0) ? sum / count : 0.0;
    res.aggregate_max = worst;
}

}  // namespace

TrackResult run_tracker(const std::vector<FrameMeasurement>& measurements,
                        const std::vector<PlanarWrench>& wrenches,
                        const std::vector<NodeForces>& node_forces, const MeshTopology& topo,
                        const MeshState& rest, const ClothParams& cloth, const RigidParams& rigid,
                        const CameraIntrinsics& cam, const CameraPose& pose,
                        const ImageGeometry& img, const TrackOptions& opt) {
    if (measurements.empty()) throw ValidationError("no measurement frames given");
    const double nan = std::numeric_limits<double>::quiet_NaN();

    TrackResult res;
    res.features = init_from_first_frame(measurements.front(), cam, pose, topo, img);

    const bool is_rigid = (opt.model == ModelKind::Rigid);
    const int m = is_rigid ? 6 : 3 * topo.node_count();

    FilterState fs;
    fs.P = opt.p0 * Mat::Identity(m, m);
    MeshState mesh = rest;
    if (is_rigid) {
        fs.x = Vec::Zero(6);
    } else {
        fs.x = flatten_positions(rest);
    }

    const JacobianConfig& jac_process = is_rigid ? opt.jac_rigid : opt.jac_mesh;
    const Mat Q = (is_rigid ? opt.q_rigid : opt.q_mesh) * Mat::Identity(m, m);

    // Frame 0: features were anchored from these pixels, record the
    // (near-zero) residual and move on.
    {
        const FeatureSet sub = subset_features(res.features, measurements.front().ids);
        Vec h0;
        if (is_rigid) {
            h0 = measure_rigid_t<double>(fs.x, sub, cam, pose, img);
        } else {
            h0 = measure_mesh_t<double>(fs.x, topo, sub, cam, pose, img);
        }
        const ResidualStats st = residual_stats(h0, measurements.front().meas.values);
        res.frames.push_back({0, fs.x, st.avg, st.worst, st.per_feature, false});
    }

    for (size_t k = 1; k < measurements.size(); ++k) {
        PlanarWrench w;
        NodeForces ext = NodeForces::zero(topo.node_count());
        if (opt.use_true_force) {
            if (k - 1 < wrenches.size()) w = wrenches[k - 1];
            if (k - 1 < node_forces.size()) ext = node_forces[k - 1];
        }

        DiffFunction step;
        if (is_rigid) {
            step.real = [&](const Vec& x) -> Vec {
                return step_rigid<double>(x, rigid, w, opt.dt);
            };
            step.cplx = [&](const CVec& x) -> CVec {
                return step_rigid<std::complex<double>>(x, rigid, w, opt.dt);
            };
        } else {
            step.real = [&](const Vec& x) -> Vec {
                MeshState s = mesh;
                unflatten_positions(x, s);
                return flatten_positions(step_mesh(s, topo, cloth, ext, opt.dt));
            };
        }

        fs = predict(fs, step, Q, jac_process);

        MeshState mesh_next = mesh;
        if (!is_rigid) {
            // Nominal velocities ride along outside the filter state.
            mesh_next = step_mesh(mesh, topo, cloth, ext, opt.dt);
        }

        const FrameMeasurement& fm = measurements[k];
        if (fm.ids.empty()) {
            // Dropped frame: predict-only, flagged by NaN residuals.
            if (!is_rigid) {
                unflatten_positions(fs.x, mesh_next);
                mesh = mesh_next;
            }
            res.frames.push_back({static_cast<int>(k), fs.x, nan, nan, Eigen::VectorXd(), false});
            continue;
        }

        const FeatureSet sub = subset_features(res.features, fm.ids);
        DiffFunction h;
        if (is_rigid) {
            h.real = [&](const Vec& x) -> Vec { return measure_rigid_t<double>(x, sub, cam, pose, img); };
            h.cplx = [&](const CVec& x) -> CVec {
                return measure_rigid_t<std::complex<double>>(x, sub, cam, pose, img);
            };
        } else {
            h.real = [&](const Vec& x) -> Vec {
                return measure_mesh_t<double>(x, topo, sub, cam, pose, img);
            };
            h.cplx = [&](const CVec& x) -> CVec {
                return measure_mesh_t<std::complex<double>>(x, topo, sub, cam, pose, img);
            };
        }

        const ResidualStats st = residual_stats(h.real(fs.x), fm.meas.values);

        const int twon = 2 * static_cast<int>(fm.ids.size());
        const Mat R = opt.r_sigma * opt.r_sigma * Mat::Identity(twon, twon);
        JacobianConfig jac_meas = opt.jac_rigid;  // measurement models are analytic for both
        fs = update(fs, fm.meas.values, h, R, jac_meas);

        if (!is_rigid) {
            unflatten_positions(fs.x, mesh_next);
            mesh = mesh_next;
        }
        res.frames.push_back({static_cast<int>(k), fs.x, st.avg, st.worst, st.per_feature, true});
    }

    finalize_aggregates(res);
    return res;
}

TrackResult run_no_model_baseline(const std::vector<FrameMeasurement>& measurements,
                                  const MeshTopology& topo, const MeshState& rest,
                                  const CameraIntrinsics& cam, const CameraPose& pose,
                                  const ImageGeometry& img) {
    if (measurements.empty()) throw ValidationError("no measurement frames given");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    TrackResult res;
    res.features = init_from_first_frame(measurements.front(), cam, pose, topo, img);
    const Vec x0 = flatten_positions(rest);
    for (const auto& fm : measurements) {
        if (fm.ids.empty()) {
            res.frames.push_back({fm.frame, x0, nan, nan, Eigen::VectorXd(), false});
            continue;
        }
        const FeatureSet sub = subset_features(res.features, fm.ids);
        const Vec h0 = measure_mesh_t<double>(x0, topo, sub, cam, pose, img);
        const ResidualStats st = residual_stats(h0, fm.meas.values);
        res.frames.push_back({fm.frame, x0, st.avg, st.worst, st.per_feature, false});
    }
    finalize_aggregates(res);
    return res;
}

}  // namespace clothtrack
