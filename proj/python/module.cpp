#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clothtrack/io.hpp"
#include "clothtrack/param_id.hpp"
#include "clothtrack/synth.hpp"
#include "clothtrack/tracker.hpp"

namespace py = pybind11;
using namespace clothtrack;

namespace {

// Tracks a generated scenario end to end and returns the per-frame
// average/worst residuals plus the aggregate mean.
py::dict track_scenario(const ScenarioData& data, const CameraIntrinsics& cam,
                        const CameraPose& pose, const std::string& model, bool true_force,
                        double r_sigma) {
    TrackOptions opt;
    opt.model = (model == "mesh") ? ModelKind::Mesh : ModelKind::Rigid;
    opt.use_true_force = true_force;
    opt.dt = data.dt();
    opt.r_sigma = r_sigma;
    const RigidParams rp = rigid_equivalent_params(data.topo, data.true_states.front(), data.base_params);
    const TrackResult res =
        run_tracker(frames_from_scenario(data), data.wrenches, data.node_forces, data.topo,
                    data.true_states.front(), data.base_params, rp, cam, pose, {}, opt);
    std::vector<double> avg, worst;
    for (const auto& f : res.frames) {
        avg.push_back(f.avg_residual);
        worst.push_back(f.worst_residual);
    }
    py::dict out;
    out["avg_px"] = avg;
    out["worst_px"] = worst;
    out["aggregate_mean"] = res.aggregate_mean;
    out["aggregate_max"] = res.aggregate_max;
    return out;
}

}  // namespace

PYBIND11_MODULE(_clothtrack, m) {
    m.doc() = "Non-rigid cloth tracking: EKF over rigid and mass-spring cloth models";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
        .def(py::init<>())
        .def_readwrite("f", &CameraIntrinsics::f);

    py::class_<CameraPose>(m, "CameraPose")
        .def(py::init<>())
        .def_readwrite("rotation", &CameraPose::rotation)
        .def_readwrite("translation", &CameraPose::translation);

    m.def(
        "project",
        [](double X, double Y, double Z, const CameraIntrinsics& cam, const CameraPose& pose) {
            const ImagePoint p = project({X, Y, Z}, cam, pose);
            return py::make_tuple(p.u, p.v);
        },
        py::arg("X"), py::arg("Y"), py::arg("Z"), py::arg("cam"), py::arg("pose"));

    m.def(
        "backproject_flat",
        [](double u, double v, const CameraIntrinsics& cam, const CameraPose& pose) {
            const WorldPoint p = backproject_flat({u, v}, cam, pose);
            return py::make_tuple(p.X, p.Y, p.Z);
        },
        py::arg("u"), py::arg("v"), py::arg("cam"), py::arg("pose"));

    m.def(
        "shape_weights",
        [](double x, double y) {
            const auto w = shape_weights(x, y);
            return py::make_tuple(w[0], w[1], w[2], w[3]);
        },
        py::arg("x"), py::arg("y"));

    py::class_<ClothParams>(m, "ClothParams")
        .def(py::init<>())
        .def_readwrite("k_structural", &ClothParams::k_structural)
        .def_readwrite("k_shear", &ClothParams::k_shear)
        .def_readwrite("k_flexion", &ClothParams::k_flexion)
        .def_readwrite("node_mass", &ClothParams::node_mass)
        .def_readwrite("damping", &ClothParams::damping)
        .def_readwrite("gravity", &ClothParams::gravity)
        .def_readwrite("tau_c", &ClothParams::tau_c)
        .def_readwrite("substeps", &ClothParams::substeps)
        .def_readwrite("limit_sweeps", &ClothParams::limit_sweeps)
        .def_readwrite("ground_contact", &ClothParams::ground_contact);

    py::class_<MeshTopology>(m, "MeshTopology")
        .def_readonly("rows", &MeshTopology::rows)
        .def_readonly("cols", &MeshTopology::cols)
        .def_readonly("spacing", &MeshTopology::spacing)
        .def_property_readonly("spring_count",
                               [](const MeshTopology& t) { return t.springs.size(); });

    py::class_<MeshState>(m, "MeshState")
        .def_readwrite("positions", &MeshState::positions)
        .def_readwrite("velocities", &MeshState::velocities);

    m.def(
        "build_mesh",
        [](int rows, int cols, double spacing, double ox, double oy) {
            return build_mesh(rows, cols, spacing, {ox, oy, 0.0});
        },
        py::arg("rows"), py::arg("cols"), py::arg("spacing"), py::arg("origin_x") = 0.0,
        py::arg("origin_y") = 0.0);

    m.def(
        "step_mesh",
        [](const MeshState& state, const MeshTopology& topo, const ClothParams& p,
           const Eigen::MatrixX3d& external, double dt) {
            NodeForces f;
            f.forces = external;
            return step_mesh(state, topo, p, f, dt);
        },
        py::arg("state"), py::arg("topo"), py::arg("params"), py::arg("external"), py::arg("dt"));

    py::enum_<ScenarioKind>(m, "ScenarioKind")
        .value("translation_y", ScenarioKind::TranslationY)
        .value("applied_moment", ScenarioKind::AppliedMoment)
        .value("compression_tension", ScenarioKind::CompressionTension);

    py::class_<ScenarioSpec>(m, "ScenarioSpec")
        .def(py::init<>())
        .def_static("defaults", &ScenarioSpec::defaults)
        .def_readwrite("kind", &ScenarioSpec::kind)
        .def_readwrite("frames", &ScenarioSpec::frames)
        .def_readwrite("fps", &ScenarioSpec::fps)
        .def_readwrite("n_features", &ScenarioSpec::n_features)
        .def_readwrite("noise_sigma", &ScenarioSpec::noise_sigma)
        .def_readwrite("seed", &ScenarioSpec::seed)
        .def_readwrite("force_magnitude", &ScenarioSpec::force_magnitude);

    py::class_<ScenarioData>(m, "ScenarioData")
        .def_property_readonly("frames",
                               [](const ScenarioData& d) { return d.measurements.size(); })
        .def("measurement",
             [](const ScenarioData& d, int k) { return d.measurements.at(k).values; });

    m.def(
        "generate_scenario",
        [](const ScenarioSpec& spec, const MeshTopology& topo, const MeshState& rest,
           const ClothParams& p, const CameraIntrinsics& cam, const CameraPose& pose) {
            return generate_scenario(spec, topo, rest, p, cam, pose);
        },
        py::arg("spec"), py::arg("topo"), py::arg("rest"), py::arg("params"), py::arg("cam"),
        py::arg("pose"));

    m.def("track_scenario", &track_scenario, py::arg("data"), py::arg("cam"), py::arg("pose"),
          py::arg("model") = "rigid", py::arg("true_force") = true, py::arg("r_sigma") = 1.0);
}
