#include <doctest.h>

#include "clothtrack/io.hpp"
#include "clothtrack/synth.hpp"
#include "clothtrack/tracker.hpp"

using namespace clothtrack;

namespace {

const CameraIntrinsics kCam{500.0};
const CameraPose kPose{};

ClothParams scenario_params() {
    ClothParams p;
    p.gravity = 0.0;
    p.planar_constraint = false;
    return p;
}

std::pair<MeshTopology, MeshState> scenario_mesh() {
    return build_mesh(10, 10, 0.05, {-0.225, -0.225, 0.0});
}

}  // namespace

TEST_CASE("scenario defaults: frame counts per kind") {
    CHECK(ScenarioSpec::defaults(ScenarioKind::TranslationY).frames == 30);
    CHECK(ScenarioSpec::defaults(ScenarioKind::AppliedMoment).frames == 30);
    CHECK(ScenarioSpec::defaults(ScenarioKind::CompressionTension).frames == 45);
}

TEST_CASE("scenario kind strings round-trip") {
    for (auto k : {ScenarioKind::TranslationY, ScenarioKind::AppliedMoment,
                   ScenarioKind::CompressionTension})
        CHECK(scenario_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(scenario_kind_from_string("sideways"), ValidationError);
}

TEST_CASE("same seed reproduces the scenario bit for bit") {
    auto [topo, rest] = scenario_mesh();
    ScenarioSpec spec = ScenarioSpec::defaults(ScenarioKind::TranslationY);
    spec.seed = 99;
    const ScenarioData a = generate_scenario(spec, topo, rest, scenario_params(), kCam, kPose);
    const ScenarioData b = generate_scenario(spec, topo, rest, scenario_params(), kCam, kPose);
    REQUIRE(a.measurements.size() == b.measurements.size());
    for (size_t k = 0; k < a.measurements.size(); ++k)
        CHECK((a.measurements[k].values - b.measurements[k].values).cwiseAbs().maxCoeff() == 0.0);

    spec.seed = 100;
    const ScenarioData c = generate_scenario(spec, topo, rest, scenario_params(), kCam, kPose);
    CHECK((a.measurements[0].values - c.measurements[0].values).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("noiseless measurements equal the direct projection of the truth") {
    auto [topo, rest] = scenario_mesh();
    ScenarioSpec spec = ScenarioSpec::defaults(ScenarioKind::AppliedMoment);
    spec.noise_sigma = 0.0;
    spec.force_magnitude = 0.05;
    const ScenarioData data = generate_scenario(spec, topo, rest, scenario_params(), kCam, kPose);
    REQUIRE(static_cast<int>(data.true_states.size()) == spec.frames);
    REQUIRE(static_cast<int>(data.measurements.size()) == spec.frames);
    for (int k = 0; k < spec.frames; ++k) {
        const StackedMeasurement clean =
            measure_mesh(data.true_states[k], topo, data.features, kCam, kPose);
        CHECK((clean.values - data.measurements[k].values).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("zero applied force leaves the cloth at rest") {
    auto [topo, rest] = scenario_mesh();
    ScenarioSpec spec = ScenarioSpec::defaults(ScenarioKind::TranslationY);
    spec.noise_sigma = 0.0;
    spec.force_magnitude = 0.0;
    const ScenarioData data = generate_scenario(spec, topo, rest, scenario_params(), kCam, kPose);
    for (const auto& s : data.true_states)
        CHECK((s.positions - rest.positions).cwiseAbs().maxCoeff() <= 1e-12);
    for (size_t k = 1; k < data.measurements.size(); ++k)
        CHECK((data.measurements[k].values - data.measurements[0].values).cwiseAbs().maxCoeff() <=
              1e-9);
}

TEST_CASE("added noise has the requested first and second moments") {
    StackedMeasurement clean;
    clean.n = 50000;
    clean.values = Eigen::VectorXd::Zero(100000);
    std::mt19937_64 rng(7);
    const double sigma = 0.5;
    const StackedMeasurement noisy = add_noise(clean, sigma, rng);
    const double mean = noisy.values.mean();
    const double sd = std::sqrt((noisy.values.array() - mean).square().mean());
    CHECK(std::abs(mean) <= 0.02);
    CHECK(sd >= 0.98 * sigma);
    CHECK(sd <= 1.02 * sigma);

    const StackedMeasurement silent = add_noise(clean, 0.0, rng);
    CHECK(silent.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(add_noise(clean, -0.1, rng), ValidationError);
}

TEST_CASE("compression-tension schedule reverses sign at mid-sequence") {
    auto [topo, rest] = scenario_mesh();
    ScenarioSpec spec = ScenarioSpec::defaults(ScenarioKind::CompressionTension);
    spec.noise_sigma = 0.0;
    spec.force_magnitude = 0.2;
    const ScenarioData data = generate_scenario(spec, topo, rest, scenario_params(), kCam, kPose);
    REQUIRE(static_cast<int>(data.node_forces.size()) == spec.frames - 1);
    const int left = topo.node_index(0, 0);
    const int flip = (spec.frames + 1) / 2;  // 23 for 45 frames
    for (int k = 0; k < spec.frames - 1; ++k) {
        const double fx = data.node_forces[k].forces(left, 0);
        if (k < flip)
            CHECK(fx > 0.0);
        else
            CHECK(fx < 0.0);
    }
    // opposing edges carry equal and opposite load; net force vanishes
    for (const auto& nf : data.node_forces)
        CHECK(nf.forces.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("translation schedule applies the full force along +Y") {
    auto [topo, rest] = scenario_mesh();
    ScenarioSpec spec = ScenarioSpec::defaults(ScenarioKind::TranslationY);
    spec.force_magnitude = 0.3;
    const ScenarioData data = generate_scenario(spec, topo, rest, scenario_params(), kCam, kPose);
    for (const auto& nf : data.node_forces) {
        CHECK(nf.forces.col(1).sum() == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(nf.forces.col(0).cwiseAbs().maxCoeff() == 0.0);
        CHECK(nf.forces.col(2).cwiseAbs().maxCoeff() == 0.0);
    }
    for (const auto& w : data.wrenches) {
        CHECK(w.Fy == doctest::Approx(0.3));
        CHECK(w.Fx == 0.0);
        CHECK(w.tau == 0.0);
    }
}

TEST_CASE("applied moment wrench equals lever arm times force") {
    auto [topo, rest] = scenario_mesh();
    ScenarioSpec spec = ScenarioSpec::defaults(ScenarioKind::AppliedMoment);
    spec.force_magnitude = 0.1;
    const ScenarioData data = generate_scenario(spec, topo, rest, scenario_params(), kCam, kPose);
    const int node = topo.node_index(topo.rows / 2, topo.cols - 1);
    const Eigen::RowVector3d com = rest.positions.colwise().mean();
    const double rx = rest.positions(node, 0) - com.x();
    for (const auto& w : data.wrenches) CHECK(w.tau == doctest::Approx(rx * 0.1).epsilon(1e-12));
}

TEST_CASE("rigid-equivalent parameters for a 2x2 mesh") {
    auto [topo, rest] = build_mesh(2, 2, 0.1);
    ClothParams p = scenario_params();
    p.node_mass = 0.01;
    p.damping = 0.02;
    const RigidParams rp = rigid_equivalent_params(topo, rest, p);
    CHECK(rp.mass == doctest::Approx(0.04).epsilon(1e-12));
    // each node sits at distance^2 = 2*(0.05)^2 from the center
    CHECK(rp.inertia == doctest::Approx(4 * 0.01 * 2 * 0.05 * 0.05).epsilon(1e-12));
    CHECK(rp.linear_damping == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("rollout multiplier composes with the base substep count") {
    auto [topo, rest] = build_mesh(4, 4, 0.1);
    ClothParams coarse = scenario_params();
    coarse.substeps = 2;
    ClothParams fine = coarse;
    fine.substeps = 20;
    std::vector<NodeForces> schedule(5, NodeForces::zero(16));
    for (auto& f : schedule) f.forces.col(1).setConstant(0.01);
    const auto a = rollout_mesh(rest, topo, coarse, schedule, 1.0 / 30.0, 10);
    const auto b = rollout_mesh(rest, topo, fine, schedule, 1.0 / 30.0, 1);
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.size(); ++k)
        CHECK((a[k].positions - b[k].positions).cwiseAbs().maxCoeff() <= 1e-14);
}

// With the tracker's process model matched to the truth discretization and
// zero pixel noise, the filter's a priori prediction reproduces every
// measurement and residuals stay at numerical noise.
TEST_CASE("noiseless tracking round trip has near-zero residuals") {
    auto [topo, rest] = scenario_mesh();
    ClothParams truth = scenario_params();
    truth.damping = 0.0;
    truth.substeps = 1;  // the generator steps at 10x this
    ScenarioSpec spec = ScenarioSpec::defaults(ScenarioKind::TranslationY);
    spec.noise_sigma = 0.0;
    spec.force_magnitude = 0.05;
    spec.n_features = 12;
    const ScenarioData data = generate_scenario(spec, topo, rest, truth, kCam, kPose);

    ClothParams model = truth;
    model.substeps = 10;  // same per-frame discretization as the truth rollout

    TrackOptions opt;
    opt.model = ModelKind::Mesh;
    opt.use_true_force = true;
    opt.dt = data.dt();
    const TrackResult res =
        run_tracker(frames_from_scenario(data), data.wrenches, data.node_forces, topo, rest, model,
                    rigid_equivalent_params(topo, rest, truth), kCam, kPose, {}, opt);
    REQUIRE(static_cast<int>(res.frames.size()) == spec.frames);
    for (const auto& fr : res.frames) CHECK(fr.avg_residual <= 1e-6);
    CHECK(res.aggregate_max <= 1e-6);
}

TEST_CASE("spec validation rejects nonsense") {
    ScenarioSpec s;
    s.frames = 1;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.frames = 10;
    s.noise_sigma = -1.0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.noise_sigma = 0.5;
    s.n_features = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
}
