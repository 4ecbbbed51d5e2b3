#include <doctest.h>

#include "clothtrack/param_id.hpp"

using namespace clothtrack;

namespace {

const CameraIntrinsics kCam{500.0};
const CameraPose kPose{};

Genome true_genome() {
    Genome g{};
    g[GeneBendStiffness] = 0.5;
    g[GeneStretchStiffness] = 0.5;
    g[GeneDensity] = 0.4;
    g[GeneThickness] = 0.0032;
    g[GeneDamping] = 0.2;
    g[GeneSolverIterations] = 3.0;
    g[GeneFriction] = 0.1;
    g[GeneGravity] = 9.81;
    return g;
}

ClothParams base_params() {
    ClothParams p;
    p.ground_contact = true;  // the cloth lies on the z = 0 plane
    return p;
}

// A small, fast reference: open-loop truth generated with the given
// genome. Compression-tension loads the springs, so stiffness genes are
// observable.
ScenarioData make_reference(const Genome& g, uint64_t seed = 1) {
    auto [topo, rest] = build_mesh(6, 6, 0.05, {-0.125, -0.125, 0.0});
    ScenarioSpec spec = ScenarioSpec::defaults(ScenarioKind::CompressionTension);
    spec.frames = 16;
    spec.n_features = 8;
    spec.noise_sigma = 0.0;
    spec.force_magnitude = 0.05;
    spec.seed = seed;
    const ClothParams truth = apply_genes(base_params(), g, topo);
    return generate_scenario(spec, topo, rest, truth, kCam, kPose);
}

}  // namespace

TEST_CASE("gene-to-parameter mapping") {
    auto [topo, rest] = build_mesh(6, 6, 0.05);
    const Genome g = true_genome();
    const ClothParams p = apply_genes(base_params(), g, topo);
    CHECK(p.k_structural == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(p.k_shear == doctest::Approx(25.0).epsilon(1e-15));
    CHECK(p.k_flexion == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(p.node_mass == doctest::Approx(0.4 * 0.05 * 0.05).epsilon(1e-15));
    CHECK(p.damping == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(p.limit_sweeps == 3);
    CHECK(p.thickness == 0.0032);
    CHECK(p.friction == 0.1);
    CHECK(p.gravity == 9.81);
}

TEST_CASE("solver iteration gene rounds to the nearest integer") {
    auto [topo, rest] = build_mesh(3, 3, 0.1);
    Genome g = true_genome();
    g[GeneSolverIterations] = 2.4;
    CHECK(apply_genes(base_params(), g, topo).limit_sweeps == 2);
    g[GeneSolverIterations] = 2.6;
    CHECK(apply_genes(base_params(), g, topo).limit_sweeps == 3);
}

TEST_CASE("the true genome scores a perfect fitness against its own reference") {
    const Genome g = true_genome();
    const std::vector<ScenarioData> refs{make_reference(g)};
    const FitnessResult r = fitness(g, refs, kCam, kPose);
    CHECK_FALSE(r.diverged);
    CHECK(r.score >= -1e-9);
    CHECK(r.avg_px <= 1e-9);
    CHECK(r.worst_px <= 1e-9);
}

TEST_CASE("a uniform one-pixel u shift costs avg + 2*worst = 3") {
    const Genome g = true_genome();
    ScenarioData ref = make_reference(g);
    for (auto& m : ref.measurements) m.values.head(m.n).array() += 1.0;
    const FitnessResult r = fitness(g, {ref}, kCam, kPose);
    CHECK(r.score == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(r.avg_px == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.worst_px == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("costs add over multiple references") {
    const Genome g = true_genome();
    ScenarioData shifted = make_reference(g);
    for (auto& m : shifted.measurements) m.values.head(m.n).array() += 1.0;
    const FitnessResult r = fitness(g, {shifted, shifted}, kCam, kPose);
    CHECK(r.score == doctest::Approx(-6.0).epsilon(1e-9));
}

TEST_CASE("a candidate that falls out of view is flagged, not thrown") {
    Genome g = true_genome();
    const std::vector<ScenarioData> refs{make_reference(g)};
    // same genes but free fall: no ground plane under this reference copy
    std::vector<ScenarioData> falling = refs;
    falling[0].base_params.ground_contact = false;
    falling[0].spec.frames = 60;
    falling[0].node_forces.resize(59, NodeForces::zero(36));
    falling[0].true_states.resize(1);  // only the initial state is consulted
    falling[0].measurements.assign(
        60, measure_mesh(falling[0].true_states[0], falling[0].topo, falling[0].features, kCam,
                         kPose));
    g[GeneGravity] = 15.0;
    g[GeneDamping] = 0.0;  // free fall, no terminal velocity
    const FitnessResult r = fitness(g, falling, kCam, kPose);
    CHECK(r.diverged);
    CHECK(r.score == kFitnessDivergedSentinel);
}

TEST_CASE("fitness without references is a usage error") {
    CHECK_THROWS_AS(fitness(true_genome(), {}, kCam, kPose), ValidationError);
}

TEST_CASE("elitism makes the best fitness non-decreasing across generations") {
    const Genome g = true_genome();
    const std::vector<ScenarioData> refs{make_reference(g)};
    GaConfig cfg;
    cfg.population = 8;
    cfg.generations = 5;
    cfg.seed = 3;
    const GaResult res = run_ga(cfg, ParamBounds::defaults(), refs, kCam, kPose);
    REQUIRE(res.trace.size() == 6);
    for (size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].best_fitness >= res.trace[i - 1].best_fitness);
    CHECK(res.best.fitness == res.trace.back().best_fitness);
    CHECK(static_cast<int>(res.top_k.size()) == 5);
}

TEST_CASE("population of one with no elitism still runs") {
    const Genome g = true_genome();
    const std::vector<ScenarioData> refs{make_reference(g)};
    GaConfig cfg;
    cfg.population = 1;
    cfg.generations = 2;
    cfg.elitism = 0;
    cfg.top_k = 5;
    const GaResult res = run_ga(cfg, ParamBounds::defaults(), refs, kCam, kPose);
    CHECK(res.trace.size() == 3);
    CHECK(res.top_k.size() == 1);
}

TEST_CASE("every surviving genome respects the bounds and fixed genes") {
    const Genome g = true_genome();
    const std::vector<ScenarioData> refs{make_reference(g)};
    GaConfig cfg;
    cfg.population = 10;
    cfg.generations = 4;
    cfg.seed = 7;
    std::array<std::optional<double>, GeneCount> fixed{};
    fixed[GeneGravity] = 9.81;
    fixed[GeneThickness] = 0.0032;
    const ParamBounds bounds = ParamBounds::defaults();
    const GaResult res = run_ga(cfg, bounds, refs, kCam, kPose, {}, fixed);
    for (const auto& ind : res.top_k) {
        for (int i = 0; i < GeneCount; ++i) {
            CHECK(ind.genes[i] >= bounds.bounds[i].lo);
            CHECK(ind.genes[i] <= bounds.bounds[i].hi);
        }
        CHECK(ind.genes[GeneGravity] == 9.81);
        CHECK(ind.genes[GeneThickness] == 0.0032);
    }
}

TEST_CASE("a fixed seed reproduces the run bit for bit") {
    const Genome g = true_genome();
    const std::vector<ScenarioData> refs{make_reference(g)};
    GaConfig cfg;
    cfg.population = 6;
    cfg.generations = 3;
    cfg.seed = 42;
    const GaResult a = run_ga(cfg, ParamBounds::defaults(), refs, kCam, kPose);
    const GaResult b = run_ga(cfg, ParamBounds::defaults(), refs, kCam, kPose);
    CHECK(a.best.fitness == b.best.fitness);
    for (int i = 0; i < GeneCount; ++i) CHECK(a.best.genes[i] == b.best.genes[i]);
}

TEST_CASE("one-parameter search recovers the stretch stiffness") {
    const Genome g = true_genome();
    const std::vector<ScenarioData> refs{make_reference(g)};
    std::array<std::optional<double>, GeneCount> fixed{};
    for (int i = 0; i < GeneCount; ++i)
        if (i != GeneStretchStiffness) fixed[i] = g[i];
    GaConfig cfg;
    cfg.population = 12;
    cfg.generations = 12;
    cfg.seed = 5;
    const GaResult res = run_ga(cfg, ParamBounds::defaults(), refs, kCam, kPose, {}, fixed);
    CHECK(std::abs(res.best.genes[GeneStretchStiffness] - 0.5) <= 0.1);
}

TEST_CASE("configuration validation") {
    GaConfig bad;
    bad.population = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    GaConfig elite;
    elite.population = 2;
    elite.elitism = 2;
    CHECK_THROWS_AS(elite.validate(), ValidationError);
    ParamBounds b = ParamBounds::defaults();
    b.bounds[0] = {1.0, 1.0};
    CHECK_THROWS_AS(b.validate(), ValidationError);
}
