#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "clothtrack/synth.hpp"

namespace clothtrack {

// Gene layout, matching the tunable cloth parameters and their bounds.
enum Gene : int {
    GeneBendStiffness = 0,
    GeneStretchStiffness,
    GeneDensity,
    GeneThickness,
    GeneDamping,
    GeneSolverIterations,  // integer, rounded at evaluation
    GeneFriction,
    GeneGravity,
    GeneCount
};

using Genome = std::array<double, GeneCount>;

struct Interval {
    double lo;
    double hi;
};

struct ParamBounds {
    std::array<Interval, GeneCount> bounds;

    static ParamBounds defaults() {
        ParamBounds b;
        b.bounds[GeneBendStiffness] = {0.0, 1.0};
        b.bounds[GeneStretchStiffness] = {0.0, 1.0};
        b.bounds[GeneDensity] = {0.02, 2.0};
        b.bounds[GeneThickness] = {0.0005, 0.01};
        b.bounds[GeneDamping] = {0.0, 1.0};
        b.bounds[GeneSolverIterations] = {1.0, 5.0};
        b.bounds[GeneFriction] = {0.0, 1.0};
        b.bounds[GeneGravity] = {5.0, 15.0};
        return b;
    }

    void validate() const {
        for (const auto& iv : bounds)
            if (!(iv.lo < iv.hi)) throw ValidationError("parameter bound must satisfy lo < hi");
    }
};

struct Individual {
    Genome genes{};
    double fitness = 0.0;
    bool evaluated = false;
};

struct GaConfig {
    int population = 30;
    int generations = 100;
    int tournament = 3;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;   // per gene
    double mutation_scale = 0.1;  // fraction of (hi - lo)
    int elitism = 2;
    int top_k = 5;
    uint64_t seed = 0;
    // Weight of the worst pixel error in the cost. Deliberately explicit:
    // the default 2 is the published weighting.
    double worst_weight = 2.0;

    void validate() const {
        if (population < 1) throw ValidationError("population must be >= 1");
        if (generations < 0) throw ValidationError("generations must be >= 0");
        if (tournament < 1) throw ValidationError("tournament size must be >= 1");
        if (crossover_rate < 0.0 || crossover_rate > 1.0 || mutation_rate < 0.0 ||
            mutation_rate > 1.0)
            throw ValidationError("rates must lie in [0,1]");
        if (elitism < 0 || elitism >= population)
            throw ValidationError("elitism must be < population");
    }
};

// Folds a genome into simulator parameters: stretch scales the
// structural/shear constants, bend the flexion constant, density gives
// the per-node mass via the cell area, solver iterations become
// deformation-limit sweeps, gravity/thickness/friction are literal.
ClothParams apply_genes(const ClothParams& base, const Genome& g, const MeshTopology& topo);

constexpr double kFitnessDivergedSentinel = -1e30;

struct FitnessResult {
    double score = kFitnessDivergedSentinel;
    double avg_px = 0.0;
    double worst_px = 0.0;
    bool diverged = false;
};

// Open-loop rollout under the reference force schedule with the candidate
// parameters; score = -(average pixel error + worst_weight * worst pixel
// error) against the reference measurements, summed over references.
FitnessResult fitness(const Genome& genes, const std::vector<ScenarioData>& references,
                      const CameraIntrinsics& cam, const CameraPose& pose,
                      const ImageGeometry& img = {}, double worst_weight = 2.0);

struct GaTraceRow {
    int generation;
    double best_fitness;
    double mean_fitness;
    Genome best;
};

struct GaResult {
    Individual best;
    std::vector<Individual> top_k;
    std::vector<GaTraceRow> trace;
};

// Tournament selection, per-gene blend crossover, Gaussian mutation
// clamped to bounds, elitism. Genes with a `fixed` value are held at it
// throughout (1-parameter studies). Deterministic for a fixed seed.
GaResult run_ga(const GaConfig& cfg, const ParamBounds& bounds,
                const std::vector<ScenarioData>& references, const CameraIntrinsics& cam,
                const CameraPose& pose, const ImageGeometry& img = {},
                const std::array<std::optional<double>, GeneCount>& fixed = {});

}  // namespace clothtrack
