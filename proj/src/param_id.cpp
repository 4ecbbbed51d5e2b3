#include "clothtrack/param_id.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "clothtrack/tracker.hpp"

namespace clothtrack {

namespace {
// Scale factors pinning the dimensionless [0,1] genes to spring
// constants in N/m and damping in N s/m.
constexpr double kStretchScale = 100.0;
constexpr double kBendScale = 10.0;
constexpr double kDampingScale = 0.1;
}  // namespace

ClothParams apply_genes(const ClothParams& base, const Genome& g, const MeshTopology& topo) {
    ClothParams p = base;
    p.bend_stiffness = g[GeneBendStiffness];
    p.stretch_stiffness = g[GeneStretchStiffness];
    p.thickness = g[GeneThickness];
    p.friction = g[GeneFriction];
    p.gravity = g[GeneGravity];

    p.k_structural = g[GeneStretchStiffness] * kStretchScale;
    p.k_shear = 0.5 * p.k_structural;
    p.k_flexion = g[GeneBendStiffness] * kBendScale;
    p.node_mass = g[GeneDensity] * topo.spacing * topo.spacing;  // areal density, kg/m^2
    p.damping = g[GeneDamping] * kDampingScale;
    p.limit_sweeps = static_cast<int>(std::lround(g[GeneSolverIterations]));
    return p;
}

FitnessResult fitness(const Genome& genes, const std::vector<ScenarioData>& references,
                      const CameraIntrinsics& cam, const CameraPose& pose,
                      const ImageGeometry& img, double worst_weight) {
    if (references.empty()) throw ValidationError("fitness needs at least one reference");
    FitnessResult res;
    double score = 0.0;
    double avg_sum = 0.0;
    double worst_overall = 0.0;
    int total_frames = 0;
    try {
        for (const auto& ref : references) {
            ClothParams p = apply_genes(ref.base_params, genes, ref.topo);
            p.validate();
            const std::vector<MeshState> sim =
                rollout_mesh(ref.true_states.front(), ref.topo, p, ref.node_forces, ref.dt());
            double ref_avg_sum = 0.0;
            double ref_worst = 0.0;
            for (size_t k = 0; k < sim.size(); ++k) {
                const StackedMeasurement pred = measure_mesh(sim[k], ref.topo, ref.features, cam, pose, img);
                const ResidualStats st = residual_stats(pred.values, ref.measurements[k].values);
                ref_avg_sum += st.avg;
                ref_worst = std::max(ref_worst, st.worst);
            }
            const int frames = static_cast<int>(sim.size());
            const double ref_avg = ref_avg_sum / frames;
            score -= ref_avg + worst_weight * ref_worst;
            avg_sum += ref_avg_sum;
            total_frames += frames;
            worst_overall = std::max(worst_overall, ref_worst);
        }
    } catch (const NumericalError&) {
        res.diverged = true;
        res.score = kFitnessDivergedSentinel;
        return res;
    }
    res.score = score;
    res.avg_px = avg_sum / std::max(1, total_frames);
    res.worst_px = worst_overall;
    return res;
}

namespace {

double evaluate(Individual& ind, const std::vector<ScenarioData>& refs, const CameraIntrinsics& cam,
                const CameraPose& pose, const ImageGeometry& img, double worst_weight) {
    if (!ind.evaluated) {
        ind.fitness = fitness(ind.genes, refs, cam, pose, img, worst_weight).score;
        ind.evaluated = true;
    }
    return ind.fitness;
}

void clamp_and_fix(Genome& g, const ParamBounds& bounds,
                   const std::array<std::optional<double>, GeneCount>& fixed) {
    for (int i = 0; i < GeneCount; ++i) {
        g[i] = std::clamp(g[i], bounds.bounds[i].lo, bounds.bounds[i].hi);
        if (fixed[i]) g[i] = *fixed[i];
    }
}

}  // namespace

GaResult run_ga(const GaConfig& cfg, const ParamBounds& bounds,
                const std::vector<ScenarioData>& references, const CameraIntrinsics& cam,
                const CameraPose& pose, const ImageGeometry& img,
                const std::array<std::optional<double>, GeneCount>& fixed) {
    cfg.validate();
    bounds.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Individual> pop(cfg.population);
    for (auto& ind : pop) {
        for (int i = 0; i < GeneCount; ++i) {
            std::uniform_real_distribution<double> ug(bounds.bounds[i].lo, bounds.bounds[i].hi);
            ind.genes[i] = ug(rng);
        }
        clamp_and_fix(ind.genes, bounds, fixed);
    }
    for (auto& ind : pop) evaluate(ind, references, cam, pose, img, cfg.worst_weight);

    const auto by_fitness = [](const Individual& a, const Individual& b) {
        return a.fitness > b.fitness;
    };
    std::stable_sort(pop.begin(), pop.end(), by_fitness);

    GaResult res;
    const auto record = [&](int gen) {
        double mean = 0.0;
        for (const auto& ind : pop) mean += ind.fitness;
        mean /= pop.size();
        res.trace.push_back({gen, pop.front().fitness, mean, pop.front().genes});
    };
    record(0);

    const auto tournament = [&]() -> const Individual& {
        std::uniform_int_distribution<int> pick(0, cfg.population - 1);
        int best = pick(rng);
        for (int t = 1; t < cfg.tournament; ++t) {
            const int c = pick(rng);
            if (pop[c].fitness > pop[best].fitness) best = c;
        }
        return pop[best];
    };

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        std::vector<Individual> next;
        next.reserve(cfg.population);
        for (int e = 0; e < cfg.elitism; ++e) next.push_back(pop[e]);

        while (static_cast<int>(next.size()) < cfg.population) {
            const Individual& p1 = tournament();
            const Individual& p2 = tournament();
            Individual child;
            if (u01(rng) < cfg.crossover_rate) {
                for (int i = 0; i < GeneCount; ++i) {
                    const double a = u01(rng);
                    child.genes[i] = a * p1.genes[i] + (1.0 - a) * p2.genes[i];
                }
            } else {
                child.genes = p1.genes;
            }
            for (int i = 0; i < GeneCount; ++i) {
                if (u01(rng) < cfg.mutation_rate) {
                    const double span = bounds.bounds[i].hi - bounds.bounds[i].lo;
                    child.genes[i] += gauss(rng) * cfg.mutation_scale * span;
                }
            }
            clamp_and_fix(child.genes, bounds, fixed);
            next.push_back(child);
        }

        pop = std::move(next);
        for (auto& ind : pop) evaluate(ind, references, cam, pose, img, cfg.worst_weight);
        std::stable_sort(pop.begin(), pop.end(), by_fitness);
        record(gen);
    }

    res.best = pop.front();
    const int k = std::min<int>(cfg.top_k, static_cast<int>(pop.size()));
    res.top_k.assign(pop.begin(), pop.begin() + k);
    return res;
}

}  // namespace clothtrack
