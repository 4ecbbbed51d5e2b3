#include "clothtrack/cli.hpp"

#include <cmath>
#include <iostream>

#include <CLI11.hpp>

#include "clothtrack/io.hpp"

namespace clothtrack::cli {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory: " + dir.string());
}

int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int cmd_simulate(const fs::path& config, const fs::path& out_dir,
                 std::optional<uint64_t> seed_override) {
    return guarded([&] {
        RunConfig rc = RunConfig::load(config);
        if (seed_override) rc.scenario.seed = *seed_override;
        ensure_dir(out_dir);

        auto [topo, rest] = rc.make_mesh();
        const ScenarioData data =
            generate_scenario(rc.scenario, topo, rest, rc.cloth, rc.cam, rc.pose, rc.img);

        write_measurements(out_dir / "measurements.csv", frames_from_scenario(data),
                           rc.scenario.n_features);
        write_forces(out_dir / "forces.csv", data.wrenches, data.node_forces);
        write_mesh_truth(out_dir / "truth_mesh.csv", data.true_states);
        write_rigid_truth(out_dir / "truth_rigid.csv", data.true_rigid);

        std::cout << "simulated " << to_string(rc.scenario.kind) << ": " << rc.scenario.frames
                  << " frames, " << rc.scenario.n_features << " features, sigma "
                  << rc.scenario.noise_sigma << " px, seed " << rc.scenario.seed << "\n";
    });
}

int cmd_track(const fs::path& config, const fs::path& measurements, const fs::path& forces,
              const std::string& model, const std::string& force_mode, const fs::path& out_dir) {
    return guarded([&] {
        RunConfig rc = RunConfig::load(config);
        ensure_dir(out_dir);

        auto [topo, rest] = rc.make_mesh();
        const auto frames = read_measurements(measurements);

        if (model == "none") {
            const TrackResult res =
                run_no_model_baseline(frames, topo, rest, rc.cam, rc.pose, rc.img);
            write_residual_report(out_dir / "residuals.csv", res);
            write_feature_residuals(out_dir / "residuals_features.csv", res);
            std::cout << "no-model baseline: mean residual " << res.aggregate_mean
                      << " px, worst " << res.aggregate_max << " px\n";
            return;
        }

        TrackOptions opt;
        if (model == "rigid") {
            opt.model = ModelKind::Rigid;
        } else if (model == "mesh") {
            opt.model = ModelKind::Mesh;
        } else {
            throw ValidationError("model must be rigid, mesh or none");
        }
        if (force_mode == "true") {
            opt.use_true_force = true;
        } else if (force_mode == "zero") {
            opt.use_true_force = false;
        } else {
            throw ValidationError("force mode must be true or zero");
        }
        opt.dt = 1.0 / rc.scenario.fps;
        opt.q_rigid = rc.ekf_q_rigid;
        opt.q_mesh = rc.ekf_q_mesh;
        opt.r_sigma = rc.ekf_r_sigma;
        opt.p0 = rc.ekf_p0;

        ForceSchedule schedule;
        if (opt.use_true_force) {
            if (forces.empty())
                throw ValidationError("--force true requires a --forces schedule file");
            schedule = read_forces(forces, topo.node_count());
        }

        const RigidParams rp = rc.make_rigid(topo, rest);
        const TrackResult res = run_tracker(frames, schedule.wrenches, schedule.node_forces, topo,
                                            rest, rc.cloth, rp, rc.cam, rc.pose, rc.img, opt);

        write_estimates(out_dir / "estimates.csv", res, opt.model);
        write_residual_report(out_dir / "residuals.csv", res);
        write_feature_residuals(out_dir / "residuals_features.csv", res);
        std::cout << model << " EKF (" << force_mode << " force): mean residual "
                  << res.aggregate_mean << " px, worst " << res.aggregate_max << " px over "
                  << res.frames.size() << " frames\n";
    });
}

int cmd_tune(const fs::path& config, const fs::path& reference, const fs::path& forces,
             const fs::path& out_dir) {
    return guarded([&] {
        RunConfig rc = RunConfig::load(config);
        ensure_dir(out_dir);

        auto [topo, rest] = rc.make_mesh();
        const auto frames = read_measurements(reference);
        const ForceSchedule schedule = read_forces(forces, topo.node_count());
        if (frames.size() != schedule.node_forces.size() + 1)
            throw ValidationError("reference has " + std::to_string(frames.size()) +
                                  " frames but the force schedule covers " +
                                  std::to_string(schedule.node_forces.size()) + " steps");

        // Rebuild a reference ScenarioData from the files.
        ScenarioData ref;
        ref.spec = rc.scenario;
        ref.spec.frames = static_cast<int>(frames.size());
        ref.topo = topo;
        ref.base_params = rc.cloth;
        ref.node_forces = schedule.node_forces;
        ref.wrenches = schedule.wrenches;
        ref.true_states.push_back(rest);
        {
            const auto& first = frames.front();
            std::vector<ImagePoint> pixels;
            const int n = static_cast<int>(first.ids.size());
            for (int j = 0; j < n; ++j)
                pixels.push_back({first.meas.values[j], first.meas.values[n + j]});
            ref.features = init_features(pixels, rc.cam, rc.pose, topo, rc.img);
            for (int j = 0; j < n; ++j) ref.features.anchors[j].id = first.ids[j];
        }
        for (const auto& fm : frames) {
            if (fm.ids.size() != ref.features.anchors.size())
                throw ValidationError("tune requires every frame to carry all features");
            ref.measurements.push_back(fm.meas);
        }

        const GaResult res = run_ga(rc.ga, ParamBounds::defaults(), {ref}, rc.cam, rc.pose,
                                    rc.img, rc.ga_fixed);

        write_ga_trace(out_dir / "ga_trace.csv", res);
        write_best_params(out_dir / "best_params.cfg", res, rc, topo);
        std::cout << "tuned over " << rc.ga.generations << " generations: best fitness "
                  << res.best.fitness << "\n";
    });
}

int cmd_report(const fs::path& predicted, const fs::path& measurements, const fs::path& out_dir) {
    return guarded([&] {
        ensure_dir(out_dir);
        const auto pred = read_measurements(predicted);
        const auto meas = read_measurements(measurements);
        if (pred.size() != meas.size())
            throw ValidationError("predicted and measured files cover different frame ranges");

        TrackResult res;
        double sum = 0.0;
        int count = 0;
        for (size_t k = 0; k < pred.size(); ++k) {
            if (pred[k].ids != meas[k].ids)
                throw ValidationError("feature ids differ at frame " + std::to_string(k));
            if (pred[k].ids.empty()) continue;
            const ResidualStats st =
                residual_stats(pred[k].meas.values, meas[k].meas.values);
            res.frames.push_back(
                {static_cast<int>(k), Eigen::VectorXd(), st.avg, st.worst, st.per_feature, false});
            sum += st.avg;
            ++count;
        }
        write_residual_report(out_dir / "residuals.csv", res);
        write_feature_residuals(out_dir / "residuals_features.csv", res);
        std::cout << "report over " << count << " frames: mean residual "
                  << (count ? sum / count : 0.0) << " px\n";
    });
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Non-rigid cloth tracking toolkit: EKF tracking over rigid and mass-spring "
                 "cloth models, synthetic scenarios and GA parameter identification"};
    app.require_subcommand(1);

    std::string config, measurements, forces, model = "rigid", force_mode = "true";
    std::string out = ".", predicted;
    std::optional<uint64_t> seed;

    auto* sim = app.add_subcommand("simulate", "generate a synthetic scenario");
    sim->add_option("--config", config, "run configuration file")->required();
    sim->add_option("--out", out, "output directory");
    sim->add_option("--seed", seed, "override the scenario seed");

    auto* track = app.add_subcommand("track", "run the EKF tracker on a measurement file");
    track->add_option("--config", config, "run configuration file")->required();
    track->add_option("--measurements", measurements, "measurement file")->required();
    track->add_option("--forces", forces, "force schedule file");
    track->add_option("--model", model, "rigid, mesh or none");
    track->add_option("--force", force_mode, "true or zero");
    track->add_option("--out", out, "output directory");

    auto* tune = app.add_subcommand("tune", "GA parameter identification against a reference");
    tune->add_option("--config", config, "run configuration file")->required();
    tune->add_option("--reference", measurements, "reference measurement file")->required();
    tune->add_option("--forces", forces, "reference force schedule file")->required();
    tune->add_option("--out", out, "output directory");

    auto* report = app.add_subcommand("report", "recompute residual statistics from files");
    report->add_option("--predicted", predicted, "predicted measurement file")->required();
    report->add_option("--measurements", measurements, "measured measurement file")->required();
    report->add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (sim->parsed()) return cmd_simulate(config, out, seed);
    if (track->parsed()) return cmd_track(config, measurements, forces, model, force_mode, out);
    if (tune->parsed()) return cmd_tune(config, measurements, forces, out);
    if (report->parsed()) return cmd_report(predicted, measurements, out);
    return 1;
}

}  // namespace clothtrack::cli
