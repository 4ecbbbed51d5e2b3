#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clothtrack/param_id.hpp"
#include "clothtrack/synth.hpp"
#include "clothtrack/tracker.hpp"

namespace clothtrack {

// key = value configuration with [section] headers and '#' comments.
// Every key must be consumed by a typed getter; leftovers are rejected.
class Config {
public:
    static Config load(const std::filesystem::path& path);
    static Config from_string(const std::string& text);

    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key, int fallback);
    uint64_t get_u64(const std::string& key, uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::string get_string(const std::string& key, const std::string& fallback);
    std::optional<double> get_optional_double(const std::string& key);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    // Throws ValidationError listing any key never consumed.
    void reject_unknown() const;

private:
    std::map<std::string, std::string> values_;  // "section.key" -> raw text
    std::set<std::string> consumed_;
};

// Fully typed run configuration assembled from a Config.
struct RunConfig {
    int format_version = 1;

    CameraIntrinsics cam;
    CameraPose pose;
    ImageGeometry img;

    int mesh_rows = 10;
    int mesh_cols = 10;
    double mesh_spacing = 0.05;
    double mesh_origin_x = -0.225;
    double mesh_origin_y = -0.225;

    ClothParams cloth;
    std::optional<RigidParams> rigid_override;

    ScenarioSpec scenario = ScenarioSpec::defaults(ScenarioKind::TranslationY);

    double ekf_q_rigid = 1e-4;
    double ekf_q_mesh = 1e-5;
    double ekf_r_sigma = 1.0;
    double ekf_p0 = 1e-2;

    GaConfig ga;
    std::array<std::optional<double>, GeneCount> ga_fixed{};

    static RunConfig load(const std::filesystem::path& path);
    static RunConfig parse(Config& cfg);

    std::pair<MeshTopology, MeshState> make_mesh() const;
    RigidParams make_rigid(const MeshTopology& topo, const MeshState& rest) const;
};

// --- Plain-text exchange formats -------------------------------------
// Measurement file: header "n_features <n>", then "frame,feature_id,u,v".
// Force file: "W,frame,Fx,Fy,tau" and "N,frame,node,fx,fy,fz" lines.
// Residual report: "frame,avg_px,worst_px".

void write_measurements(const std::filesystem::path& path,
                        const std::vector<FrameMeasurement>& frames, int n_features);
std::vector<FrameMeasurement> read_measurements(const std::filesystem::path& path);

std::vector<FrameMeasurement> frames_from_scenario(const ScenarioData& data);

void write_forces(const std::filesystem::path& path, const std::vector<PlanarWrench>& wrenches,
                  const std::vector<NodeForces>& node_forces);
struct ForceSchedule {
    std::vector<PlanarWrench> wrenches;
    std::vector<NodeForces> node_forces;
};
ForceSchedule read_forces(const std::filesystem::path& path, int node_count);

void write_rigid_truth(const std::filesystem::path& path,
                       const std::vector<RigidStateVector>& states);
void write_mesh_truth(const std::filesystem::path& path, const std::vector<MeshState>& states);

void write_residual_report(const std::filesystem::path& path, const TrackResult& result);
void write_feature_residuals(const std::filesystem::path& path, const TrackResult& result);
void write_estimates(const std::filesystem::path& path, const TrackResult& result,
                     ModelKind model);

void write_ga_trace(const std::filesystem::path& path, const GaResult& result);
void write_best_params(const std::filesystem::path& path, const GaResult& result,
                       const RunConfig& rc, const MeshTopology& topo);

}  // namespace clothtrack
