#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "clothtrack/camera.hpp"
#include "clothtrack/error.hpp"

namespace clothtrack {

enum class SpringFamily : uint8_t { Structural, Shear, Flexion };

struct Spring {
    int a;
    int b;
    double rest_length;
    SpringFamily family;
};

// Regular rows x cols node grid with Provot's three spring families:
// grid neighbors (structural), cell diagonals (shear), two-apart nodes
// (flexion).
struct MeshTopology {
    int rows = 0;
    int cols = 0;
    double spacing = 0.0;
    Eigen::Vector2d origin{0.0, 0.0};  // world XY of node (0,0)
    std::vector<Spring> springs;

    int node_count() const { return rows * cols; }
    int node_index(int row, int col) const { return row * cols + col; }

    int count(SpringFamily f) const {
        int n = 0;
        for (const auto& s : springs) n += (s.family == f) ? 1 : 0;
        return n;
    }

    double width() const { return (cols - 1) * spacing; }
    double height() const { return (rows - 1) * spacing; }
};

struct MeshState {
    Eigen::Matrix<double, Eigen::Dynamic, 3> positions;   // meters
    Eigen::Matrix<double, Eigen::Dynamic, 3> velocities;  // m/s
    std::vector<uint8_t> pinned;

    int node_count() const { return static_cast<int>(positions.rows()); }
};

// Simulation parameters. The last block are the GA-exposed tunables from
// the identification harness; apply_tunables() folds them into the raw
// spring constants the integrator reads.
struct ClothParams {
    double k_structural = 50.0;  // N/m
    double k_shear = 25.0;       // N/m
    double k_flexion = 5.0;      // N/m
    double node_mass = 0.01;     // kg
    double damping = 0.02;       // N s/m, viscous per node
    double gravity = 9.81;       // m/s^2, applied along -Z
    double tau_c = 0.1;          // critical deformation rate

    // GA-exposed tunables (Table-2-style knobs).
    double bend_stiffness = 0.5;     // [0,1], scales k_flexion
    double stretch_stiffness = 0.5;  // [0,1], scales k_structural / k_shear
    double thickness = 0.0032;       // m, contact band for the ground clamp
    double friction = 0.1;           // [0,1], tangential damping on contact

    // Integrator controls.
    int substeps = 10;
    int limit_sweeps = 3;
    bool ground_contact = false;
    bool planar_constraint = false;  // zero Z motion (debug aid)

    void validate() const {
        if (k_structural < 0.0 || k_shear < 0.0 || k_flexion < 0.0)
            throw ValidationError("spring stiffnesses must be non-negative");
        if (!(node_mass > 0.0)) throw ValidationError("node_mass must be positive");
        if (damping < 0.0) throw ValidationError("damping must be non-negative");
        if (!(tau_c > 0.0 && tau_c <= 1.0)) throw ValidationError("tau_c must be in (0, 1]");
        if (substeps < 1) throw ValidationError("substeps must be >= 1");
        if (limit_sweeps < 0) throw ValidationError("limit_sweeps must be >= 0");
    }
};

struct NodeForces {
    Eigen::Matrix<double, Eigen::Dynamic, 3> forces;  // newtons

    static NodeForces zero(int n) {
        NodeForces f;
        f.forces.setZero(n, 3);
        return f;
    }
};

struct ForceDiagnostics {
    int degenerate_springs = 0;  // springs skipped due to coincident endpoints
};

struct LimitDiagnostics {
    double max_violation = 0.0;  // max remaining elongation beyond (1 + tau_c), in units of l0
};

std::pair<MeshTopology, MeshState> build_mesh(int rows, int cols, double spacing,
                                              const WorldPoint& origin = {});

// Hookean spring forces plus per-node viscous damping and gravity.
// Coincident endpoints contribute zero force and are counted in diag.
NodeForces spring_forces(const MeshState& state, const MeshTopology& topo, const ClothParams& p,
                         ForceDiagnostics* diag = nullptr);

// Provot's position projection: caps structural/shear elongation at
// (1 + tau_c) * rest length, sweeping springs in index order for the
// given number of passes.
MeshState enforce_deformation_limit(const MeshState& state, const MeshTopology& topo, double tau_c,
                                    int sweeps = 1, const std::vector<uint8_t>* pinned = nullptr,
                                    LimitDiagnostics* diag = nullptr);

// One frame step of length dt, internally subdivided into p.substeps
// semi-implicit Euler substeps, each followed by the deformation limit
// and (optionally) the ground-plane clamp. Pinned nodes never move.
MeshState step_mesh(const MeshState& state, const MeshTopology& topo, const ClothParams& p,
                    const NodeForces& external, double dt, LimitDiagnostics* diag = nullptr);

}  // namespace clothtrack
