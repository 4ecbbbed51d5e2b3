#include "clothtrack/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace clothtrack {

std::pair<MeshTopology, MeshState> build_mesh(int rows, int cols, double spacing,
                                              const WorldPoint& origin) {
    if (rows < 2 || cols < 2) throw ValidationError("mesh needs at least 2x2 nodes");
    if (!(spacing > 0.0)) throw ValidationError("mesh spacing must be positive");

    MeshTopology topo;
    topo.rows = rows;
    topo.cols = cols;
    topo.spacing = spacing;
    topo.origin = Eigen::Vector2d(origin.X, origin.Y);

    const double sqrt2 = std::sqrt(2.0);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int i = topo.node_index(r, c);
            if (c + 1 < cols)
                topo.springs.push_back({i, topo.node_index(r, c + 1), spacing, SpringFamily::Structural});
            if (r + 1 < rows)
                topo.springs.push_back({i, topo.node_index(r + 1, c), spacing, SpringFamily::Structural});
            if (r + 1 < rows && c + 1 < cols) {
                topo.springs.push_back({i, topo.node_index(r + 1, c + 1), spacing * sqrt2, SpringFamily::Shear});
                topo.springs.push_back(
                    {topo.node_index(r, c + 1), topo.node_index(r + 1, c), spacing * sqrt2, SpringFamily::Shear});
            }
            if (c + 2 < cols)
                topo.springs.push_back({i, topo.node_index(r, c + 2), 2.0 * spacing, SpringFamily::Flexion});
            if (r + 2 < rows)
                topo.springs.push_back({i, topo.node_index(r + 2, c), 2.0 * spacing, SpringFamily::Flexion});
        }
    }

    MeshState state;
    const int n = rows * cols;
    state.positions.setZero(n, 3);
    state.velocities.setZero(n, 3);
    state.pinned.assign(n, 0);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            state.positions.row(topo.node_index(r, c)) =
                Eigen::RowVector3d(origin.X + c * spacing, origin.Y + r * spacing, origin.Z);
    return {topo, state};
}

NodeForces spring_forces(const MeshState& state, const MeshTopology& topo, const ClothParams& p,
                         ForceDiagnostics* diag) {
    const int n = state.node_count();
    if (n != topo.node_count()) throw ValidationError("mesh state/topology size mismatch");
    NodeForces out = NodeForces::zero(n);
    int degenerate = 0;

    for (const auto& s : topo.springs) {
        const Eigen::RowVector3d d = state.positions.row(s.a) - state.positions.row(s.b);
        const double len = d.norm();
        if (len == 0.0) {
            ++degenerate;
            continue;
        }
        double k = 0.0;
        switch (s.family) {
            case SpringFamily::Structural: k = p.k_structural; break;
            case SpringFamily::Shear: k = p.k_shear; break;
            case SpringFamily::Flexion: k = p.k_flexion; break;
        }
        const Eigen::RowVector3d f = (-k * (len - s.rest_length) / len) * d;
        out.forces.row(s.a) += f;
        out.forces.row(s.b) -= f;
    }

    out.forces -= p.damping * state.velocities;
    out.forces.col(2).array() -= p.node_mass * p.gravity;

    for (int i = 0; i < n; ++i)
        if (state.pinned[i]) out.forces.row(i).setZero();

    if (diag) diag->degenerate_springs = degenerate;
    return out;
}

MeshState enforce_deformation_limit(const MeshState& state, const MeshTopology& topo, double tau_c,
                                    int sweeps, const std::vector<uint8_t>* pinned,
                                    LimitDiagnostics* diag) {
    if (!(tau_c > 0.0)) throw ValidationError("tau_c must be positive");
    MeshState out = state;
    const std::vector<uint8_t>& pin = pinned ? *pinned : state.pinned;

    for (int pass = 0; pass < sweeps; ++pass) {
        for (const auto& s : topo.springs) {
            if (s.family == SpringFamily::Flexion) continue;
            Eigen::RowVector3d d = out.positions.row(s.a) - out.positions.row(s.b);
            const double len = d.norm();
            const double limit = (1.0 + tau_c) * s.rest_length;
            if (len <= limit || len == 0.0) continue;
            const Eigen::RowVector3d axis = d / len;
            const double excess = len - limit;
            const bool a_free = !pin[s.a];
            const bool b_free = !pin[s.b];
            if (a_free && b_free) {
                out.positions.row(s.a) -= 0.5 * excess * axis;
                out.positions.row(s.b) += 0.5 * excess * axis;
            } else if (a_free) {
                out.positions.row(s.a) -= excess * axis;
            } else if (b_free) {
                out.positions.row(s.b) += excess * axis;
            }
        }
    }

    if (diag) {
        double worst = 0.0;
        for (const auto& s : topo.springs) {
            if (s.family == SpringFamily::Flexion) continue;
            const double len = (out.positions.row(s.a) - out.positions.row(s.b)).norm();
            worst = std::max(worst, len / s.rest_length - (1.0 + tau_c));
        }
        diag->max_violation = std::max(worst, 0.0);
    }
    return out;
}

MeshState step_mesh(const MeshState& state, const MeshTopology& topo, const ClothParams& p,
                    const NodeForces& external, double dt, LimitDiagnostics* diag) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    p.validate();
    if (!external.forces.allFinite()) throw ValidationError("non-finite external forces");
    if (external.forces.rows() != state.positions.rows())
        throw ValidationError("external force dimension mismatch");

    MeshState cur = state;
    const int n = cur.node_count();
    const double h = dt / p.substeps;
    LimitDiagnostics worst{};

    for (int step = 0; step < p.substeps; ++step) {
        NodeForces f = spring_forces(cur, topo, p);
        f.forces += external.forces;
        for (int i = 0; i < n; ++i) {
            if (cur.pinned[i]) continue;
            cur.velocities.row(i) += (h / p.node_mass) * f.forces.row(i);
            if (p.planar_constraint) cur.velocities(i, 2) = 0.0;
            cur.positions.row(i) += h * cur.velocities.row(i);
        }

        if (p.limit_sweeps > 0) {
            LimitDiagnostics d{};
            cur = enforce_deformation_limit(cur, topo, p.tau_c, p.limit_sweeps, nullptr, &d);
            worst.max_violation = std::max(worst.max_violation, d.max_violation);
        }

        if (p.ground_contact) {
            for (int i = 0; i < n; ++i) {
                if (cur.pinned[i]) continue;
                if (cur.positions(i, 2) < 0.0) cur.positions(i, 2) = 0.0;
                // Within a cloth thickness of the floor counts as contact:
                // stop downward motion and apply tangential friction.
                if (cur.positions(i, 2) <= p.thickness && cur.velocities(i, 2) < 0.0) {
                    cur.velocities(i, 2) = 0.0;
                    cur.velocities(i, 0) *= std::max(0.0, 1.0 - p.friction * h);
                    cur.velocities(i, 1) *= std::max(0.0, 1.0 - p.friction * h);
                }
            }
        }
    }

    if (!cur.positions.allFinite() || !cur.velocities.allFinite())
        throw NumericalError("mesh state diverged to non-finite values");
    if (diag) *diag = worst;
    return cur;
}

}  // namespace clothtrack
