#include <doctest.h>

#include "clothtrack/mesh.hpp"

using namespace clothtrack;

namespace {

ClothParams planar_params() {
    ClothParams p;
    p.gravity = 0.0;
    p.damping = 0.0;
    return p;
}

// Two nodes joined by a single structural spring of rest length l0.
std::pair<MeshTopology, MeshState> single_spring(double l0, double length) {
    MeshTopology topo;
    topo.rows = 1;
    topo.cols = 2;
    topo.spacing = l0;
    topo.springs.push_back({0, 1, l0, SpringFamily::Structural});
    MeshState s;
    s.positions.setZero(2, 3);
    s.velocities.setZero(2, 3);
    s.pinned.assign(2, 0);
    s.positions(1, 0) = length;
    return {topo, s};
}

}  // namespace

TEST_CASE("spring counts match the connectivity formulas") {
    auto [t2, s2] = build_mesh(2, 2, 0.1);
    CHECK(t2.count(SpringFamily::Structural) == 4);
    CHECK(t2.count(SpringFamily::Shear) == 2);
    CHECK(t2.count(SpringFamily::Flexion) == 0);

    auto [t3, s3] = build_mesh(3, 3, 0.1);
    CHECK(t3.count(SpringFamily::Structural) == 12);
    CHECK(t3.count(SpringFamily::Shear) == 8);
    CHECK(t3.count(SpringFamily::Flexion) == 6);

    // general formulas on a rectangular grid
    auto [t, s] = build_mesh(4, 7, 0.05);
    CHECK(t.count(SpringFamily::Structural) == 2 * 4 * 7 - 4 - 7);
    CHECK(t.count(SpringFamily::Shear) == 2 * 3 * 6);
    CHECK(t.count(SpringFamily::Flexion) == 2 * 7 + 4 * 5);
}

TEST_CASE("nodes sit on the grid and rest lengths match their family") {
    auto [topo, state] = build_mesh(3, 4, 0.1, {1.0, 2.0, 0.0});
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) {
            const auto p = state.positions.row(topo.node_index(r, c));
            CHECK(p.x() == doctest::Approx(1.0 + c * 0.1));
            CHECK(p.y() == doctest::Approx(2.0 + r * 0.1));
            CHECK(p.z() == 0.0);
        }
    for (const auto& sp : topo.springs) {
        const double expected = sp.family == SpringFamily::Structural ? 0.1
                                : sp.family == SpringFamily::Shear    ? 0.1 * std::sqrt(2.0)
                                                                      : 0.2;
        CHECK(sp.rest_length == doctest::Approx(expected));
        const double actual = (state.positions.row(sp.a) - state.positions.row(sp.b)).norm();
        CHECK(actual == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("degenerate mesh dimensions are rejected") {
    CHECK_THROWS_AS(build_mesh(1, 5, 0.1), ValidationError);
    CHECK_THROWS_AS(build_mesh(3, 3, 0.0), ValidationError);
}

TEST_CASE("rest configuration produces zero forces") {
    auto [topo, state] = build_mesh(4, 4, 0.1);
    const NodeForces f = spring_forces(state, topo, planar_params());
    CHECK(f.forces.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("stretched spring follows Hooke's law and attracts") {
    auto [topo, state] = single_spring(0.1, 0.11);
    ClothParams p = planar_params();
    p.k_structural = 100.0;
    const NodeForces f = spring_forces(state, topo, p);
    CHECK(f.forces.row(0).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.forces(0, 0) > 0.0);   // node 0 pulled toward node 1
    CHECK(f.forces(1, 0) < 0.0);
}

TEST_CASE("internal forces sum to zero over all nodes") {
    auto [topo, state] = build_mesh(5, 5, 0.08);
    // perturb to load the springs
    for (int i = 0; i < state.node_count(); ++i)
        state.positions.row(i) += 0.01 * Eigen::RowVector3d(std::sin(3.0 * i), std::cos(2.0 * i),
                                                            std::sin(1.0 + i));
    const NodeForces f = spring_forces(state, topo, planar_params());
    CHECK(f.forces.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("coincident spring endpoints are diagnosed, not NaN") {
    auto [topo, state] = single_spring(0.1, 0.0);
    ForceDiagnostics diag;
    const NodeForces f = spring_forces(state, topo, planar_params(), &diag);
    CHECK(diag.degenerate_springs == 1);
    CHECK(f.forces.allFinite());
}

TEST_CASE("rest state is an equilibrium of step_mesh") {
    auto [topo, state] = build_mesh(3, 3, 0.1);
    const MeshState out = step_mesh(state, topo, planar_params(),
                                    NodeForces::zero(state.node_count()), 1.0 / 30.0);
    CHECK((out.positions - state.positions).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("free mesh falls by g*dt^2 after one semi-implicit step") {
    auto [topo, state] = build_mesh(2, 2, 0.1);
    ClothParams p = planar_params();
    p.substeps = 1;
    const double g = 9.81, dt = 1.0 / 30.0;
    NodeForces ext = NodeForces::zero(4);
    ext.forces.col(2).setConstant(-g * p.node_mass);  // gravity supplied externally
    const MeshState out = step_mesh(state, topo, p, ext, dt);
    for (int i = 0; i < 4; ++i) CHECK(out.positions(i, 2) == doctest::Approx(-g * dt * dt).epsilon(1e-12));
}

TEST_CASE("pinned nodes never move") {
    auto [topo, state] = build_mesh(3, 3, 0.1);
    state.pinned[4] = 1;
    ClothParams p = planar_params();
    NodeForces ext = NodeForces::zero(9);
    ext.forces(4, 0) = 100.0;
    const MeshState out = step_mesh(state, topo, p, ext, 1.0 / 30.0);
    CHECK(out.positions.row(4) == state.positions.row(4));
    CHECK(out.velocities.row(4).norm() == 0.0);
}

TEST_CASE("non-finite external forces are rejected") {
    auto [topo, state] = build_mesh(2, 2, 0.1);
    NodeForces ext = NodeForces::zero(4);
    ext.forces(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(step_mesh(state, topo, planar_params(), ext, 0.01), ValidationError);
}

TEST_CASE("deformation limit is a no-op within the limit") {
    auto [topo, state] = single_spring(0.1, 0.105);
    const MeshState out = enforce_deformation_limit(state, topo, 0.1);
    CHECK((out.positions - state.positions).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("over-stretched spring is projected symmetrically") {
    auto [topo, state] = single_spring(0.1, 0.13);
    const MeshState out = enforce_deformation_limit(state, topo, 0.1);
    CHECK(out.positions(0, 0) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(out.positions(1, 0) == doctest::Approx(0.12).epsilon(1e-12));
    const double len = (out.positions.row(0) - out.positions.row(1)).norm();
    CHECK(len == doctest::Approx(0.11).epsilon(1e-14));
}

TEST_CASE("pinned endpoint pushes the full correction to the free end") {
    auto [topo, state] = single_spring(0.1, 0.13);
    state.pinned[0] = 1;
    const MeshState out = enforce_deformation_limit(state, topo, 0.1);
    CHECK(out.positions(0, 0) == 0.0);
    CHECK(out.positions(1, 0) == doctest::Approx(0.11).epsilon(1e-12));
}

TEST_CASE("limit diagnostics report the worst remaining violation") {
    auto [topo, state] = build_mesh(3, 3, 0.1);
    state.positions(8, 0) += 0.08;  // stretch a corner
    LimitDiagnostics diag;
    enforce_deformation_limit(state, topo, 0.1, 0, nullptr, &diag);
    CHECK(diag.max_violation > 0.0);
    LimitDiagnostics after;
    enforce_deformation_limit(state, topo, 0.1, 5, nullptr, &after);
    CHECK(after.max_violation < diag.max_violation);
}

TEST_CASE("linear momentum is conserved without pins, gravity or damping") {
    auto [topo, state] = build_mesh(4, 4, 0.1);
    ClothParams p = planar_params();
    p.limit_sweeps = 0;  // no projection triggering
    // small random-ish velocities
    for (int i = 0; i < state.node_count(); ++i)
        state.velocities.row(i) =
            0.05 * Eigen::RowVector3d(std::sin(1.0 + i), std::cos(2.0 + i), std::sin(0.5 * i));
    Eigen::RowVector3d momentum = p.node_mass * state.velocities.colwise().sum();
    MeshState cur = state;
    for (int k = 0; k < 200; ++k) {
        cur = step_mesh(cur, topo, p, NodeForces::zero(16), 1.0 / 300.0);
        const Eigen::RowVector3d next = p.node_mass * cur.velocities.colwise().sum();
        CHECK((next - momentum).norm() <= 1e-9);
        momentum = next;
    }
}

TEST_CASE("step_mesh is translation-equivariant in the plane") {
    auto [topo, state] = build_mesh(3, 3, 0.1);
    state.velocities.col(0).setConstant(0.1);
    ClothParams p = planar_params();
    const MeshState a = step_mesh(state, topo, p, NodeForces::zero(9), 1.0 / 30.0);
    MeshState shifted = state;
    shifted.positions.col(0).array() += 2.0;
    shifted.positions.col(1).array() -= 1.5;
    const MeshState b = step_mesh(shifted, topo, p, NodeForces::zero(9), 1.0 / 30.0);
    CHECK((b.positions.col(0) - a.positions.col(0)).array().isApproxToConstant(2.0, 1e-12));
    CHECK((b.positions.col(1) - a.positions.col(1)).array().isApproxToConstant(-1.5, 1e-12));
}

TEST_CASE("ground contact keeps every node at or above the plane") {
    auto [topo, state] = build_mesh(3, 3, 0.1);
    ClothParams p;
    p.gravity = 9.81;
    p.ground_contact = true;
    MeshState cur = state;
    for (int k = 0; k < 30; ++k) {
        cur = step_mesh(cur, topo, p, NodeForces::zero(9), 1.0 / 30.0);
        CHECK(cur.positions.col(2).minCoeff() >= 0.0);
    }
}

TEST_CASE("planar constraint freezes Z motion") {
    auto [topo, state] = build_mesh(2, 2, 0.1);
    ClothParams p = planar_params();
    p.planar_constraint = true;
    NodeForces ext = NodeForces::zero(4);
    ext.forces.col(2).setConstant(-1.0);
    const MeshState out = step_mesh(state, topo, p, ext, 1.0 / 30.0);
    CHECK(out.positions.col(2).cwiseAbs().maxCoeff() == 0.0);
}
