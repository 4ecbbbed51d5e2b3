#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "clothtrack/error.hpp"

namespace clothtrack {

using RigidStateVector = Eigen::Matrix<double, 6, 1>;

// Planar rigid-body state of the cloth: pose (X, Y, theta) and its rates.
// theta is kept unwrapped so linearization stays smooth across turns.
struct RigidState {
    double X = 0.0;
    double Y = 0.0;
    double theta = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double omega = 0.0;

    Eigen::Matrix<double, 6, 1> to_vector() const {
        Eigen::Matrix<double, 6, 1> v;
        v << X, Y, theta, vx, vy, omega;
        return v;
    }

    static RigidState from_vector(const Eigen::Matrix<double, 6, 1>& v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
};

struct RigidParams {
    double mass = 1.0;             // kg
    double inertia = 1.0;          // kg m^2 about Z
    double linear_damping = 0.0;   // 1/s
    double angular_damping = 0.0;  // 1/s

    void validate() const {
        if (!(mass > 0.0)) throw ValidationError("rigid mass must be positive");
        if (!(inertia > 0.0)) throw ValidationError("rigid inertia must be positive");
        if (linear_damping < 0.0 || angular_damping < 0.0)
            throw ValidationError("damping must be non-negative");
    }
};

struct PlanarWrench {
    double Fx = 0.0;
    double Fy = 0.0;
    double tau = 0.0;
};

// One semi-implicit Euler step: velocities first, then positions with the
// updated velocities. Templated so the rigid process model admits
// complex-step Jacobians.
template <typename T>
Eigen::Matrix<T, 6, 1> step_rigid(const Eigen::Matrix<T, 6, 1>& s, const RigidParams& p,
                                  const PlanarWrench& w, double dt) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    Eigen::Matrix<T, 6, 1> out;
    const T vx = s[3] + dt * (w.Fx / p.mass - p.linear_damping * s[3]);
    const T vy = s[4] + dt * (w.Fy / p.mass - p.linear_damping * s[4]);
    const T om = s[5] + dt * (w.tau / p.inertia - p.angular_damping * s[5]);
    out[0] = s[0] + dt * vx;
    out[1] = s[1] + dt * vy;
    out[2] = s[2] + dt * om;
    out[3] = vx;
    out[4] = vy;
    out[5] = om;
    return out;
}

inline RigidState step_rigid(const RigidState& s, const RigidParams& p, const PlanarWrench& w,
                             double dt) {
    const auto v = s.to_vector();
    if (!v.allFinite()) throw ValidationError("non-finite rigid state");
    if (!std::isfinite(w.Fx) || !std::isfinite(w.Fy) || !std::isfinite(w.tau))
        throw ValidationError("non-finite wrench");
    return RigidState::from_vector(step_rigid<double>(v, p, w, dt));
}

}  // namespace clothtrack
