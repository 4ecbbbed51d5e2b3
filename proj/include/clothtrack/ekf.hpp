#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "clothtrack/error.hpp"

namespace clothtrack {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

enum class JacobianMethod { ComplexStep, CentralDifference };

struct JacobianConfig {
    JacobianMethod method = JacobianMethod::ComplexStep;
    double complex_step = 1e-20;
    double central_step = 1e-6;  // scaled by max(1, |x_j|) per column
};

// A vector function differentiable by either method. `real` is always
// required; `cplx` only when complex-step is requested (the function must
// be analytic along each perturbed coordinate).
struct DiffFunction {
    std::function<Vec(const Vec&)> real;
    std::function<CVec(const CVec&)> cplx;
};

Mat numerical_jacobian(const DiffFunction& f, const Vec& x, const JacobianConfig& cfg);

struct FilterState {
    Vec x;
    Mat P;
};

struct NoiseConfig {
    Mat Q;   // process noise, m x m
    Mat R;   // measurement noise, 2n x 2n
    Mat P0;  // initial covariance, m x m
};

// x- = f(x); P- = J P J^T + Q, re-symmetrized.
FilterState predict(const FilterState& fs, const DiffFunction& step_fn, const Mat& Q,
                    const JacobianConfig& jac);

// Standard EKF correction. The gain is obtained by solving the
// innovation system, never by forming an explicit inverse.
FilterState update(const FilterState& fs, const Vec& W, const DiffFunction& h_fn, const Mat& R,
                   const JacobianConfig& jac);

}  // namespace clothtrack
