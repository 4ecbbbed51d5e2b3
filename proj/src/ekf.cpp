#include "clothtrack/ekf.hpp"

#include <cmath>
#include <string>

namespace clothtrack {

Mat numerical_jacobian(const DiffFunction& f, const Vec& x, const JacobianConfig& cfg) {
    const int m = static_cast<int>(x.size());
    if (cfg.method == JacobianMethod::ComplexStep) {
        if (!f.cplx) throw ValidationError("complex-step requested but no complex evaluation given");
        const double h = cfg.complex_step;
        if (!(h > 0.0)) throw ValidationError("jacobian step must be positive");
        Mat J;
        for (int j = 0; j < m; ++j) {
            CVec xp = x.cast<std::complex<double>>();
            xp[j] += std::complex<double>(0.0, h);
            const CVec fp = f.cplx(xp);
            if (!fp.allFinite())
                throw NumericalError("non-finite function output in jacobian column " + std::to_string(j));
            if (J.size() == 0) J.resize(fp.size(), m);
            J.col(j) = fp.imag() / h;
        }
        return J;
    }

    const double base = cfg.central_step;
    if (!(base > 0.0)) throw ValidationError("jacobian step must be positive");
    Mat J;
    for (int j = 0; j < m; ++j) {
        const double h = base * std::max(1.0, std::abs(x[j]));
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Vec fp = f.real(xp);
        const Vec fm = f.real(xm);
        if (!fp.allFinite() || !fm.allFinite())
            throw NumericalError("non-finite function output in jacobian column " + std::to_string(j));
        if (J.size() == 0) J.resize(fp.size(), m);
        J.col(j) = (fp - fm) / (2.0 * h);
    }
    return J;
}

static Mat symmetrize(const Mat& P) { return 0.5 * (P + P.transpose()); }

FilterState predict(const FilterState& fs, const DiffFunction& step_fn, const Mat& Q,
                    const JacobianConfig& jac) {
    if (Q.rows() != fs.x.size() || Q.cols() != fs.x.size())
        throw ValidationError("process noise dimension mismatch");
    FilterState out;
    out.x = step_fn.real(fs.x);
    if (!out.x.allFinite()) throw NumericalError("process model produced non-finite state");
    const Mat J = numerical_jacobian(step_fn, fs.x, jac);
    out.P = symmetrize(J * fs.P * J.transpose() + Q);
    return out;
}

FilterState update(const FilterState& fs, const Vec& W, const DiffFunction& h_fn, const Mat& R,
                   const JacobianConfig& jac) {
    const Vec predicted = h_fn.real(fs.x);
    if (predicted.size() != W.size()) throw ValidationError("measurement dimension mismatch");
    if (R.rows() != W.size() || R.cols() != W.size())
        throw ValidationError("measurement noise dimension mismatch");

    const Mat F = numerical_jacobian(h_fn, fs.x, jac);
    const Mat S = symmetrize(F * fs.P * F.transpose() + R);

    // Rough conditioning check before committing to the solve.
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    if (!(lmin > 0.0) || lmax / lmin > 1e12)
        throw NumericalError("innovation covariance is numerically singular; increase R");

    // K = P- F^T S^{-1}, via S X = F P-  =>  K = X^T.
    const Mat K = S.ldlt().solve(F * fs.P).transpose();

    FilterState out;
    out.x = fs.x + K * (W - predicted);
    const Mat I = Mat::Identity(fs.x.size(), fs.x.size());
    out.P = symmetrize((I - K * F) * fs.P);
    return out;
}

}  // namespace clothtrack
