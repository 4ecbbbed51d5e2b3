#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "clothtrack/error.hpp"

namespace clothtrack {

namespace detail {

inline double real_part(double x) { return x; }
inline double real_part(const std::complex<double>& x) { return x.real(); }

}  // namespace detail

// Ideal pinhole intrinsics: square pixels, principal point at the image
// center, single focal length in pixels.
struct CameraIntrinsics {
    double f = 500.0;
};

// Camera pose: rotation of the camera frame w.r.t. the world and the
// translation of the world origin along the optical axis. The tracker's
// setup has the camera directly above the cloth, so the default is
// R = I, t = [0, 0, t_z].
struct CameraPose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation{0.0, 0.0, 2.0};

    bool is_identity_rotation(double tol = 1e-10) const {
        return (rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol;
    }

    void validate() const {
        const Eigen::Matrix3d rtr = rotation * rotation.transpose();
        if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10)
            throw ValidationError("camera rotation is not orthonormal");
        if (std::abs(rotation.determinant() - 1.0) > 1e-10)
            throw ValidationError("camera rotation is not a proper rotation");
        if (translation.z() <= 0.0)
            throw ValidationError("camera height t_z must be positive");
    }
};

// Image geometry; 640x480 with origin at the top-left, u rightward,
// v downward. World +Y maps to image "up".
struct ImageGeometry {
    int width = 640;
    int height = 480;

    double cx() const { return width / 2.0; }
    double cy() const { return height / 2.0; }
};

template <typename T>
struct PixelT {
    T u;
    T v;
};

using ImagePoint = PixelT<double>;

struct WorldPoint {
    double X = 0.0;
    double Y = 0.0;
    double Z = 0.0;
};

// Projects a world point through the pinhole model. Homogeneous image
// coordinates [au; av; a] = K * M * [X;Y;Z;1] are divided by the third
// component and shifted to pixel convention (u + cx, cy - v).
//
// Templated on the scalar so measurement functions built on top of it
// stay evaluable under complex-step differentiation.
template <typename T>
PixelT<T> project(T X, T Y, T Z, const CameraIntrinsics& cam, const CameraPose& pose,
                  const ImageGeometry& img = {}) {
    const Eigen::Matrix3d& R = pose.rotation;
    const Eigen::Vector3d& t = pose.translation;
    const T xc = R(0, 0) * X + R(0, 1) * Y + R(0, 2) * Z + t.x();
    const T yc = R(1, 0) * X + R(1, 1) * Y + R(1, 2) * Z + t.y();
    const T zc = R(2, 0) * X + R(2, 1) * Y + R(2, 2) * Z + t.z();
    if (detail::real_part(zc) <= 0.0)
        throw NumericalError("point is behind the camera plane");
    return {img.cx() + cam.f * xc / zc, img.cy() - cam.f * yc / zc};
}

inline ImagePoint project(const WorldPoint& p, const CameraIntrinsics& cam,
                          const CameraPose& pose, const ImageGeometry& img = {}) {
    return project<double>(p.X, p.Y, p.Z, cam, pose, img);
}

// Lifts a pixel back onto the flat cloth plane Z = 0 via the ray
// scaling: [x;y;z] = K^-1 [u-cx; cy-v; 1], alpha = t_z / z, world point
// (alpha*x, alpha*y, alpha*z - t_z). Requires the camera looking straight
// down (R = I).
inline WorldPoint backproject_flat(const ImagePoint& p, const CameraIntrinsics& cam,
                                   const CameraPose& pose, const ImageGeometry& img = {}) {
    if (!pose.is_identity_rotation())
        throw ValidationError("backproject_flat requires an identity camera rotation");
    const double x = (p.u - img.cx()) / cam.f;
    const double y = (img.cy() - p.v) / cam.f;
    const double z = 1.0;
    const double alpha = pose.translation.z() / z;
    return {alpha * x, alpha * y, alpha * z - pose.translation.z()};
}

}  // namespace clothtrack
