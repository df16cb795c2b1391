#ifndef SWARMCERT_MODEL_POSE_HPP
#define SWARMCERT_MODEL_POSE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace swarmcert::model {

// Rigid transform {R, t}: x_out = R * x + t.
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static Pose identity() { return {}; }

    Pose compose(const Pose& other) const {
        return {rotation * other.rotation, rotation * other.translation + translation};
    }

    Pose inverse() const {
        return {rotation.transpose(), -(rotation.transpose() * translation)};
    }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

    bool valid(double tol = 1e-9) const {
        if (!rotation.allFinite() || !translation.allFinite()) return false;
        const double ortho =
            (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
        return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
    }
};

inline Eigen::Matrix3d rot_z(double yaw) {
    Eigen::Matrix3d r;
    const double c = std::cos(yaw), s = std::sin(yaw);
    r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
    return r;
}

// Angle of a rotation matrix in [0, pi].
inline double rotation_angle(const Eigen::Matrix3d& r) {
    const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    return std::acos(c);
}

inline double yaw_of(const Eigen::Matrix3d& r) { return std::atan2(r(1, 0), r(0, 0)); }

}  // namespace swarmcert::model

#endif
