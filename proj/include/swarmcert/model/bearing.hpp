#ifndef SWARMCERT_MODEL_BEARING_HPP
#define SWARMCERT_MODEL_BEARING_HPP

#include "swarmcert/model/pose.hpp"
#include "swarmcert/model/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace swarmcert::model {

class DegenerateGeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One timestamped unit-vector observation from `observer` toward `target`,
// expressed in the observer's body frame, together with the local odometry
// of both robots matched to the same instant.
struct BearingRecord {
    int observer = 0;  // robot ids in [1, N]
    int target = 0;
    double time = 0.0;
    Eigen::Vector3d bearing = Eigen::Vector3d::UnitX();
    Pose odom_observer;
    Pose odom_target;

    bool valid(double tol = 1e-9) const {
        return observer != target && std::abs(bearing.norm() - 1.0) <= tol &&
               bearing.allFinite();
    }
};

// b = frame_rotation^T * (p_j - p_i) / ||p_j - p_i||.
inline Eigen::Vector3d true_bearing(const Eigen::Vector3d& p_i, const Eigen::Vector3d& p_j,
                                    const Eigen::Matrix3d& frame_rotation) {
    const Eigen::Vector3d d = p_j - p_i;
    const double norm = d.norm();
    if (norm <= 1e-9)
        throw DegenerateGeometryError("true_bearing: coincident positions");
    return frame_rotation.transpose() * (d / norm);
}

struct NoiseModel {
    enum class Kind { gaussian, bounded };
    Kind kind = Kind::bounded;
    double sigma = 0.0;  // gaussian: per-axis std
    double xi = 0.0;     // bounded: exact chord-length magnitude, in [0, 2)
    uint64_t seed = 0;

    bool valid() const {
        if (kind == Kind::gaussian) return sigma >= 0.0;
        return xi >= 0.0 && xi < 2.0;
    }
};

// Gaussian noise is additive and NOT renormalized (the estimator's
// likelihood model is additive); bounded noise rotates b by 2*asin(xi/2)
// about a uniformly random perpendicular axis, which keeps the result unit
// and at exact chord distance xi from b.
inline Eigen::Vector3d perturb_bearing(const Eigen::Vector3d& b, const NoiseModel& model,
                                       Rng& rng) {
    if (!model.valid()) throw std::invalid_argument("perturb_bearing: invalid noise model");
    if (model.kind == NoiseModel::Kind::gaussian) {
        return b + model.sigma * rng.normal3();
    }
    if (model.xi == 0.0) return b;
    const double angle = 2.0 * std::asin(model.xi / 2.0);
    const Eigen::Vector3d axis = rng.perpendicular_unit(b);
    return Eigen::AngleAxisd(angle, axis) * b;
}

}  // namespace swarmcert::model

#endif
