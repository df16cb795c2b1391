#ifndef SWARMCERT_MODEL_DRIFT_HPP
#define SWARMCERT_MODEL_DRIFT_HPP

#include "swarmcert/model/pose.hpp"
#include "swarmcert/model/rng.hpp"

#include <stdexcept>
#include <vector>

namespace swarmcert::model {

// Random-walk odometry drift:
//   b_p(t+dt)     = b_p(t)     + sigma_p     * sqrt(v(t) dt)     * N(0, I3)
//   b_theta(t+dt) = b_theta(t) + sigma_theta * sqrt(omega(t) dt) * N(0, 1)
struct DriftModel {
    double sigma_p = 0.0;      // m * s^-1/2
    double sigma_theta = 0.0;  // rad * s^-1/2
    double dt = 0.1;           // step seconds

    bool valid() const { return sigma_p >= 0.0 && sigma_theta >= 0.0 && dt > 0.0; }
};

struct DriftSeries {
    std::vector<Pose> poses;            // drifted odometry
    std::vector<Eigen::Vector3d> b_p;   // position bias at each step
    std::vector<double> b_theta;        // yaw bias at each step
};

// The position bias is added in the odometry frame; the yaw bias is applied
// as a rotation about world z on the left of the true rotation.
inline DriftSeries apply_drift(const std::vector<Pose>& odometry,
                               const std::vector<double>& speeds,
                               const std::vector<double>& yaw_rates,
                               const DriftModel& model, Rng& rng) {
    if (!model.valid()) throw std::invalid_argument("apply_drift: invalid model");
    if (odometry.size() != speeds.size() || odometry.size() != yaw_rates.size())
        throw std::invalid_argument("apply_drift: series length mismatch");

    DriftSeries out;
    out.poses.reserve(odometry.size());
    Eigen::Vector3d bp = Eigen::Vector3d::Zero();
    double btheta = 0.0;
    for (size_t k = 0; k < odometry.size(); ++k) {
        if (k > 0) {
            bp += model.sigma_p * std::sqrt(std::max(speeds[k - 1], 0.0) * model.dt) *
                  rng.normal3();
            btheta += model.sigma_theta *
                      std::sqrt(std::max(yaw_rates[k - 1], 0.0) * model.dt) * rng.normal();
        }
        Pose p;
        p.rotation = rot_z(btheta) * odometry[k].rotation;
        p.translation = odometry[k].translation + bp;
        out.poses.push_back(p);
        out.b_p.push_back(bp);
        out.b_theta.push_back(btheta);
    }
    return out;
}

}  // namespace swarmcert::model

#endif
