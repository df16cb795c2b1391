#ifndef SWARMCERT_MODEL_SIMULATE_HPP
#define SWARMCERT_MODEL_SIMULATE_HPP

#include "swarmcert/model/scenario.hpp"

#include <functional>

namespace swarmcert::model {

// Synthetic swarm generator: random minimum-jerk position trajectories in a
// cube, a yaw spline per robot plus an optional constant tilt, and random
// ground-truth initial poses. Bearings are produced by sampling positions.
struct SimConfig {
    int n_robots = 3;
    int n_waypoints = 10;      // total per robot, endpoints included
    double total_time = 10.0;  // seconds
    double cube_size = 10.0;   // waypoints uniform in [0, cube]^3
    double min_spacing = 1.0;  // pairwise spacing at matching waypoint indices
    double sample_dt = 0.1;
    double tilt_max = 0.25;        // rad, constant tilt of the body frame
    double initial_pose_span = 5.0;  // m, spread of ground-truth origins
    enum class Graph { complete, star, cycle } graph = Graph::complete;
};

struct SwarmSim {
    Scenario scenario;  // robots, graph, trajectories; records filled separately
    std::vector<traj::QuinticSpline> splines;
    std::vector<traj::QuinticSpline> yaw_splines;  // x component carries yaw
    std::vector<Eigen::Matrix3d> tilts;

    int n_robots() const { return scenario.n_robots(); }
    double total_time() const { return splines.front().total_duration(); }

    Eigen::Vector3d position(int idx0, double t) const {
        return splines[idx0].eval_extrapolated(t, 0);
    }

    Eigen::Matrix3d world_rotation(int idx0, double t) const {
        const double yaw = yaw_splines[idx0].eval_extrapolated(t, 0).x();
        return rot_z(yaw) * tilts[idx0];
    }

    Pose world_pose(int idx0, double t) const {
        return {world_rotation(idx0, t), position(idx0, t)};
    }

    // Local odometry: T_i^{-1} composed with the world pose.
    Pose odom_pose(int idx0, double t) const {
        return scenario.robots[idx0].initial_pose.inverse().compose(world_pose(idx0, t));
    }
};

inline VisibilityGraph make_graph(SimConfig::Graph kind, int n) {
    switch (kind) {
        case SimConfig::Graph::star:
            return VisibilityGraph::star(n);
        case SimConfig::Graph::cycle:
            return VisibilityGraph::cycle(n);
        default:
            return VisibilityGraph::complete(n);
    }
}

inline SwarmSim make_random_sim(const SimConfig& cfg, Rng& rng) {
    if (cfg.n_robots < 2) throw std::invalid_argument("make_random_sim: need >= 2 robots");
    if (cfg.n_waypoints < 2) throw std::invalid_argument("make_random_sim: need >= 2 waypoints");

    SwarmSim sim;
    const int n = cfg.n_robots;
    const int W = cfg.n_waypoints;

    // Waypoints with pairwise spacing enforced index by index.
    std::vector<std::vector<Eigen::Vector3d>> wp(n, std::vector<Eigen::Vector3d>(W));
    for (int k = 0; k < W; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int attempt = 0; attempt < 1000; ++attempt) {
                Eigen::Vector3d c(rng.uniform(0.0, cfg.cube_size),
                                  rng.uniform(0.0, cfg.cube_size),
                                  rng.uniform(0.0, cfg.cube_size));
                bool ok = true;
                for (int j = 0; j < i; ++j)
                    if ((wp[j][k] - c).norm() < cfg.min_spacing) ok = false;
                if (ok) {
                    wp[i][k] = c;
                    break;
                }
            }
        }
    }

    std::vector<double> durs(W - 1, cfg.total_time / (W - 1));
    for (int i = 0; i < n; ++i) {
        TrajectorySpec spec;
        spec.durations = durs;
        spec.start.position = wp[i].front();
        spec.end.position = wp[i].back();
        spec.waypoints.assign(wp[i].begin() + 1, wp[i].end() - 1);
        sim.scenario.trajectories.push_back(spec);
        sim.splines.push_back(spec.fit());

        // Smooth random yaw profile.
        traj::BoundaryState ys, ye;
        ys.position.x() = rng.uniform(-M_PI, M_PI);
        ye.position.x() = ys.position.x() + rng.uniform(-1.5, 1.5);
        std::vector<Eigen::Vector3d> ywp;
        for (int k = 0; k < W - 2; ++k) {
            Eigen::Vector3d y = Eigen::Vector3d::Zero();
            y.x() = ys.position.x() + rng.uniform(-1.0, 1.0);
            ywp.push_back(y);
        }
        sim.yaw_splines.push_back(traj::fit_min_jerk(ys, ye, ywp, durs));

        const double tilt = rng.uniform(0.0, cfg.tilt_max);
        const Eigen::Vector3d axis = rng.perpendicular_unit(Eigen::Vector3d::UnitZ());
        sim.tilts.push_back(Eigen::AngleAxisd(tilt, axis).toRotationMatrix());

        RobotSpec robot;
        robot.id = i + 1;
        robot.initial_pose.rotation = rng.rotation_uniform();
        robot.initial_pose.translation = cfg.initial_pose_span * rng.normal3();
        sim.scenario.robots.push_back(robot);
    }
    sim.scenario.graph = make_graph(cfg.graph, n);
    return sim;
}

// Bearing records for every edge and sample time, both directions, with the
// given noise model. Odometry defaults to the simulator's ground truth; a
// custom provider supports drift injection.
inline std::vector<BearingRecord> make_records(
    const SwarmSim& sim, const std::vector<double>& times, const NoiseModel& noise,
    Rng& rng,
    const std::function<Pose(int, double)>& odom_provider = nullptr) {
    auto odom = odom_provider ? odom_provider
                              : [&sim](int idx0, double t) { return sim.odom_pose(idx0, t); };
    std::vector<BearingRecord> records;
    for (const auto& [i, j] : sim.scenario.graph.edges()) {
        for (double t : times) {
            const Eigen::Vector3d pi = sim.position(i - 1, t);
            const Eigen::Vector3d pj = sim.position(j - 1, t);
            BearingRecord fwd, bwd;
            fwd.observer = i;
            fwd.target = j;
            fwd.time = t;
            fwd.bearing = perturb_bearing(
                true_bearing(pi, pj, sim.world_rotation(i - 1, t)), noise, rng);
            fwd.odom_observer = odom(i - 1, t);
            fwd.odom_target = odom(j - 1, t);
            bwd.observer = j;
            bwd.target = i;
            bwd.time = t;
            bwd.bearing = perturb_bearing(
                true_bearing(pj, pi, sim.world_rotation(j - 1, t)), noise, rng);
            bwd.odom_observer = fwd.odom_target;
            bwd.odom_target = fwd.odom_observer;
            records.push_back(fwd);
            records.push_back(bwd);
        }
    }
    return records;
}

inline std::vector<double> sample_times(double total_time, double dt) {
    const int n_t = traj::sample_count(total_time, dt);
    std::vector<double> t;
    for (int alpha = 1; alpha <= n_t; ++alpha) t.push_back(alpha * dt);
    return t;
}

}  // namespace swarmcert::model

#endif
