#ifndef SWARMCERT_PLANNER_PENALTIES_HPP
#define SWARMCERT_PLANNER_PENALTIES_HPP

#include "swarmcert/certificate/certificate_matrix.hpp"
#include "swarmcert/certificate/degeneration.hpp"
#include "swarmcert/planner/diff_trajectory.hpp"
#include "swarmcert/planner/frontend.hpp"

#include <Eigen/Dense>

#include <vector>

namespace swarmcert::planner {

struct PlannerConfig {
    double v_max = 2.0;   // m/s
    double a_max = 3.0;   // m/s^2
    double d_s = 0.4;     // obstacle clearance, m
    double d_r = 1.0;     // reciprocal clearance, m
    double d_v = 0.2;     // visibility margin (log-sum-exp surrogate units)
    double alpha = 10.0;  // log-sum-exp sharpness
    double xi_max = 0.0;  // target bounded-noise magnitude
    double dt = 0.1;      // sampling interval for penalties and K_hat, s
    double w_dyn = 1.0e2;
    double w_safe = 1.0e3;
    double w_recip = 1.0e3;
    double w_vis = 1.0e2;
    double w_cert = 1.0;
    double time_weight = 1.0;  // weight of T_f in the objective

    bool valid() const {
        return v_max > 0 && a_max > 0 && d_s > 0 && d_r > 0 && d_v > 0 && alpha >= 1.0 &&
               xi_max >= 0 && xi_max < 2.0 && dt > 0;
    }
};

// psi(x) = max(x, 0)^3 and its derivative.
inline double psi(double x) { return x > 0.0 ? x * x * x : 0.0; }
inline double psi_prime(double x) { return x > 0.0 ? 3.0 * x * x : 0.0; }

// Per-robot gradient containers (one entry per interior waypoint / piece).
struct SwarmGradient {
    std::vector<std::vector<Eigen::Vector3d>> waypoints;
    std::vector<std::vector<double>> durations;

    static SwarmGradient zeros(const std::vector<DiffTrajectory>& trajs) {
        SwarmGradient g;
        for (const auto& t : trajs) {
            g.waypoints.emplace_back(t.n_interior(), Eigen::Vector3d::Zero());
            g.durations.emplace_back(t.n_pieces(), 0.0);
        }
        return g;
    }
};

struct PenaltyEval {
    double p_dyn = 0.0;
    double p_safe = 0.0;
    double p_recip = 0.0;
    double p_vis = 0.0;
    double p_cert = 0.0;
    double lambda4 = 0.0;
    double bound_b = 0.0;
    int n_t = 0;
    bool lambda4_multiplicity_flag = false;
    SwarmGradient g_dyn, g_safe, g_recip, g_vis, g_cert, g_lambda4;
};

namespace penalty_detail {

inline std::vector<double> shared_sample_times(const std::vector<DiffTrajectory>& trajs,
                                               double dt, int* n_t_out) {
    const double tf = trajs.front().total_duration();
    const int n_t = traj::sample_count(tf, dt);
    std::vector<double> t;
    for (int alpha = 1; alpha <= n_t; ++alpha) t.push_back(alpha * dt);
    if (n_t_out) *n_t_out = n_t;
    return t;
}

}  // namespace penalty_detail

// All soft-penalty terms of the backend objective, each with analytic
// gradients with respect to every robot's interior waypoints and piece
// durations (sample times held fixed during one evaluation). Values are
// unweighted; the optimizer applies the configured weights.
inline PenaltyEval penalty_terms(const std::vector<DiffTrajectory>& trajs,
                                 const ObstacleField& field,
                                 const std::vector<StarPolytope>& polytopes,
                                 const std::vector<double>& polytope_times,
                                 const model::VisibilityGraph& graph,
                                 const PlannerConfig& cfg) {
    const int n = static_cast<int>(trajs.size());
    PenaltyEval out;
    const auto times = penalty_detail::shared_sample_times(trajs, cfg.dt, &out.n_t);
    const size_t ns = times.size();

    out.g_dyn = SwarmGradient::zeros(trajs);
    out.g_safe = SwarmGradient::zeros(trajs);
    out.g_recip = SwarmGradient::zeros(trajs);
    out.g_vis = SwarmGradient::zeros(trajs);
    out.g_cert = SwarmGradient::zeros(trajs);
    out.g_lambda4 = SwarmGradient::zeros(trajs);

    // Cached states.
    std::vector<std::vector<Eigen::Vector3d>> pos(n), vel(n), acc(n);
    for (int r = 0; r < n; ++r) {
        for (double t : times) {
            pos[r].push_back(trajs[r].spline().eval_extrapolated(t, 0));
            vel[r].push_back(trajs[r].spline().eval_extrapolated(t, 1));
            acc[r].push_back(trajs[r].spline().eval_extrapolated(t, 2));
        }
    }

    std::vector<SampleSeeds> seeds_dyn(n, SampleSeeds(ns));
    std::vector<SampleSeeds> seeds_safe(n, SampleSeeds(ns));
    std::vector<SampleSeeds> seeds_recip(n, SampleSeeds(ns));
    std::vector<SampleSeeds> seeds_vis(n, SampleSeeds(ns));
    std::vector<SampleSeeds> seeds_l4(n, SampleSeeds(ns));

    const double dt = cfg.dt;
    for (size_t s = 0; s < ns; ++s) {
        // Dynamic feasibility.
        for (int r = 0; r < n; ++r) {
            const double ev = vel[r][s].squaredNorm() - cfg.v_max * cfg.v_max;
            const double ea = acc[r][s].squaredNorm() - cfg.a_max * cfg.a_max;
            out.p_dyn += dt * (psi(ev) + psi(ea));
            seeds_dyn[r].v[s] += dt * psi_prime(ev) * 2.0 * vel[r][s];
            seeds_dyn[r].a[s] += dt * psi_prime(ea) * 2.0 * acc[r][s];
        }
        // Obstacle clearance.
        if (!field.empty()) {
            for (int r = 0; r < n; ++r) {
                const double d = field.distance(pos[r][s]);
                const double e = cfg.d_s - d;
                if (e > 0.0) {
                    out.p_safe += dt * psi(e);
                    seeds_safe[r].p[s] -= dt * psi_prime(e) * field.distance_gradient(pos[r][s]);
                }
            }
        }
        // Reciprocal clearance over unordered pairs.
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const Eigen::Vector3d d = pos[a][s] - pos[b][s];
                const double dist = std::max(d.norm(), 1e-12);
                const double e = cfg.d_r - dist;
                if (e > 0.0) {
                    out.p_recip += dt * psi(e);
                    const Eigen::Vector3d g = dt * psi_prime(e) * (-d / dist);
                    seeds_recip[a].p[s] += g;
                    seeds_recip[b].p[s] -= g;
                }
            }
        }
        // Visibility to the center robot (non-center robots only), against
        // the polytope whose center waypoint is nearest in time.
        if (!polytopes.empty()) {
            size_t pk = 0;
            for (size_t k = 1; k < polytope_times.size(); ++k)
                if (std::abs(polytope_times[k] - times[s]) <
                    std::abs(polytope_times[pk] - times[s]))
                    pk = k;
            for (int r = 1; r < n; ++r) {
                Eigen::Vector3d grad;
                const double lse = polytopes[pk].soft_margin(pos[r][s], cfg.alpha, &grad);
                const double e = cfg.d_v - lse;
                if (e > 0.0) {
                    out.p_vis += dt * psi(e);
                    seeds_vis[r].p[s] -= dt * psi_prime(e) * grad;
                }
            }
        }
    }

    // Certificate eigenvalue of the trajectory Gram matrix.
    {
        std::vector<std::vector<Eigen::Vector3d>> p(pos.begin(), pos.end());
        const auto khat = cert::certificate_from_positions(p, graph, &times);
        const auto eig = cert::certificate_eigen(khat);
        out.lambda4 = eig.value;
        out.lambda4_multiplicity_flag =
            eig.multiplicity_gap <= 1e-9 * std::max(1.0, khat.k.normFrobenius());
        out.bound_b =
            cert::eigenvalue_bound_dmax(graph.n_robots() - 1, out.n_t, cfg.xi_max);
        out.p_cert = psi(out.bound_b - out.lambda4);

        // lambda4 = u^T K_hat u = sum over edges and samples of c^2 with
        // c = phi_ij . (u_i - u_j); for a simple eigenvalue the eigenvector
        // derivative drops out and
        //   d(c^2)/dp_i = 2 c (c phi - nu) / dist,  d(c^2)/dp_j = -d(c^2)/dp_i.
        for (const auto& [i, j] : graph.edges()) {
            const Eigen::Vector3d ui = eig.eigenvector.segment<3>(3 * (i - 1));
            const Eigen::Vector3d uj = eig.eigenvector.segment<3>(3 * (j - 1));
            const Eigen::Vector3d nu = ui - uj;
            for (size_t s = 0; s < ns; ++s) {
                const Eigen::Vector3d d = pos[j - 1][s] - pos[i - 1][s];
                const double dist = std::max(d.norm(), 1e-12);
                const Eigen::Vector3d phi = d / dist;
                const double c = phi.dot(nu);
                const Eigen::Vector3d g = 2.0 * c * (c * phi - nu) / dist;
                seeds_l4[i - 1].p[s] += g;
                seeds_l4[j - 1].p[s] -= g;
            }
        }
    }

    for (int r = 0; r < n; ++r) {
        trajs[r].backprop(times, seeds_dyn[r], out.g_dyn.waypoints[r], out.g_dyn.durations[r]);
        trajs[r].backprop(times, seeds_safe[r], out.g_safe.waypoints[r],
                          out.g_safe.durations[r]);
        trajs[r].backprop(times, seeds_recip[r], out.g_recip.waypoints[r],
                          out.g_recip.durations[r]);
        trajs[r].backprop(times, seeds_vis[r], out.g_vis.waypoints[r],
                          out.g_vis.durations[r]);
        trajs[r].backprop(times, seeds_l4[r], out.g_lambda4.waypoints[r],
                          out.g_lambda4.durations[r]);
    }

    // P_c = psi(B - lambda4): chain through the lambda4 gradient.
    const double dpc = -psi_prime(out.bound_b - out.lambda4);
    for (int r = 0; r < n; ++r) {
        for (int k = 0; k < trajs[r].n_interior(); ++k)
            out.g_cert.waypoints[r][k] = dpc * out.g_lambda4.waypoints[r][k];
        for (int j = 0; j < trajs[r].n_pieces(); ++j)
            out.g_cert.durations[r][j] = dpc * out.g_lambda4.durations[r][j];
    }
    return out;
}

}  // namespace swarmcert::planner

#endif
