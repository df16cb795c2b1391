#ifndef SWARMCERT_PLANNER_DIFF_TRAJECTORY_HPP
#define SWARMCERT_PLANNER_DIFF_TRAJECTORY_HPP

#include "swarmcert/trajectory/quintic_spline.hpp"

#include <Eigen/Dense>

#include <vector>

namespace swarmcert::planner {

// Adjoint seeds accumulated on one robot's samples: dP/d(position),
// dP/d(velocity), dP/d(acceleration) at each sample time.
struct SampleSeeds {
    std::vector<Eigen::Vector3d> p;
    std::vector<Eigen::Vector3d> v;
    std::vector<Eigen::Vector3d> a;

    explicit SampleSeeds(size_t n)
        : p(n, Eigen::Vector3d::Zero()),
          v(n, Eigen::Vector3d::Zero()),
          a(n, Eigen::Vector3d::Zero()) {}
};

// One robot's minimum-jerk trajectory viewed as a differentiable function of
// its interior waypoints and piece durations. Wraps the fit and propagates
// objective gradients back through the interior-joint linear solve.
class DiffTrajectory {
public:
    DiffTrajectory(const traj::BoundaryState& start, const traj::BoundaryState& end,
                   std::vector<Eigen::Vector3d> waypoints, std::vector<double> durations)
        : start_(start), end_(end), waypoints_(std::move(waypoints)),
          durations_(std::move(durations)) {
        refit();
    }

    void set_variables(const std::vector<Eigen::Vector3d>& waypoints,
                       const std::vector<double>& durations) {
        waypoints_ = waypoints;
        durations_ = durations;
        refit();
    }

    const traj::QuinticSpline& spline() const { return spline_; }
    const std::vector<Eigen::Vector3d>& waypoints() const { return waypoints_; }
    const std::vector<double>& durations() const { return durations_; }
    int n_pieces() const { return static_cast<int>(durations_.size()); }
    int n_interior() const { return n_pieces() - 1; }
    double total_duration() const { return spline_.total_duration(); }

    // Jerk energy and its gradient (envelope theorem: the interior joint
    // states are already stationary, so no adjoint pass is needed).
    double jerk_energy(std::vector<Eigen::Vector3d>* grad_wp,
                       std::vector<double>* grad_T) const {
        double e = 0.0;
        for (int j = 0; j < n_pieces(); ++j) {
            const auto& y = spline_.pieces()[j].y;
            const auto G = traj::quintic::energy_form(durations_[j]);
            const auto dG = traj::quintic::energy_form_dT(durations_[j]);
            for (int axis = 0; axis < 3; ++axis) {
                const Eigen::Matrix<double, 1, 6> ya = y.row(axis);
                e += ya * G * ya.transpose();
                if (grad_T) (*grad_T)[j] += ya * dG * ya.transpose();
                if (grad_wp) {
                    const Eigen::Matrix<double, 6, 1> gy = 2.0 * (G * ya.transpose());
                    if (j >= 1) (*grad_wp)[j - 1][axis] += gy(0);       // left joint
                    if (j + 1 <= n_interior()) (*grad_wp)[j][axis] += gy(3);  // right joint
                }
            }
        }
        return e;
    }

    // Backpropagates per-sample seeds at global times `t` to waypoint and
    // duration gradients. Sample times are treated as fixed; a duration
    // change shifts the local time of every later piece.
    void backprop(const std::vector<double>& t, const SampleSeeds& seeds,
                  std::vector<Eigen::Vector3d>& grad_wp,
                  std::vector<double>& grad_T) const {
        const int M = n_pieces();
        std::vector<Eigen::Matrix<double, 3, 6>> ybar(
            M, Eigen::Matrix<double, 3, 6>::Zero());

        for (size_t s = 0; s < t.size(); ++s) {
            const Eigen::Vector3d& gp = seeds.p[s];
            const Eigen::Vector3d& gv = seeds.v[s];
            const Eigen::Vector3d& ga = seeds.a[s];
            if (gp.isZero(0.0) && gv.isZero(0.0) && ga.isZero(0.0)) continue;

            const int j = spline_.locate(t[s]);
            const double tau = t[s] - spline_.piece_offset(j);
            const double T = durations_[j];
            const auto& y = spline_.pieces()[j].y;

            const auto w0 = traj::quintic::state_weights(tau, T, 0);
            const auto w1 = traj::quintic::state_weights(tau, T, 1);
            const auto w2 = traj::quintic::state_weights(tau, T, 2);
            for (int axis = 0; axis < 3; ++axis)
                ybar[j].row(axis) += gp[axis] * w0 + gv[axis] * w1 + ga[axis] * w2;

            // Coefficient dependence on the piece's own duration.
            const auto dw0 = traj::quintic::state_weights_dT(tau, T, 0);
            const auto dw1 = traj::quintic::state_weights_dT(tau, T, 1);
            const auto dw2 = traj::quintic::state_weights_dT(tau, T, 2);
            double dT = 0.0;
            for (int axis = 0; axis < 3; ++axis)
                dT += gp[axis] * dw0.dot(y.row(axis)) + gv[axis] * dw1.dot(y.row(axis)) +
                      ga[axis] * dw2.dot(y.row(axis));
            grad_T[j] += dT;

            // Local-time shift: earlier durations move this sample within its
            // piece by -1 each.
            const Eigen::Vector3d vel = spline_.eval_extrapolated(t[s], 1);
            const Eigen::Vector3d acc = spline_.eval_extrapolated(t[s], 2);
            const Eigen::Vector3d jrk = spline_.eval_extrapolated(t[s], 3);
            const double shift = gp.dot(vel) + gv.dot(acc) + ga.dot(jrk);
            for (int mprev = 0; mprev < j; ++mprev) grad_T[mprev] -= shift;
        }

        // Split ybar into explicit waypoint gradients, interior-state seeds.
        const int ni = n_interior();
        std::vector<std::array<Eigen::Vector2d, 3>> zbar(
            ni, {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()});
        for (int j = 0; j < M; ++j) {
            for (int axis = 0; axis < 3; ++axis) {
                if (j >= 1) grad_wp[j - 1][axis] += ybar[j](axis, 0);
                if (j + 1 <= ni) grad_wp[j][axis] += ybar[j](axis, 3);
                if (j >= 1) zbar[j - 1][axis] += Eigen::Vector2d(ybar[j](axis, 1), ybar[j](axis, 2));
                if (j + 1 <= ni) zbar[j][axis] += Eigen::Vector2d(ybar[j](axis, 4), ybar[j](axis, 5));
            }
        }
        if (ni == 0) return;

        // Adjoint solve against the fit's stationarity system H z = -g:
        // lambda = H^-1 zbar, then theta_bar -= lambda^T d(stationarity)/d(theta).
        std::vector<std::array<Eigen::Vector2d, 3>> lambda = solve_h(zbar);

        for (int j = 0; j < M; ++j) {
            const auto G2 = 2.0 * traj::quintic::energy_form(durations_[j]);
            const auto dG2 = 2.0 * traj::quintic::energy_form_dT(durations_[j]);
            const auto& y = spline_.pieces()[j].y;
            for (int axis = 0; axis < 3; ++axis) {
                Eigen::Matrix<double, 6, 1> lam_lift = Eigen::Matrix<double, 6, 1>::Zero();
                if (j >= 1) {
                    lam_lift(1) = lambda[j - 1][axis][0];
                    lam_lift(2) = lambda[j - 1][axis][1];
                }
                if (j + 1 <= ni) {
                    lam_lift(4) = lambda[j][axis][0];
                    lam_lift(5) = lambda[j][axis][1];
                }
                if (lam_lift.isZero(0.0)) continue;
                const Eigen::Matrix<double, 6, 1> glam = G2 * lam_lift;
                if (j >= 1) grad_wp[j - 1][axis] -= glam(0);
                if (j + 1 <= ni) grad_wp[j][axis] -= glam(3);
                grad_T[j] -= lam_lift.dot(dG2 * y.row(axis).transpose());
            }
        }
    }

private:
    void refit() {
        spline_ = traj::fit_min_jerk(start_, end_, waypoints_, durations_);
        build_h();
    }

    // Assemble and factor the 2x2-block tridiagonal stationarity Hessian
    // H = [2 G]_zz (shared by the three axes).
    void build_h() {
        const int ni = n_interior();
        hdiag_.assign(std::max(ni, 0), Eigen::Matrix2d::Zero());
        hupper_.assign(std::max(ni - 1, 0), Eigen::Matrix2d::Zero());
        for (int j = 0; j < n_pieces(); ++j) {
            const auto G = traj::quintic::energy_form(durations_[j]);
            if (j >= 1) {
                Eigen::Matrix2d blk;
                blk << G(1, 1), G(1, 2), G(2, 1), G(2, 2);
                hdiag_[j - 1] += 2.0 * blk;
            }
            if (j + 1 <= ni) {
                Eigen::Matrix2d blk;
                blk << G(4, 4), G(4, 5), G(5, 4), G(5, 5);
                hdiag_[j] += 2.0 * blk;
            }
            if (j >= 1 && j + 1 <= ni) {
                Eigen::Matrix2d blk;
                blk << G(1, 4), G(1, 5), G(2, 4), G(2, 5);
                hupper_[j - 1] += 2.0 * blk;
            }
        }
    }

    std::vector<std::array<Eigen::Vector2d, 3>> solve_h(
        const std::vector<std::array<Eigen::Vector2d, 3>>& rhs) const {
        const int ni = n_interior();
        std::vector<Eigen::Matrix2d> d = hdiag_;
        std::vector<Eigen::Matrix2d> dinv(ni);
        auto r = rhs;
        for (int j = 0; j < ni; ++j) {
            if (j > 0) {
                const Eigen::Matrix2d l = hupper_[j - 1].transpose() * dinv[j - 1];
                d[j] -= l * hupper_[j - 1];
                for (int axis = 0; axis < 3; ++axis) r[j][axis] -= l * r[j - 1][axis];
            }
            dinv[j] = d[j].inverse();
        }
        std::vector<std::array<Eigen::Vector2d, 3>> z(
            ni, {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()});
        for (int axis = 0; axis < 3; ++axis) {
            for (int j = ni - 1; j >= 0; --j) {
                Eigen::Vector2d acc = r[j][axis];
                if (j + 1 < ni) acc -= hupper_[j] * z[j + 1][axis];
                z[j][axis] = dinv[j] * acc;
            }
        }
        return z;
    }

    traj::BoundaryState start_, end_;
    std::vector<Eigen::Vector3d> waypoints_;
    std::vector<double> durations_;
    traj::QuinticSpline spline_;
    std::vector<Eigen::Matrix2d> hdiag_;
    std::vector<Eigen::Matrix2d> hupper_;
};

}  // namespace swarmcert::planner

#endif
