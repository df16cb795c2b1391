#ifndef SWARMCERT_TRAJECTORY_QUINTIC_SPLINE_HPP
#define SWARMCERT_TRAJECTORY_QUINTIC_SPLINE_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace swarmcert::traj {

struct BoundaryState {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
};

namespace quintic {

// Maps the boundary values of one piece, y = [p0 v0 a0 p1 v1 a1] (per axis),
// to the upper coefficients [c3 c4 c5] of p(t) = sum c_k t^k on [0, T].
inline Eigen::Matrix<double, 3, 6> upper_coeff_map(double T) {
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    Eigen::Matrix<double, 3, 6> L;
    L << -10.0 / T3, -6.0 / T2, -1.5 / T, 10.0 / T3, -4.0 / T2, 0.5 / T,
        15.0 / T4, 8.0 / T3, 1.5 / T2, -15.0 / T4, 7.0 / T3, -1.0 / T2,
        -6.0 / T5, -3.0 / T4, -0.5 / T3, 6.0 / T5, -3.0 / T4, 0.5 / T3;
    return L;
}

inline Eigen::Matrix<double, 3, 6> upper_coeff_map_dT(double T) {
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T, T6 = T5 * T;
    Eigen::Matrix<double, 3, 6> L;
    L << 30.0 / T4, 12.0 / T3, 1.5 / T2, -30.0 / T4, 8.0 / T3, -0.5 / T2,
        -60.0 / T5, -24.0 / T4, -3.0 / T3, 60.0 / T5, -21.0 / T4, 2.0 / T3,
        30.0 / T6, 12.0 / T5, 1.5 / T4, -30.0 / T6, 12.0 / T5, -1.5 / T4;
    return L;
}

// Quadratic form of the jerk energy in [c3 c4 c5]:
// int_0^T ||p'''||^2 dt = c' W c per axis.
inline Eigen::Matrix3d jerk_weight(double T) {
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    Eigen::Matrix3d W;
    W << 36.0 * T, 72.0 * T2, 120.0 * T3,
        72.0 * T2, 192.0 * T3, 360.0 * T4,
        120.0 * T3, 360.0 * T4, 720.0 * T5;
    return W;
}

inline Eigen::Matrix3d jerk_weight_dT(double T) {
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T;
    Eigen::Matrix3d W;
    W << 36.0, 144.0 * T, 360.0 * T2,
        144.0 * T, 576.0 * T2, 1440.0 * T3,
        360.0 * T2, 1440.0 * T3, 3600.0 * T4;
    return W;
}

// Per-piece jerk energy as a 6x6 quadratic form in y (per axis).
inline Eigen::Matrix<double, 6, 6> energy_form(double T) {
    const auto L = upper_coeff_map(T);
    return L.transpose() * jerk_weight(T) * L;
}

inline Eigen::Matrix<double, 6, 6> energy_form_dT(double T) {
    const auto L = upper_coeff_map(T);
    const auto dL = upper_coeff_map_dT(T);
    const auto W = jerk_weight(T);
    const auto dW = jerk_weight_dT(T);
    return dL.transpose() * W * L + L.transpose() * dW * L + L.transpose() * W * dL;
}

// Weights w such that p^(order)(tau) = w . y for one piece (per axis).
inline Eigen::Matrix<double, 1, 6> state_weights(double tau, double T, int order) {
    const auto L = upper_coeff_map(T);
    Eigen::Matrix<double, 1, 6> w = Eigen::Matrix<double, 1, 6>::Zero();
    // Lower coefficients c0..c2 come directly from (p0, v0, a0).
    const double t0 = 1.0, t1 = tau, t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau,
                 t5 = t4 * tau;
    switch (order) {
        case 0:
            w(0) = t0;
            w(1) = t1;
            w(2) = 0.5 * t2;
            w += t3 * L.row(0) + t4 * L.row(1) + t5 * L.row(2);
            break;
        case 1:
            w(1) = t0;
            w(2) = t1;
            w += 3.0 * t2 * L.row(0) + 4.0 * t3 * L.row(1) + 5.0 * t4 * L.row(2);
            break;
        case 2:
            w(2) = t0;
            w += 6.0 * t1 * L.row(0) + 12.0 * t2 * L.row(1) + 20.0 * t3 * L.row(2);
            break;
        case 3:
            w += 6.0 * t0 * L.row(0) + 24.0 * t1 * L.row(1) + 60.0 * t2 * L.row(2);
            break;
        default:
            throw std::invalid_argument("state_weights: order must be 0..3");
    }
    return w;
}

// d/dT of state_weights at fixed local time tau (coefficient dependence only).
inline Eigen::Matrix<double, 1, 6> state_weights_dT(double tau, double T, int order) {
    const auto dL = upper_coeff_map_dT(T);
    const double t1 = tau, t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau, t5 = t4 * tau;
    switch (order) {
        case 0:
            return t3 * dL.row(0) + t4 * dL.row(1) + t5 * dL.row(2);
        case 1:
            return 3.0 * t2 * dL.row(0) + 4.0 * t3 * dL.row(1) + 5.0 * t4 * dL.row(2);
        case 2:
            return 6.0 * t1 * dL.row(0) + 12.0 * t2 * dL.row(1) + 20.0 * t3 * dL.row(2);
        case 3:
            return 6.0 * dL.row(0) + 24.0 * t1 * dL.row(1) + 60.0 * t2 * dL.row(2);
        default:
            throw std::invalid_argument("state_weights_dT: order must be 0..3");
    }
}

}  // namespace quintic

// Piecewise quintic with C^3 joints. Stored as boundary-value pieces: the
// coefficients are regenerated from [p0 v0 a0 p1 v1 a1] per piece, which is
// the representation the planner differentiates through.
class QuinticSpline {
public:
    struct Piece {
        double duration = 0.0;
        // boundary values per axis: rows = axis, cols = [p0 v0 a0 p1 v1 a1]
        Eigen::Matrix<double, 3, 6> y = Eigen::Matrix<double, 3, 6>::Zero();
    };

    QuinticSpline() = default;
    explicit QuinticSpline(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
        offsets_.resize(pieces_.size() + 1, 0.0);
        for (size_t j = 0; j < pieces_.size(); ++j) {
            if (pieces_[j].duration <= 0.0)
                throw std::invalid_argument("QuinticSpline: nonpositive duration");
            offsets_[j + 1] = offsets_[j] + pieces_[j].duration;
        }
    }

    int n_pieces() const { return static_cast<int>(pieces_.size()); }
    const std::vector<Piece>& pieces() const { return pieces_; }
    double total_duration() const { return offsets_.back(); }
    double piece_offset(int j) const { return offsets_[j]; }

    // Derivative of the requested order at global time t in [0, total].
    Eigen::Vector3d eval(double t, int order) const {
        if (t < 0.0 || t > total_duration() + 1e-12)
            throw std::out_of_range("QuinticSpline::eval: t outside [0, T]");
        return eval_extrapolated(t, order);
    }

    // Same evaluation but tolerant of small overshoot past the final joint
    // (the planner's finite-difference probes need smooth behavior there).
    Eigen::Vector3d eval_extrapolated(double t, int order) const {
        int j = locate(t);
        const double tau = t - offsets_[j];
        const auto w = quintic::state_weights(tau, pieces_[j].duration, order);
        return pieces_[j].y * w.transpose();
    }

    BoundaryState state_at(double t) const {
        return {eval(t, 0), eval(t, 1), eval(t, 2)};
    }

    double jerk_energy() const {
        double e = 0.0;
        for (const auto& pc : pieces_) {
            const auto G = quintic::energy_form(pc.duration);
            for (int axis = 0; axis < 3; ++axis)
                e += pc.y.row(axis) * G * pc.y.row(axis).transpose();
        }
        return e;
    }

    int locate(double t) const {
        int lo = 0, hi = n_pieces() - 1;
        while (lo < hi) {
            const int mid = (lo + hi + 1) / 2;
            if (t >= offsets_[mid])
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }

private:
    std::vector<Piece> pieces_;
    std::vector<double> offsets_;
};

namespace detail {

// Solves the block-tridiagonal stationarity system of the minimum-jerk fit.
// Unknowns are the interior joint velocities/accelerations; one 2x2-block
// tridiagonal factorization is shared by the three axes.
class MinJerkSystem {
public:
    explicit MinJerkSystem(int n_interior)
        : m_(n_interior), diag_(n_interior), upper_(std::max(n_interior - 1, 0)),
          rhs_(3, std::vector<Eigen::Vector2d>(n_interior, Eigen::Vector2d::Zero())) {
        for (int j = 0; j < m_; ++j) diag_[j].setZero();
        for (int j = 0; j + 1 < m_; ++j) upper_[j].setZero();
    }

    void add_diag(int j, const Eigen::Matrix2d& blk) { diag_[j] += blk; }
    void add_upper(int j, const Eigen::Matrix2d& blk) { upper_[j] += blk; }
    void add_rhs(int axis, int j, const Eigen::Vector2d& v) { rhs_[axis][j] += v; }

    // Returns per-axis solution vectors (v_j, a_j) for interior joints.
    std::vector<std::vector<Eigen::Vector2d>> solve() const {
        std::vector<Eigen::Matrix2d> d = diag_;
        std::vector<Eigen::Matrix2d> u = upper_;
        auto r = rhs_;
        // Block Thomas: forward elimination.
        std::vector<Eigen::Matrix2d> dinv(m_);
        for (int j = 0; j < m_; ++j) {
            if (j > 0) {
                const Eigen::Matrix2d l = u[j - 1].transpose() * dinv[j - 1];
                d[j] -= l * u[j - 1];
                for (int axis = 0; axis < 3; ++axis) r[axis][j] -= l * r[axis][j - 1];
            }
            const double det = d[j].determinant();
            if (!(std::abs(det) > 1e-300))
                throw std::runtime_error("fit_min_jerk: singular banded system");
            dinv[j] = d[j].inverse();
        }
        std::vector<std::vector<Eigen::Vector2d>> z(3,
            std::vector<Eigen::Vector2d>(m_, Eigen::Vector2d::Zero()));
        for (int axis = 0; axis < 3; ++axis) {
            for (int j = m_ - 1; j >= 0; --j) {
                Eigen::Vector2d acc = r[axis][j];
                if (j + 1 < m_) acc -= u[j] * z[axis][j + 1];
                z[axis][j] = dinv[j] * acc;
            }
        }
        return z;
    }

    int size() const { return m_; }

private:
    int m_;
    std::vector<Eigen::Matrix2d> diag_;
    std::vector<Eigen::Matrix2d> upper_;
    std::vector<std::vector<Eigen::Vector2d>> rhs_;
};

}  // namespace detail

// Fits the unique C^3 piecewise quintic through the waypoints at the given
// cumulative times that minimizes the integrated squared jerk, with the
// boundary states matched exactly. M = durations.size() pieces require
// M - 1 interior waypoints.
inline QuinticSpline fit_min_jerk(const BoundaryState& start, const BoundaryState& end,
                                  const std::vector<Eigen::Vector3d>& waypoints,
                                  const std::vector<double>& durations) {
    const int M = static_cast<int>(durations.size());
    if (M < 1) throw std::invalid_argument("fit_min_jerk: need at least one piece");
    if (static_cast<int>(waypoints.size()) != M - 1)
        throw std::invalid_argument("fit_min_jerk: waypoint count must be pieces - 1");
    for (double T : durations)
        if (!(T > 0.0)) throw std::invalid_argument("fit_min_jerk: durations must be positive");

    // Positions at all joints.
    std::vector<Eigen::Vector3d> q(M + 1);
    q[0] = start.position;
    for (int j = 1; j < M; ++j) q[j] = waypoints[j - 1];
    q[M] = end.position;

    std::vector<Eigen::Vector3d> v(M + 1), a(M + 1);
    v[0] = start.velocity;
    a[0] = start.acceleration;
    v[M] = end.velocity;
    a[M] = end.acceleration;

    if (M > 1) {
        // Energy of piece j as quadratic in y_j = [p0 v0 a0 p1 v1 a1]:
        //   E_j = y' G_j y.  Stationarity wrt interior (v_j, a_j) gives a
        //   2x2-block tridiagonal system.
        detail::MinJerkSystem sys(M - 1);
        for (int j = 0; j < M; ++j) {
            const auto G = quintic::energy_form(durations[j]);
            const bool left_interior = j >= 1;       // joint j-1... piece j has joints j, j+1
            const bool right_interior = j + 1 <= M - 1;
            // Unknown indices inside y: left joint -> (1,2), right joint -> (4,5).
            // Interior joint k (1-based k in [1, M-1]) maps to system row k-1.
            if (left_interior) {
                Eigen::Matrix2d blk;
                blk << G(1, 1), G(1, 2), G(2, 1), G(2, 2);
                sys.add_diag(j - 1, 2.0 * blk);
            }
            if (right_interior) {
                Eigen::Matrix2d blk;
                blk << G(4, 4), G(4, 5), G(5, 4), G(5, 5);
                sys.add_diag(j, 2.0 * blk);
            }
            if (left_interior && right_interior) {
                Eigen::Matrix2d blk;
                blk << G(1, 4), G(1, 5), G(2, 4), G(2, 5);
                sys.add_upper(j - 1, 2.0 * blk);
            }
            // RHS: -2 * G * (fixed components of y).
            for (int axis = 0; axis < 3; ++axis) {
                Eigen::Matrix<double, 6, 1> yfix = Eigen::Matrix<double, 6, 1>::Zero();
                yfix(0) = q[j][axis];
                yfix(3) = q[j + 1][axis];
                if (!left_interior) {
                    yfix(1) = v[0][axis];
                    yfix(2) = a[0][axis];
                }
                if (!right_interior) {
                    yfix(4) = v[M][axis];
                    yfix(5) = a[M][axis];
                }
                const Eigen::Matrix<double, 6, 1> g = 2.0 * (G * yfix);
                if (left_interior) sys.add_rhs(axis, j - 1, -Eigen::Vector2d(g(1), g(2)));
                if (right_interior) sys.add_rhs(axis, j, -Eigen::Vector2d(g(4), g(5)));
            }
        }
        const auto z = sys.solve();
        for (int k = 1; k <= M - 1; ++k)
            for (int axis = 0; axis < 3; ++axis) {
                v[k][axis] = z[axis][k - 1][0];
                a[k][axis] = z[axis][k - 1][1];
            }
    }

    std::vector<QuinticSpline::Piece> pieces(M);
    for (int j = 0; j < M; ++j) {
        pieces[j].duration = durations[j];
        for (int axis = 0; axis < 3; ++axis) {
            pieces[j].y(axis, 0) = q[j][axis];
            pieces[j].y(axis, 1) = v[j][axis];
            pieces[j].y(axis, 2) = a[j][axis];
            pieces[j].y(axis, 3) = q[j + 1][axis];
            pieces[j].y(axis, 4) = v[j + 1][axis];
            pieces[j].y(axis, 5) = a[j + 1][axis];
        }
    }
    return QuinticSpline(std::move(pieces));
}

// n_t = int(T_f / dt) samples at t = alpha * dt, alpha in [1, n_t].
// A small tolerance absorbs the floating-point division.
inline int sample_count(double total_time, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_count: dt must be positive");
    return static_cast<int>(std::floor(total_time / dt + 1e-9));
}

struct SampledPositions {
    int n_t = 0;
    std::vector<double> times;
    std::vector<std::vector<Eigen::Vector3d>> positions;  // [robot][sample]
};

inline SampledPositions sample_positions(const std::vector<QuinticSpline>& splines,
                                         double dt) {
    if (splines.empty()) throw std::invalid_argument("sample_positions: no trajectories");
    const double tf = splines.front().total_duration();
    for (const auto& s : splines)
        if (std::abs(s.total_duration() - tf) > 1e-6)
            throw std::invalid_argument("sample_positions: robots must share total time");

    SampledPositions out;
    out.n_t = sample_count(tf, dt);
    out.positions.resize(splines.size());
    for (int alpha = 1; alpha <= out.n_t; ++alpha) out.times.push_back(alpha * dt);
    for (size_t r = 0; r < splines.size(); ++r) {
        out.positions[r].reserve(out.n_t);
        for (double t : out.times)
            out.positions[r].push_back(splines[r].eval_extrapolated(t, 0));
    }
    return out;
}

}  // namespace swarmcert::traj

#endif
