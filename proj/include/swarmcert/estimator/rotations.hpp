#ifndef SWARMCERT_ESTIMATOR_ROTATIONS_HPP
#define SWARMCERT_ESTIMATOR_ROTATIONS_HPP

#include "swarmcert/estimator/data_matrix.hpp"
#include "swarmcert/linalg/svd3.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace swarmcert::estimator {

// A rotation per robot; conceptually the 3 x 3N stacked parameter.
using RotationSet = std::vector<Eigen::Matrix3d>;

inline RotationSet identity_rotations(int n) {
    return RotationSet(n, Eigen::Matrix3d::Identity());
}

// Tr(M Theta^T Theta) through the 3x3 blocks.
inline double rotation_cost(const DataMatrixM& m, const RotationSet& theta) {
    const int n = m.n_robots;
    double f = 0.0;
    for (int i = 0; i < n; ++i) {
        f += m.block(i, i).trace();  // Tr(M_ii R_i^T R_i)
        for (int j = i + 1; j < n; ++j) {
            const Eigen::Matrix3d zji = theta[j].transpose() * theta[i];
            f += 2.0 * (m.block(i, j) * zji).trace();
        }
    }
    return f;
}

// Same cost from the matched pairs: sum ||R_i g_ij + R_j g_ji||^2.
// Kept as an independent route for tests.
inline double rotation_cost_pairs(const DataMatrixM& m, const RotationSet& theta) {
    double f = 0.0;
    for (const auto& p : m.pairs)
        f += (theta[p.i - 1] * p.g_ij + theta[p.j - 1] * p.g_ji).squaredNorm();
    return f;
}

// Closed-form optimal Lagrange multiplier blocks at theta:
// Lambda_i = sum_j M_ij R_j^T R_i. Symmetric exactly when theta is a
// stationary point; the defect is reported for diagnostics.
struct LambdaStar {
    std::vector<Eigen::Matrix3d> blocks;      // symmetrized
    std::vector<Eigen::Matrix3d> raw_blocks;  // as computed
    double symmetry_defect = 0.0;             // max block ||L - L^T||_F

    double trace() const {
        double t = 0.0;
        for (const auto& b : blocks) t += b.trace();
        return t;
    }
};

inline LambdaStar lambda_star(const DataMatrixM& m, const RotationSet& theta) {
    const int n = m.n_robots;
    LambdaStar out;
    out.blocks.resize(n);
    out.raw_blocks.resize(n);
    for (int i = 0; i < n; ++i) {
        Eigen::Matrix3d l = Eigen::Matrix3d::Zero();
        for (int j = 0; j < n; ++j)
            l += m.block(i, j) * theta[j].transpose() * theta[i];
        out.raw_blocks[i] = l;
        out.blocks[i] = 0.5 * (l + l.transpose());
        out.symmetry_defect = std::max(out.symmetry_defect, (l - l.transpose()).norm());
    }
    return out;
}

// ||(M - Lambda) Theta^T||_F: first-order stationarity residual.
inline double stationarity_residual(const DataMatrixM& m, const RotationSet& theta,
                                    const LambdaStar& lambda) {
    const int n = m.n_robots;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        Eigen::Matrix3d row = Eigen::Matrix3d::Zero();
        for (int j = 0; j < n; ++j) row += m.block(i, j) * theta[j].transpose();
        row -= lambda.blocks[i] * theta[i].transpose();
        acc += row.squaredNorm();
    }
    return std::sqrt(acc);
}

// Anchor robot 1: Theta <- R_1^T * Theta.
inline RotationSet gauge_fix(const RotationSet& theta) {
    RotationSet out(theta.size());
    const Eigen::Matrix3d g = theta[0].transpose();
    for (size_t i = 0; i < theta.size(); ++i) out[i] = g * theta[i];
    return out;
}

inline double frobenius_distance(const RotationSet& a, const RotationSet& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]).squaredNorm();
    return std::sqrt(acc);
}

namespace so3 {

inline Eigen::Matrix3d exp_skew(const Eigen::Vector3d& w) {
    const double angle = w.norm();
    if (angle < 1e-12) {
        Eigen::Matrix3d s;
        s << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
        return Eigen::Matrix3d::Identity() + s;
    }
    return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

inline Eigen::Vector3d vee(const Eigen::Matrix3d& s) {
    return {s(2, 1), s(0, 2), s(1, 0)};
}

}  // namespace so3

struct RefineResult {
    RotationSet theta;
    double cost = 0.0;
    int iterations = 0;
    std::vector<double> cost_history;
};

// Riemannian gradient descent on SO(3)^N with backtracking line search.
// Monotone nonincreasing cost; terminates when the Riemannian gradient norm
// drops below 1e-10 * ||M||_F or after max_iters iterations.
inline RefineResult refine_local(const RotationSet& theta0, const DataMatrixM& m,
                                 int max_iters = 1000) {
    const int n = m.n_robots;
    RefineResult res;
    res.theta = theta0;
    res.cost = rotation_cost(m, res.theta);
    res.cost_history.push_back(res.cost);

    const double grad_tol = 1e-10 * std::max(m.m.normFrobenius(), 1e-300);
    double step = 1.0 / std::max(1.0, m.m.normFrobenius());

    for (int it = 0; it < max_iters; ++it) {
        // Euclidean gradient blocks: 2 * sum_j R_j M_ji.
        std::vector<Eigen::Vector3d> omega(n);
        double grad_norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
            for (int j = 0; j < n; ++j) g += res.theta[j] * m.block(j, i);
            g *= 2.0;
            const Eigen::Matrix3d a = res.theta[i].transpose() * g;
            const Eigen::Matrix3d skew = 0.5 * (a - a.transpose());
            omega[i] = so3::vee(skew);
            grad_norm2 += 2.0 * omega[i].squaredNorm();  // ||skew||_F^2
        }
        const double grad_norm = std::sqrt(grad_norm2);
        if (grad_norm <= grad_tol) break;

        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            RotationSet trial(n);
            for (int i = 0; i < n; ++i)
                trial[i] = res.theta[i] * so3::exp_skew(-step * omega[i]);
            const double fc = rotation_cost(m, trial);
            if (fc <= res.cost - 1e-4 * step * grad_norm2) {
                res.theta = trial;
                res.cost = fc;
                accepted = true;
                step *= 1.6;
                break;
            }
            step *= 0.5;
        }
        res.cost_history.push_back(res.cost);
        ++res.iterations;
        if (!accepted) break;
    }
    return res;
}

}  // namespace swarmcert::estimator

#endif
