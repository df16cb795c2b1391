#ifndef SWARMCERT_ESTIMATOR_RELAXATION_HPP
#define SWARMCERT_ESTIMATOR_RELAXATION_HPP

#include "swarmcert/estimator/data_matrix.hpp"
#include "swarmcert/estimator/rotations.hpp"
#include "swarmcert/linalg/sym_eig.hpp"
#include "swarmcert/model/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace swarmcert::estimator {

struct RelaxationOptions {
    double tol = 1e-8;          // relative duality gap target
    int max_outer = 500;        // iteration cap per staircase level
    double grad_tol = 1e-11;    // relative Riemannian gradient tolerance
    int p_max = 5;              // staircase 3 -> 4 -> 5
    double rank_tol = 1e-6;     // lambda4/lambda3 threshold for the rank guard
    uint64_t init_seed = 1;
};

enum class SolveStatus {
    converged,      // stationary, rank-consistent, relative gap <= tol
    not_tight,      // stationary but the rounded solution does not close the gap
    iteration_cap,  // ran out of iterations; best iterate returned
};

struct RelaxationSolution {
    linalg::SymMatrix z;     // Z* = Y^T Y, block-identity diagonal
    double primal_value = 0.0;  // Tr(M Z*)
    double dual_value = 0.0;    // Tr(Lambda*) at the rounded solution
    double gap = 0.0;           // primal - dual
    int rank_estimate = 0;
    SolveStatus status = SolveStatus::converged;
    int iterations = 0;
    int final_p = 3;
    double grad_norm = 0.0;
    double stair_cert_eig = 0.0;  // min eig of M - Lambda(Y) at the final iterate
    bool higher_rank_flag = false;
    std::vector<double> objective_history;  // one entry per accepted step
    Eigen::MatrixXd y;  // final factor, p x 3N
};

class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& msg, RelaxationSolution best)
        : std::runtime_error(msg), best_iterate(std::move(best)) {}
    RelaxationSolution best_iterate;
};

namespace relax_detail {

// Project V onto the tangent space of the product Stiefel manifold at Y
// (blocks of 3 columns, each Y_i in St(p, 3)).
inline Eigen::MatrixXd tangent_project(const Eigen::MatrixXd& y, const Eigen::MatrixXd& v) {
    Eigen::MatrixXd out = v;
    const int n = static_cast<int>(y.cols()) / 3;
    for (int i = 0; i < n; ++i) {
        const auto yi = y.middleCols<3>(3 * i);
        const auto vi = v.middleCols<3>(3 * i);
        const Eigen::Matrix3d s = yi.transpose() * vi;
        out.middleCols<3>(3 * i) -= yi * (0.5 * (s + s.transpose()));
    }
    return out;
}

// Polar retraction per block: Y_i (Y_i^T Y_i)^{-1/2}.
inline Eigen::MatrixXd retract(const Eigen::MatrixXd& y) {
    Eigen::MatrixXd out = y;
    const int n = static_cast<int>(y.cols()) / 3;
    for (int i = 0; i < n; ++i) {
        const Eigen::Matrix3d gram = out.middleCols<3>(3 * i).transpose() *
                                     out.middleCols<3>(3 * i);
        linalg::SymMatrix s(3);
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c) s.set(r, c, 0.5 * (gram(r, c) + gram(c, r)));
        const auto ed = linalg::sym_eig(s);
        Eigen::Matrix3d inv_sqrt = Eigen::Matrix3d::Zero();
        for (int k = 0; k < 3; ++k) {
            const double lam = std::max(ed.values[k], 1e-300);
            inv_sqrt += (1.0 / std::sqrt(lam)) * ed.vectors.col(k) *
                        ed.vectors.col(k).transpose();
        }
        out.middleCols<3>(3 * i) *= inv_sqrt;
    }
    return out;
}

}  // namespace relax_detail

// Low-rank (Burer-Monteiro) solver for min Tr(M Z) over the PSD matrices
// with identity 3x3 diagonal blocks. Z is factored as Y^T Y with the blocks
// of Y on St(p, 3); the rank p climbs 3 -> 4 -> 5, escaping saddle levels
// along the most negative eigenvector of M - Lambda(Y), which certifies
// optimality when it is PSD. Spectral (Barzilai-Borwein) trial steps under a
// monotone Armijo safeguard keep the objective history nonincreasing.
inline RelaxationSolution solve_relaxation(const DataMatrixM& m,
                                           const RelaxationOptions& opt = {}) {
    const int n = m.n_robots;
    if (n < 2) throw std::invalid_argument("solve_relaxation: need N >= 2");
    if (!m.m.allFinite()) throw std::invalid_argument("solve_relaxation: non-finite M");

    const Eigen::MatrixXd md = m.m.toDense();
    const double scale = std::max(1.0, md.norm());
    const double grad_tol = opt.grad_tol * scale;
    const double cert_tol = 1e-9 * scale;

    model::Rng rng(opt.init_seed);

    auto cost_of = [&](const Eigen::MatrixXd& y) {
        return (y * md).cwiseProduct(y).sum();
    };

    RelaxationSolution sol;
    sol.final_p = 3;

    // p = 3 start: random rotations.
    Eigen::MatrixXd y(3, 3 * n);
    for (int i = 0; i < n; ++i) y.middleCols<3>(3 * i) = rng.rotation_uniform();

    int total_iters = 0;
    double fy = cost_of(y);
    sol.objective_history.push_back(fy);

    for (int p = 3; p <= opt.p_max; ++p) {
        // Riemannian descent at this level.
        Eigen::MatrixXd grad = relax_detail::tangent_project(y, 2.0 * (y * md));
        double gnorm = grad.norm();
        Eigen::MatrixXd prev_y, prev_grad;
        double step = 1.0 / scale;

        for (int it = 0; it < opt.max_outer && gnorm > grad_tol; ++it, ++total_iters) {
            if (it > 0) {
                // Alternating Barzilai-Borwein step.
                const Eigen::MatrixXd sdiff = y - prev_y;
                const Eigen::MatrixXd gdiff = grad - prev_grad;
                const double sg = std::abs(sdiff.cwiseProduct(gdiff).sum());
                if (sg > 1e-300) {
                    step = (it % 2 == 0) ? sdiff.squaredNorm() / sg
                                         : sg / std::max(gdiff.squaredNorm(), 1e-300);
                    step = std::clamp(step, 1e-12 / scale, 1e6 / scale);
                }
            }
            prev_y = y;
            prev_grad = grad;

            bool accepted = false;
            for (int ls = 0; ls < 50; ++ls) {
                Eigen::MatrixXd trial = relax_detail::retract(y - step * grad);
                const double ft = cost_of(trial);
                if (ft <= fy - 1e-4 * step * gnorm * gnorm) {
                    y = trial;
                    fy = ft;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;

            sol.objective_history.push_back(fy);
            grad = relax_detail::tangent_project(y, 2.0 * (y * md));
            gnorm = grad.norm();
        }
        sol.grad_norm = gnorm;
        sol.final_p = p;

        // Staircase certificate at the stationary point: S = M - Lambda(Y).
        Eigen::MatrixXd ym = y * md;
        linalg::SymMatrix s(3 * n);
        for (int r = 0; r < 3 * n; ++r)
            for (int c = r; c < 3 * n; ++c) s.set(r, c, md(r, c));
        for (int i = 0; i < n; ++i) {
            const Eigen::Matrix3d li = y.middleCols<3>(3 * i).transpose() *
                                       ym.middleCols<3>(3 * i);
            const Eigen::Matrix3d lsym = 0.5 * (li + li.transpose());
            for (int r = 0; r < 3; ++r)
                for (int c = r; c < 3; ++c)
                    s.set(3 * i + r, 3 * i + c, s(3 * i + r, 3 * i + c) - lsym(r, c));
        }
        const auto sd = linalg::sym_eig(s);
        sol.stair_cert_eig = sd.values[0];
        if (sd.values[0] >= -cert_tol || p == opt.p_max) break;

        // Escape to rank p+1 along the negative eigenvector.
        Eigen::MatrixXd y_up = Eigen::MatrixXd::Zero(p + 1, 3 * n);
        y_up.topRows(p) = y;
        Eigen::MatrixXd dir = Eigen::MatrixXd::Zero(p + 1, 3 * n);
        dir.row(p) = sd.vectors.col(0).transpose();
        double t = 1.0;
        const double f0 = cost_of(y_up);
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            Eigen::MatrixXd trial = relax_detail::retract(y_up + t * dir);
            if (cost_of(trial) < f0 - 1e-12 * scale) {
                y = trial;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) y = y_up;  // keep the padded iterate; next level refines it
        fy = cost_of(y);
        sol.objective_history.push_back(fy);
    }

    sol.iterations = total_iters;
    sol.y = y;
    sol.primal_value = fy;

    // Z = Y^T Y with the diagonal blocks snapped to exact identity.
    sol.z = linalg::SymMatrix(3 * n);
    const Eigen::MatrixXd z = y.transpose() * y;
    for (int r = 0; r < 3 * n; ++r)
        for (int c = r; c < 3 * n; ++c) sol.z.set(r, c, 0.5 * (z(r, c) + z(c, r)));
    for (int i = 0; i < n; ++i)
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c)
                sol.z.set(3 * i + r, 3 * i + c, r == c ? 1.0 : 0.0);

    // Rank estimate from the spectrum of Z.
    const auto zd = linalg::sym_eig(sol.z);
    const double zmax = std::max(zd.values[3 * n - 1], 1e-300);
    for (int k = 0; k < 3 * n; ++k)
        if (zd.values[k] > opt.rank_tol * zmax) ++sol.rank_estimate;
    if (3 * n >= 4) {
        const double l3 = zd.values[3 * n - 3];  // third largest
        const double l4 = zd.values[3 * n - 4];  // fourth largest
        sol.higher_rank_flag = (l4 / std::max(l3, 1e-300)) > opt.rank_tol;
    }

    // Dual value from the Theorem-1 closed form at the rounded solution.
    RotationSet rounded(n);
    {
        Eigen::MatrixXd y3(3, 3 * n);
        for (int k = 0; k < 3; ++k) {
            const double lam = std::max(zd.values[3 * n - 1 - k], 0.0);
            y3.row(k) = std::sqrt(lam) * zd.vectors.col(3 * n - 1 - k).transpose();
        }
        if (y3.middleCols<3>(0).determinant() < 0.0) y3.row(2) *= -1.0;
        for (int i = 0; i < n; ++i)
            rounded[i] = linalg::project_so3(y3.middleCols<3>(3 * i)).rotation;
    }
    sol.dual_value = rotation_cost(m, rounded);
    sol.gap = sol.primal_value - sol.dual_value;

    // The descent loop pushes the gradient to the rounding floor of the cost;
    // stationarity for classification only needs to rule out wild iterates,
    // the optimality statement itself comes from the gap and the certificate.
    const bool grad_ok = sol.grad_norm <= 1e-7 * scale;
    const bool gap_ok = std::abs(sol.gap) <= opt.tol * std::max(1.0, std::abs(sol.primal_value));
    if (grad_ok && gap_ok)
        sol.status = SolveStatus::converged;
    else if (grad_ok)
        sol.status = SolveStatus::not_tight;
    else
        sol.status = SolveStatus::iteration_cap;
    return sol;
}

}  // namespace swarmcert::estimator

#endif
