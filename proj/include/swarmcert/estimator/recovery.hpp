#ifndef SWARMCERT_ESTIMATOR_RECOVERY_HPP
#define SWARMCERT_ESTIMATOR_RECOVERY_HPP

#include "swarmcert/estimator/relaxation.hpp"

#include <Eigen/Dense>

#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace swarmcert::estimator {

struct RecoveredRotations {
    RotationSet rotations;  // gauge fixed: R_1 = I
    bool higher_rank_flag = false;
};

// Rank-3 recovery: factor Z through its top-3 eigenpairs, project each 3x3
// block onto SO(3), and anchor robot 1. A lambda4/lambda3 ratio above
// rank_tol marks the estimate unreliable.
inline RecoveredRotations recover_rotations(const RelaxationSolution& sol,
                                            double rank_tol = 1e-6) {
    const int n3 = sol.z.n();
    const int n = n3 / 3;
    const auto zd = linalg::sym_eig(sol.z);

    RecoveredRotations out;
    if (n3 >= 4) {
        const double l3 = zd.values[n3 - 3];
        const double l4 = zd.values[n3 - 4];
        out.higher_rank_flag = (l4 / std::max(l3, 1e-300)) > rank_tol;
    }

    Eigen::MatrixXd y3(3, n3);
    for (int k = 0; k < 3; ++k) {
        const double lam = std::max(zd.values[n3 - 1 - k], 0.0);
        y3.row(k) = std::sqrt(lam) * zd.vectors.col(n3 - 1 - k).transpose();
    }
    // Fix the factor's handedness before projecting blockwise, so a common
    // rotation (not a per-block reflection) relates factor and estimate.
    if (y3.middleCols<3>(0).determinant() < 0.0) y3.row(2) *= -1.0;

    out.rotations.resize(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::Matrix3d blk = y3.middleCols<3>(3 * i);
        // A vanishing block only happens for badly higher-rank Z; any valid
        // rotation serves, the higher_rank_flag already marks the estimate.
        out.rotations[i] = blk.norm() > 1e-12 ? linalg::project_so3(blk).rotation
                                              : Eigen::Matrix3d::Identity();
    }
    out.rotations = gauge_fix(out.rotations);
    return out;
}

class RankDeficiencyError : public std::runtime_error {
public:
    RankDeficiencyError(const std::string& msg, int null_dim)
        : std::runtime_error(msg), null_dimension(null_dim) {}
    int null_dimension = 0;
};

struct DistanceKey {
    int i = 0, j = 0;
    double time = 0.0;
    bool operator<(const DistanceKey& o) const {
        return std::tie(i, j, time) < std::tie(o.i, o.j, o.time);
    }
};

struct TranslationRecovery {
    std::vector<Eigen::Vector3d> translations;  // t_1 = 0 gauge
    std::map<DistanceKey, double> distances;    // meters, per (i, j, tau)
    bool negative_distance_flag = false;
    double residual = 0.0;  // sum of weighted squared errors at the optimum
};

// Closed-form translations/distances given the rotations. Per matched pair
// the 3-vector residual
//   e = (d/2) (R_i g_ij - R_j g_ji) + t_i + R_i t_{i_tau} - t_j - R_j t_{j_tau}
// vanishes on noise-free data; stacking all pairs gives A x = beta, solved
// by weighted normal equations with the distances eliminated first (each
// distance appears in exactly one residual, so the reduced system is small).
inline TranslationRecovery recover_translations(
    const RotationSet& theta, const std::vector<MatchedPair>& pairs,
    const std::vector<double>& weights = {}) {
    const int n = static_cast<int>(theta.size());
    const int n_pairs = static_cast<int>(pairs.size());
    if (n_pairs == 0) throw std::invalid_argument("recover_translations: no pairs");
    if (!weights.empty() && static_cast<int>(weights.size()) != n_pairs)
        throw std::invalid_argument("recover_translations: weight count mismatch");

    const int nt = 3 * (n - 1);  // translations of robots 2..N (t_1 = 0)

    // Normal equations on the translation block after Schur elimination of
    // the distances:   (T - B D^-1 B^T) t = rhs_t - B D^-1 rhs_d.
    Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(nt, nt);
    Eigen::VectorXd trhs = Eigen::VectorXd::Zero(nt);
    std::vector<Eigen::VectorXd> bcols(n_pairs, Eigen::VectorXd::Zero(nt));
    std::vector<double> dvals(n_pairs, 0.0), drhs(n_pairs, 0.0);
    std::vector<Eigen::Vector3d> alphas(n_pairs), betas(n_pairs);

    auto tcol = [&](int robot_id) { return 3 * (robot_id - 2); };  // ids 2..N

    for (int k = 0; k < n_pairs; ++k) {
        const auto& p = pairs[k];
        const double w = weights.empty() ? 1.0 : weights[k];
        const Eigen::Matrix3d& ri = theta[p.i - 1];
        const Eigen::Matrix3d& rj = theta[p.j - 1];
        const Eigen::Vector3d alpha = 0.5 * (ri * p.g_ij - rj * p.g_ji);
        const Eigen::Vector3d beta =
            rj * p.odom_j.translation - ri * p.odom_i.translation;
        alphas[k] = alpha;
        betas[k] = beta;

        // e = alpha * d + S_i t_i - S_j t_j - beta, with S selecting blocks.
        // Accumulate weighted normal equations.
        dvals[k] = w * alpha.squaredNorm();
        drhs[k] = w * alpha.dot(beta);
        if (p.i >= 2) {
            const int ci = tcol(p.i);
            tmat.block<3, 3>(ci, ci) += w * Eigen::Matrix3d::Identity();
            trhs.segment<3>(ci) += w * beta;
            bcols[k].segment<3>(ci) += w * alpha;
        }
        if (p.j >= 2) {
            const int cj = tcol(p.j);
            tmat.block<3, 3>(cj, cj) += w * Eigen::Matrix3d::Identity();
            trhs.segment<3>(cj) -= w * beta;
            bcols[k].segment<3>(cj) -= w * alpha;
        }
        if (p.i >= 2 && p.j >= 2) {
            tmat.block<3, 3>(tcol(p.i), tcol(p.j)) -= w * Eigen::Matrix3d::Identity();
            tmat.block<3, 3>(tcol(p.j), tcol(p.i)) -= w * Eigen::Matrix3d::Identity();
        }
    }

    Eigen::MatrixXd schur = tmat;
    Eigen::VectorXd rhs = trhs;
    for (int k = 0; k < n_pairs; ++k) {
        if (dvals[k] <= 1e-300)
            throw RankDeficiencyError(
                "recover_translations: zero bearing-sum column (degenerate pair)", 1);
        schur -= bcols[k] * bcols[k].transpose() / dvals[k];
        rhs -= bcols[k] * (drhs[k] / dvals[k]);
    }

    // Rank check on the reduced normal matrix.
    {
        const auto ed = linalg::sym_eig(linalg::SymMatrix::fromDense(schur));
        const double lmax = std::max(ed.values[nt - 1], 1e-300);
        int null_dim = 0;
        for (int k = 0; k < nt; ++k)
            if (ed.values[k] <= 1e-10 * lmax) ++null_dim;
        if (null_dim > 0)
            throw RankDeficiencyError(
                "recover_translations: normal matrix rank-deficient, unconstrained "
                "subspace dimension " + std::to_string(null_dim),
                null_dim);
    }

    TranslationRecovery out;
    const Eigen::VectorXd t = schur.ldlt().solve(rhs);
    out.translations.assign(n, Eigen::Vector3d::Zero());
    for (int r = 2; r <= n; ++r) out.translations[r - 1] = t.segment<3>(tcol(r));

    for (int k = 0; k < n_pairs; ++k) {
        const double d = (drhs[k] - bcols[k].dot(t)) / dvals[k];
        const auto& p = pairs[k];
        out.distances[{p.i, p.j, p.time}] = d;
        if (d < 0.0) out.negative_distance_flag = true;

        const double w = weights.empty() ? 1.0 : weights[k];
        Eigen::Vector3d e = alphas[k] * d - betas[k];
        if (p.i >= 2) e += out.translations[p.i - 1];
        if (p.j >= 2) e -= out.translations[p.j - 1];
        // odometry lever arms are folded into beta already
        out.residual += w * e.squaredNorm();
    }
    return out;
}

}  // namespace swarmcert::estimator

#endif
