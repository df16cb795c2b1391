#ifndef SWARMCERT_CERTIFICATE_PERTURBATION_HPP
#define SWARMCERT_CERTIFICATE_PERTURBATION_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace swarmcert::cert {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

// The 6x6 nonzero core of one bearing pair's certificate contribution:
//   Q_s = [ -phi_ij phi_ji^T   phi_ij phi_ji^T ]
//         [  phi_ji phi_ij^T  -phi_ji phi_ij^T ]
inline Matrix6 pair_core(const Eigen::Vector3d& phi_ij, const Eigen::Vector3d& phi_ji) {
    Matrix6 q;
    const Eigen::Matrix3d a = phi_ij * phi_ji.transpose();
    q.block<3, 3>(0, 0) = -a;
    q.block<3, 3>(0, 3) = a;
    q.block<3, 3>(3, 0) = a.transpose();
    q.block<3, 3>(3, 3) = -a.transpose();
    return q;
}

// Factored form of the noise perturbation Delta Q_s. The two factors are
// eigendecompositions with non-orthogonal bases: W_k = V_k U_k V_k^{-1}
// (each column of V_k is an eigenvector of W_k with the matching U_k
// diagonal as eigenvalue). The nonzero U entries are the closed forms
//   U_1 = (-xi_ji - delta_ji . phi_hat_ij,  xi_ji - delta_ji . phi_hat_ij)
//   U_2 = (-xi_ij - delta_ij . phi_ji,      xi_ij - delta_ij . phi_ji).
struct PerturbationDecomposition {
    Matrix6 v1 = Matrix6::Zero();
    Matrix6 v2 = Matrix6::Zero();
    Vector6 u1 = Vector6::Zero();
    Vector6 u2 = Vector6::Zero();
    Matrix6 delta_q = Matrix6::Zero();        // direct Q_s - Q_hat_s
    Matrix6 reconstructed = Matrix6::Zero();  // V1 U1 V1^-1 + V2 U2 V2^-1
    double reconstruction_error = 0.0;
    double xi_ij = 0.0;
    double xi_ji = 0.0;
};

inline PerturbationDecomposition perturbation_decomposition(
    const Eigen::Vector3d& phi_hat_ij, const Eigen::Vector3d& delta_ij,
    const Eigen::Vector3d& delta_ji) {
    if (std::abs(phi_hat_ij.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("perturbation_decomposition: phi_hat must be unit");

    PerturbationDecomposition out;
    out.xi_ij = delta_ij.norm();
    out.xi_ji = delta_ji.norm();

    const Eigen::Vector3d phi_ij = phi_hat_ij + delta_ij;
    const Eigen::Vector3d phi_ji = -phi_hat_ij + delta_ji;

    out.delta_q = pair_core(phi_ij, phi_ji) - pair_core(phi_hat_ij, -phi_hat_ij);

    const Eigen::Matrix3d e3 = Eigen::Matrix3d::Identity();

    Matrix6 w1 = Matrix6::Zero();
    if (out.xi_ji > 0.0) {
        const Eigen::Vector3d dji_hat = delta_ji / out.xi_ji;
        const Eigen::Vector3d chi = phi_hat_ij.cross(delta_ji);
        out.v1.col(0) << phi_hat_ij, -dji_hat;
        out.v1.col(1) << phi_hat_ij, dji_hat;
        out.v1.col(2) << chi, -chi;
        out.v1.block<3, 3>(0, 3) = e3;
        out.v1.block<3, 3>(3, 3) = e3;
        out.u1(0) = -out.xi_ji - delta_ji.dot(phi_hat_ij);
        out.u1(1) = out.xi_ji - delta_ji.dot(phi_hat_ij);

        Eigen::FullPivLU<Matrix6> lu(out.v1);
        if (lu.isInvertible()) {
            w1 = out.v1 * out.u1.asDiagonal() * lu.inverse();
        } else {
            // Collinear noise (chi = 0): the basis degenerates; use the
            // explicit rank-2 form of the factor instead.
            const Eigen::Matrix3d a = phi_hat_ij * delta_ji.transpose();
            w1.block<3, 3>(0, 0) = -a;
            w1.block<3, 3>(0, 3) = a;
            w1.block<3, 3>(3, 0) = a.transpose();
            w1.block<3, 3>(3, 3) = -a.transpose();
        }
    }

    Matrix6 w2 = Matrix6::Zero();
    if (out.xi_ij > 0.0) {
        const Eigen::Vector3d dij_hat = delta_ij / out.xi_ij;
        const Eigen::Vector3d chi = delta_ij.cross(phi_ji);
        out.v2.col(0) << -dij_hat, phi_ji;
        out.v2.col(1) << dij_hat, phi_ji;
        out.v2.col(2) << chi, -chi;
        out.v2.block<3, 3>(0, 3) = e3;
        out.v2.block<3, 3>(3, 3) = e3;
        out.u2(0) = -out.xi_ij - delta_ij.dot(phi_ji);
        out.u2(1) = out.xi_ij - delta_ij.dot(phi_ji);

        Eigen::FullPivLU<Matrix6> lu(out.v2);
        if (lu.isInvertible()) {
            w2 = out.v2 * out.u2.asDiagonal() * lu.inverse();
        } else {
            const Eigen::Matrix3d a = delta_ij * phi_ji.transpose();
            w2.block<3, 3>(0, 0) = -a;
            w2.block<3, 3>(0, 3) = a;
            w2.block<3, 3>(3, 0) = a.transpose();
            w2.block<3, 3>(3, 3) = -a.transpose();
        }
    }

    out.reconstructed = w1 + w2;
    out.reconstruction_error = (out.reconstructed - out.delta_q).norm();
    return out;
}

}  // namespace swarmcert::cert

#endif
