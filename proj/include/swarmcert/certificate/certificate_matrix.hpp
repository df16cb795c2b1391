#ifndef SWARMCERT_CERTIFICATE_CERTIFICATE_MATRIX_HPP
#define SWARMCERT_CERTIFICATE_CERTIFICATE_MATRIX_HPP

#include "swarmcert/estimator/data_matrix.hpp"
#include "swarmcert/estimator/rotations.hpp"
#include "swarmcert/linalg/sym_eig.hpp"
#include "swarmcert/model/visibility_graph.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace swarmcert::cert {

// 3N x 3N certificate matrix. Built either from an estimation solution
// (K = D (M - Lambda*) D^T) or from swarm trajectories (the Gram form).
// The columns of 1_N (x) I3 always lie in its nullspace; its smallest
// eigenvalue on the complement certifies optimality / noise resistance.
struct CertificateMatrix {
    enum class Source { from_solution, from_trajectories };
    linalg::SymMatrix k;
    Source source = Source::from_solution;
    int n_robots = 0;
    double asymmetry_defect = 0.0;  // ||K_raw - K_raw^T||_max before symmetrizing

    double row_block_sum_violation() const {
        double worst = 0.0;
        for (int i = 0; i < n_robots; ++i) {
            Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
            for (int j = 0; j < n_robots; ++j) acc += k.block3(i, j);
            worst = std::max(worst, acc.cwiseAbs().maxCoeff());
        }
        return worst;
    }
};

namespace cert_detail {

inline CertificateMatrix pack(const Eigen::MatrixXd& raw, int n,
                              CertificateMatrix::Source src) {
    CertificateMatrix out;
    out.n_robots = n;
    out.source = src;
    out.asymmetry_defect = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    out.k = linalg::SymMatrix::fromDense(raw);
    return out;
}

}  // namespace cert_detail

// Folds one bearing pair's contribution into a raw (unsymmetrized) 3N x 3N
// certificate accumulator: block (i,j) += phi_ij phi_ji^T, diagonals keep
// the row-block sums at zero. Block indices are 0-based.
inline void accumulate_pair(Eigen::MatrixXd& raw, int bi, int bj,
                            const Eigen::Vector3d& phi_ij, const Eigen::Vector3d& phi_ji) {
    const Eigen::Matrix3d blk = phi_ij * phi_ji.transpose();
    raw.block<3, 3>(3 * bi, 3 * bj) += blk;
    raw.block<3, 3>(3 * bj, 3 * bi) += blk.transpose();
    raw.block<3, 3>(3 * bi, 3 * bi) -= blk;
    raw.block<3, 3>(3 * bj, 3 * bj) -= blk.transpose();
}

// Blockwise construction from common-frame bearings:
//   K_ij = sum_tau phi_ij phi_ji^T on edges,  K_ii = -sum_{j != i} K_ij,
// with phi_ij = R_i* R_{i_tau} b_ij = R_i* g_ij.
inline Eigen::MatrixXd certificate_blockwise_raw(const estimator::DataMatrixM& m,
                                                 const estimator::RotationSet& theta) {
    const int n = m.n_robots;
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (const auto& p : m.pairs)
        accumulate_pair(raw, p.i - 1, p.j - 1, theta[p.i - 1] * p.g_ij,
                        theta[p.j - 1] * p.g_ji);
    return raw;
}

// Conjugation route: K = D (M - Lambda*) D^T with the raw (unsymmetrized)
// closed-form multipliers. Equal to the blockwise route identically; kept
// as an independent code path and used as a self-check in debug builds.
inline Eigen::MatrixXd certificate_conjugation_raw(const estimator::DataMatrixM& m,
                                                   const estimator::RotationSet& theta) {
    const int n = m.n_robots;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (int i = 0; i < n; ++i) d.block<3, 3>(3 * i, 3 * i) = theta[i];
    Eigen::MatrixXd ml = m.m.toDense();
    const auto lam = estimator::lambda_star(m, theta);
    for (int i = 0; i < n; ++i)
        ml.block<3, 3>(3 * i, 3 * i) -= lam.raw_blocks[i];
    return d * ml * d.transpose();
}

inline CertificateMatrix certificate_from_solution(const estimator::DataMatrixM& m,
                                                   const estimator::RotationSet& theta) {
    const Eigen::MatrixXd raw = certificate_blockwise_raw(m, theta);
#ifndef NDEBUG
    {
        const Eigen::MatrixXd alt = certificate_conjugation_raw(m, theta);
        const double diff = (raw - alt).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
        if (diff > 1e-10 * scale)
            throw std::logic_error("certificate_from_solution: code paths disagree");
    }
#endif
    return cert_detail::pack(raw, m.n_robots, CertificateMatrix::Source::from_solution);
}

class DegenerateSampleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Trajectory-side Gram form: Phi_ij(t) = -phi_ij phi_ij^T with
// phi_ij = (p_j - p_i)/||p_j - p_i||; K_ii = -sum K_ik. PSD by construction.
inline CertificateMatrix certificate_from_positions(
    const std::vector<std::vector<Eigen::Vector3d>>& positions,
    const model::VisibilityGraph& graph,
    const std::vector<double>* times = nullptr) {
    const int n = graph.n_robots();
    if (static_cast<int>(positions.size()) != n)
        throw std::invalid_argument("certificate_from_positions: robot count mismatch");
    const size_t n_samples = positions.empty() ? 0 : positions[0].size();

    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (const auto& [i, j] : graph.edges()) {
        for (size_t s = 0; s < n_samples; ++s) {
            const Eigen::Vector3d d = positions[j - 1][s] - positions[i - 1][s];
            const double norm = d.norm();
            if (norm <= 1e-6) {
                const double t = times ? (*times)[s] : static_cast<double>(s);
                throw DegenerateSampleError(
                    "certificate_from_positions: robots " + std::to_string(i) + " and " +
                    std::to_string(j) + " coincide at t=" + std::to_string(t));
            }
            const Eigen::Vector3d phi = d / norm;
            const Eigen::Matrix3d outer = phi * phi.transpose();
            raw.block<3, 3>(3 * (i - 1), 3 * (j - 1)) -= outer;
            raw.block<3, 3>(3 * (j - 1), 3 * (i - 1)) -= outer;
            raw.block<3, 3>(3 * (i - 1), 3 * (i - 1)) += outer;
            raw.block<3, 3>(3 * (j - 1), 3 * (j - 1)) += outer;
        }
    }
    return cert_detail::pack(raw, n, CertificateMatrix::Source::from_trajectories);
}

template <typename Spline>
inline CertificateMatrix certificate_from_trajectories(
    const std::vector<Spline>& trajectories, const model::VisibilityGraph& graph,
    const std::vector<double>& times) {
    std::vector<std::vector<Eigen::Vector3d>> pos(trajectories.size());
    for (size_t r = 0; r < trajectories.size(); ++r)
        for (double t : times) pos[r].push_back(trajectories[r].eval_extrapolated(t, 0));
    return certificate_from_positions(pos, graph, &times);
}

// Orthonormal basis of the complement of span(1_N (x) I3).
inline Eigen::MatrixXd deflation_basis(int n) {
    const int n3 = 3 * n;
    Eigen::MatrixXd null_basis(n3, 3);
    null_basis.setZero();
    for (int i = 0; i < n; ++i)
        null_basis.block<3, 3>(3 * i, 0) = Eigen::Matrix3d::Identity() / std::sqrt(n);

    Eigen::MatrixXd q(n3, n3 - 3);
    int col = 0;
    for (int i = 1; i < n && col < n3 - 3; ++i) {
        for (int a = 0; a < 3; ++a) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(n3);
            v(3 * i + a) = 1.0;
            v(a) = -1.0;
            // Orthogonalize against the nullspace and previous columns.
            for (int k = 0; k < 3; ++k) v -= null_basis.col(k).dot(v) * null_basis.col(k);
            for (int k = 0; k < col; ++k) v -= q.col(k).dot(v) * q.col(k);
            const double norm = v.norm();
            if (norm < 1e-12) continue;
            q.col(col++) = v / norm;
        }
    }
    if (col != n3 - 3)
        throw std::logic_error("deflation_basis: failed to complete the basis");
    return q;
}

struct CertificateEigen {
    double value = 0.0;          // smallest eigenvalue on the deflated space
    Eigen::VectorXd eigenvector;  // in the full 3N space
    double multiplicity_gap = 0.0;  // next deflated eigenvalue minus value
};

// The certificate eigenvalue: smallest eigenvalue of K restricted to the
// orthogonal complement of its structural nullspace. Equals lambda4(K) for
// PSD K and lambda1(K + mu N N^T) for large mu.
inline CertificateEigen certificate_eigen(const CertificateMatrix& k) {
    const int n = k.n_robots;
    const Eigen::MatrixXd q = deflation_basis(n);
    const Eigen::MatrixXd reduced = q.transpose() * k.k.toDense() * q;
    const auto ed = linalg::sym_eig(linalg::SymMatrix::fromDense(reduced));
    CertificateEigen out;
    out.value = ed.values[0];
    out.eigenvector = q * ed.vectors.col(0);
    out.multiplicity_gap = (reduced.rows() > 1 ? ed.values[1] - ed.values[0] : 1e300);
    return out;
}

inline double certificate_eigenvalue(const CertificateMatrix& k) {
    return certificate_eigen(k).value;
}

// Cross-check path: literal mu-shift with mu = 1 + 2 ||K||_F.
inline double certificate_eigenvalue_mu_shift(const CertificateMatrix& k) {
    const int n = k.n_robots;
    const double mu = 1.0 + 2.0 * k.k.normFrobenius();
    Eigen::MatrixXd shifted = k.k.toDense();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            shifted.block<3, 3>(3 * i, 3 * j) += mu * Eigen::Matrix3d::Identity();
    const auto ed = linalg::sym_eig(linalg::SymMatrix::fromDense(shifted));
    return ed.values[0];
}

}  // namespace swarmcert::cert

#endif
