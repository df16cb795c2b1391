#ifndef SWARMCERT_LINALG_SVD3_HPP
#define SWARMCERT_LINALG_SVD3_HPP

#include "swarmcert/linalg/sym_eig.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace swarmcert::linalg {

struct Svd3 {
    Eigen::Matrix3d u;
    Eigen::Vector3d sigma;  // descending, nonnegative
    Eigen::Matrix3d v;
};

namespace detail {

// Unit vector orthogonal to u (u must be unit-ish).
inline Eigen::Vector3d any_orthogonal(const Eigen::Vector3d& u) {
    Eigen::Vector3d t = std::abs(u.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                              : Eigen::Vector3d::UnitY();
    Eigen::Vector3d w = u.cross(t);
    return w / w.norm();
}

}  // namespace detail

// 3x3 SVD via the symmetric eigendecomposition of A^T A, with explicit
// handling of repeated and vanishing singular values. U and V are orthogonal
// (not necessarily proper rotations); A = U * diag(sigma) * V^T.
inline Svd3 svd3(const Eigen::Matrix3d& a) {
    if (!a.allFinite()) throw std::invalid_argument("svd3: non-finite entries");

    const Eigen::Matrix3d ata = a.transpose() * a;
    SymMatrix s(3);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) s.set(i, j, 0.5 * (ata(i, j) + ata(j, i)));
    EigenDecomposition ed = sym_eig(s);

    Svd3 r;
    // sym_eig sorts ascending; singular values want descending.
    for (int k = 0; k < 3; ++k) {
        const double lam = std::max(ed.values[2 - k], 0.0);
        r.sigma[k] = std::sqrt(lam);
        r.v.col(k) = ed.vectors.col(2 - k);
    }
    if (r.v.determinant() < 0.0) r.v.col(2) = -r.v.col(2);

    const double scale = std::max(r.sigma[0], 1e-300);
    const double rank_tol = 1e-13 * scale;

    // Columns of U from A*v / sigma where sigma is meaningful, completed by
    // orthogonality for the (near-)null directions.
    int rank = 0;
    for (int k = 0; k < 3; ++k)
        if (r.sigma[k] > rank_tol) ++rank;

    for (int k = 0; k < rank; ++k) {
        Eigen::Vector3d uk = a * r.v.col(k);
        // Re-orthogonalize against previous columns; repeated singular values
        // give AtA eigenvectors that are only orthogonal to working precision.
        for (int m = 0; m < k; ++m) uk -= uk.dot(r.u.col(m)) * r.u.col(m);
        const double nu = uk.norm();
        if (nu > 1e-30) {
            r.u.col(k) = uk / nu;
        } else {
            rank = k;
            break;
        }
    }
    if (rank == 0) {
        r.u.setIdentity();
    } else if (rank == 1) {
        r.u.col(1) = detail::any_orthogonal(r.u.col(0));
        r.u.col(2) = r.u.col(0).cross(r.u.col(1));
    } else if (rank == 2) {
        r.u.col(2) = r.u.col(0).cross(r.u.col(1));
    }

    // sqrt(eig(AtA)) only carries half precision near zero; the Rayleigh
    // quotient u^T A v restores it once the subspaces are fixed.
    for (int k = 0; k < 3; ++k)
        r.sigma[k] = std::max(r.u.col(k).dot(a * r.v.col(k)), 0.0);
    for (int k = 1; k < 3; ++k) r.sigma[k] = std::min(r.sigma[k], r.sigma[k - 1]);
    return r;
}

struct So3Projection {
    Eigen::Matrix3d rotation;
    bool ambiguous = false;  // nearest rotation not unique (rank deficiency)
};

// Nearest rotation in Frobenius norm: R = U * diag(1, 1, det(U V^T)) * V^T.
// The projection is unique iff sigma2 + sigma3 > 0 (with the determinant
// correction folded into sigma3); otherwise a valid rotation is still
// returned and the ambiguity flag is raised.
inline So3Projection project_so3(const Eigen::Matrix3d& y) {
    if (!y.allFinite()) throw std::invalid_argument("project_so3: non-finite entries");
    if (y.norm() == 0.0) throw std::invalid_argument("project_so3: zero matrix");

    const Svd3 f = svd3(y);
    const double d = (f.u * f.v.transpose()).determinant() >= 0.0 ? 1.0 : -1.0;

    So3Projection p;
    p.rotation = f.u * Eigen::Vector3d(1.0, 1.0, d).asDiagonal() * f.v.transpose();
    p.ambiguous = (f.sigma[1] + d * f.sigma[2]) <= 1e-12 * std::max(1.0, f.sigma[0]);
    return p;
}

}  // namespace swarmcert::linalg

#endif
