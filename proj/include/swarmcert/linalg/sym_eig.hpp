#ifndef SWARMCERT_LINALG_SYM_EIG_HPP
#define SWARMCERT_LINALG_SYM_EIG_HPP

#include "swarmcert/linalg/sym_matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace swarmcert::linalg {

// Symmetric eigendecomposition by cyclic Jacobi sweeps.
//
// The matrices this library cares about are small (<= 192x192), so the
// quadratically convergent, unconditionally stable Jacobi iteration is
// preferred over tridiagonalization-based solvers. Off-diagonal entries below
// 1e-12 * ||A||_F are treated as converged; iteration is capped at 60 sweeps.
inline EigenDecomposition sym_eig(const SymMatrix& a) {
    if (!a.allFinite()) throw std::invalid_argument("sym_eig: non-finite entries");

    const int n = a.n();
    Eigen::MatrixXd m = a.toDense();
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

    const double thresh = 1e-12 * std::max(a.normFrobenius(), 1e-300);
    const int max_sweeps = 60;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(m(p, q)));
        if (off <= thresh) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= thresh) continue;

                const double app = m(p, p);
                const double aqq = m(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                // Smaller-angle root of t^2 + 2*theta*t - 1 = 0.
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (!std::isfinite(t)) t = 1.0 / (2.0 * theta);
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return m(i, i) < m(j, j); });

    EigenDecomposition d;
    d.values.resize(n);
    d.vectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        d.values[k] = m(order[k], order[k]);
        d.vectors.col(k) = v.col(order[k]);
    }
    return d;
}

inline EigenDecomposition sym_eig(const Eigen::MatrixXd& a) {
    return sym_eig(SymMatrix::fromDense(a));
}

// Smallest eigenvalue only (still a full Jacobi pass; fine at this scale).
inline double min_eigenvalue(const SymMatrix& a) { return sym_eig(a).values[0]; }

}  // namespace swarmcert::linalg

#endif
