#ifndef SWARMCERT_LINALG_SYM_MATRIX_HPP
#define SWARMCERT_LINALG_SYM_MATRIX_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace swarmcert::linalg {

// Dense symmetric matrix with storage-enforced symmetry: writes go through
// set()/add() which mirror (i,j) and (j,i), so entries(i,j) == entries(j,i)
// holds exactly, not merely up to roundoff.
class SymMatrix {
public:
    SymMatrix() : n_(1), data_(1, 0.0) {}

    explicit SymMatrix(int n) : n_(n), data_(static_cast<size_t>(n) * n, 0.0) {
        if (n < 1) throw std::invalid_argument("SymMatrix: dimension must be >= 1");
    }

    static SymMatrix identity(int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
        return m;
    }

    // Symmetrizes a general square matrix: (A + A^T)/2.
    static SymMatrix fromDense(const Eigen::MatrixXd& a) {
        if (a.rows() != a.cols() || a.rows() < 1)
            throw std::invalid_argument("SymMatrix::fromDense: square matrix required");
        SymMatrix m(static_cast<int>(a.rows()));
        for (int i = 0; i < m.n_; ++i)
            for (int j = i; j < m.n_; ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
        return m;
    }

    int n() const { return n_; }

    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * n_ + j]; }

    void set(int i, int j, double v) {
        data_[static_cast<size_t>(i) * n_ + j] = v;
        data_[static_cast<size_t>(j) * n_ + i] = v;
    }

    void add(int i, int j, double v) {
        data_[static_cast<size_t>(i) * n_ + j] += v;
        if (i != j) data_[static_cast<size_t>(j) * n_ + i] += v;
    }

    // Adds a 3x3 block with its transposed mirror, keeping the matrix symmetric.
    // For diagonal placement (bi == bj) the block itself must be symmetric and is
    // symmetrized here to absorb roundoff in the caller's arithmetic.
    void addBlock3(int bi, int bj, const Eigen::Matrix3d& blk) {
        if (bi == bj) {
            for (int r = 0; r < 3; ++r)
                for (int c = r; c < 3; ++c)
                    add(3 * bi + r, 3 * bi + c, 0.5 * (blk(r, c) + blk(c, r)));
        } else {
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) {
                    data_[static_cast<size_t>(3 * bi + r) * n_ + (3 * bj + c)] += blk(r, c);
                    data_[static_cast<size_t>(3 * bj + c) * n_ + (3 * bi + r)] += blk(r, c);
                }
            }
        }
    }

    Eigen::Matrix3d block3(int bi, int bj) const {
        Eigen::Matrix3d b;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) b(r, c) = (*this)(3 * bi + r, 3 * bj + c);
        return b;
    }

    Eigen::MatrixXd toDense() const {
        Eigen::MatrixXd a(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) a(i, j) = (*this)(i, j);
        return a;
    }

    double normFrobenius() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    double maxAbs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    bool allFinite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    int n_;
    std::vector<double> data_;
};

// Result of a symmetric eigendecomposition. Eigenvalues ascending,
// eigenvectors as orthonormal columns of `vectors` (same order).
struct EigenDecomposition {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

}  // namespace swarmcert::linalg

#endif
