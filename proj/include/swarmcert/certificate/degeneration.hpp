#ifndef SWARMCERT_CERTIFICATE_DEGENERATION_HPP
#define SWARMCERT_CERTIFICATE_DEGENERATION_HPP

#include "swarmcert/certificate/certificate_matrix.hpp"
#include "swarmcert/linalg/svd3.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace swarmcert::cert {

// B = 2 * d_max * T * sqrt(2 xi^2 + xi^3): if lambda4(K_hat) >= B, the
// disturbed certificate matrix stays PSD for any noise of magnitude <= xi.
inline double eigenvalue_bound(const model::VisibilityGraph& graph, int samples,
                               double xi_max) {
    if (xi_max < 0.0 || xi_max >= 2.0)
        throw std::invalid_argument("eigenvalue_bound: xi_max must be in [0, 2)");
    if (samples < 1) throw std::invalid_argument("eigenvalue_bound: samples must be >= 1");
    return 2.0 * graph.max_degree() * samples *
           std::sqrt(2.0 * xi_max * xi_max + xi_max * xi_max * xi_max);
}

inline double eigenvalue_bound_dmax(int d_max, int samples, double xi_max) {
    return 2.0 * d_max * samples *
           std::sqrt(2.0 * xi_max * xi_max + xi_max * xi_max * xi_max);
}

struct DegenerationReport {
    enum class Mechanism { none, pairwise_coplanar, partition_condition, numeric_only };
    bool degenerate = false;
    Mechanism mechanism = Mechanism::none;
    Eigen::Vector3d plane_normal = Eigen::Vector3d::Zero();
    std::vector<int> coplanar_set;   // V_c robot ids (partition witness)
    std::vector<int> remainder_set;  // V_r robot ids
    double lambda4 = 0.0;
    double k_norm = 0.0;
};

namespace degen_detail {

// Common plane through a point cloud: returns the unit normal when the
// third singular value of the centered cloud is <= rel_tol * first.
inline std::optional<Eigen::Vector3d> common_plane(
    const std::vector<Eigen::Vector3d>& cloud, double rel_tol = 1e-7) {
    if (cloud.size() < 3) return std::nullopt;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : cloud) mean += p;
    mean /= static_cast<double>(cloud.size());
    linalg::SymMatrix scatter(3);
    for (const auto& p : cloud) {
        const Eigen::Vector3d w = p - mean;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) scatter.add(i, j, w[i] * w[j]);
    }
    const auto ed = linalg::sym_eig(scatter);
    const double s1 = std::sqrt(std::max(ed.values[2], 0.0));
    const double s3 = std::sqrt(std::max(ed.values[0], 0.0));
    if (s3 <= rel_tol * std::max(s1, 1e-300)) return ed.vectors.col(0);
    return std::nullopt;
}

// Plane normal of a set of directions (unit bearings): rank <= 2 test.
inline std::optional<Eigen::Vector3d> bearing_plane(
    const std::vector<Eigen::Vector3d>& dirs, double rel_tol = 1e-7) {
    linalg::SymMatrix moment(3);
    for (const auto& d : dirs)
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) moment.add(i, j, d[i] * d[j]);
    const auto ed = linalg::sym_eig(moment);
    const double s1 = std::sqrt(std::max(ed.values[2], 0.0));
    const double s3 = std::sqrt(std::max(ed.values[0], 0.0));
    if (s3 <= rel_tol * std::max(s1, 1e-300)) return ed.vectors.col(0);
    return std::nullopt;
}

}  // namespace degen_detail

// Degeneration detector over sampled positions. Checks, in order:
//  (a) the corollary case: N = 2 with coplanar inter-robot bearings;
//  (b) the partition condition: a coplanar subset V_c with some robot in it
//      having no neighbors in V_r (exhaustive over subsets for N <= 8);
//  (c) the numeric certificate eigenvalue alone.
inline DegenerationReport detect_degeneration(
    const std::vector<std::vector<Eigen::Vector3d>>& positions,
    const model::VisibilityGraph& graph, double numeric_tol = 1e-8) {
    const int n = graph.n_robots();
    DegenerationReport rep;

    const CertificateMatrix khat = certificate_from_positions(positions, graph);
    rep.lambda4 = certificate_eigenvalue(khat);
    rep.k_norm = khat.k.normFrobenius();
    const bool numeric_degenerate = rep.lambda4 <= numeric_tol * std::max(rep.k_norm, 1e-300);

    if (n == 2) {
        std::vector<Eigen::Vector3d> dirs;
        for (size_t s = 0; s < positions[0].size(); ++s) {
            const Eigen::Vector3d d = positions[1][s] - positions[0][s];
            if (d.norm() > 1e-9) dirs.push_back(d.normalized());
        }
        if (auto normal = degen_detail::bearing_plane(dirs)) {
            rep.degenerate = true;
            rep.mechanism = DegenerationReport::Mechanism::pairwise_coplanar;
            rep.plane_normal = *normal;
            rep.coplanar_set = {1, 2};
            return rep;
        }
    } else if (n <= 8) {
        // Partition search: subsets V_c (|V_c| >= 2), V_r the complement.
        // Condition: V_c robots share a common plane and some robot in V_c
        // has all its neighbors inside V_c.
        for (unsigned mask = 3; mask < (1u << n); ++mask) {
            if (__builtin_popcount(mask) < 2) continue;
            std::vector<int> vc, vr;
            for (int r = 1; r <= n; ++r)
                ((mask >> (r - 1)) & 1u ? vc : vr).push_back(r);

            std::vector<Eigen::Vector3d> cloud;
            for (int r : vc)
                cloud.insert(cloud.end(), positions[r - 1].begin(), positions[r - 1].end());
            const auto normal = degen_detail::common_plane(cloud);
            if (!normal) continue;

            bool witness = false;
            for (int r : vc) {
                bool isolated_from_vr = true;
                for (int nb : graph.neighbors(r))
                    if (((mask >> (nb - 1)) & 1u) == 0) isolated_from_vr = false;
                if (isolated_from_vr && graph.degree(r) > 0) {
                    witness = true;
                    break;
                }
            }
            if (witness) {
                rep.degenerate = true;
                rep.mechanism = DegenerationReport::Mechanism::partition_condition;
                rep.plane_normal = *normal;
                rep.coplanar_set = vc;
                rep.remainder_set = vr;
                return rep;
            }
        }
    }

    if (numeric_degenerate) {
        rep.degenerate = true;
        rep.mechanism = DegenerationReport::Mechanism::numeric_only;
    }
    return rep;
}

}  // namespace swarmcert::cert

#endif
