#ifndef SWARMCERT_ESTIMATOR_DATA_MATRIX_HPP
#define SWARMCERT_ESTIMATOR_DATA_MATRIX_HPP

#include "swarmcert/linalg/sym_matrix.hpp"
#include "swarmcert/model/bearing.hpp"
#include "swarmcert/model/visibility_graph.hpp"

#include <Eigen/Dense>

#include <map>
#include <stdexcept>
#include <vector>

namespace swarmcert::estimator {

// One time-matched bidirectional observation. g vectors are the bearings
// rotated into each robot's odometry-aligned frame: g_ij = R_{i_tau} b_ij.
struct MatchedPair {
    int i = 0, j = 0;  // robot ids, i < j
    double time = 0.0;
    Eigen::Vector3d g_ij;
    Eigen::Vector3d g_ji;
    model::Pose odom_i;
    model::Pose odom_j;
};

// M = sum over edges and matched times of y y^T with y carrying g_ij in
// block i and g_ji in block j. Block-symmetric, PSD by construction.
struct DataMatrixM {
    int n_robots = 0;
    linalg::SymMatrix m;
    int record_count = 0;   // matched bidirectional pairs folded in
    int dropped_count = 0;  // one-directional records excluded
    std::vector<MatchedPair> pairs;

    Eigen::Matrix3d block(int bi, int bj) const { return m.block3(bi, bj); }
};

// Pairs records by (edge, time): both directions must be present at the
// same timestamp (the caller's time matching is responsible for aligning
// them first). Unmatched records are dropped and counted.
inline DataMatrixM assemble_data_matrix(const std::vector<model::BearingRecord>& records,
                                        const model::VisibilityGraph& graph,
                                        double time_tol = 1e-9) {
    if (records.empty())
        throw std::invalid_argument("assemble_data_matrix: no records");
    const int n = graph.n_robots();

    DataMatrixM out;
    out.n_robots = n;
    out.m = linalg::SymMatrix(3 * n);

    // Bucket by unordered edge, then match forward/backward by time.
    std::map<std::pair<int, int>, std::vector<const model::BearingRecord*>> fwd, bwd;
    for (const auto& r : records) {
        if (r.observer < 1 || r.observer > n || r.target < 1 || r.target > n)
            throw std::invalid_argument("assemble_data_matrix: robot id out of range");
        const std::pair<int, int> key{std::min(r.observer, r.target),
                                      std::max(r.observer, r.target)};
        (r.observer == key.first ? fwd : bwd)[key].push_back(&r);
    }

    for (auto& [key, list] : fwd) {
        auto rit = bwd.find(key);
        std::vector<bool> used(rit == bwd.end() ? 0 : rit->second.size(), false);
        for (const auto* f : list) {
            int match = -1;
            if (rit != bwd.end()) {
                for (size_t k = 0; k < rit->second.size(); ++k) {
                    if (!used[k] && std::abs(rit->second[k]->time - f->time) <= time_tol) {
                        match = static_cast<int>(k);
                        break;
                    }
                }
            }
            if (match < 0) {
                ++out.dropped_count;
                continue;
            }
            used[match] = true;
            const auto* b = rit->second[match];

            MatchedPair p;
            p.i = key.first;
            p.j = key.second;
            p.time = f->time;
            p.g_ij = f->odom_observer.rotation * f->bearing;
            p.g_ji = b->odom_observer.rotation * b->bearing;
            p.odom_i = f->odom_observer;
            p.odom_j = b->odom_observer;

            const int bi = p.i - 1, bj = p.j - 1;
            out.m.addBlock3(bi, bi, p.g_ij * p.g_ij.transpose());
            out.m.addBlock3(bj, bj, p.g_ji * p.g_ji.transpose());
            out.m.addBlock3(bi, bj, p.g_ij * p.g_ji.transpose());
            out.pairs.push_back(p);
            ++out.record_count;
        }
        if (rit != bwd.end()) {
            for (bool u : used)
                if (!u) ++out.dropped_count;
            bwd.erase(rit);
        }
    }
    for (const auto& [key, list] : bwd) out.dropped_count += static_cast<int>(list.size());
    return out;
}

}  // namespace swarmcert::estimator

#endif
