#ifndef SWARMCERT_ESTIMATOR_LOCALIZER_HPP
#define SWARMCERT_ESTIMATOR_LOCALIZER_HPP

#include "swarmcert/estimator/pipeline.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace swarmcert::estimator {

// Timestamped odometry stream of one robot.
struct OdomBuffer {
    std::vector<double> times;
    std::vector<model::Pose> poses;

    // Nearest-time lookup.
    const model::Pose& at(double t, double* gap = nullptr) const {
        const auto it = std::lower_bound(times.begin(), times.end(), t);
        size_t k = it - times.begin();
        if (k == times.size()) k = times.size() - 1;
        if (k > 0 && std::abs(times[k - 1] - t) <= std::abs(times[k] - t)) --k;
        if (gap) *gap = std::abs(times[k] - t);
        return poses[k];
    }
};

// Directed bearing stream (observer -> target).
struct BearingBuffer {
    int observer = 0;
    int target = 0;
    std::vector<double> times;
    std::vector<Eigen::Vector3d> bearings;
};

struct TimeMatchStats {
    int matched = 0;
    int dropped = 0;
};

namespace localizer_detail {

inline double median_interval(const std::vector<double>& times) {
    if (times.size() < 2) return 1e300;
    std::vector<double> gaps;
    for (size_t k = 1; k < times.size(); ++k) gaps.push_back(times[k] - times[k - 1]);
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    return gaps[gaps.size() / 2];
}

}  // namespace localizer_detail

// Nearest-time alignment of opposite-direction bearings and odometry.
// A forward sample is kept when the nearest reverse sample lies within
// half the median sample interval; unmatched samples are dropped.
inline std::vector<model::BearingRecord> time_match(
    const std::vector<BearingBuffer>& bearing_buffers,
    const std::vector<OdomBuffer>& odom_buffers, double t_start, double t_end,
    TimeMatchStats* stats = nullptr) {
    std::vector<model::BearingRecord> records;
    TimeMatchStats local;

    for (const auto& fwd : bearing_buffers) {
        if (fwd.observer > fwd.target) continue;  // each edge handled once
        const BearingBuffer* bwd = nullptr;
        for (const auto& other : bearing_buffers)
            if (other.observer == fwd.target && other.target == fwd.observer) bwd = &other;

        const double reject =
            0.5 * localizer_detail::median_interval(fwd.times);

        for (size_t k = 0; k < fwd.times.size(); ++k) {
            const double t = fwd.times[k];
            if (t < t_start || t > t_end) continue;
            int best = -1;
            double best_gap = reject;
            if (bwd) {
                const auto it = std::lower_bound(bwd->times.begin(), bwd->times.end(), t);
                for (int probe : {static_cast<int>(it - bwd->times.begin()) - 1,
                                  static_cast<int>(it - bwd->times.begin())}) {
                    if (probe < 0 || probe >= static_cast<int>(bwd->times.size())) continue;
                    const double gap = std::abs(bwd->times[probe] - t);
                    if (gap <= best_gap) {
                        best_gap = gap;
                        best = probe;
                    }
                }
            }
            if (best < 0) {
                ++local.dropped;
                continue;
            }
            model::BearingRecord fr, br;
            fr.observer = fwd.observer;
            fr.target = fwd.target;
            fr.time = t;
            fr.bearing = fwd.bearings[k];
            fr.odom_observer = odom_buffers[fwd.observer - 1].at(t);
            fr.odom_target = odom_buffers[fwd.target - 1].at(t);
            br.observer = fwd.target;
            br.target = fwd.observer;
            br.time = t;  // aligned onto the forward timestamp
            br.bearing = bwd->bearings[best];
            br.odom_observer = fr.odom_target;
            br.odom_target = fr.odom_observer;
            records.push_back(fr);
            records.push_back(br);
            ++local.matched;
        }
    }
    if (stats) *stats = local;
    return records;
}

// Outcome of one sliding-window localization. `no_estimate` is the
// Algorithm-style guard outcome (rank != 3), not an error.
struct WindowResult {
    bool has_estimate = false;
    std::vector<model::Pose> common_frame_poses;  // T_i^C at tau_e
    EstimationResult estimation;                  // valid when has_estimate
    TimeMatchStats match_stats;
    std::string note;
};

// Certifiable mutual localization over [tau_s, tau_e]: time-match, re-anchor
// odometry to the window start, assemble, solve, rank-check, recover, and
// compose T_i^C = (T_1*)^-1 T_i* T_{i_tau_s}^-1 T_{i_tau_e}.
inline WindowResult sliding_window_localize(
    const std::vector<BearingBuffer>& bearing_buffers,
    const std::vector<OdomBuffer>& odom_buffers, double tau_s, double tau_e,
    const model::VisibilityGraph& graph, const EstimateOptions& opt = {}) {
    if (!(tau_e > tau_s))
        throw std::invalid_argument("sliding_window_localize: empty window");

    WindowResult out;
    auto records = time_match(bearing_buffers, odom_buffers, tau_s, tau_e,
                              &out.match_stats);
    if (records.empty()) {
        out.note = "no matched records in window";
        return out;
    }

    // Re-anchor odometry to tau_s so the estimate maps the window-start
    // frame to the common frame (limits drift contamination to the window).
    const int n = graph.n_robots();
    std::vector<model::Pose> anchor_inv(n);
    for (int i = 0; i < n; ++i) anchor_inv[i] = odom_buffers[i].at(tau_s).inverse();
    for (auto& r : records) {
        r.odom_observer = anchor_inv[r.observer - 1].compose(r.odom_observer);
        r.odom_target = anchor_inv[r.target - 1].compose(r.odom_target);
    }

    const auto m = assemble_data_matrix(records, graph);
    out.estimation = estimate_from_matrix(m, opt);
    if (out.estimation.rank_flag) {
        out.note = "rank(Z*) != 3";
        return out;
    }
    if (out.estimation.translation_rank_deficient) {
        out.note = "translation recovery rank-deficient";
        return out;
    }
    out.has_estimate = true;

    // Compose output poses at tau_e.
    out.common_frame_poses.resize(n);
    std::vector<model::Pose> t_star(n);
    for (int i = 0; i < n; ++i) {
        t_star[i].rotation = out.estimation.rotations[i];
        t_star[i].translation = out.estimation.translations[i];
    }
    const model::Pose anchor = t_star[0].inverse();
    for (int i = 0; i < n; ++i) {
        const model::Pose rel =
            odom_buffers[i].at(tau_s).inverse().compose(odom_buffers[i].at(tau_e));
        out.common_frame_poses[i] = anchor.compose(t_star[i]).compose(rel);
    }
    return out;
}

}  // namespace swarmcert::estimator

#endif
