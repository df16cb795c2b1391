#ifndef SWARMCERT_PLANNER_FRONTEND_HPP
#define SWARMCERT_PLANNER_FRONTEND_HPP

#include "swarmcert/planner/star_polytope.hpp"

#include <Eigen/Dense>

#include <map>
#include <queue>
#include <stdexcept>
#include <vector>

namespace swarmcert::planner {

class UnreachableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Collision-free polyline for the center robot: 26-connected grid search
// with clearance d_s at every vertex, then greedy shortcutting validated by
// dense resampling of each segment.
inline std::vector<Eigen::Vector3d> search_center_path(const ObstacleField& field,
                                                       const Eigen::Vector3d& start,
                                                       const Eigen::Vector3d& goal,
                                                       double grid_res, double d_s) {
    if (!field.collision_free(start, d_s) || !field.collision_free(goal, d_s))
        throw std::invalid_argument("search_center_path: endpoint too close to obstacles");

    using Key = std::array<int, 3>;
    auto key_of = [&](const Eigen::Vector3d& p) {
        return Key{static_cast<int>(std::llround((p.x() - start.x()) / grid_res)),
                   static_cast<int>(std::llround((p.y() - start.y()) / grid_res)),
                   static_cast<int>(std::llround((p.z() - start.z()) / grid_res))};
    };
    auto pos_of = [&](const Key& k) {
        return start + grid_res * Eigen::Vector3d(k[0], k[1], k[2]);
    };
    const Key goal_key = key_of(goal);

    struct Node {
        double f;
        Key k;
        bool operator>(const Node& o) const { return f > o.f; }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
    std::map<Key, double> gscore;
    std::map<Key, Key> parent;
    const Key start_key{0, 0, 0};
    auto heur = [&](const Key& k) { return (pos_of(k) - goal).norm(); };
    open.push({heur(start_key), start_key});
    gscore[start_key] = 0.0;

    Key reached = start_key;
    bool found = (start_key == goal_key);
    size_t expansions = 0;
    while (!open.empty() && !found) {
        const Node cur = open.top();
        open.pop();
        if (++expansions > 2000000)
            throw UnreachableError("search_center_path: search budget exhausted");
        if (cur.k == goal_key) {
            found = true;
            reached = cur.k;
            break;
        }
        const double g0 = gscore[cur.k];
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    if (dx == 0 && dy == 0 && dz == 0) continue;
                    Key nk{cur.k[0] + dx, cur.k[1] + dy, cur.k[2] + dz};
                    const Eigen::Vector3d np = pos_of(nk);
                    if (!field.inside_bounds(np)) continue;
                    if (!field.collision_free(np, d_s) && nk != goal_key) continue;
                    const double ng =
                        g0 + grid_res * std::sqrt(double(dx * dx + dy * dy + dz * dz));
                    auto it = gscore.find(nk);
                    if (it == gscore.end() || ng < it->second - 1e-12) {
                        gscore[nk] = ng;
                        parent[nk] = cur.k;
                        open.push({ng + heur(nk), nk});
                    }
                }
    }
    if (!found) throw UnreachableError("search_center_path: goal unreachable");

    std::vector<Eigen::Vector3d> path;
    Key k = goal_key;
    path.push_back(goal);
    while (!(k == start_key)) {
        k = parent.at(k);
        path.push_back(pos_of(k));
    }
    path.back() = start;
    std::reverse(path.begin(), path.end());

    // Shortcut smoothing: greedily skip vertices while the straight segment
    // keeps clearance.
    std::vector<Eigen::Vector3d> smooth;
    size_t i = 0;
    smooth.push_back(path.front());
    while (i + 1 < path.size()) {
        size_t j = path.size() - 1;
        for (; j > i + 1; --j)
            if (field.segment_free(path[i], path[j], d_s)) break;
        smooth.push_back(path[j]);
        i = j;
    }
    return smooth;
}

struct RaycastResult {
    std::vector<std::vector<Eigen::Vector3d>> waypoints;  // [robot][center wp index]
    bool boundary_fallback = false;  // some ray exited immediately
    bool spacing_shortfall = false;  // polytope forced spacing < d_r somewhere
};

// Waypoints for the non-center robots: cast each robot's fixed direction
// from every center waypoint, stop at the star-region boundary and pull
// back by the visibility margin d_v (meters).
inline RaycastResult raycast_waypoints(const std::vector<StarPolytope>& polytopes,
                                       const std::vector<Eigen::Vector3d>& directions,
                                       double d_v, double d_r) {
    RaycastResult out;
    out.waypoints.assign(directions.size(), {});
    for (const auto& poly : polytopes) {
        for (size_t robot = 0; robot < directions.size(); ++robot) {
            const Eigen::Vector3d u = directions[robot].normalized();
            const double exit = poly.ray_exit(u, 2.0 * poly.flip_radius);
            double t = exit - d_v;
            if (t <= 1e-6) {
                out.boundary_fallback = true;
                t = std::max(0.25 * exit, 1e-3);
            }
            out.waypoints[robot].push_back(poly.center + t * u);
        }
        for (size_t a = 0; a < directions.size(); ++a)
            for (size_t b = a + 1; b < directions.size(); ++b)
                if ((out.waypoints[a].back() - out.waypoints[b].back()).norm() < d_r)
                    out.spacing_shortfall = true;
    }
    return out;
}

}  // namespace swarmcert::planner

#endif
