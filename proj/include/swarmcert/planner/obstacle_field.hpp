#ifndef SWARMCERT_PLANNER_OBSTACLE_FIELD_HPP
#define SWARMCERT_PLANNER_OBSTACLE_FIELD_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace swarmcert::planner {

// Analytic obstacle field: spheres and axis-aligned boxes inside a workspace
// box. Stands in for a sensor-built ESDF; distance and gradient queries are
// exact for the primitives.
struct Sphere {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double radius = 0.0;
};

struct Box {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    Eigen::Vector3d half_extents = Eigen::Vector3d::Zero();
};

class ObstacleField {
public:
    Eigen::Vector3d bounds_lo = Eigen::Vector3d(-50, -50, -50);
    Eigen::Vector3d bounds_hi = Eigen::Vector3d(50, 50, 50);

    void add_sphere(const Eigen::Vector3d& c, double r) { spheres_.push_back({c, r}); }
    void add_box(const Eigen::Vector3d& c, const Eigen::Vector3d& h) {
        boxes_.push_back({c, h});
    }

    const std::vector<Sphere>& spheres() const { return spheres_; }
    const std::vector<Box>& boxes() const { return boxes_; }
    bool empty() const { return spheres_.empty() && boxes_.empty(); }

    // Signed distance to the nearest obstacle surface (positive outside).
    double distance(const Eigen::Vector3d& p) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& s : spheres_) d = std::min(d, (p - s.center).norm() - s.radius);
        for (const auto& b : boxes_) d = std::min(d, box_sdf(p, b));
        return d;
    }

    // Gradient of the signed distance (direction of fastest escape).
    Eigen::Vector3d distance_gradient(const Eigen::Vector3d& p) const {
        double best = std::numeric_limits<double>::infinity();
        Eigen::Vector3d grad = Eigen::Vector3d::Zero();
        for (const auto& s : spheres_) {
            const Eigen::Vector3d r = p - s.center;
            const double norm = std::max(r.norm(), 1e-12);
            const double d = norm - s.radius;
            if (d < best) {
                best = d;
                grad = r / norm;
            }
        }
        for (const auto& b : boxes_) {
            const double d = box_sdf(p, b);
            if (d < best) {
                best = d;
                grad = box_sdf_gradient(p, b);
            }
        }
        return grad;
    }

    bool collision_free(const Eigen::Vector3d& p, double clearance = 0.0) const {
        return distance(p) > clearance && inside_bounds(p);
    }

    bool segment_free(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      double clearance, double step = 0.01) const {
        const double len = (b - a).norm();
        const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int k = 0; k <= n; ++k) {
            const Eigen::Vector3d p = a + (b - a) * (static_cast<double>(k) / n);
            if (!collision_free(p, clearance)) return false;
        }
        return true;
    }

    bool inside_bounds(const Eigen::Vector3d& p) const {
        return (p.array() >= bounds_lo.array()).all() &&
               (p.array() <= bounds_hi.array()).all();
    }

    // Surface point cloud within `radius` of `center`, sampled at `spacing`.
    std::vector<Eigen::Vector3d> surface_points(const Eigen::Vector3d& center,
                                                double radius,
                                                double spacing = 0.1) const {
        std::vector<Eigen::Vector3d> cloud;
        for (const auto& s : spheres_) {
            if ((s.center - center).norm() > radius + s.radius) continue;
            const int n_theta =
                std::max(4, static_cast<int>(std::ceil(M_PI * s.radius / spacing)));
            for (int it = 0; it <= n_theta; ++it) {
                const double theta = M_PI * it / n_theta;
                const double ring_r = s.radius * std::sin(theta);
                const int n_phi = std::max(
                    1, static_cast<int>(std::ceil(2.0 * M_PI * ring_r / spacing)));
                for (int ip = 0; ip < n_phi; ++ip) {
                    const double phi = 2.0 * M_PI * ip / n_phi;
                    const Eigen::Vector3d p =
                        s.center + s.radius * Eigen::Vector3d(std::sin(theta) * std::cos(phi),
                                                              std::sin(theta) * std::sin(phi),
                                                              std::cos(theta));
                    if ((p - center).norm() <= radius) cloud.push_back(p);
                }
            }
        }
        for (const auto& b : boxes_) {
            const Eigen::Vector3d lo = b.center - b.half_extents;
            const Eigen::Vector3d hi = b.center + b.half_extents;
            if ((b.center - center).norm() > radius + b.half_extents.norm()) continue;
            for (int axis = 0; axis < 3; ++axis) {
                const int u = (axis + 1) % 3, v = (axis + 2) % 3;
                const int nu = std::max(
                    1, static_cast<int>(std::ceil((hi[u] - lo[u]) / spacing)));
                const int nv = std::max(
                    1, static_cast<int>(std::ceil((hi[v] - lo[v]) / spacing)));
                for (double side : {lo[axis], hi[axis]}) {
                    for (int iu = 0; iu <= nu; ++iu) {
                        for (int iv = 0; iv <= nv; ++iv) {
                            Eigen::Vector3d p;
                            p[axis] = side;
                            p[u] = lo[u] + (hi[u] - lo[u]) * iu / nu;
                            p[v] = lo[v] + (hi[v] - lo[v]) * iv / nv;
                            if ((p - center).norm() <= radius) cloud.push_back(p);
                        }
                    }
                }
            }
        }
        return cloud;
    }

private:
    static double box_sdf(const Eigen::Vector3d& p, const Box& b) {
        const Eigen::Vector3d q = (p - b.center).cwiseAbs() - b.half_extents;
        const Eigen::Vector3d qpos = q.cwiseMax(0.0);
        return qpos.norm() + std::min(q.maxCoeff(), 0.0);
    }

    static Eigen::Vector3d box_sdf_gradient(const Eigen::Vector3d& p, const Box& b) {
        const Eigen::Vector3d r = p - b.center;
        const Eigen::Vector3d q = r.cwiseAbs() - b.half_extents;
        const Eigen::Vector3d qpos = q.cwiseMax(0.0);
        const double outside = qpos.norm();
        Eigen::Vector3d g;
        if (outside > 1e-12) {
            for (int a = 0; a < 3; ++a)
                g[a] = (q[a] > 0.0 ? (r[a] >= 0.0 ? 1.0 : -1.0) * qpos[a] / outside : 0.0);
        } else {
            // Inside: escape along the least-penetrated axis.
            int amax = 0;
            q.maxCoeff(&amax);
            g.setZero();
            g[amax] = r[amax] >= 0.0 ? 1.0 : -1.0;
        }
        return g;
    }

    std::vector<Sphere> spheres_;
    std::vector<Box> boxes_;
};

}  // namespace swarmcert::planner

#endif
