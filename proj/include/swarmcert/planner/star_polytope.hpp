#ifndef SWARMCERT_PLANNER_STAR_POLYTOPE_HPP
#define SWARMCERT_PLANNER_STAR_POLYTOPE_HPP

#include "swarmcert/linalg/convex_hull.hpp"
#include "swarmcert/planner/obstacle_field.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace swarmcert::planner {

// Sphere-flipping transformation about the center: radius rho maps to
// 2r - rho along the same direction, so near obstacles land far out and the
// far field folds inward.
inline Eigen::Vector3d sphere_flip(const Eigen::Vector3d& p, const Eigen::Vector3d& center,
                                   double r) {
    Eigen::Vector3d d = p - center;
    double rho = d.norm();
    if (rho < 1e-9) {
        d = Eigen::Vector3d::UnitX();
        rho = 1e-9;
    }
    return (2.0 * r / rho - 1.0) * d;
}

// Star-convex visibility region around a center point. The H-faces come
// from the convex hull of the flipped obstacle cloud (augmented with a
// synthetic bounding sphere at 1.9 r so every direction is fenced); a point
// belongs to the region when its flipped image lies outside that hull,
// i.e. visibility_margin(p) >= 0. The segment center->p is then clear of
// the sampled obstacle cloud.
struct StarPolytope {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    std::vector<linalg::HullFace> faces;
    double flip_radius = 0.0;

    // max_k n_k . (f(p) - a_k); >= 0 means p is inside the star region,
    // larger is deeper visibility.
    double visibility_margin(const Eigen::Vector3d& p) const {
        const Eigen::Vector3d fp = sphere_flip(p, center, flip_radius);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& f : faces) best = std::max(best, f.normal.dot(fp - f.support));
        return best;
    }

    // Smooth surrogate log(sum exp(alpha d_k))/alpha and its gradient in p.
    double soft_margin(const Eigen::Vector3d& p, double alpha,
                       Eigen::Vector3d* grad = nullptr) const {
        const Eigen::Vector3d d = p - center;
        double rho = d.norm();
        Eigen::Vector3d dir = d;
        if (rho < 1e-9) {
            dir = Eigen::Vector3d::UnitX();
            rho = 1e-9;
        } else {
            dir /= rho;
        }
        const Eigen::Vector3d fp = (2.0 * flip_radius / rho - 1.0) * (rho * dir);

        // Stable log-sum-exp around the max.
        double dmax = -std::numeric_limits<double>::infinity();
        std::vector<double> vals(faces.size());
        for (size_t k = 0; k < faces.size(); ++k) {
            vals[k] = faces[k].normal.dot(fp - faces[k].support);
            dmax = std::max(dmax, vals[k]);
        }
        double z = 0.0;
        Eigen::Vector3d nsum = Eigen::Vector3d::Zero();
        for (size_t k = 0; k < faces.size(); ++k) {
            const double w = std::exp(alpha * (vals[k] - dmax));
            z += w;
            nsum += w * faces[k].normal;
        }
        const double lse = dmax + std::log(z) / alpha;
        if (grad) {
            // d f / d p = (2r/rho - 1) I - (2r/rho) dir dir^T.
            const double c = 2.0 * flip_radius / rho;
            const Eigen::Matrix3d jac = (c - 1.0) * Eigen::Matrix3d::Identity() -
                                        c * dir * dir.transpose();
            *grad = jac * (nsum / z);
        }
        return lse;
    }

    // Ray exit: largest t <= t_max with the segment center->center+t*u inside.
    double ray_exit(const Eigen::Vector3d& u, double t_max, double step = 0.02) const {
        double t_in = 0.0;
        double t = step;
        while (t <= t_max && visibility_margin(center + t * u) >= 0.0) {
            t_in = t;
            t += step;
        }
        if (t > t_max) return t_max;
        double lo = t_in, hi = std::min(t, t_max);
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            (visibility_margin(center + mid * u) >= 0.0 ? lo : hi) = mid;
        }
        return lo;
    }
};

namespace star_detail {

inline std::vector<Eigen::Vector3d> fibonacci_sphere(int n) {
    std::vector<Eigen::Vector3d> pts;
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / n;
        const double r = std::sqrt(std::max(1.0 - z * z, 0.0));
        const double phi = ga * k;
        pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return pts;
}

}  // namespace star_detail

inline StarPolytope build_star_polytope(const ObstacleField& field,
                                        const Eigen::Vector3d& center, double r,
                                        double surface_spacing = 0.1) {
    if (!field.collision_free(center))
        throw std::invalid_argument("build_star_polytope: center inside an obstacle");

    StarPolytope poly;
    poly.center = center;
    poly.flip_radius = r;

    std::vector<Eigen::Vector3d> cloud = field.surface_points(center, 2.0 * r,
                                                              surface_spacing);
    // Synthetic bounding sphere closes the far field.
    for (const auto& dir : star_detail::fibonacci_sphere(256))
        cloud.push_back(center + 1.9 * r * dir);

    std::vector<Eigen::Vector3d> flipped;
    flipped.reserve(cloud.size());
    for (const auto& p : cloud) {
        const double rho = (p - center).norm();
        if (rho < 1e-9 || rho > 2.0 * r) continue;
        flipped.push_back(sphere_flip(p, center, r));
    }
    poly.faces = linalg::convex_hull_3d(flipped);
    return poly;
}

}  // namespace swarmcert::planner

#endif
