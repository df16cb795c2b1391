#ifndef SWARMCERT_LINALG_CONVEX_HULL_HPP
#define SWARMCERT_LINALG_CONVEX_HULL_HPP

#include "swarmcert/linalg/sym_eig.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace swarmcert::linalg {

struct HullFace {
    Eigen::Vector3d normal;   // unit, outward
    Eigen::Vector3d support;  // a point on the face plane
};

class DegenerateHullError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace hull_detail {

struct Tri {
    int a, b, c;
    Eigen::Vector3d n;  // outward, unit
    double off;         // n . x = off on the plane
    bool alive = true;
    std::vector<int> conflicts;
};

inline void plane_of(const std::vector<Eigen::Vector3d>& pts, Tri& t) {
    const Eigen::Vector3d u = pts[t.b] - pts[t.a];
    const Eigen::Vector3d v = pts[t.c] - pts[t.a];
    Eigen::Vector3d n = u.cross(v);
    const double norm = n.norm();
    if (norm < 1e-300) {
        t.n.setZero();
        t.off = 0.0;
        return;
    }
    t.n = n / norm;
    t.off = t.n.dot(pts[t.a]);
}

}  // namespace hull_detail

// Incremental quickhull over 3D points. Coplanarity ties are broken with a
// perturbation epsilon of 1e-10 * bounding-box diagonal; no exact-arithmetic
// fallback. Output faces are merged by plane (coplanar triangles coalesce),
// each reported as an outward unit normal plus a support point, so the face
// set is stable under permutations of the input.
inline std::vector<HullFace> convex_hull_3d(const std::vector<Eigen::Vector3d>& points) {
    using hull_detail::Tri;

    const int np = static_cast<int>(points.size());
    if (np < 4) throw DegenerateHullError("convex_hull_3d: need at least 4 points");
    for (const auto& p : points)
        if (!p.allFinite()) throw std::invalid_argument("convex_hull_3d: non-finite point");

    Eigen::Vector3d lo = points[0], hi = points[0];
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double eps = 1e-10 * std::max((hi - lo).norm(), 1e-30);

    // Initial simplex: spread along x, then farthest from line, then from plane.
    int i0 = 0, i1 = 0;
    for (int i = 1; i < np; ++i) {
        if (points[i].x() < points[i0].x()) i0 = i;
        if (points[i].x() > points[i1].x()) i1 = i;
    }
    if ((points[i1] - points[i0]).norm() <= eps)
        throw DegenerateHullError("convex_hull_3d: all points coincident");

    const Eigen::Vector3d d01 = (points[i1] - points[i0]).normalized();
    int i2 = -1;
    double best = eps;
    for (int i = 0; i < np; ++i) {
        const Eigen::Vector3d w = points[i] - points[i0];
        const double dist = (w - w.dot(d01) * d01).norm();
        if (dist > best) {
            best = dist;
            i2 = i;
        }
    }
    if (i2 < 0) throw DegenerateHullError("convex_hull_3d: input is collinear");

    Eigen::Vector3d n0 = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
    int i3 = -1;
    best = eps;
    for (int i = 0; i < np; ++i) {
        const double dist = std::abs(n0.dot(points[i] - points[i0]));
        if (dist > best) {
            best = dist;
            i3 = i;
        }
    }
    if (i3 < 0) throw DegenerateHullError("convex_hull_3d: input is coplanar");

    std::vector<Tri> tris;
    const Eigen::Vector3d centroid =
        0.25 * (points[i0] + points[i1] + points[i2] + points[i3]);
    auto push_tri = [&](int a, int b, int c) {
        Tri t{a, b, c, Eigen::Vector3d::Zero(), 0.0, true, {}};
        hull_detail::plane_of(points, t);
        if (t.n.dot(centroid) - t.off > 0.0) {  // flip to outward
            std::swap(t.b, t.c);
            hull_detail::plane_of(points, t);
        }
        tris.push_back(std::move(t));
    };
    push_tri(i0, i1, i2);
    push_tri(i0, i1, i3);
    push_tri(i0, i2, i3);
    push_tri(i1, i2, i3);

    auto assign = [&](Tri& t, const std::vector<int>& candidates) {
        for (int i : candidates) {
            if (i == t.a || i == t.b || i == t.c) continue;
            if (t.n.dot(points[i]) - t.off > eps) t.conflicts.push_back(i);
        }
    };
    {
        std::vector<int> all(np);
        for (int i = 0; i < np; ++i) all[i] = i;
        for (auto& t : tris) assign(t, all);
    }

    while (true) {
        // Quickhull step: take the farthest outstanding point over all faces.
        int face = -1, apex = -1;
        double far = eps;
        for (int f = 0; f < static_cast<int>(tris.size()); ++f) {
            if (!tris[f].alive) continue;
            for (int i : tris[f].conflicts) {
                const double d = tris[f].n.dot(points[i]) - tris[f].off;
                if (d > far) {
                    far = d;
                    face = f;
                    apex = i;
                }
            }
        }
        if (face < 0) break;

        std::vector<int> visible;
        std::vector<int> orphan;
        for (int f = 0; f < static_cast<int>(tris.size()); ++f) {
            if (!tris[f].alive) continue;
            if (tris[f].n.dot(points[apex]) - tris[f].off > eps) {
                visible.push_back(f);
                tris[f].alive = false;
                orphan.insert(orphan.end(), tris[f].conflicts.begin(),
                              tris[f].conflicts.end());
            }
        }

        // Horizon = directed edges of visible faces whose reverse edge is not visible.
        std::set<std::pair<int, int>> edges;
        for (int f : visible) {
            const Tri& t = tris[f];
            edges.insert({t.a, t.b});
            edges.insert({t.b, t.c});
            edges.insert({t.c, t.a});
        }
        for (int f : visible) {
            const Tri& t = tris[f];
            const std::pair<int, int> dir[3] = {{t.a, t.b}, {t.b, t.c}, {t.c, t.a}};
            for (const auto& e : dir) {
                if (edges.count({e.second, e.first})) continue;  // interior edge
                Tri nt{e.first, e.second, apex, Eigen::Vector3d::Zero(), 0.0, true, {}};
                hull_detail::plane_of(points, nt);
                if (nt.n.norm() < 0.5) continue;  // degenerate sliver, skip
                if (nt.n.dot(centroid) - nt.off > 0.0) {
                    std::swap(nt.a, nt.b);
                    hull_detail::plane_of(points, nt);
                }
                assign(nt, orphan);
                tris.push_back(std::move(nt));
            }
        }
    }

    // Merge coplanar triangles into plane faces; refit each plane from its
    // vertex set so the output does not depend on insertion order.
    std::vector<HullFace> faces;
    std::vector<bool> used(tris.size(), false);
    Eigen::Vector3d inner = Eigen::Vector3d::Zero();
    {
        std::set<int> verts;
        for (const auto& t : tris)
            if (t.alive) {
                verts.insert(t.a);
                verts.insert(t.b);
                verts.insert(t.c);
            }
        for (int v : verts) inner += points[v];
        inner /= std::max<size_t>(verts.size(), 1);
    }
    const double merge_tol = std::max(10.0 * eps, 1e-12);
    for (size_t f = 0; f < tris.size(); ++f) {
        if (!tris[f].alive || used[f]) continue;
        std::set<int> verts{tris[f].a, tris[f].b, tris[f].c};
        for (size_t g = f; g < tris.size(); ++g) {
            if (!tris[g].alive || used[g]) continue;
            if (tris[f].n.dot(tris[g].n) > 1.0 - 1e-9 &&
                std::abs(tris[f].off - tris[g].off) < merge_tol) {
                used[g] = true;
                verts.insert(tris[g].a);
                verts.insert(tris[g].b);
                verts.insert(tris[g].c);
            }
        }
        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        for (int v : verts) mean += points[v];
        mean /= static_cast<double>(verts.size());
        SymMatrix scatter(3);
        for (int v : verts) {
            const Eigen::Vector3d w = points[v] - mean;
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) scatter.add(i, j, w[i] * w[j]);
        }
        Eigen::Vector3d n = sym_eig(scatter).vectors.col(0);
        if (n.dot(mean - inner) < 0.0) n = -n;
        faces.push_back({n, mean});
    }
    return faces;
}

// Largest violation of the face constraints over a point set (<= ~0 means
// every point is inside the hull).
inline double hull_violation(const std::vector<HullFace>& faces,
                             const std::vector<Eigen::Vector3d>& points) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& p : points)
        for (const auto& f : faces)
            worst = std::max(worst, f.normal.dot(p - f.support));
    return worst;
}

}  // namespace swarmcert::linalg

#endif
