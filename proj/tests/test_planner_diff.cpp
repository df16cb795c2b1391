#include "swarmcert/planner/diff_trajectory.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace swarmcert;
using namespace swarmcert::planner;

namespace {

std::mt19937_64 rng_for(const char* tag) {
    return std::mt19937_64(std::hash<std::string>{}(tag) ^ 0x51ed270b0a3ff2ddull);
}

Eigen::Vector3d rv3(std::mt19937_64& g, double s = 1.0) {
    std::normal_distribution<double> n(0.0, s);
    return {n(g), n(g), n(g)};
}

// A deliberately nonlinear scalar functional of the sampled states.
double probe_value(const traj::QuinticSpline& sp, const std::vector<double>& times) {
    double acc = 0.0;
    for (double t : times) {
        const Eigen::Vector3d p = sp.eval_extrapolated(t, 0);
        const Eigen::Vector3d v = sp.eval_extrapolated(t, 1);
        const Eigen::Vector3d a = sp.eval_extrapolated(t, 2);
        acc += std::sin(p.x()) + 0.5 * p.squaredNorm() + 0.2 * std::cos(v.y()) +
               0.1 * v.squaredNorm() + 0.05 * a.dot(p);
    }
    return acc;
}

SampleSeeds probe_seeds(const traj::QuinticSpline& sp, const std::vector<double>& times) {
    SampleSeeds seeds(times.size());
    for (size_t s = 0; s < times.size(); ++s) {
        const Eigen::Vector3d p = sp.eval_extrapolated(times[s], 0);
        const Eigen::Vector3d v = sp.eval_extrapolated(times[s], 1);
        const Eigen::Vector3d a = sp.eval_extrapolated(times[s], 2);
        seeds.p[s] = Eigen::Vector3d(std::cos(p.x()), 0.0, 0.0) + p + 0.05 * a;
        seeds.v[s] = Eigen::Vector3d(0.0, -0.2 * std::sin(v.y()), 0.0) + 0.2 * v;
        seeds.a[s] = 0.05 * p;
    }
    return seeds;
}

}  // namespace

TEST_CASE("DiffTrajectory backprop matches finite differences") {
    auto g = rng_for("diff-fd");
    for (int trial = 0; trial < 6; ++trial) {
        const int M = 3 + static_cast<int>(g() % 3);
        std::vector<double> durs;
        std::vector<Eigen::Vector3d> wps;
        std::uniform_real_distribution<double> u(0.7, 1.6);
        for (int j = 0; j < M; ++j) durs.push_back(u(g));
        for (int j = 0; j + 1 < M; ++j) wps.push_back(rv3(g, 2.0));
        traj::BoundaryState s{rv3(g, 2.0), rv3(g, 0.5), rv3(g, 0.3)};
        traj::BoundaryState e{rv3(g, 2.0), rv3(g, 0.5), rv3(g, 0.3)};

        DiffTrajectory dt(s, e, wps, durs);
        std::vector<double> times;
        for (double t = 0.25; t < dt.total_duration() - 0.05; t += 0.45) times.push_back(t);

        std::vector<Eigen::Vector3d> grad_wp(dt.n_interior(), Eigen::Vector3d::Zero());
        std::vector<double> grad_T(M, 0.0);
        dt.backprop(times, probe_seeds(dt.spline(), times), grad_wp, grad_T);

        const double h = 1e-6;
        for (int k = 0; k < dt.n_interior(); ++k) {
            for (int axis = 0; axis < 3; ++axis) {
                auto wp_hi = wps, wp_lo = wps;
                wp_hi[k][axis] += h;
                wp_lo[k][axis] -= h;
                const double fhi =
                    probe_value(DiffTrajectory(s, e, wp_hi, durs).spline(), times);
                const double flo =
                    probe_value(DiffTrajectory(s, e, wp_lo, durs).spline(), times);
                const double fd = (fhi - flo) / (2.0 * h);
                CHECK(grad_wp[k][axis] ==
                      Catch::Approx(fd).margin(1e-4 * std::max(1.0, std::abs(fd))));
            }
        }
        for (int j = 0; j < M; ++j) {
            auto d_hi = durs, d_lo = durs;
            d_hi[j] += h;
            d_lo[j] -= h;
            const double fhi = probe_value(DiffTrajectory(s, e, wps, d_hi).spline(), times);
            const double flo = probe_value(DiffTrajectory(s, e, wps, d_lo).spline(), times);
            const double fd = (fhi - flo) / (2.0 * h);
            CHECK(grad_T[j] == Catch::Approx(fd).margin(1e-4 * std::max(1.0, std::abs(fd))));
        }
    }
}

TEST_CASE("DiffTrajectory jerk-energy gradient matches finite differences") {
    auto g = rng_for("jerk-fd");
    const int M = 4;
    std::vector<double> durs = {1.1, 0.9, 1.4, 1.0};
    std::vector<Eigen::Vector3d> wps = {rv3(g, 2.0), rv3(g, 2.0), rv3(g, 2.0)};
    traj::BoundaryState s{rv3(g, 2.0), rv3(g, 0.4), rv3(g, 0.2)};
    traj::BoundaryState e{rv3(g, 2.0), rv3(g, 0.4), rv3(g, 0.2)};

    DiffTrajectory dt(s, e, wps, durs);
    std::vector<Eigen::Vector3d> grad_wp(dt.n_interior(), Eigen::Vector3d::Zero());
    std::vector<double> grad_T(M, 0.0);
    const double e0 = dt.jerk_energy(&grad_wp, &grad_T);
    CHECK(e0 == Catch::Approx(dt.spline().jerk_energy()).epsilon(1e-12));

    const double h = 1e-6;
    for (int k = 0; k < dt.n_interior(); ++k) {
        for (int axis = 0; axis < 3; ++axis) {
            auto wp_hi = wps, wp_lo = wps;
            wp_hi[k][axis] += h;
            wp_lo[k][axis] -= h;
            const double fd = (DiffTrajectory(s, e, wp_hi, durs).spline().jerk_energy() -
                               DiffTrajectory(s, e, wp_lo, durs).spline().jerk_energy()) /
                              (2.0 * h);
            CHECK(grad_wp[k][axis] ==
                  Catch::Approx(fd).margin(2e-4 * std::max(1.0, std::abs(fd))));
        }
    }
    for (int j = 0; j < M; ++j) {
        auto d_hi = durs, d_lo = durs;
        d_hi[j] += h;
        d_lo[j] -= h;
        const double fd = (DiffTrajectory(s, e, wps, d_hi).spline().jerk_energy() -
                           DiffTrajectory(s, e, wps, d_lo).spline().jerk_energy()) /
                          (2.0 * h);
        CHECK(grad_T[j] == Catch::Approx(fd).margin(2e-4 * std::max(1.0, std::abs(fd))));
    }
}
