#include "swarmcert/trajectory/quintic_spline.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace swarmcert::traj;

namespace {

std::mt19937_64 rng_for(const char* tag) {
    return std::mt19937_64(std::hash<std::string>{}(tag) ^ 0x2545f4914f6cdd1dull);
}

Eigen::Vector3d rv3(std::mt19937_64& g, double s = 1.0) {
    std::normal_distribution<double> n(0.0, s);
    return {n(g), n(g), n(g)};
}

// Dense quadratic-program oracle: minimize c'Qc over raw per-piece quintic
// coefficients subject to boundary, waypoint and C^3 continuity constraints.
// Independent of the banded Hermite solve used by fit_min_jerk.
double qp_oracle_cost(const BoundaryState& start, const BoundaryState& end,
                      const std::vector<Eigen::Vector3d>& wps,
                      const std::vector<double>& durs) {
    const int M = static_cast<int>(durs.size());
    const int nc = 6 * M;  // per axis
    double total = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(nc, nc);
        for (int j = 0; j < M; ++j) {
            const double T = durs[j];
            Eigen::Matrix3d W = swarmcert::traj::quintic::jerk_weight(T);
            Q.block<3, 3>(6 * j + 3, 6 * j + 3) = W;
        }
        auto row_eval = [&](int j, double t, int order) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nc);
            double fact[6][6] = {};
            for (int k = 0; k < 6; ++k) {
                double c = 1.0;
                for (int d = 0; d < 6; ++d) {
                    if (d > k) {
                        fact[k][d] = 0.0;
                        continue;
                    }
                    fact[k][d] = c * std::pow(t, k - d);
                    c *= (k - d);
                }
            }
            for (int k = 0; k < 6; ++k) r(6 * j + k) = fact[k][order];
            return r;
        };
        std::vector<Eigen::RowVectorXd> rows;
        std::vector<double> vals;
        auto bval = [&](const BoundaryState& b, int order) {
            return order == 0 ? b.position[axis]
                              : (order == 1 ? b.velocity[axis] : b.acceleration[axis]);
        };
        for (int order = 0; order < 3; ++order) {
            rows.push_back(row_eval(0, 0.0, order));
            vals.push_back(bval(start, order));
            rows.push_back(row_eval(M - 1, durs[M - 1], order));
            vals.push_back(bval(end, order));
        }
        for (int j = 0; j + 1 < M; ++j) {
            rows.push_back(row_eval(j, durs[j], 0));
            vals.push_back(wps[j][axis]);
            rows.push_back(row_eval(j + 1, 0.0, 0));
            vals.push_back(wps[j][axis]);
            for (int order = 1; order <= 3; ++order) {
                rows.push_back(row_eval(j, durs[j], order) - row_eval(j + 1, 0.0, order));
                vals.push_back(0.0);
            }
        }
        const int ne = static_cast<int>(rows.size());
        Eigen::MatrixXd KKT = Eigen::MatrixXd::Zero(nc + ne, nc + ne);
        KKT.topLeftCorner(nc, nc) = 2.0 * Q;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nc + ne);
        for (int e = 0; e < ne; ++e) {
            KKT.block(nc + e, 0, 1, nc) = rows[e];
            KKT.block(0, nc + e, nc, 1) = rows[e].transpose();
            rhs(nc + e) = vals[e];
        }
        Eigen::VectorXd sol = KKT.fullPivLu().solve(rhs);
        Eigen::VectorXd c = sol.head(nc);
        total += c.dot(Q * c);
    }
    return total;
}

}  // namespace

TEST_CASE("fit_min_jerk M=1 recovers the classic rest-to-rest quintic") {
    BoundaryState s, e;
    e.position = Eigen::Vector3d(1.0, 0.0, 0.0);
    auto sp = fit_min_jerk(s, e, {}, {1.0});
    for (double t : {0.0, 0.2, 0.37, 0.5, 0.81, 1.0}) {
        const double expect = 10.0 * t * t * t - 15.0 * t * t * t * t +
                              6.0 * t * t * t * t * t;
        CHECK(sp.eval(t, 0).x() == Catch::Approx(expect).margin(1e-10));
        CHECK(sp.eval(t, 0).y() == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("fit_min_jerk straight line at constant velocity has zero jerk") {
    BoundaryState s, e;
    const Eigen::Vector3d vel(0.5, -0.25, 1.0);
    s.position = Eigen::Vector3d(1.0, 2.0, 3.0);
    s.velocity = vel;
    e.position = s.position + 4.0 * vel;
    e.velocity = vel;
    std::vector<Eigen::Vector3d> wps = {s.position + 1.5 * vel};
    auto sp = fit_min_jerk(s, e, wps, {1.5, 2.5});
    CHECK(sp.jerk_energy() < 1e-16);
    CHECK((sp.eval(2.0, 0) - (s.position + 2.0 * vel)).norm() < 1e-9);
}

TEST_CASE("fit_min_jerk matches waypoints, boundaries and C3 continuity") {
    auto g = rng_for("fit-c3");
    for (int trial = 0; trial < 20; ++trial) {
        const int M = 2 + static_cast<int>(g() % 5);
        std::vector<double> durs;
        std::vector<Eigen::Vector3d> wps;
        std::uniform_real_distribution<double> u(0.4, 2.2);
        for (int j = 0; j < M; ++j) durs.push_back(u(g));
        for (int j = 0; j + 1 < M; ++j) wps.push_back(rv3(g, 3.0));
        BoundaryState s{rv3(g, 2.0), rv3(g), rv3(g)};
        BoundaryState e{rv3(g, 2.0), rv3(g), rv3(g)};
        auto sp = fit_min_jerk(s, e, wps, durs);

        CHECK((sp.eval(0.0, 0) - s.position).norm() < 1e-9);
        CHECK((sp.eval(0.0, 1) - s.velocity).norm() < 1e-9);
        CHECK((sp.eval(0.0, 2) - s.acceleration).norm() < 1e-9);
        const double tf = sp.total_duration();
        CHECK((sp.eval(tf, 0) - e.position).norm() < 1e-8);
        CHECK((sp.eval(tf, 1) - e.velocity).norm() < 1e-8);
        CHECK((sp.eval(tf, 2) - e.acceleration).norm() < 1e-8);

        double t = 0.0;
        for (int j = 0; j + 1 < M; ++j) {
            t += durs[j];
            CHECK((sp.eval(t - 1e-12, 0) - wps[j]).norm() < 1e-8);
            for (int order = 0; order <= 3; ++order) {
                const Eigen::Vector3d left = sp.eval(t - 1e-12, order);
                const Eigen::Vector3d right = sp.eval(t + 1e-12, order);
                CHECK((left - right).norm() < 1e-8 * std::max(1.0, left.norm()));
            }
        }
    }
}

TEST_CASE("fit_min_jerk cost matches dense QP oracle") {
    auto g = rng_for("fit-qp");
    for (int trial = 0; trial < 10; ++trial) {
        const int M = 2 + static_cast<int>(g() % 3);
        std::vector<double> durs;
        std::vector<Eigen::Vector3d> wps;
        std::uniform_real_distribution<double> u(0.5, 1.8);
        for (int j = 0; j < M; ++j) durs.push_back(u(g));
        for (int j = 0; j + 1 < M; ++j) wps.push_back(rv3(g, 2.0));
        BoundaryState s{rv3(g), rv3(g, 0.5), rv3(g, 0.5)};
        BoundaryState e{rv3(g), rv3(g, 0.5), rv3(g, 0.5)};
        auto sp = fit_min_jerk(s, e, wps, durs);
        const double oracle = qp_oracle_cost(s, e, wps, durs);
        CHECK(sp.jerk_energy() ==
              Catch::Approx(oracle).margin(1e-8 * std::max(1.0, oracle)));
    }
}

TEST_CASE("jerk energy scales as s^-5 under uniform time scaling") {
    auto g = rng_for("fit-scale");
    std::vector<double> durs = {1.0, 1.4, 0.8};
    std::vector<Eigen::Vector3d> wps = {rv3(g, 2.0), rv3(g, 2.0)};
    BoundaryState s{rv3(g, 2.0), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
    BoundaryState e{rv3(g, 2.0), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
    const double e1 = fit_min_jerk(s, e, wps, durs).jerk_energy();
    for (double scale : {2.0, 3.7}) {
        std::vector<double> sd;
        for (double T : durs) sd.push_back(scale * T);
        const double e2 = fit_min_jerk(s, e, wps, sd).jerk_energy();
        CHECK(e2 * std::pow(scale, 5.0) == Catch::Approx(e1).epsilon(1e-6));
    }
}

TEST_CASE("eval derivative orders agree with central finite differences") {
    auto g = rng_for("eval-fd");
    std::vector<double> durs = {0.9, 1.3};
    std::vector<Eigen::Vector3d> wps = {rv3(g, 2.0)};
    BoundaryState s{rv3(g), rv3(g), rv3(g)};
    BoundaryState e{rv3(g), rv3(g), rv3(g)};
    auto sp = fit_min_jerk(s, e, wps, durs);
    std::uniform_real_distribution<double> u(0.05, sp.total_duration() - 0.05);
    for (int k = 0; k < 30; ++k) {
        const double t = u(g);
        const double h = 1e-6;
        const Eigen::Vector3d fd = (sp.eval(t + h, 0) - sp.eval(t - h, 0)) / (2.0 * h);
        CHECK((fd - sp.eval(t, 1)).norm() < 1e-6 * std::max(1.0, sp.eval(t, 1).norm()));
    }
    CHECK_THROWS_AS(sp.eval(-0.1, 0), std::out_of_range);
    CHECK_THROWS_AS(sp.eval(sp.total_duration() + 0.1, 0), std::out_of_range);
    CHECK_THROWS_AS(fit_min_jerk(s, e, wps, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("sample_positions counting and round-trip re-fit") {
    BoundaryState s, e;
    e.position = Eigen::Vector3d(5.0, 1.0, 0.0);
    std::vector<Eigen::Vector3d> wps = {{1.0, 2.0, 0.5}, {3.0, -1.0, 1.0}, {4.0, 0.0, 0.2}};
    std::vector<double> durs = {2.5, 2.5, 2.5, 2.5};
    auto sp = fit_min_jerk(s, e, wps, durs);
    REQUIRE(sp.total_duration() == Catch::Approx(10.0));

    auto sampled = sample_positions({sp}, 0.1);
    CHECK(sampled.n_t == 100);
    CHECK(sampled.times.front() == Catch::Approx(0.1));
    CHECK(sampled.times.back() == Catch::Approx(10.0).margin(1e-9));

    // Re-fit through every sample as a waypoint: must interpolate them.
    std::vector<Eigen::Vector3d> all(sampled.positions[0].begin(),
                                     sampled.positions[0].end() - 1);
    std::vector<double> dt_list(sampled.n_t, 0.1);
    BoundaryState s2 = sp.state_at(0.0);
    BoundaryState e2 = sp.state_at(sp.total_duration());
    auto refit = fit_min_jerk(s2, e2, all, dt_list);
    for (int k = 0; k < sampled.n_t; ++k) {
        CHECK((refit.eval_extrapolated(sampled.times[k], 0) - sampled.positions[0][k])
                  .norm() < 1e-6);
    }

    auto constant = fit_min_jerk(BoundaryState{}, BoundaryState{}, {}, {4.0});
    auto cs = sample_positions({constant}, 0.5);
    for (const auto& p : cs.positions[0]) CHECK(p.norm() < 1e-12);
    CHECK_THROWS_AS(sample_positions({sp}, 0.0), std::invalid_argument);
}

TEST_CASE("perturbing a waypoint never beats the fitted optimum") {
    auto g = rng_for("fit-opt");
    std::vector<double> durs = {1.0, 1.2, 0.7};
    std::vector<Eigen::Vector3d> wps = {rv3(g, 2.0), rv3(g, 2.0)};
    BoundaryState s{rv3(g), rv3(g, 0.3), rv3(g, 0.3)};
    BoundaryState e{rv3(g), rv3(g, 0.3), rv3(g, 0.3)};
    const double base = qp_oracle_cost(s, e, wps, durs);
    auto sp = fit_min_jerk(s, e, wps, durs);
    CHECK(sp.jerk_energy() >= base - 1e-9 * std::max(1.0, base));
    for (int k = 0; k < 5; ++k) {
        auto wp2 = wps;
        wp2[g() % wp2.size()] += rv3(g, 0.2);
        const double oracle = qp_oracle_cost(s, e, wp2, durs);
        CHECK(fit_min_jerk(s, e, wp2, durs).jerk_energy() >=
              oracle - 1e-9 * std::max(1.0, oracle));
    }
}
