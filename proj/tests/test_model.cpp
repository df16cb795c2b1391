#include "swarmcert/model/drift.hpp"
#include "swarmcert/model/scenario.hpp"
#include "swarmcert/model/simulate.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

using namespace swarmcert::model;

TEST_CASE("true_bearing basic and frame handling") {
    const Eigen::Vector3d pi(0, 0, 0), pj(2, 0, 0);
    CHECK((true_bearing(pi, pj, Eigen::Matrix3d::Identity()) -
           Eigen::Vector3d(1, 0, 0)).norm() < 1e-12);
    CHECK((true_bearing(pj, pi, Eigen::Matrix3d::Identity()) -
           Eigen::Vector3d(-1, 0, 0)).norm() < 1e-12);

    // frame = rotation by pi/2 about z; direction (1,0,0) seen in that frame.
    const Eigen::Matrix3d frame = rot_z(M_PI / 2.0);
    CHECK((true_bearing(pi, Eigen::Vector3d(1, 0, 0), frame) -
           Eigen::Vector3d(0, -1, 0)).norm() < 1e-12);

    CHECK_THROWS_AS(true_bearing(pi, pi + Eigen::Vector3d(1e-12, 0, 0),
                                 Eigen::Matrix3d::Identity()),
                    DegenerateGeometryError);

    // scale invariance
    Rng rng(7);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector3d a = rng.normal3(), d = rng.unit_sphere();
        const Eigen::Matrix3d f = rng.rotation_uniform();
        const Eigen::Vector3d b1 = true_bearing(a, a + 0.37 * d, f);
        const Eigen::Vector3d b2 = true_bearing(a, a + 12.0 * d, f);
        CHECK((b1 - b2).norm() < 1e-12);
    }
}

TEST_CASE("perturb_bearing bounded model: exact chord and unit norm") {
    Rng rng(21);
    NoiseModel nm;
    nm.kind = NoiseModel::Kind::bounded;

    nm.xi = 0.0;
    const Eigen::Vector3d b = rng.unit_sphere();
    CHECK((perturb_bearing(b, nm, rng) - b).norm() == 0.0);

    nm.xi = 0.05;
    for (int k = 0; k < 200; ++k) {
        const Eigen::Vector3d base = rng.unit_sphere();
        const Eigen::Vector3d out = perturb_bearing(base, nm, rng);
        CHECK(std::abs(out.norm() - 1.0) < 1e-12);
        CHECK(std::abs((out - base).norm() - 0.05) < 1e-12);

        // Unit-preserving noise identity: phi_hat . delta = -xi^2 / 2.
        const Eigen::Vector3d delta = out - base;
        CHECK(std::abs(base.dot(delta) + nm.xi * nm.xi / 2.0) < 1e-12);
    }

    nm.xi = 2.5;
    CHECK_THROWS_AS(perturb_bearing(b, nm, rng), std::invalid_argument);
}

TEST_CASE("perturb_bearing gaussian model: additive variance") {
    Rng rng(22);
    NoiseModel nm;
    nm.kind = NoiseModel::Kind::gaussian;
    nm.sigma = 0.01;
    const Eigen::Vector3d b = Eigen::Vector3d::UnitZ();
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Vector3d var = Eigen::Vector3d::Zero();
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const Eigen::Vector3d e = perturb_bearing(b, nm, rng) - b;
        mean += e;
        var += e.cwiseProduct(e);
    }
    mean /= n;
    var /= n;
    for (int axis = 0; axis < 3; ++axis) {
        CHECK(std::abs(var[axis] - 1e-4) < 0.05 * 1e-4);
        CHECK(std::abs(mean[axis]) < 5e-4);
    }
}

TEST_CASE("apply_drift edge cases and random-walk variance") {
    Rng rng(5);
    std::vector<Pose> odom(100);
    for (size_t k = 0; k < odom.size(); ++k)
        odom[k].translation = Eigen::Vector3d(0.1 * k, 0.0, 0.0);
    std::vector<double> v(odom.size(), 1.0), w(odom.size(), 0.2);

    DriftModel zero;
    zero.dt = 0.1;
    auto out = apply_drift(odom, v, w, zero, rng);
    for (size_t k = 0; k < odom.size(); ++k) {
        CHECK((out.poses[k].translation - odom[k].translation).norm() == 0.0);
        CHECK((out.poses[k].rotation - odom[k].rotation).norm() == 0.0);
    }

    DriftModel dm;
    dm.sigma_p = 0.1;
    dm.dt = 0.1;
    std::vector<double> still(odom.size(), 0.0);
    auto frozen = apply_drift(odom, still, still, dm, rng);
    for (const auto& bp : frozen.b_p) CHECK(bp.norm() == 0.0);

    // Var(b_p at step k) ~= sigma_p^2 * k * v * dt, per axis.
    const int steps = 10000, trials = 100;
    std::vector<Pose> longodom(steps);
    std::vector<double> lv(steps, 1.0), lw(steps, 0.0);
    double second_moment = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        Rng sub = rng.substream(trial);
        auto series = apply_drift(longodom, lv, lw, dm, sub);
        second_moment += series.b_p.back().squaredNorm() / 3.0;
    }
    second_moment /= trials;
    const double expected = dm.sigma_p * dm.sigma_p * (steps - 1) * 1.0 * dm.dt;
    CHECK(std::abs(second_moment - expected) < 0.10 * expected);
}

TEST_CASE("visibility graph families and max degree") {
    CHECK(VisibilityGraph::complete(6).max_degree() == 5);
    CHECK(VisibilityGraph::star(6).max_degree() == 5);
    CHECK(VisibilityGraph::cycle(6).max_degree() == 2);
    CHECK(VisibilityGraph::cycle(9).max_degree() == 2);
    CHECK(VisibilityGraph::complete(4).connected());
    VisibilityGraph g(3);
    CHECK_FALSE(g.connected());
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    CHECK(g.connected());
    CHECK_THROWS_AS(g.add_edge(2, 2), std::invalid_argument);
}

TEST_CASE("scenario roundtrip is bit-exact") {
    Rng rng(99);
    SimConfig cfg;
    cfg.n_robots = 2;
    cfg.n_waypoints = 4;
    auto sim = make_random_sim(cfg, rng);
    Scenario s = sim.scenario;
    NoiseModel nm;
    nm.kind = NoiseModel::Kind::bounded;
    nm.xi = 0.03;
    nm.seed = 1234;
    s.noise = nm;
    s.records = make_records(sim, sample_times(sim.total_time(), 0.5), nm, rng);

    const std::string path = std::filesystem::temp_directory_path() / "swarmcert_min.json";
    save_scenario(s, path);
    Scenario loaded = load_scenario(path);
    CHECK(loaded == s);
    std::remove(path.c_str());

    // Larger scenario: 8 robots, >= 1000 records.
    SimConfig big;
    big.n_robots = 8;
    big.n_waypoints = 5;
    Rng rng2(7);
    auto sim2 = make_random_sim(big, rng2);
    Scenario s2 = sim2.scenario;
    s2.noise = nm;
    s2.records = make_records(sim2, sample_times(sim2.total_time(), 0.5), nm, rng2);
    REQUIRE(s2.records.size() >= 1000);
    const std::string path2 = std::filesystem::temp_directory_path() / "swarmcert_big.json";
    save_scenario(s2, path2);
    CHECK(load_scenario(path2) == s2);
    std::remove(path2.c_str());
}

TEST_CASE("scenario parse errors carry field paths") {
    Rng rng(3);
    SimConfig cfg;
    cfg.n_robots = 2;
    cfg.n_waypoints = 3;
    auto sim = make_random_sim(cfg, rng);
    Scenario s = sim.scenario;
    NoiseModel nm;
    nm.kind = NoiseModel::Kind::bounded;
    nm.xi = 0.0;
    s.records = make_records(sim, {1.0, 2.0}, nm, rng);

    auto j = scenario_to_json(s);
    j["records"][1]["b"] = {0.9, 0.0, 0.0};
    try {
        scenario_from_json(j);
        FAIL("expected parse error");
    } catch (const ScenarioParseError& ex) {
        CHECK(std::string(ex.what()).find("records[1]") != std::string::npos);
        CHECK(std::string(ex.what()).find("unit") != std::string::npos);
    }

    auto j2 = scenario_to_json(s);
    j2["version"] = "v0";
    CHECK_THROWS_AS(scenario_from_json(j2), ScenarioParseError);

    auto j3 = scenario_to_json(s);
    j3["graph"]["edges"][0] = {1, 1};
    CHECK_THROWS_AS(scenario_from_json(j3), ScenarioParseError);
}

TEST_CASE("simulator produces consistent noise-free geometry") {
    Rng rng(42);
    SimConfig cfg;
    cfg.n_robots = 3;
    cfg.n_waypoints = 5;
    auto sim = make_random_sim(cfg, rng);
    NoiseModel nm;
    nm.kind = NoiseModel::Kind::bounded;
    nm.xi = 0.0;
    auto records = make_records(sim, sample_times(sim.total_time(), 1.0), nm, rng);

    // Noise-free identity behind the estimator: R_i R_{i_tau} b_ij is the
    // world-frame direction, and both directions cancel.
    for (const auto& rec : records) {
        const auto& Ti = sim.scenario.robots[rec.observer - 1].initial_pose;
        const Eigen::Vector3d g =
            Ti.rotation * rec.odom_observer.rotation * rec.bearing;
        const Eigen::Vector3d pi = sim.position(rec.observer - 1, rec.time);
        const Eigen::Vector3d pj = sim.position(rec.target - 1, rec.time);
        CHECK((g - (pj - pi).normalized()).norm() < 1e-9);
        // Odometry consistency: T_i * odom = world pose.
        const Pose world = Ti.compose(rec.odom_observer);
        CHECK((world.translation - pi).norm() < 1e-9);
    }
}

TEST_CASE("rng substreams are independent and deterministic") {
    Rng a(2024), b(2024);
    CHECK(a.next_u64() == b.next_u64());
    Rng c = a.substream(5);
    Rng d = b.substream(5);
    for (int k = 0; k < 10; ++k) CHECK(c.next_u64() == d.next_u64());
    // Parent consumption must not affect the child stream.
    Rng e(77);
    Rng child1 = e.substream(1);
    e.normal3();
    Rng child2 = e.substream(1);
    CHECK(child1.next_u64() == child2.next_u64());
}
