#include "swarmcert/certificate/degeneration.hpp"
#include "swarmcert/certificate/noise_sweep.hpp"
#include "swarmcert/certificate/perturbation.hpp"
#include "swarmcert/estimator/pipeline.hpp"
#include "swarmcert/model/simulate.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace swarmcert;
using namespace swarmcert::cert;
using swarmcert::model::Rng;

namespace {

// Position samples for robots moving on random smooth 3D trajectories.
std::vector<std::vector<Eigen::Vector3d>> random_positions(int n_robots, int n_samples,
                                                           uint64_t seed) {
    Rng rng(seed);
    model::SimConfig cfg;
    cfg.n_robots = n_robots;
    cfg.n_waypoints = 5;
    auto sim = model::make_random_sim(cfg, rng);
    std::vector<std::vector<Eigen::Vector3d>> pos(n_robots);
    for (int r = 0; r < n_robots; ++r)
        for (int s = 1; s <= n_samples; ++s)
            pos[r].push_back(sim.position(r, s * sim.total_time() / n_samples));
    return pos;
}

// Two robots tracing figure-eights in the z = 1 plane.
std::vector<std::vector<Eigen::Vector3d>> planar_two_robot(int n_samples) {
    std::vector<std::vector<Eigen::Vector3d>> pos(2);
    for (int s = 0; s < n_samples; ++s) {
        const double t = 2.0 * M_PI * s / n_samples;
        pos[0].push_back({std::sin(t), std::sin(2.0 * t), 1.0});
        pos[1].push_back({3.0 + std::cos(t), std::sin(t), 1.0});
    }
    return pos;
}

}  // namespace

TEST_CASE("certificate from solution: zero, PSD at ground truth, two code paths") {
    Rng rng(3);
    model::SimConfig cfg;
    cfg.n_robots = 3;
    cfg.n_waypoints = 6;
    auto sim = model::make_random_sim(cfg, rng);
    model::NoiseModel nm;
    nm.kind = model::NoiseModel::Kind::bounded;
    nm.xi = 0.0;
    auto recs = model::make_records(sim, model::sample_times(sim.total_time(), 0.5), nm, rng);
    auto m = estimator::assemble_data_matrix(recs, sim.scenario.graph);
    estimator::RotationSet gt;
    for (const auto& r : sim.scenario.robots) gt.push_back(r.initial_pose.rotation);

    estimator::DataMatrixM zero;
    zero.n_robots = 3;
    zero.m = linalg::SymMatrix(9);
    auto kz = certificate_from_solution(zero, estimator::identity_rotations(3));
    CHECK(kz.k.normFrobenius() == 0.0);
    CHECK(certificate_eigenvalue(kz) == Catch::Approx(0.0).margin(1e-15));

    auto k = certificate_from_solution(m, gt);
    CHECK(k.row_block_sum_violation() <= 1e-9 * std::max(1.0, k.k.normFrobenius()));
    CHECK(certificate_eigenvalue(k) >= -1e-9 * std::max(1.0, k.k.normFrobenius()));

    // Independent construction routes agree (also enforced in debug builds).
    const Eigen::MatrixXd a = certificate_blockwise_raw(m, gt);
    const Eigen::MatrixXd b = certificate_conjugation_raw(m, gt);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff()));
}

TEST_CASE("adversarial collinear noise defeats the certificate") {
    // delta_ji parallel to phi_hat_ij and delta_ij parallel to phi_ji makes
    // every pair's perturbation negative semidefinite; at large magnitude
    // the disturbed K loses positive semidefiniteness.
    auto pos = random_positions(2, 40, 7);
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(6, 6);
    for (int s = 0; s < 40; ++s) {
        const Eigen::Vector3d phi_hat = (pos[1][s] - pos[0][s]).normalized();
        // delta_ji = 2 phi_hat reverses the bearing (chord 2, the maximum);
        // delta_ij = 0.5 phi_ji stays collinear with the reversed direction.
        const Eigen::Vector3d phi_ji = phi_hat;
        const Eigen::Vector3d phi_ij = 1.5 * phi_hat;
        accumulate_pair(raw, 0, 1, phi_ij, phi_ji);
    }
    auto k = cert_detail::pack(raw, 2, CertificateMatrix::Source::from_solution);
    CHECK(certificate_eigenvalue(k) < -1e-6);
}

TEST_CASE("certificate from trajectories: Gram rank, 3D spanning, scale invariance") {
    const auto graph2 = model::VisibilityGraph::complete(2);

    // All bearings along e1: K_hat has a single positive eigenvalue.
    std::vector<std::vector<Eigen::Vector3d>> line(2);
    for (int s = 0; s < 10; ++s) {
        line[0].push_back({0.0, 0.1 * s, 0.0});
        line[1].push_back({2.0, 0.1 * s, 0.0});
    }
    auto k1 = certificate_from_positions(line, graph2);
    const auto ed = linalg::sym_eig(k1.k);
    int positive = 0;
    for (int i = 0; i < 6; ++i)
        if (ed.values[i] > 1e-9 * k1.k.normFrobenius()) ++positive;
    CHECK(positive == 1);
    CHECK(certificate_eigenvalue(k1) <= 1e-9 * k1.k.normFrobenius());

    // Bearings spanning 3D: lambda4 > 0.
    std::vector<std::vector<Eigen::Vector3d>> span(2);
    span[0] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    span[1] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
    auto k2 = certificate_from_positions(span, graph2);
    CHECK(certificate_eigenvalue(k2) > 1e-4 * k2.k.normFrobenius());

    // Scaling all positions leaves K_hat unchanged (unit bearings).
    auto pos = random_positions(3, 25, 11);
    auto scaled = pos;
    for (auto& robot : scaled)
        for (auto& p : robot) p *= 10.0;
    const auto graph3 = model::VisibilityGraph::complete(3);
    auto ka = certificate_from_positions(pos, graph3);
    auto kb = certificate_from_positions(scaled, graph3);
    CHECK((ka.k.toDense() - kb.k.toDense()).cwiseAbs().maxCoeff() < 1e-9);

    // PSD by construction.
    CHECK(linalg::sym_eig(ka.k).values[0] >= -1e-9 * ka.k.normFrobenius());

    // Coincident robots at a sample: degenerate-geometry error naming pair/time.
    auto bad = pos;
    bad[1][3] = bad[0][3];
    std::vector<double> times(25);
    for (int s = 0; s < 25; ++s) times[s] = 0.1 * (s + 1);
    try {
        certificate_from_positions(bad, graph3, &times);
        FAIL("expected DegenerateSampleError");
    } catch (const DegenerateSampleError& ex) {
        const std::string what = ex.what();
        CHECK(what.find("1") != std::string::npos);
        CHECK(what.find("2") != std::string::npos);
        CHECK(what.find("0.4") != std::string::npos);
    }
}

TEST_CASE("certificate eigenvalue: deflation equals mu-shift") {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        auto pos = random_positions(3, 30, seed);
        auto k = certificate_from_positions(pos, model::VisibilityGraph::complete(3));
        const double a = certificate_eigenvalue(k);
        const double b = certificate_eigenvalue_mu_shift(k);
        CHECK(a == Catch::Approx(b).margin(1e-8 * std::max(1.0, k.k.normFrobenius())));
    }
    // Coplanar two-robot motion: certificate eigenvalue 0.
    auto planar = planar_two_robot(60);
    auto k = certificate_from_positions(planar, model::VisibilityGraph::complete(2));
    CHECK(std::abs(certificate_eigenvalue(k)) <= 1e-9 * k.k.normFrobenius());
}

TEST_CASE("Theorem-2 decomposition: closed forms, reconstruction, eigen relations") {
    Rng rng(17);
    model::NoiseModel nm;
    nm.kind = model::NoiseModel::Kind::bounded;

    // Zero-noise edge case.
    auto z = perturbation_decomposition(Eigen::Vector3d::UnitX(), Eigen::Vector3d::Zero(),
                                        Eigen::Vector3d::Zero());
    CHECK(z.delta_q.norm() == 0.0);
    CHECK(z.reconstruction_error == 0.0);
    CHECK(z.u1.norm() == 0.0);
    CHECK(z.u2.norm() == 0.0);

    for (int trial = 0; trial < 2000; ++trial) {
        const Eigen::Vector3d phi_hat = rng.unit_sphere();
        nm.xi = rng.uniform(1e-4, 0.3);
        const Eigen::Vector3d phi_ij = model::perturb_bearing(phi_hat, nm, rng);
        const double xi2 = rng.uniform(1e-4, 0.3);
        nm.xi = xi2;
        const Eigen::Vector3d phi_ji = model::perturb_bearing(-phi_hat, nm, rng);
        const Eigen::Vector3d delta_ij = phi_ij - phi_hat;
        const Eigen::Vector3d delta_ji = phi_ji + phi_hat;

        auto d = perturbation_decomposition(phi_hat, delta_ij, delta_ji);
        CHECK(d.reconstruction_error <= 1e-10 * std::max(1.0, d.delta_q.norm()));

        // U diagonals match the closed forms.
        CHECK(d.u1(0) == Catch::Approx(-d.xi_ji - delta_ji.dot(phi_hat)).margin(1e-12));
        CHECK(d.u1(1) == Catch::Approx(d.xi_ji - delta_ji.dot(phi_hat)).margin(1e-12));
        CHECK(d.u2(0) == Catch::Approx(-d.xi_ij - delta_ij.dot(phi_ji)).margin(1e-12));
        CHECK(d.u2(1) == Catch::Approx(d.xi_ij - delta_ij.dot(phi_ji)).margin(1e-12));
        CHECK(d.u1(0) < 0.0);
        CHECK(d.u2(0) < 0.0);

        // Each V column is an eigenvector of its factor with the U diagonal
        // as eigenvalue; spot-check the first factor.
        const Matrix6 w1 = d.v1 * d.u1.asDiagonal() * d.v1.inverse();
        for (int c = 0; c < 6; ++c) {
            const Vector6 lhs = w1 * d.v1.col(c);
            const Vector6 rhs = d.u1(c) * d.v1.col(c);
            CHECK((lhs - rhs).norm() < 1e-9 * std::max(1.0, d.v1.col(c).norm()));
        }
    }
}

TEST_CASE("Theorem-2 special case: collinear noise kills the first factor's "
          "positive eigenvalue") {
    const Eigen::Vector3d phi_hat = Eigen::Vector3d(1.0, 2.0, -0.5).normalized();
    for (double a : {0.1, 0.3, 0.8}) {
        const Eigen::Vector3d delta_ji = a * phi_hat;  // collinear with phi_hat
        const Eigen::Vector3d phi_ji = -phi_hat + delta_ji;
        const Eigen::Vector3d delta_ij = 0.05 * Eigen::Vector3d(0.0, 0.5, 2.0);

        auto d = perturbation_decomposition(phi_hat, delta_ij, delta_ji);
        // U1 = (-2a, 0, ...): one negative eigenvalue, none positive.
        CHECK(d.u1.maxCoeff() <= 1e-12);
        CHECK(d.u1(0) == Catch::Approx(-2.0 * a).margin(1e-12));
        (void)phi_ji;
    }
}

TEST_CASE("eigenvalue bound formula") {
    CHECK(eigenvalue_bound(model::VisibilityGraph::complete(3), 10, 0.0) == 0.0);
    const double b = eigenvalue_bound(model::VisibilityGraph::star(4), 100, 0.05);
    CHECK(b == Catch::Approx(2.0 * 3 * 100 * std::sqrt(2.0 * 0.0025 + 0.000125)));
    CHECK(b == Catch::Approx(42.96).margin(0.01));
    for (int n : {3, 5, 9})
        CHECK(eigenvalue_bound(model::VisibilityGraph::cycle(n), 50, 0.1) ==
              eigenvalue_bound_dmax(2, 50, 0.1));
    CHECK_THROWS_AS(eigenvalue_bound(model::VisibilityGraph::complete(3), 10, 2.0),
                    std::invalid_argument);
}

TEST_CASE("Weyl chain and Theorem-5 block bound on noisy draws") {
    auto pos = random_positions(3, 30, 23);
    const auto graph = model::VisibilityGraph::complete(3);
    auto khat = certificate_from_positions(pos, graph);
    const double lambda4_hat = certificate_eigenvalue(khat);
    Rng rng(29);

    for (double xi : {0.05, 0.1}) {
        const double bound = eigenvalue_bound(graph, 30, xi);
        for (int trial = 0; trial < 200; ++trial) {
            model::Rng sub = rng.substream(trial + static_cast<uint64_t>(xi * 1000));
            auto noisy = noisy_certificate(pos, graph, xi, sub);
            const double radius = delta_k_spectral_radius(noisy.delta_raw);
            CHECK(radius <= bound);
            CHECK(certificate_eigenvalue(noisy.k) >= lambda4_hat - radius - 1e-9);
        }
    }
}

TEST_CASE("degeneration detector: corollary, partition, generic cases") {
    // N = 2 planar figure-eight: pairwise coplanar, normal ~ +-e3.
    auto planar = planar_two_robot(80);
    auto rep = detect_degeneration(planar, model::VisibilityGraph::complete(2));
    CHECK(rep.degenerate);
    CHECK(rep.mechanism == DegenerationReport::Mechanism::pairwise_coplanar);
    CHECK(std::abs(std::abs(rep.plane_normal.z()) - 1.0) < 1e-6);
    CHECK(rep.lambda4 <= 1e-8 * rep.k_norm);

    // N = 5: robots {1,2,3} coplanar, {4,5} free, robot 1 sees only {2,3}.
    Rng rng(31);
    std::vector<std::vector<Eigen::Vector3d>> pos(5);
    for (int s = 0; s < 50; ++s) {
        const double t = 0.1 * s;
        pos[0].push_back({std::cos(t), std::sin(2 * t), 2.0});
        pos[1].push_back({2.0 + std::sin(t), std::cos(t), 2.0});
        pos[2].push_back({-1.0 + 0.5 * t, 1.0 + std::sin(3 * t), 2.0});
        pos[3].push_back(rng.normal3() * 2.0 + Eigen::Vector3d(5, 5, 5));
        pos[4].push_back(rng.normal3() * 2.0 - Eigen::Vector3d(5, 5, 0));
    }
    model::VisibilityGraph g(5);
    g.add_edge(1, 2);
    g.add_edge(1, 3);
    g.add_edge(2, 4);
    g.add_edge(3, 5);
    g.add_edge(4, 5);
    auto rep5 = detect_degeneration(pos, g);
    CHECK(rep5.degenerate);
    CHECK(rep5.mechanism == DegenerationReport::Mechanism::partition_condition);
    CHECK(std::abs(std::abs(rep5.plane_normal.z()) - 1.0) < 1e-6);
    CHECK(std::find(rep5.coplanar_set.begin(), rep5.coplanar_set.end(), 1) !=
          rep5.coplanar_set.end());
    CHECK(rep5.lambda4 <= 1e-8 * rep5.k_norm);

    // Generic 3-robot 3D motion: not degenerate.
    auto generic = random_positions(3, 40, 37);
    auto rep3 = detect_degeneration(generic, model::VisibilityGraph::complete(3));
    CHECK_FALSE(rep3.degenerate);
    CHECK(rep3.lambda4 > 1e-4 * rep3.k_norm);
}

TEST_CASE("empirical noise sweep starts at lambda4(K_hat) and degrades") {
    auto pos = random_positions(3, 30, 41);
    const auto graph = model::VisibilityGraph::complete(3);
    auto khat = certificate_from_positions(pos, graph);
    const double lambda4_hat = certificate_eigenvalue(khat);
    Rng rng(43);

    auto zero_grid = empirical_noise_sweep(pos, graph, {0.0}, 5, rng);
    CHECK(zero_grid.rows[0].mean_cert_eig == Catch::Approx(lambda4_hat).margin(1e-9));
    CHECK(zero_grid.rows[0].frac_certified == 1.0);

    auto sweep = empirical_noise_sweep(pos, graph, {0.0, 0.05, 0.3, 0.8, 1.4}, 10, rng);
    CHECK(sweep.rows.front().mean_cert_eig >= sweep.rows.back().mean_cert_eig);

    // Degenerate trajectories: no noise resistance at all.
    auto planar = planar_two_robot(60);
    auto dsweep = empirical_noise_sweep(planar, model::VisibilityGraph::complete(2),
                                        {0.0, 0.02}, 10, rng);
    CHECK(std::abs(dsweep.rows[0].mean_cert_eig) <= 1e-9 * 60.0);
    CHECK(dsweep.rows[1].mean_cert_eig < 0.0);
    const std::string csv = dsweep.to_csv();
    CHECK(csv.find("xi,mean_cert_eig,stddev,frac_certified") == 0);
}
