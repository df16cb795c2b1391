#ifndef SWARMCERT_ESTIMATOR_PIPELINE_HPP
#define SWARMCERT_ESTIMATOR_PIPELINE_HPP

#include "swarmcert/certificate/certificate_matrix.hpp"
#include "swarmcert/estimator/recovery.hpp"

#include <json.hpp>

#include <optional>

namespace swarmcert::estimator {

// Full estimator output: gauge anchored to robot 1 (R_1 = I, t_1 = 0).
struct EstimationResult {
    RotationSet rotations;
    std::vector<Eigen::Vector3d> translations;
    std::map<DistanceKey, double> distances;
    bool certified = false;
    double certificate_eigenvalue = 0.0;
    double residual = 0.0;  // MLE cost Tr(M Theta^T Theta) at the estimate
    double gap = 0.0;
    bool rank_flag = false;           // higher-rank Z (estimate unreliable)
    bool negative_distance_flag = false;
    bool translation_rank_deficient = false;
    SolveStatus solve_status = SolveStatus::converged;
    int dropped_records = 0;
    double duality_gap_rel = 0.0;
    double lambda_symmetry_defect = 0.0;
    double stationarity = 0.0;  // ||(M - Lambda*) Theta*^T||_F
};

struct EstimateOptions {
    RelaxationOptions relaxation;
    // certified iff certificate eigenvalue >= -certify_tol * ||M||_F
    double certify_tol = 1e-7;
    bool refine = false;  // polish the rounded solution with local descent
};

inline EstimationResult estimate_from_matrix(const DataMatrixM& m,
                                             const EstimateOptions& opt = {}) {
    EstimationResult out;
    out.dropped_records = m.dropped_count;

    RelaxationSolution sol = solve_relaxation(m, opt.relaxation);
    out.solve_status = sol.status;
    out.gap = sol.gap;
    out.duality_gap_rel =
        std::abs(sol.gap) / std::max(1.0, std::abs(sol.primal_value));

    auto rec = recover_rotations(sol, opt.relaxation.rank_tol);
    out.rank_flag = rec.higher_rank_flag;
    out.rotations = rec.rotations;
    if (opt.refine) {
        out.rotations = gauge_fix(refine_local(out.rotations, m).theta);
    }
    out.residual = rotation_cost(m, out.rotations);

    const auto lam = lambda_star(m, out.rotations);
    out.lambda_symmetry_defect = lam.symmetry_defect;
    out.stationarity = stationarity_residual(m, out.rotations, lam);

    const auto k = cert::certificate_from_solution(m, out.rotations);
    out.certificate_eigenvalue = cert::certificate_eigenvalue(k);
    out.certified =
        out.certificate_eigenvalue >= -opt.certify_tol * m.m.normFrobenius() &&
        !out.rank_flag;

    try {
        auto trans = recover_translations(out.rotations, m.pairs);
        out.translations = trans.translations;
        out.distances = trans.distances;
        out.negative_distance_flag = trans.negative_distance_flag;
    } catch (const RankDeficiencyError&) {
        // Degenerate geometry: rotations stand, translations are undetermined.
        out.translation_rank_deficient = true;
        out.translations.assign(m.n_robots, Eigen::Vector3d::Zero());
        out.certified = false;
    }
    return out;
}

inline EstimationResult estimate(const std::vector<model::BearingRecord>& records,
                                 const model::VisibilityGraph& graph,
                                 const EstimateOptions& opt = {}) {
    return estimate_from_matrix(assemble_data_matrix(records, graph), opt);
}

inline nlohmann::json estimation_result_to_json(const EstimationResult& r) {
    nlohmann::json j;
    j["rotations"] = nlohmann::json::array();
    for (const auto& rot : r.rotations) {
        nlohmann::json m = nlohmann::json::array();
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) m.push_back(rot(i, c));
        j["rotations"].push_back(m);
    }
    j["translations"] = nlohmann::json::array();
    for (const auto& t : r.translations)
        j["translations"].push_back({t.x(), t.y(), t.z()});
    j["distances"] = nlohmann::json::array();
    for (const auto& [key, d] : r.distances)
        j["distances"].push_back({{"i", key.i}, {"j", key.j}, {"t", key.time}, {"d", d}});
    j["certified"] = r.certified;
    j["certificate_eigenvalue"] = r.certificate_eigenvalue;
    j["residual"] = r.residual;
    j["gap"] = r.gap;
    j["rank_flag"] = r.rank_flag;
    return j;
}

}  // namespace swarmcert::estimator

#endif
