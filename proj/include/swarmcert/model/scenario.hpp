#ifndef SWARMCERT_MODEL_SCENARIO_HPP
#define SWARMCERT_MODEL_SCENARIO_HPP

#include "swarmcert/model/bearing.hpp"
#include "swarmcert/model/pose.hpp"
#include "swarmcert/model/visibility_graph.hpp"
#include "swarmcert/trajectory/quintic_spline.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmcert::model {

class ScenarioParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RobotSpec {
    int id = 0;
    Pose initial_pose;
};

// Exported trajectory parameters (enough to re-fit the spline exactly).
struct TrajectorySpec {
    std::vector<double> durations;
    std::vector<Eigen::Vector3d> waypoints;
    traj::BoundaryState start;
    traj::BoundaryState end;

    traj::QuinticSpline fit() const {
        return traj::fit_min_jerk(start, end, waypoints, durations);
    }
};

// Versioned scenario document: robots with ground-truth initial poses, the
// intervisibility graph, optional trajectories, bearing records and the
// noise model that produced them. All angles radians, lengths meters,
// times seconds.
struct Scenario {
    std::vector<RobotSpec> robots;
    VisibilityGraph graph;
    std::vector<TrajectorySpec> trajectories;
    std::vector<BearingRecord> records;
    NoiseModel noise;

    int n_robots() const { return static_cast<int>(robots.size()); }
};

namespace scenario_json {

using nlohmann::json;

inline json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Eigen::Vector3d vec3_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3)
        throw ScenarioParseError(path + ": expected array of 3 numbers");
    for (const auto& e : j)
        if (!e.is_number()) throw ScenarioParseError(path + ": expected numeric entries");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json pose_to_json(const Pose& p) {
    json r = json::array();
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) r.push_back(p.rotation(i, c));
    return json{{"R", r}, {"t", vec3_to_json(p.translation)}};
}

inline Pose pose_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("R") || !j.contains("t"))
        throw ScenarioParseError(path + ": expected {R, t}");
    const json& r = j["R"];
    if (!r.is_array() || r.size() != 9)
        throw ScenarioParseError(path + ".R: expected 9 floats row-major");
    Pose p;
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) p.rotation(i, c) = r[3 * i + c].get<double>();
    p.translation = vec3_from_json(j["t"], path + ".t");
    if (!p.valid(1e-6)) throw ScenarioParseError(path + ".R: not a rotation matrix");
    return p;
}

inline json boundary_to_json(const traj::BoundaryState& b) {
    return json{{"p", vec3_to_json(b.position)},
                {"v", vec3_to_json(b.velocity)},
                {"a", vec3_to_json(b.acceleration)}};
}

inline traj::BoundaryState boundary_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ScenarioParseError(path + ": expected {p, v, a}");
    traj::BoundaryState b;
    b.position = vec3_from_json(j.at("p"), path + ".p");
    b.velocity = vec3_from_json(j.at("v"), path + ".v");
    b.acceleration = vec3_from_json(j.at("a"), path + ".a");
    return b;
}

}  // namespace scenario_json

inline nlohmann::json scenario_to_json(const Scenario& s) {
    using nlohmann::json;
    using namespace scenario_json;

    json j;
    j["version"] = "v1";
    j["robots"] = json::array();
    for (const auto& r : s.robots)
        j["robots"].push_back({{"id", r.id}, {"initial_pose", pose_to_json(r.initial_pose)}});

    json edges = json::array();
    for (const auto& [a, b] : s.graph.edges()) edges.push_back(json::array({a, b}));
    j["graph"] = {{"edges", edges}};

    j["trajectories"] = json::array();
    for (const auto& t : s.trajectories) {
        json wp = json::array();
        for (const auto& w : t.waypoints) wp.push_back(vec3_to_json(w));
        j["trajectories"].push_back({{"durations", t.durations},
                                     {"waypoints", wp},
                                     {"start", boundary_to_json(t.start)},
                                     {"end", boundary_to_json(t.end)}});
    }

    j["records"] = json::array();
    for (const auto& r : s.records)
        j["records"].push_back({{"i", r.observer},
                                {"j", r.target},
                                {"t", r.time},
                                {"b", vec3_to_json(r.bearing)},
                                {"odom_i", pose_to_json(r.odom_observer)},
                                {"odom_j", pose_to_json(r.odom_target)}});

    json noise;
    noise["kind"] = s.noise.kind == NoiseModel::Kind::gaussian ? "gaussian" : "bounded";
    if (s.noise.kind == NoiseModel::Kind::gaussian)
        noise["sigma"] = s.noise.sigma;
    else
        noise["xi"] = s.noise.xi;
    noise["seed"] = s.noise.seed;
    j["noise"] = noise;
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    using namespace scenario_json;

    if (!j.is_object() || !j.contains("version"))
        throw ScenarioParseError("document: missing version field");
    if (j["version"].get<std::string>() != "v1")
        throw ScenarioParseError("version: expected \"v1\"");

    Scenario s;
    if (!j.contains("robots") || !j["robots"].is_array() || j["robots"].empty())
        throw ScenarioParseError("robots: expected nonempty array");
    int idx = 0;
    for (const auto& r : j["robots"]) {
        const std::string path = "robots[" + std::to_string(idx) + "]";
        RobotSpec spec;
        if (!r.contains("id")) throw ScenarioParseError(path + ".id: missing");
        spec.id = r["id"].get<int>();
        spec.initial_pose = pose_from_json(r.at("initial_pose"), path + ".initial_pose");
        s.robots.push_back(spec);
        ++idx;
    }
    const int n = s.n_robots();
    for (int k = 0; k < n; ++k)
        if (s.robots[k].id != k + 1)
            throw ScenarioParseError("robots[" + std::to_string(k) +
                                     "].id: ids must be 1..N in order");

    s.graph = VisibilityGraph(n);
    if (j.contains("graph")) {
        for (size_t e = 0; e < j["graph"].at("edges").size(); ++e) {
            const auto& edge = j["graph"]["edges"][e];
            const std::string path = "graph.edges[" + std::to_string(e) + "]";
            if (!edge.is_array() || edge.size() != 2)
                throw ScenarioParseError(path + ": expected pair [i, j]");
            try {
                s.graph.add_edge(edge[0].get<int>(), edge[1].get<int>());
            } catch (const std::invalid_argument& ex) {
                throw ScenarioParseError(path + ": " + ex.what());
            }
        }
    }

    if (j.contains("trajectories")) {
        idx = 0;
        for (const auto& t : j["trajectories"]) {
            const std::string path = "trajectories[" + std::to_string(idx) + "]";
            TrajectorySpec spec;
            for (const auto& d : t.at("durations")) {
                spec.durations.push_back(d.get<double>());
                if (!(spec.durations.back() > 0.0))
                    throw ScenarioParseError(path + ".durations: must be positive");
            }
            size_t w = 0;
            for (const auto& wp : t.at("waypoints"))
                spec.waypoints.push_back(
                    vec3_from_json(wp, path + ".waypoints[" + std::to_string(w++) + "]"));
            spec.start = boundary_from_json(t.at("start"), path + ".start");
            spec.end = boundary_from_json(t.at("end"), path + ".end");
            if (spec.waypoints.size() + 1 != spec.durations.size())
                throw ScenarioParseError(path + ": waypoints must number durations - 1");
            s.trajectories.push_back(std::move(spec));
            ++idx;
        }
        if (!s.trajectories.empty() && static_cast<int>(s.trajectories.size()) != n)
            throw ScenarioParseError("trajectories: need one per robot (or none)");
    }

    if (j.contains("records")) {
        idx = 0;
        for (const auto& r : j["records"]) {
            const std::string path = "records[" + std::to_string(idx) + "]";
            BearingRecord rec;
            rec.observer = r.at("i").get<int>();
            rec.target = r.at("j").get<int>();
            rec.time = r.at("t").get<double>();
            rec.bearing = vec3_from_json(r.at("b"), path + ".b");
            rec.odom_observer = pose_from_json(r.at("odom_i"), path + ".odom_i");
            rec.odom_target = pose_from_json(r.at("odom_j"), path + ".odom_j");
            if (rec.observer < 1 || rec.observer > n || rec.target < 1 || rec.target > n)
                throw ScenarioParseError(path + ": robot id out of range");
            if (rec.observer == rec.target)
                throw ScenarioParseError(path + ": observer equals target");
            if (std::abs(rec.bearing.norm() - 1.0) > 1e-9)
                throw ScenarioParseError(path + ".b: bearing norm " +
                                         std::to_string(rec.bearing.norm()) +
                                         " violates unit invariant");
            s.records.push_back(rec);
            ++idx;
        }
    }

    if (j.contains("noise")) {
        const auto& noise = j["noise"];
        const std::string kind = noise.at("kind").get<std::string>();
        if (kind == "gaussian") {
            s.noise.kind = NoiseModel::Kind::gaussian;
            s.noise.sigma = noise.at("sigma").get<double>();
        } else if (kind == "bounded") {
            s.noise.kind = NoiseModel::Kind::bounded;
            s.noise.xi = noise.at("xi").get<double>();
        } else {
            throw ScenarioParseError("noise.kind: expected gaussian or bounded");
        }
        s.noise.seed = noise.at("seed").get<uint64_t>();
        if (!s.noise.valid()) throw ScenarioParseError("noise: invalid parameters");
    }
    return s;
}

inline void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_scenario: cannot open " + path);
    f << scenario_to_json(s).dump(1) << "\n";
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_scenario: cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ScenarioParseError(std::string("json parse failure: ") + ex.what());
    }
    return scenario_from_json(j);
}

inline bool operator==(const Pose& a, const Pose& b) {
    return a.rotation == b.rotation && a.translation == b.translation;
}

inline bool operator==(const BearingRecord& a, const BearingRecord& b) {
    return a.observer == b.observer && a.target == b.target && a.time == b.time &&
           a.bearing == b.bearing && a.odom_observer == b.odom_observer &&
           a.odom_target == b.odom_target;
}

inline bool operator==(const Scenario& a, const Scenario& b) {
    if (a.n_robots() != b.n_robots() || a.records.size() != b.records.size() ||
        a.trajectories.size() != b.trajectories.size())
        return false;
    for (int i = 0; i < a.n_robots(); ++i) {
        if (a.robots[i].id != b.robots[i].id) return false;
        if (!(a.robots[i].initial_pose == b.robots[i].initial_pose)) return false;
    }
    if (a.graph.edges() != b.graph.edges()) return false;
    for (size_t i = 0; i < a.trajectories.size(); ++i) {
        const auto& x = a.trajectories[i];
        const auto& y = b.trajectories[i];
        if (x.durations != y.durations || x.waypoints.size() != y.waypoints.size())
            return false;
        for (size_t w = 0; w < x.waypoints.size(); ++w)
            if (x.waypoints[w] != y.waypoints[w]) return false;
        if (x.start.position != y.start.position || x.start.velocity != y.start.velocity ||
            x.start.acceleration != y.start.acceleration)
            return false;
        if (x.end.position != y.end.position || x.end.velocity != y.end.velocity ||
            x.end.acceleration != y.end.acceleration)
            return false;
    }
    for (size_t i = 0; i < a.records.size(); ++i)
        if (!(a.records[i] == b.records[i])) return false;
    return a.noise.kind == b.noise.kind && a.noise.sigma == b.noise.sigma &&
           a.noise.xi == b.noise.xi && a.noise.seed == b.noise.seed;
}

}  // namespace swarmcert::model

#endif
