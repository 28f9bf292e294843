#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace affmap::sim {

enum class ActionKind { push, button, lift };

inline std::string to_string(ActionKind a) {
    switch (a) {
        case ActionKind::push: return "push";
        case ActionKind::button: return "button";
        case ActionKind::lift: return "lift";
    }
    return "push";
}

inline ActionKind action_from_string(const std::string& s) {
    if (s == "push") return ActionKind::push;
    if (s == "button") return ActionKind::button;
    if (s == "lift") return ActionKind::lift;
    throw std::invalid_argument("unknown action: " + s);
}

enum class ShapeKind { box, cylinder };

/// Tabletop object resting on the support plane (z = 0, z up).
struct SceneObject {
    std::string name;
    ShapeKind shape = ShapeKind::box;
    Eigen::Vector3d size = {0.1, 0.1, 0.1};  // box full extents; cylinder uses x = diameter, z = height
    Eigen::Vector2d position = {0.0, 0.0};   // footprint center on the support plane
    Eigen::Vector3d color_lab = {50.0, 0.0, 0.0};
    bool pushable = false;
    bool liftable = false;
    int push_count = 0;  // parity selects the push direction so objects oscillate in place

    double height() const { return size.z(); }
    double radius() const { return shape == ShapeKind::cylinder ? 0.5 * size.x() : 0.0; }

    /// Signed distance to the object surface; <= 0 inside.
    double signed_distance(const Eigen::Vector3d& p) const {
        if (shape == ShapeKind::box) {
            const Eigen::Vector3d center(position.x(), position.y(), 0.5 * size.z());
            const Eigen::Vector3d q = (p - center).cwiseAbs() - 0.5 * size;
            const double outside = q.cwiseMax(0.0).norm();
            const double inside = std::min(q.maxCoeff(), 0.0);
            return outside + inside;
        }
        const double dr = std::hypot(p.x() - position.x(), p.y() - position.y()) - radius();
        const double dz = std::abs(p.z() - 0.5 * size.z()) - 0.5 * size.z();
        const double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
        const double inside = std::min(std::max(dr, dz), 0.0);
        return outside + inside;
    }
};

/// Push button mounted on the vertical back plane. Only the raised central
/// disc activates the interface; the housing is inert.
struct Button {
    std::string name;
    Eigen::Vector2d center = {0.0, 0.15};  // (x, z) on the back plane
    double housing_half = 0.032;
    double housing_depth = 0.012;
    double active_radius = 0.02;
    double disc_depth = 0.006;
    bool activable = true;
    Eigen::Vector3d housing_color = {90.0, 2.0, 6.0};
    Eigen::Vector3d disc_color = {42.0, 12.0, -58.0};
};

struct NoiseParams {
    double sigma_depth = 0.0;  // meters, isotropic positional noise
    double sigma_color = 0.0;  // CIELab units per channel
};

struct SimParams {
    double push_offset = 0.045;        // meters, fixed displacement per successful push
    double surface_tolerance = 0.012;  // target-on-surface tolerance
    double gripper_max_width = 0.12;   // aperture normalization for lift
    double fail_prob = 0.0;            // primitive failure probability
    double change_threshold = -1.0;    // <0: use 3 * sigma_depth
};

/// World state: support plane, vertical back plane with buttons, movable
/// objects, and the button-interface flag.
struct Scene {
    Eigen::AlignedBox2d support{Eigen::Vector2d(-0.5, -0.3), Eigen::Vector2d(0.5, 0.3)};
    Eigen::Vector3d support_color = {82.0, 0.0, 2.0};
    double back_y = 0.3;
    double back_height = 0.35;
    Eigen::Vector3d back_color = {93.0, 0.0, 1.0};
    std::vector<SceneObject> objects;
    std::vector<Button> buttons;
    bool interface_flag = false;
    Eigen::AlignedBox3d workspace{Eigen::Vector3d(-0.7, -0.5, -0.05), Eigen::Vector3d(0.7, 0.5, 0.6)};
    double render_density = 16000.0;  // points per square meter

    /// Index of the object whose surface contains p (within tol), -1 if none.
    int object_at(const Eigen::Vector3d& p, double tol) const {
        int best = -1;
        double best_d = tol;
        for (std::size_t i = 0; i < objects.size(); ++i) {
            const double d = objects[i].signed_distance(p);
            if (d <= best_d) { best_d = d; best = static_cast<int>(i); }
        }
        return best;
    }

    double button_disc_face_y(const Button& b) const {
        return back_y - b.housing_depth - b.disc_depth;
    }

    /// Index of the activable button whose raised disc contains p, -1 if none.
    int active_disc_at(const Eigen::Vector3d& p, double tol) const {
        for (std::size_t j = 0; j < buttons.size(); ++j) {
            const Button& b = buttons[j];
            if (!b.activable) continue;
            const double radial = std::hypot(p.x() - b.center.x(), p.z() - b.center.y());
            if (radial > b.active_radius + tol) continue;
            if (p.y() < button_disc_face_y(b) - tol || p.y() > back_y - b.housing_depth + tol) continue;
            return static_cast<int>(j);
        }
        return -1;
    }
};

// Point-source identifiers assigned by the renderer.
inline constexpr std::int32_t kSourceSupport = 0;
inline constexpr std::int32_t kSourceBack = 1;
inline std::int32_t source_object(std::size_t i) { return 10 + static_cast<std::int32_t>(i); }
inline std::int32_t source_button_housing(std::size_t j) { return 1000 + 2 * static_cast<std::int32_t>(j); }
inline std::int32_t source_button_disc(std::size_t j) { return 1001 + 2 * static_cast<std::int32_t>(j); }

/// Ground truth: does the scene element behind a source id afford the action?
inline bool source_affords(const Scene& scene, std::int32_t source, ActionKind action) {
    if (source >= 1000) {
        const std::size_t j = static_cast<std::size_t>((source - 1000) / 2);
        if (j >= scene.buttons.size()) return false;
        // The whole button counts as ground truth for the button affordance,
        // although only the disc activates; this is the approximate ground
        // truth the metrics are measured against.
        return action == ActionKind::button && scene.buttons[j].activable;
    }
    if (source >= 10) {
        const std::size_t i = static_cast<std::size_t>(source - 10);
        if (i >= scene.objects.size()) return false;
        if (action == ActionKind::push) return scene.objects[i].pushable;
        if (action == ActionKind::lift) return scene.objects[i].liftable;
        return false;
    }
    return false;
}

namespace detail {
inline Eigen::Vector3d vec3_from_json(const nlohmann::json& a) {
    return {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
}
inline Eigen::Vector2d vec2_from_json(const nlohmann::json& a) {
    return {a.at(0).get<double>(), a.at(1).get<double>()};
}
}  // namespace detail

struct Scenario {
    Scene scene;
    NoiseParams noise;
    SimParams sim;
    double seg_r_seed = 0.035;
    double seg_lambda = 0.2;
    double seg_mu = 0.4;
    double seg_epsilon = 1.0;
    double seg_color_norm = 100.0;
    double seg_point_spfh_radius = 0.02;
    double seg_adjacency_radius = 0.02;
    double fpfh_radius = 0.15;
    double cmm_alpha = 0.6;
    int cmm_k_max = 4;
    double cmm_init_cov_scale = 1.0;
    double cmm_cov_regularization = 1e-6;
};

inline Scenario scenario_from_json(const nlohmann::json& doc) {
    if (doc.value("format", "") != "affmap-scenario") throw std::runtime_error("not a scenario file");
    if (doc.value("version", -1) != 1) throw std::runtime_error("unsupported scenario version");
    Scenario sc;
    Scene& s = sc.scene;

    const auto& sup = doc.at("support");
    s.support = Eigen::AlignedBox2d(
        Eigen::Vector2d(sup.at("x").at(0).get<double>(), sup.at("y").at(0).get<double>()),
        Eigen::Vector2d(sup.at("x").at(1).get<double>(), sup.at("y").at(1).get<double>()));
    s.support_color = detail::vec3_from_json(sup.at("color_lab"));

    const auto& back = doc.at("back_plane");
    s.back_y = back.at("y").get<double>();
    s.back_height = back.at("height").get<double>();
    s.back_color = detail::vec3_from_json(back.at("color_lab"));

    const auto& ws = doc.at("workspace");
    s.workspace = Eigen::AlignedBox3d(detail::vec3_from_json(ws.at("min")),
                                      detail::vec3_from_json(ws.at("max")));
    s.render_density = doc.value("render_density", 16000.0);

    for (const auto& jo : doc.value("objects", nlohmann::json::array())) {
        SceneObject o;
        o.name = jo.value("name", "object");
        const std::string shape = jo.value("shape", "box");
        if (shape == "box") {
            o.shape = ShapeKind::box;
            o.size = detail::vec3_from_json(jo.at("size"));
        } else if (shape == "cylinder") {
            o.shape = ShapeKind::cylinder;
            const double r = jo.at("radius").get<double>();
            const double h = jo.at("height").get<double>();
            o.size = {2.0 * r, 2.0 * r, h};
        } else {
            throw std::runtime_error("unknown shape: " + shape);
        }
        o.position = detail::vec2_from_json(jo.at("position"));
        o.color_lab = detail::vec3_from_json(jo.at("color_lab"));
        o.pushable = jo.value("pushable", false);
        o.liftable = jo.value("liftable", false);
        s.objects.push_back(std::move(o));
    }

    for (const auto& jb : doc.value("buttons", nlohmann::json::array())) {
        Button b;
        b.name = jb.value("name", "button");
        b.center = detail::vec2_from_json(jb.at("center"));
        b.housing_half = jb.value("housing_half", b.housing_half);
        b.housing_depth = jb.value("housing_depth", b.housing_depth);
        b.active_radius = jb.value("active_radius", b.active_radius);
        b.disc_depth = jb.value("disc_depth", b.disc_depth);
        b.activable = jb.value("activable", true);
        if (jb.contains("housing_color_lab")) b.housing_color = detail::vec3_from_json(jb.at("housing_color_lab"));
        if (jb.contains("disc_color_lab")) b.disc_color = detail::vec3_from_json(jb.at("disc_color_lab"));
        s.buttons.push_back(std::move(b));
    }

    if (doc.contains("noise")) {
        sc.noise.sigma_depth = doc.at("noise").value("sigma_depth", 0.0);
        sc.noise.sigma_color = doc.at("noise").value("sigma_color", 0.0);
    }
    if (doc.contains("sim")) {
        const auto& js = doc.at("sim");
        sc.sim.push_offset = js.value("push_offset", sc.sim.push_offset);
        sc.sim.surface_tolerance = js.value("surface_tolerance", sc.sim.surface_tolerance);
        sc.sim.gripper_max_width = js.value("gripper_max_width", sc.sim.gripper_max_width);
        sc.sim.fail_prob = js.value("fail_prob", 0.0);
        sc.sim.change_threshold = js.value("change_threshold", -1.0);
    }
    if (doc.contains("segmentation")) {
        const auto& jg = doc.at("segmentation");
        sc.seg_r_seed = jg.value("r_seed", sc.seg_r_seed);
        sc.seg_lambda = jg.value("lambda", sc.seg_lambda);
        sc.seg_mu = jg.value("mu", sc.seg_mu);
        sc.seg_epsilon = jg.value("epsilon", sc.seg_epsilon);
        sc.seg_color_norm = jg.value("color_norm", sc.seg_color_norm);
        sc.seg_point_spfh_radius = jg.value("point_spfh_radius", sc.seg_point_spfh_radius);
        sc.seg_adjacency_radius = jg.value("adjacency_radius", sc.seg_adjacency_radius);
    }
    sc.fpfh_radius = doc.value("fpfh_radius", sc.fpfh_radius);
    if (doc.contains("cmm")) {
        const auto& jm = doc.at("cmm");
        sc.cmm_alpha = jm.value("alpha", sc.cmm_alpha);
        sc.cmm_k_max = jm.value("k_max", sc.cmm_k_max);
        sc.cmm_init_cov_scale = jm.value("init_cov_scale", sc.cmm_init_cov_scale);
        sc.cmm_cov_regularization = jm.value("cov_regularization", sc.cmm_cov_regularization);
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario: " + path);
    nlohmann::json doc;
    in >> doc;
    return scenario_from_json(doc);
}

}  // namespace affmap::sim
