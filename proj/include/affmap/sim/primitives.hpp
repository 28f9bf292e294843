#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "affmap/core/grid_index.hpp"
#include "affmap/core/rng.hpp"
#include "affmap/percept/cloud.hpp"
#include "affmap/percept/segment.hpp"
#include "affmap/sim/scene.hpp"

namespace affmap::sim {

struct PrimitiveOutcome {
    bool executed = false;  // false iff the target was outside the workspace
    Scene scene_after;
    double gripper_aperture = 0.0;  // lift only, in [0,1]; 0 = fully closed
    bool interface_flag = false;    // button only
};

/// Unit push direction in the support plane. Deliberately oblique to both
/// grid axes so a slid face never lands back on its own sampling lattice,
/// which would hide the motion from the change detector.
inline Eigen::Vector2d push_direction() {
    return Eigen::Vector2d(1.0, 0.6).normalized();
}

/// Push primitive: a successful push on a pushable object translates it by
/// the fixed push offset. The direction flips with each successful push so
/// objects oscillate in place instead of drifting off the support plane.
inline PrimitiveOutcome apply_push(const Scene& scene, const Eigen::Vector3d& target,
                                   std::mt19937_64& gen, double fail_prob,
                                   const SimParams& params) {
    PrimitiveOutcome out;
    out.scene_after = scene;
    if (!scene.workspace.contains(target)) return out;
    out.executed = true;
    const int idx = scene.object_at(target, params.surface_tolerance);
    if (idx < 0) return out;
    SceneObject& obj = out.scene_after.objects[static_cast<std::size_t>(idx)];
    if (!obj.pushable) return out;
    if (fail_prob > 0.0 && !bernoulli(gen, 1.0 - fail_prob)) return out;
    const double parity = (obj.push_count % 2 == 0) ? 1.0 : -1.0;
    obj.position += parity * params.push_offset * push_direction();
    obj.push_count += 1;
    return out;
}

/// Change detector: a target-segment point with no counterpart in the after
/// cloud within dist_threshold witnesses a change.
inline bool detect_change(const percept::PointCloud& before, const percept::PointCloud& after,
                          const percept::Segment& target_segment, double dist_threshold) {
    if (before.empty() || after.empty()) {
        throw std::invalid_argument("detect_change: empty cloud");
    }
    const double cell = std::max(dist_threshold, 1e-4);
    GridIndex grid(cell, after.size());
    for (std::size_t i = 0; i < after.size(); ++i) {
        grid.insert(after.points[i].position, static_cast<int>(i));
    }
    for (int idx : target_segment.point_indices) {
        const Eigen::Vector3d& p = before.points[static_cast<std::size_t>(idx)].position;
        double nearest = std::numeric_limits<double>::infinity();
        grid.for_neighborhood(p, [&](int j) {
            nearest = std::min(nearest, (after.points[static_cast<std::size_t>(j)].position - p).norm());
        });
        if (nearest > dist_threshold) return true;
    }
    return false;
}

/// Button primitive: the interface flag raises iff the target falls on the
/// raised active disc of an activable button. Pressing the housing around
/// the disc does nothing.
inline PrimitiveOutcome apply_button(const Scene& scene, const Eigen::Vector3d& target,
                                     const SimParams& params) {
    PrimitiveOutcome out;
    out.scene_after = scene;
    if (!scene.workspace.contains(target)) return out;
    out.executed = true;
    out.interface_flag = scene.active_disc_at(target, params.surface_tolerance) >= 0;
    out.scene_after.interface_flag = out.interface_flag;
    return out;
}

inline bool detect_button_effect(const PrimitiveOutcome& outcome) { return outcome.interface_flag; }

/// Lift primitive: grasping a liftable object leaves the gripper open by the
/// object width fraction; anything else closes it fully. Objects are set
/// back down where they were, so the scene pose is unchanged.
inline PrimitiveOutcome apply_lift(const Scene& scene, const Eigen::Vector3d& target,
                                   std::mt19937_64& gen, double fail_prob,
                                   const SimParams& params) {
    PrimitiveOutcome out;
    out.scene_after = scene;
    if (!scene.workspace.contains(target)) return out;
    out.executed = true;
    const int idx = scene.object_at(target, params.surface_tolerance);
    if (idx < 0) return out;
    const SceneObject& obj = scene.objects[static_cast<std::size_t>(idx)];
    if (!obj.liftable) return out;
    if (fail_prob > 0.0 && !bernoulli(gen, 1.0 - fail_prob)) return out;
    const double width = obj.shape == ShapeKind::box ? std::min(obj.size.x(), obj.size.y())
                                                     : obj.size.x();
    out.gripper_aperture = std::min(1.0, width / params.gripper_max_width);
    return out;
}

inline bool detect_lift(const PrimitiveOutcome& outcome) { return outcome.gripper_aperture > 0.0; }

inline double effective_change_threshold(const SimParams& params, const NoiseParams& noise) {
    return params.change_threshold >= 0.0 ? params.change_threshold : 3.0 * noise.sigma_depth;
}

}  // namespace affmap::sim
