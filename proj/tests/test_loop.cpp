#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "affmap/explore/loop.hpp"

using affmap::cmm::Label;
using affmap::explore::ExplorationState;
using affmap::explore::exploration_step;
using affmap::explore::StepConfig;
using affmap::sim::ActionKind;
using affmap::sim::Scene;
using affmap::sim::SceneObject;

namespace {

affmap::cmm::MixtureClassifier fresh_classifier(std::uint64_t seed) {
    affmap::cmm::CmmConfig cfg;
    cfg.feature_dim = affmap::percept::kFeatureDim;
    return affmap::cmm::MixtureClassifier(cfg, seed);
}

StepConfig step_config(ActionKind action) {
    StepConfig cfg;
    cfg.action = action;
    cfg.noise.sigma_depth = 0.0002;
    cfg.noise.sigma_color = 0.5;
    cfg.seg.r_seed = 0.05;
    cfg.seg.adjacency_radius = 0.02;
    cfg.sim.push_offset = 0.04;
    cfg.sim.change_threshold = 0.0015;
    cfg.bootstrap_quota = 10;
    return cfg;
}

/// A scene whose every visible surface belongs to one pushable slab: every
/// push produces an effect.
Scene all_pushable_scene() {
    Scene s;
    s.support = Eigen::AlignedBox2d(Eigen::Vector2d(-0.2, -0.2), Eigen::Vector2d(0.2, 0.2));
    s.back_height = 0.0;
    s.render_density = 9000.0;
    SceneObject slab;
    slab.name = "slab";
    slab.shape = affmap::sim::ShapeKind::box;
    slab.size = {0.5, 0.5, 0.05};  // covers the whole support plane
    slab.position = {0.0, 0.0};
    slab.color_lab = {60, 30, 20};
    slab.pushable = true;
    s.objects.push_back(slab);
    s.workspace = Eigen::AlignedBox3d(Eigen::Vector3d(-1, -1, -0.1), Eigen::Vector3d(1, 1, 1));
    return s;
}

/// Mostly background with one small pushable cube: positives are rare.
Scene rare_positive_scene() {
    Scene s;
    s.support = Eigen::AlignedBox2d(Eigen::Vector2d(-0.3, -0.25), Eigen::Vector2d(0.3, 0.25));
    s.back_height = 0.0;
    s.render_density = 9000.0;
    SceneObject cube;
    cube.name = "cube";
    cube.shape = affmap::sim::ShapeKind::box;
    cube.size = {0.07, 0.07, 0.07};
    cube.position = {0.1, 0.05};
    cube.color_lab = {48, 60, 40};
    cube.pushable = true;
    s.objects.push_back(cube);
    s.workspace = Eigen::AlignedBox3d(Eigen::Vector3d(-1, -1, -0.1), Eigen::Vector3d(1, 1, 1));
    return s;
}

}  // namespace

TEST_CASE("every interaction in an all-pushable world is labeled effect") {
    Scene world = all_pushable_scene();
    const StepConfig cfg = step_config(ActionKind::push);
    ExplorationState state{fresh_classifier(5), 0, cfg.bootstrap_quota, {}};
    std::mt19937_64 rng(99);
    for (int i = 0; i < 15; ++i) {
        const auto rec = exploration_step(state, world, cfg, rng);
        CHECK(rec.effect);
        CHECK(rec.executed);
    }
    CHECK(state.classifier.sample_count(Label::effect) == 15);
    CHECK(state.classifier.sample_count(Label::no_effect) == 0);
    CHECK(state.interaction_count == 15);
    CHECK(state.history.size() == 15);
}

TEST_CASE("bootstrap ends only when both classes hold the quota") {
    Scene world = rare_positive_scene();
    const StepConfig cfg = step_config(ActionKind::push);
    ExplorationState state{fresh_classifier(3), 0, cfg.bootstrap_quota, {}};
    std::mt19937_64 rng(11);

    long first_policy_step = -1;
    for (int i = 0; i < 300 && first_policy_step < 0; ++i) {
        const std::size_t n_e = state.classifier.sample_count(Label::effect);
        const std::size_t n_ne = state.classifier.sample_count(Label::no_effect);
        const bool expect_bootstrap = std::min(n_e, n_ne) < 10;
        const auto rec = exploration_step(state, world, cfg, rng);
        CHECK(rec.bootstrap == expect_bootstrap);
        if (!rec.bootstrap) first_policy_step = rec.iteration;
    }
    REQUIRE(first_policy_step > 0);
    // the step before the first policy step completed the quota
    std::size_t n_e = 0, n_ne = 0;
    for (const auto& rec : state.history) {
        if (rec.iteration >= first_policy_step) break;
        (rec.effect ? n_e : n_ne) += 1;
    }
    CHECK(std::min(n_e, n_ne) >= 10);
    // and it was the first time both quotas held
    std::size_t pe = 0, pne = 0;
    for (const auto& rec : state.history) {
        if (rec.iteration >= first_policy_step - 1) break;
        (rec.effect ? pe : pne) += 1;
    }
    CHECK(std::min(pe, pne) < 10);
}

TEST_CASE("exploration steps are reproducible under identical seeds") {
    const StepConfig cfg = step_config(ActionKind::push);
    Scene w1 = rare_positive_scene(), w2 = rare_positive_scene();
    ExplorationState s1{fresh_classifier(21), 0, 10, {}};
    ExplorationState s2{fresh_classifier(21), 0, 10, {}};
    std::mt19937_64 r1(77), r2(77);
    for (int i = 0; i < 25; ++i) {
        const auto a = exploration_step(s1, w1, cfg, r1);
        const auto b = exploration_step(s2, w2, cfg, r2);
        CHECK(a.segment_id == b.segment_id);
        CHECK(a.effect == b.effect);
        CHECK(a.feature == b.feature);
        CHECK(a.p_before == b.p_before);
    }
}

TEST_CASE("ground truth follows the majority point source per segment") {
    Scene world = rare_positive_scene();
    const StepConfig cfg = step_config(ActionKind::push);
    std::mt19937_64 rng(5);
    const auto cloud = affmap::percept::render(world, cfg.noise, rng);
    const auto segments = affmap::percept::segment(cloud, cfg.seg);
    const auto gt = affmap::explore::frame_ground_truth(world, cloud, segments, ActionKind::push);
    REQUIRE(gt.size() == segments.size());
    int positives = 0;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (gt[s] == 0) ++positives;
        // lift ground truth must be empty: nothing is liftable here
    }
    CHECK(positives > 0);
    const auto gt_lift =
        affmap::explore::frame_ground_truth(world, cloud, segments, ActionKind::lift);
    for (int d : gt_lift) CHECK(d == 1);
}
