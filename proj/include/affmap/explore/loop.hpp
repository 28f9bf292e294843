#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "affmap/cmm/classifier.hpp"
#include "affmap/core/rng.hpp"
#include "affmap/explore/choice_map.hpp"
#include "affmap/explore/uncertainty.hpp"
#include "affmap/metrics/metrics.hpp"
#include "affmap/percept/features.hpp"
#include "affmap/percept/render.hpp"
#include "affmap/percept/segment.hpp"
#include "affmap/sim/primitives.hpp"
#include "affmap/sim/scene.hpp"

namespace affmap::explore {

struct InteractionRecord {
    long iteration = 0;
    int segment_id = -1;
    Eigen::Vector3d target = Eigen::Vector3d::Zero();
    sim::ActionKind action = sim::ActionKind::push;
    bool executed = false;
    bool effect = false;
    bool bootstrap = false;  // target drawn uniformly during the bootstrap phase
    double p_before = 0.5;
    double uncertainty = 1.0;
    double confidence = 0.0;
    Eigen::VectorXd feature;
};

/// Everything observed in one frame, kept for metrics and map dumps.
struct FrameData {
    percept::PointCloud cloud;
    std::vector<percept::Segment> segments;
    std::vector<Eigen::VectorXd> features;
    std::vector<double> predictions;  // classifier posterior per segment
    std::vector<double> map_weights;  // composite weights when a bias map applies
    metrics::GroundTruth ground_truth;
};

struct StepConfig {
    sim::ActionKind action = sim::ActionKind::push;
    sim::NoiseParams noise;
    percept::SegmentationParams seg;
    double fpfh_radius = 0.15;
    sim::SimParams sim;
    int bootstrap_quota = 10;
    // Frozen prerequisite classifier for composite affordances: its
    // predictions multiply both the relevance weights and the choice scores.
    const cmm::MixtureClassifier* bias = nullptr;
};

struct ExplorationState {
    cmm::MixtureClassifier classifier;
    long interaction_count = 0;
    int bootstrap_quota = 10;
    std::vector<InteractionRecord> history;
};

/// Majority point source of each segment, mapped to the ground-truth flag of
/// the scene element for the current action.
inline metrics::GroundTruth frame_ground_truth(const sim::Scene& scene,
                                               const percept::PointCloud& cloud,
                                               const std::vector<percept::Segment>& segments,
                                               sim::ActionKind action) {
    metrics::GroundTruth gt(segments.size(), 1);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        std::map<std::int32_t, int> counts;
        for (int idx : segments[s].point_indices) {
            counts[cloud.source[static_cast<std::size_t>(idx)]] += 1;
        }
        std::int32_t majority = -1;
        int best = -1;
        for (const auto& [src, n] : counts) {
            if (n > best) { best = n; majority = src; }
        }
        gt[s] = sim::source_affords(scene, majority, action) ? 0 : 1;
    }
    return gt;
}

/// One interaction: sense, predict, choose a target (uniformly at random
/// while either class is short of the bootstrap quota), act, detect the
/// effect, learn. Returns the history record; the sensed frame is written to
/// frame_out when requested.
inline InteractionRecord exploration_step(ExplorationState& state, sim::Scene& world,
                                          const StepConfig& cfg, std::mt19937_64& run_rng,
                                          FrameData* frame_out = nullptr) {
    // Step 1: segment and featurize the current scene.
    FrameData frame;
    frame.cloud = percept::render(world, cfg.noise, run_rng);
    frame.segments = percept::segment(frame.cloud, cfg.seg);
    frame.features = percept::all_features(frame.cloud, frame.segments, cfg.fpfh_radius);
    frame.ground_truth = frame_ground_truth(world, frame.cloud, frame.segments, cfg.action);

    // Step 2: relevance weights for the current scene.
    const std::size_t n = frame.segments.size();
    const std::size_t n_e = state.classifier.sample_count(cmm::Label::effect);
    const std::size_t n_ne = state.classifier.sample_count(cmm::Label::no_effect);
    frame.predictions.resize(n);
    frame.map_weights.resize(n);
    std::vector<double> conf(n), unc(n), scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ev = state.classifier.evaluate(frame.features[i]);
        frame.predictions[i] = ev.posterior;
        conf[i] = ev.confidence;
        unc[i] = uncertainty_from(ev.posterior, n_e, n_ne);
        const double bias_w = cfg.bias ? cfg.bias->predict(frame.features[i]) : 1.0;
        frame.map_weights[i] = ev.posterior * bias_w;
        scores[i] = choice_score(unc[i], conf[i]) * bias_w;
    }

    // Step 3: choose the next target.
    const bool bootstrap = std::min(n_e, n_ne) < static_cast<std::size_t>(cfg.bootstrap_quota);
    std::size_t target;
    if (bootstrap) {
        target = uniform_index(run_rng, n);
    } else {
        std::vector<ChoiceMap::Entry> entries(n);
        for (std::size_t i = 0; i < n; ++i) {
            entries[i].segment_id = static_cast<int>(i);
            entries[i].raw_score = scores[i];
        }
        const ChoiceMap map = normalize_choice_map(std::move(entries));
        target = static_cast<std::size_t>(sample_target(map, run_rng));
    }
    const Eigen::Vector3d target_pos = frame.segments[target].centroid.position;

    // Steps 4-5: apply the primitive at the target centroid, detect the effect.
    sim::PrimitiveOutcome outcome;
    bool effect = false;
    switch (cfg.action) {
        case sim::ActionKind::push: {
            outcome = sim::apply_push(world, target_pos, run_rng, cfg.sim.fail_prob, cfg.sim);
            const percept::PointCloud after =
                percept::render(outcome.scene_after, cfg.noise, run_rng);
            effect = sim::detect_change(frame.cloud, after, frame.segments[target],
                                        sim::effective_change_threshold(cfg.sim, cfg.noise));
            break;
        }
        case sim::ActionKind::button: {
            outcome = sim::apply_button(world, target_pos, cfg.sim);
            effect = sim::detect_button_effect(outcome);
            break;
        }
        case sim::ActionKind::lift: {
            outcome = sim::apply_lift(world, target_pos, run_rng, cfg.sim.fail_prob, cfg.sim);
            effect = sim::detect_lift(outcome);
            break;
        }
    }
    world = outcome.scene_after;

    // A failed primitive observed nothing moving: labeled no-effect, with the
    // executed flag kept for audit.
    InteractionRecord rec;
    rec.iteration = state.interaction_count + 1;
    rec.segment_id = static_cast<int>(target);
    rec.target = target_pos;
    rec.action = cfg.action;
    rec.executed = outcome.executed;
    rec.effect = effect;
    rec.bootstrap = bootstrap;
    rec.p_before = frame.predictions[target];
    rec.uncertainty = unc[target];
    rec.confidence = conf[target];
    rec.feature = frame.features[target];

    state.classifier.add_sample(
        {rec.feature, effect ? cmm::Label::effect : cmm::Label::no_effect});
    state.interaction_count += 1;
    state.history.push_back(rec);
    if (frame_out) *frame_out = std::move(frame);
    return rec;
}

}  // namespace affmap::explore
