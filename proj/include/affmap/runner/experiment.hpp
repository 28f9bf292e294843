#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "affmap/cmm/serialization.hpp"
#include "affmap/explore/loop.hpp"
#include "affmap/maps/affordance.hpp"
#include "affmap/maps/relevance.hpp"
#include "affmap/metrics/metrics.hpp"
#include "affmap/sim/scene.hpp"

namespace affmap::runner {

struct ExperimentConfig {
    std::string scenario_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    std::vector<sim::ActionKind> schedule{sim::ActionKind::push, sim::ActionKind::button,
                                          sim::ActionKind::lift};
    int interactions = 200;
    int checkpoint_every = 10;  // <= 0: only the final checkpoint
    int bootstrap_quota = 10;
    double merge_threshold = 0.5;
    // Scenario overrides.
    std::optional<double> fail_prob;
    std::optional<double> sigma_depth;
    std::optional<double> sigma_color;
    std::optional<double> alpha;
    std::optional<int> k_max;
    std::optional<double> r_seed;
};

/// Display palette: push red(1), button green(2), lift purple(3).
inline const std::map<std::string, int>& default_palette() {
    static const std::map<std::string, int> palette{{"push", 1}, {"button", 2}, {"lift", 3}};
    return palette;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_history_header(std::ostream& out, const cmm::MixtureClassifier& clf,
                                 sim::ActionKind action) {
    const auto& cfg = clf.config();
    out << "# affmap-history v1\n";
    out << "# action=" << sim::to_string(action) << " classifier_seed=" << clf.seed()
        << " feature_dim=" << cfg.feature_dim << " alpha=" << format_double(cfg.alpha)
        << " k_max=" << cfg.k_max << " init_cov_scale=" << format_double(cfg.init_cov_scale)
        << " cov_regularization=" << format_double(cfg.cov_regularization) << "\n";
    out << "# columns: iteration segment_id target_x target_y target_z action executed label "
           "p_before uncertainty confidence f0..f"
        << (cfg.feature_dim - 1) << "\n";
}

inline void write_history_row(std::ostream& out, const explore::InteractionRecord& rec) {
    out << rec.iteration << '\t' << rec.segment_id << '\t' << format_double(rec.target.x())
        << '\t' << format_double(rec.target.y()) << '\t' << format_double(rec.target.z()) << '\t'
        << sim::to_string(rec.action) << '\t' << (rec.executed ? 1 : 0) << '\t'
        << cmm::to_string(rec.effect ? cmm::Label::effect : cmm::Label::no_effect) << '\t'
        << format_double(rec.p_before) << '\t' << format_double(rec.uncertainty) << '\t'
        << format_double(rec.confidence);
    for (Eigen::Index i = 0; i < rec.feature.size(); ++i) {
        out << '\t' << format_double(rec.feature[i]);
    }
    out << '\n';
}

struct HistoryHeader {
    sim::ActionKind action = sim::ActionKind::push;
    std::uint64_t classifier_seed = 0;
    cmm::CmmConfig config;
};

inline HistoryHeader parse_history_header(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# affmap-history", 0) != 0) {
        throw std::runtime_error("not a history file");
    }
    if (!std::getline(in, line)) throw std::runtime_error("truncated history header");
    HistoryHeader h;
    std::istringstream ls(line.substr(1));
    std::string tok;
    while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "action") h.action = sim::action_from_string(val);
        else if (key == "classifier_seed") h.classifier_seed = std::stoull(val);
        else if (key == "feature_dim") h.config.feature_dim = std::stoi(val);
        else if (key == "alpha") h.config.alpha = std::stod(val);
        else if (key == "k_max") h.config.k_max = std::stoi(val);
        else if (key == "init_cov_scale") h.config.init_cov_scale = std::stod(val);
        else if (key == "cov_regularization") h.config.cov_regularization = std::stod(val);
    }
    return h;
}

}  // namespace detail

/// Reconstructs the classifier by re-training on the logged sample sequence,
/// optionally only up to a given iteration. The training path is the same as
/// the live run, so the result is bit-identical to the matching checkpoint.
inline cmm::MixtureClassifier replay_history(const std::filesystem::path& history_file,
                                             std::optional<long> until = std::nullopt) {
    std::ifstream in(history_file);
    if (!in) throw std::runtime_error("cannot open history: " + history_file.string());
    const detail::HistoryHeader header = detail::parse_history_header(in);
    cmm::MixtureClassifier clf(header.config, header.classifier_seed);

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long iteration;
        int segment_id, executed;
        double tx, ty, tz, p, u, c;
        std::string action, label;
        ls >> iteration >> segment_id >> tx >> ty >> tz >> action >> executed >> label >> p >> u >> c;
        if (!ls) throw std::runtime_error("malformed history row");
        if (until && iteration > *until) break;
        Eigen::VectorXd feat(header.config.feature_dim);
        for (int i = 0; i < header.config.feature_dim; ++i) ls >> feat[i];
        if (!ls) throw std::runtime_error("malformed history feature");
        clf.add_sample({feat, cmm::label_from_string(label)});
    }
    return clf;
}

struct AffordanceRunResult {
    sim::ActionKind action;
    cmm::MixtureClassifier classifier;
    std::vector<metrics::MetricsRow> metrics;
};

/// One affordance exploration: interactions steps from the pristine scenario
/// scene, writing history, metrics, periodic checkpoints and map dumps.
inline AffordanceRunResult run_affordance(const sim::Scenario& scenario,
                                          const ExperimentConfig& cfg, sim::ActionKind action,
                                          std::uint64_t run_seed, std::uint64_t clf_seed,
                                          const cmm::MixtureClassifier* bias,
                                          const std::filesystem::path& action_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(action_dir / "checkpoints");
    fs::create_directories(action_dir / "maps");

    cmm::CmmConfig cmm_cfg;
    cmm_cfg.feature_dim = percept::kFeatureDim;
    cmm_cfg.alpha = cfg.alpha.value_or(scenario.cmm_alpha);
    cmm_cfg.k_max = cfg.k_max.value_or(scenario.cmm_k_max);
    cmm_cfg.init_cov_scale = scenario.cmm_init_cov_scale;
    cmm_cfg.cov_regularization = scenario.cmm_cov_regularization;

    explore::StepConfig step;
    step.action = action;
    step.noise = scenario.noise;
    if (cfg.sigma_depth) step.noise.sigma_depth = *cfg.sigma_depth;
    if (cfg.sigma_color) step.noise.sigma_color = *cfg.sigma_color;
    step.seg.r_seed = cfg.r_seed.value_or(scenario.seg_r_seed);
    step.seg.lambda = scenario.seg_lambda;
    step.seg.mu = scenario.seg_mu;
    step.seg.epsilon = scenario.seg_epsilon;
    step.seg.color_norm = scenario.seg_color_norm;
    step.seg.point_spfh_radius = scenario.seg_point_spfh_radius;
    step.seg.adjacency_radius = scenario.seg_adjacency_radius;
    step.fpfh_radius = scenario.fpfh_radius;
    step.sim = scenario.sim;
    if (cfg.fail_prob) step.sim.fail_prob = *cfg.fail_prob;
    step.bootstrap_quota = cfg.bootstrap_quota;
    step.bias = bias;

    explore::ExplorationState state{cmm::MixtureClassifier(cmm_cfg, clf_seed), 0,
                                    cfg.bootstrap_quota, {}};
    sim::Scene world = scenario.scene;
    std::mt19937_64 run_rng(run_seed);

    std::ofstream history(action_dir / "history.log");
    detail::write_history_header(history, state.classifier, action);
    std::ofstream metrics_csv(action_dir / "metrics.csv");
    metrics::write_metrics_header(metrics_csv);

    AffordanceRunResult result{action, state.classifier, {}};
    explore::FrameData frame;
    for (int t = 1; t <= cfg.interactions; ++t) {
        const explore::InteractionRecord rec =
            explore::exploration_step(state, world, step, run_rng, &frame);
        detail::write_history_row(history, rec);

        metrics::MetricsRow row;
        row.iteration = t;
        row.counts = metrics::soft_counts(frame.map_weights, frame.ground_truth);
        row.scores = metrics::prf(row.counts);
        metrics::write_metrics_row(row, metrics_csv);
        result.metrics.push_back(row);

        if (cfg.checkpoint_every > 0 && t % cfg.checkpoint_every == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "ckpt_%06d.cmm", t);
            std::ofstream ck(action_dir / "checkpoints" / name);
            ck << cmm::serialize(state.classifier);

            std::snprintf(name, sizeof(name), "relevance_%06d.txt", t);
            maps::RelevanceMap rm{sim::to_string(action), frame.map_weights};
            std::ofstream mp(action_dir / "maps" / name);
            maps::dump_relevance_map(rm, frame.segments, mp);
        }
    }
    {
        std::ofstream ck(action_dir / "checkpoints" / "final.cmm");
        ck << cmm::serialize(state.classifier);
        maps::RelevanceMap rm{sim::to_string(action), frame.map_weights};
        std::ofstream mp(action_dir / "maps" / "relevance_final.txt");
        maps::dump_relevance_map(rm, frame.segments, mp);
    }
    result.classifier = state.classifier;
    return result;
}

/// Full experiment: each scheduled affordance explored in order (lift is
/// composed with the frozen push classifier), then every final classifier is
/// evaluated on one fresh snapshot of the pristine scene and the thresholded
/// maps are merged into the affordances map.
inline int run(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const sim::Scenario scenario = sim::load_scenario(cfg.scenario_path);
    fs::create_directories(cfg.out_dir);

    std::uint64_t seed_state = cfg.seed;
    std::vector<AffordanceRunResult> results;
    results.reserve(cfg.schedule.size());  // pointers into results stay valid
    const cmm::MixtureClassifier* push_classifier = nullptr;

    for (sim::ActionKind action : cfg.schedule) {
        const std::uint64_t run_seed = splitmix64(seed_state);
        const std::uint64_t clf_seed = splitmix64(seed_state);
        const cmm::MixtureClassifier* bias = nullptr;
        if (action == sim::ActionKind::lift) {
            if (!push_classifier) {
                throw std::runtime_error("lift requires push earlier in the schedule");
            }
            bias = push_classifier;
        }
        results.push_back(run_affordance(scenario, cfg, action, run_seed, clf_seed, bias,
                                         fs::path(cfg.out_dir) / sim::to_string(action)));
        if (action == sim::ActionKind::push) push_classifier = &results.back().classifier;
    }

    // Final affordances map on a fresh observation of the pristine scene.
    const std::uint64_t snapshot_seed = splitmix64(seed_state);
    std::mt19937_64 snap_rng(snapshot_seed);
    percept::SegmentationParams seg;
    seg.r_seed = cfg.r_seed.value_or(scenario.seg_r_seed);
    seg.lambda = scenario.seg_lambda;
    seg.mu = scenario.seg_mu;
    seg.epsilon = scenario.seg_epsilon;
    seg.color_norm = scenario.seg_color_norm;
    seg.point_spfh_radius = scenario.seg_point_spfh_radius;
    seg.adjacency_radius = scenario.seg_adjacency_radius;
    sim::NoiseParams noise = scenario.noise;
    if (cfg.sigma_depth) noise.sigma_depth = *cfg.sigma_depth;
    if (cfg.sigma_color) noise.sigma_color = *cfg.sigma_color;

    const percept::PointCloud snapshot = percept::render(scenario.scene, noise, snap_rng);
    const std::vector<percept::Segment> segments = percept::segment(snapshot, seg);
    const std::vector<Eigen::VectorXd> features =
        percept::all_features(snapshot, segments, scenario.fpfh_radius);

    std::vector<maps::RelevanceMap> final_maps;
    final_maps.reserve(results.size());
    const maps::RelevanceMap* push_map = nullptr;
    for (const auto& res : results) {
        maps::RelevanceMap rm =
            maps::relevance_map(res.classifier, features, sim::to_string(res.action));
        if (res.action == sim::ActionKind::lift && push_map) {
            rm = maps::compose(rm, *push_map);
        }
        final_maps.push_back(std::move(rm));
        if (res.action == sim::ActionKind::push) push_map = &final_maps.back();
    }
    if (!final_maps.empty()) {
        const maps::AffordanceMap merged =
            maps::merge_maps(final_maps, cfg.merge_threshold, default_palette());
        std::ofstream out(fs::path(cfg.out_dir) / "affordance_map.txt");
        maps::dump_affordance_map(merged, segments, out);
    }

    // Resolved-run manifest; everything in it is derived from the config.
    nlohmann::json manifest;
    manifest["format"] = "affmap-run";
    manifest["version"] = 1;
    manifest["seed"] = cfg.seed;
    manifest["interactions"] = cfg.interactions;
    manifest["checkpoint_every"] = cfg.checkpoint_every;
    manifest["bootstrap_quota"] = cfg.bootstrap_quota;
    manifest["merge_threshold"] = cfg.merge_threshold;
    nlohmann::json sched = nlohmann::json::array();
    for (auto a : cfg.schedule) sched.push_back(sim::to_string(a));
    manifest["schedule"] = std::move(sched);
    std::ofstream mf(fs::path(cfg.out_dir) / "run.json");
    mf << manifest.dump(2) << "\n";

    return 0;
}

}  // namespace affmap::runner
