#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "affmap/affmap.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<affmap::sim::ActionKind> parse_schedule(const std::string& csv) {
    std::vector<affmap::sim::ActionKind> out;
    std::string tok;
    std::istringstream in(csv);
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) out.push_back(affmap::sim::action_from_string(tok));
    }
    if (out.empty()) throw CLI::ValidationError("schedule", "schedule must name at least one action");
    return out;
}

int cmd_run(const affmap::runner::ExperimentConfig& cfg) {
    try {
        return affmap::runner::run(cfg);
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_replay(const std::string& history, const std::string& run_dir, std::optional<long> until) {
    try {
        const affmap::cmm::MixtureClassifier clf =
            affmap::runner::replay_history(history, until);
        const std::string bytes = affmap::cmm::serialize(clf);

        if (run_dir.empty()) {
            std::cout << bytes;
            return 0;
        }
        // Compare against every checkpoint in the run directory that the
        // replayed prefix covers.
        const fs::path ck_dir = fs::path(run_dir) / "checkpoints";
        if (!fs::exists(ck_dir)) {
            std::cerr << "no checkpoints under " << ck_dir << "\n";
            return 1;
        }
        int mismatches = 0;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(ck_dir)) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            const std::string name = file.filename().string();
            long at = -1;
            if (name.rfind("ckpt_", 0) == 0) at = std::stol(name.substr(5, 6));
            if (at < 0) continue;  // final.cmm handled by full replay below
            if (until && at > *until) continue;
            const affmap::cmm::MixtureClassifier partial =
                affmap::runner::replay_history(history, at);
            std::ifstream in(file);
            std::stringstream want;
            want << in.rdbuf();
            const bool ok = affmap::cmm::serialize(partial) == want.str();
            std::cout << (ok ? "MATCH    " : "MISMATCH ") << name << "\n";
            if (!ok) ++mismatches;
        }
        const fs::path final_ck = ck_dir / "final.cmm";
        if (!until && fs::exists(final_ck)) {
            std::ifstream in(final_ck);
            std::stringstream want;
            want << in.rdbuf();
            const bool ok = bytes == want.str();
            std::cout << (ok ? "MATCH    " : "MISMATCH ") << "final.cmm\n";
            if (!ok) ++mismatches;
        }
        return mismatches == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "replay failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_dump_cloud(const std::string& scenario_path, const std::string& out_path,
                   std::uint64_t seed, bool noiseless) {
    try {
        const affmap::sim::Scenario scenario = affmap::sim::load_scenario(scenario_path);
        std::mt19937_64 gen(seed);
        affmap::sim::NoiseParams noise = noiseless ? affmap::sim::NoiseParams{} : scenario.noise;
        const affmap::percept::PointCloud cloud =
            affmap::percept::render(scenario.scene, noise, gen);
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot open " << out_path << "\n";
            return 1;
        }
        affmap::percept::dump_cloud(cloud, out);
        std::cout << cloud.size() << " points\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "dump-cloud failed: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"affordance-map learning experiments in a synthetic tabletop world"};
    app.require_subcommand(1);

    affmap::runner::ExperimentConfig cfg;
    std::string schedule_csv = "push,button,lift";
    double fail_prob = -1.0, sigma_depth = -1.0, sigma_color = -1.0, alpha = -1.0, r_seed = -1.0;
    int k_max = -1;

    auto* run = app.add_subcommand("run", "run a scheduled exploration experiment");
    run->add_option("--scenario", cfg.scenario_path, "scenario JSON file")->required();
    run->add_option("--out", cfg.out_dir, "output directory")->required();
    run->add_option("--seed", cfg.seed, "master seed (fully determines the run)");
    run->add_option("--interactions", cfg.interactions, "interactions per affordance");
    run->add_option("--schedule", schedule_csv, "comma-separated actions (push,button,lift)");
    run->add_option("--checkpoint-every", cfg.checkpoint_every,
                    "checkpoint interval in interactions; 0 = final only");
    run->add_option("--bootstrap-quota", cfg.bootstrap_quota, "samples per class before policy sampling");
    run->add_option("--merge-threshold", cfg.merge_threshold, "affordance-map display threshold");
    run->add_option("--fail-prob", fail_prob, "override primitive failure probability");
    run->add_option("--sigma-depth", sigma_depth, "override positional noise (m)");
    run->add_option("--sigma-color", sigma_color, "override color noise (Lab units)");
    run->add_option("--alpha", alpha, "override CMM alpha");
    run->add_option("--k-max", k_max, "override CMM component cap");
    run->add_option("--r-seed", r_seed, "override segmentation seed spacing (m)");

    std::string history_path, run_dir;
    long until_raw = -1;
    auto* replay = app.add_subcommand("replay", "re-train a classifier from a history log");
    replay->add_option("--history", history_path, "history.log produced by run")->required();
    replay->add_option("--run-dir", run_dir,
                       "action output directory; compare replay against its checkpoints");
    replay->add_option("--until", until_raw, "replay only iterations <= this");

    std::string dc_scenario, dc_out;
    std::uint64_t dc_seed = 1;
    bool dc_noiseless = false;
    auto* dump = app.add_subcommand("dump-cloud", "render a scenario to an ASCII point cloud");
    dump->add_option("--scenario", dc_scenario, "scenario JSON file")->required();
    dump->add_option("--out", dc_out, "output file")->required();
    dump->add_option("--seed", dc_seed, "render seed");
    dump->add_flag("--noiseless", dc_noiseless, "disable sensor noise");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        try {
            cfg.schedule = parse_schedule(schedule_csv);
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return 1;
        }
        if (fail_prob >= 0.0) cfg.fail_prob = fail_prob;
        if (sigma_depth >= 0.0) cfg.sigma_depth = sigma_depth;
        if (sigma_color >= 0.0) cfg.sigma_color = sigma_color;
        if (alpha >= 0.0) cfg.alpha = alpha;
        if (k_max >= 1) cfg.k_max = k_max;
        if (r_seed > 0.0) cfg.r_seed = r_seed;
        return cmd_run(cfg);
    }
    if (replay->parsed()) {
        std::optional<long> until;
        if (until_raw >= 0) until = until_raw;
        return cmd_replay(history_path, run_dir, until);
    }
    if (dump->parsed()) return cmd_dump_cloud(dc_scenario, dc_out, dc_seed, dc_noiseless);
    return 1;
}
