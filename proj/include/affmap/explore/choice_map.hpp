#pragma once

#include <Eigen/Dense>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "affmap/cmm/classifier.hpp"
#include "affmap/core/rng.hpp"
#include "affmap/explore/uncertainty.hpp"

namespace affmap::explore {

/// Categorical distribution over segments for picking the next target.
struct ChoiceMap {
    struct Entry {
        int segment_id = 0;
        double raw_score = 0.0;
        double probability = 0.0;
    };
    std::vector<Entry> entries;
};

/// Normalizes raw scores into segment choice probabilities. All-zero scores
/// fall back to the uniform distribution so the policy never gets stuck.
inline ChoiceMap normalize_choice_map(std::vector<ChoiceMap::Entry> entries) {
    if (entries.empty()) throw std::invalid_argument("choice map: no segments");
    double total = 0.0;
    for (const auto& e : entries) total += e.raw_score;
    if (total > 0.0) {
        for (auto& e : entries) e.probability = e.raw_score / total;
    } else {
        const double uniform = 1.0 / static_cast<double>(entries.size());
        for (auto& e : entries) e.probability = uniform;
    }
    return ChoiceMap{std::move(entries)};
}

/// Choice map over featurized segments: score_i = u(x_i) * (1 - c(x_i)).
inline ChoiceMap build_choice_map(const cmm::MixtureClassifier& clf,
                                  std::span<const Eigen::VectorXd> features) {
    if (features.empty()) throw std::invalid_argument("choice map: no segments");
    const std::size_t n_e = clf.sample_count(cmm::Label::effect);
    const std::size_t n_ne = clf.sample_count(cmm::Label::no_effect);
    std::vector<ChoiceMap::Entry> entries(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto ev = clf.evaluate(features[i]);
        const double u = uncertainty_from(ev.posterior, n_e, n_ne);
        entries[i].segment_id = static_cast<int>(i);
        entries[i].raw_score = choice_score(u, ev.confidence);
    }
    return normalize_choice_map(std::move(entries));
}

/// Draws a segment id according to the map probabilities.
inline int sample_target(const ChoiceMap& map, std::mt19937_64& gen) {
    if (map.entries.empty()) throw std::invalid_argument("choice map: no segments");
    std::vector<double> probs(map.entries.size());
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = map.entries[i].probability;
    return map.entries[categorical(gen, probs)].segment_id;
}

}  // namespace affmap::explore
