#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "affmap/cmm/classifier.hpp"

namespace affmap::maps {

/// Per-segment probability of affording one (action, effect) pair, on a
/// single segmentation snapshot.
struct RelevanceMap {
    std::string affordance;
    std::vector<double> weights;
};

/// Classifier predictions over the featurized segments of a frame.
inline RelevanceMap relevance_map(const cmm::MixtureClassifier& clf,
                                  std::span<const Eigen::VectorXd> features,
                                  std::string affordance) {
    RelevanceMap map;
    map.affordance = std::move(affordance);
    map.weights.reserve(features.size());
    for (const auto& x : features) map.weights.push_back(clf.predict(x));
    return map;
}

/// Composite affordance on a shared segmentation: the conditional map
/// filtered by the base map, pointwise product.
inline RelevanceMap compose(const RelevanceMap& conditional, const RelevanceMap& base) {
    if (conditional.weights.size() != base.weights.size()) {
        throw std::invalid_argument("compose: segmentation mismatch");
    }
    RelevanceMap out;
    out.affordance = conditional.affordance;
    out.weights.resize(conditional.weights.size());
    for (std::size_t i = 0; i < out.weights.size(); ++i) {
        out.weights[i] = conditional.weights[i] * base.weights[i];
    }
    return out;
}

/// General composite: conditional times the product of all base maps.
/// An empty base list returns the conditional unchanged.
inline RelevanceMap compose_many(const RelevanceMap& conditional,
                                 std::span<const RelevanceMap> bases) {
    RelevanceMap out = conditional;
    for (const auto& base : bases) out = compose(out, base);
    return out;
}

}  // namespace affmap::maps
