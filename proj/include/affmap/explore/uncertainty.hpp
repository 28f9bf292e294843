#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "affmap/cmm/classifier.hpp"

namespace affmap::explore {

/// Shaping function for the uncertainty measure. Peaks at 1 for x = 0.5
/// (maximally uncertain classification) and stays positive toward x = 1 so
/// confident predictions of the rarer class keep a nonzero choice weight.
/// f(0) = 0 by continuity.
inline double branch_f(double x) {
    if (x >= 0.5) return -2.0 * x * (std::log(2.0 * x) - 1.0);
    if (x <= 0.0) return 0.0;
    const double q = 4.0 * x * x;
    return -q * (std::log(q) - 1.0);
}

/// Uncertainty from a posterior p and the class sample counts: the argument
/// is flipped toward the class with fewer collected samples, which biases
/// exploration toward balancing the dataset.
inline double uncertainty_from(double p, std::size_t n_effect, std::size_t n_no_effect) {
    return n_effect <= n_no_effect ? branch_f(p) : branch_f(1.0 - p);
}

inline double uncertainty(const cmm::MixtureClassifier& clf, const Eigen::VectorXd& x) {
    return uncertainty_from(clf.predict(x), clf.sample_count(cmm::Label::effect),
                            clf.sample_count(cmm::Label::no_effect));
}

/// Membership of x in its closest component, both classes pooled; 0 for an
/// empty classifier (everything is unexplored).
inline double confidence(const cmm::MixtureClassifier& clf, const Eigen::VectorXd& x) {
    return clf.evaluate(x).confidence;
}

/// Probability-of-choice score: high uncertainty, low confidence.
inline double choice_score(double u, double c) { return u * (1.0 - c); }

}  // namespace affmap::explore
