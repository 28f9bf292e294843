#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "affmap/cmm/component.hpp"
#include "affmap/cmm/types.hpp"
#include "affmap/core/rng.hpp"
#include "affmap/stats/fisher.hpp"
#include "affmap/stats/gaussian.hpp"

namespace affmap::cmm {

/// Mixture weights: w_k = |C_k| / sum_i |C_i|. Empty input gives an empty vector.
inline std::vector<double> class_weights(std::span<const Component> components) {
    std::vector<double> w(components.size());
    double total = 0.0;
    for (const auto& c : components) total += static_cast<double>(c.size());
    for (std::size_t k = 0; k < components.size(); ++k) {
        w[k] = static_cast<double>(components[k].size()) / total;
    }
    return w;
}

/// Tolerance-hyperellipsoid intersection test: does b's mean fall inside the
/// hyperellipsoid of component a?  Requires n > p samples in a (the Fisher
/// quantile argument n - p must be positive); smaller components are not
/// testable and count as non-intersecting. alpha = 1 disables intersections,
/// alpha = 0 makes the ellipsoid infinite.
inline bool intersects(const Component& a, const Component& b, double alpha) {
    const auto n = static_cast<double>(a.size());
    const auto p = static_cast<double>(a.mean().size());
    if (n <= p) return false;
    if (alpha >= 1.0) return false;
    if (alpha <= 0.0) return true;
    const double md2 = a.density().mahalanobis_squared(b.mean());
    const double threshold = ((n - 1.0) * p / (n - p)) * ((n + 1.0) / n)
                             * stats::fisher_quantile(1.0 - alpha, static_cast<int>(p),
                                                      static_cast<int>(n - p));
    return md2 <= threshold;
}

/// Shares the samples of a component between groups for a split: connected
/// sub-graphs of the symmetric nearest-neighbor graph, then closest groups
/// (by centroid distance) merged until two remain. A single connected group
/// signals that the split should be cancelled.
inline std::vector<std::vector<Eigen::VectorXd>> partition_for_split(
    std::span<const Eigen::VectorXd> samples) {
    const std::size_t m = samples.size();
    if (m < 2) {
        std::vector<std::vector<Eigen::VectorXd>> single(1);
        for (const auto& s : samples) single[0].push_back(s);
        return single;
    }

    // Edge i-j iff j is i's nearest neighbor or vice versa; ties to lowest index.
    std::vector<std::size_t> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) { parent[i] = parent[parent[i]]; i = parent[i]; }
        return i;
    };
    auto unite = [&](std::size_t i, std::size_t j) { parent[find(i)] = find(j); };

    for (std::size_t i = 0; i < m; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t nn = i;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const double d = (samples[i] - samples[j]).squaredNorm();
            if (d < best) { best = d; nn = j; }
        }
        unite(i, nn);
    }

    std::vector<std::vector<std::size_t>> groups;
    {
        std::vector<long> group_of_root(m, -1);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t r = find(i);
            if (group_of_root[r] < 0) {
                group_of_root[r] = static_cast<long>(groups.size());
                groups.emplace_back();
            }
            groups[static_cast<std::size_t>(group_of_root[r])].push_back(i);
        }
    }

    if (groups.size() > 2) {
        std::vector<Eigen::VectorXd> centroid(groups.size());
        auto recompute_centroid = [&](std::size_t g) {
            Eigen::VectorXd c = Eigen::VectorXd::Zero(samples[0].size());
            for (std::size_t i : groups[g]) c += samples[i];
            centroid[g] = c / static_cast<double>(groups[g].size());
        };
        for (std::size_t g = 0; g < groups.size(); ++g) recompute_centroid(g);

        while (groups.size() > 2) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t ga = 0, gb = 1;
            for (std::size_t a = 0; a < groups.size(); ++a) {
                for (std::size_t b = a + 1; b < groups.size(); ++b) {
                    const double d = (centroid[a] - centroid[b]).squaredNorm();
                    if (d < best) { best = d; ga = a; gb = b; }
                }
            }
            groups[ga].insert(groups[ga].end(), groups[gb].begin(), groups[gb].end());
            groups.erase(groups.begin() + static_cast<long>(gb));
            centroid.erase(centroid.begin() + static_cast<long>(gb));
            recompute_centroid(ga);
        }
    }

    std::vector<std::vector<Eigen::VectorXd>> out(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        out[g].reserve(groups[g].size());
        for (std::size_t i : groups[g]) out[g].push_back(samples[i]);
    }
    return out;
}

/// The two-class online classifier: one Gaussian mixture per class with
/// sample-count weights. Training adds each sample to the closest component
/// of its class, then adapts the structure with split (inter-class overlap)
/// and merge (intra-class overlap) operations.
class MixtureClassifier {
public:
    MixtureClassifier() : MixtureClassifier(CmmConfig{}, 0) {}

    explicit MixtureClassifier(CmmConfig cfg, std::uint64_t seed) : config_(cfg), seed_(seed) {
        config_.validate();
        rng_.seed(seed);
    }

    const CmmConfig& config() const { return config_; }
    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& rng() { return rng_; }
    const std::mt19937_64& rng() const { return rng_; }

    const std::vector<Component>& components(Label l) const { return classes_[label_index(l)]; }
    std::vector<Component>& components_mutable(Label l) { return classes_[label_index(l)]; }

    std::size_t sample_count(Label l) const {
        std::size_t n = 0;
        for (const auto& c : classes_[label_index(l)]) n += c.size();
        return n;
    }
    std::size_t total_samples() const {
        return sample_count(Label::effect) + sample_count(Label::no_effect);
    }
    bool empty() const { return classes_[0].empty() && classes_[1].empty(); }

    /// Probability that x belongs to the effect class. Uses the smoothed
    /// ratio (1 + G_e) / (2 + G_e + G_ne) so that an empty classifier
    /// answers exactly 1/2.
    double predict(const Eigen::VectorXd& x) const {
        check_dim(x);
        const double le = log_mixture(Label::effect, x);
        const double lne = log_mixture(Label::no_effect, x);
        return combine_posterior(le, lne);
    }

    /// Per-component membership probabilities of x within one class.
    Eigen::VectorXd membership(Label l, const Eigen::VectorXd& x) const {
        check_dim(x);
        const auto& comps = classes_[label_index(l)];
        if (comps.empty()) throw std::invalid_argument("membership: class has no components");
        const std::vector<double> lt = log_terms(comps, x);
        const double lse = stats::log_sum_exp(lt);
        Eigen::VectorXd out(static_cast<Eigen::Index>(comps.size()));
        for (std::size_t k = 0; k < comps.size(); ++k) {
            out[static_cast<Eigen::Index>(k)] = std::exp(lt[k] - lse);
        }
        return out;
    }

    struct Evaluation {
        double posterior = 0.5;      // P(effect | x)
        double confidence = 0.0;     // membership in the closest component, both classes pooled
    };

    /// One-pass evaluation of the quantities derived from the mixtures.
    Evaluation evaluate(const Eigen::VectorXd& x) const {
        check_dim(x);
        Evaluation ev;
        double log_mix[2];
        double max_membership = 0.0;
        bool any = false;
        for (std::size_t ci = 0; ci < 2; ++ci) {
            const auto& comps = classes_[ci];
            if (comps.empty()) {
                log_mix[ci] = -std::numeric_limits<double>::infinity();
                continue;
            }
            const std::vector<double> lt = log_terms(comps, x);
            const double lse = stats::log_sum_exp(lt);
            log_mix[ci] = lse;
            const double lmax = *std::max_element(lt.begin(), lt.end());
            max_membership = std::max(max_membership, std::exp(lmax - lse));
            any = true;
        }
        ev.posterior = combine_posterior(log_mix[label_index(Label::effect)],
                                         log_mix[label_index(Label::no_effect)]);
        ev.confidence = any ? max_membership : 0.0;
        return ev;
    }

    /// Online training step: add to the closest component of the sample's
    /// class (or create the first one), then split-else-merge on the updated
    /// component, then split-else-merge on a random component of each class.
    void add_sample(const LabeledSample& sample) {
        check_dim(sample.feature);
        auto& comps = classes_[label_index(sample.label)];
        std::size_t updated = 0;
        if (comps.empty()) {
            comps.push_back(Component::from_samples({sample.feature}, sample.label, config_));
        } else {
            updated = closest_component(comps, sample.feature);
            comps[updated].add(sample.feature, config_);
        }
        if (!try_split(sample.label, updated)) try_merge(sample.label, updated);

        for (Label l : {Label::effect, Label::no_effect}) {
            auto& cc = classes_[label_index(l)];
            if (cc.empty()) continue;
            const std::size_t idx = uniform_index(rng_, cc.size());
            if (!try_split(l, idx)) try_merge(l, idx);
        }
    }

    /// Split of one component against the closest component of the other
    /// class. Returns whether the split was applied.
    bool try_split(Label l, std::size_t idx) {
        if (config_.alpha >= 1.0) return false;
        auto& own = classes_[label_index(l)];
        if (own.size() >= static_cast<std::size_t>(config_.k_max)) return false;
        const auto& opposing = classes_[label_index(other(l))];
        if (opposing.empty()) return false;
        const Component& candidate = own[idx];
        const std::size_t j = closest_component(opposing, candidate.mean());
        if (!intersects(candidate, opposing[j], config_.alpha)) return false;

        auto groups = partition_for_split(candidate.samples());
        if (groups.size() != 2) return false;
        Component c1 = Component::from_samples(std::move(groups[0]), l, config_);
        Component c2 = Component::from_samples(std::move(groups[1]), l, config_);
        own[idx] = std::move(c1);
        own.push_back(std::move(c2));
        return true;
    }

    /// Merge of one component with the closest component of its own class.
    /// Returns whether the merge was applied.
    bool try_merge(Label l, std::size_t idx) {
        if (config_.alpha >= 1.0) return false;
        auto& own = classes_[label_index(l)];
        if (own.size() < 2) return false;
        const Component& candidate = own[idx];

        double best = std::numeric_limits<double>::infinity();
        std::size_t j = idx;
        for (std::size_t k = 0; k < own.size(); ++k) {
            if (k == idx) continue;
            const double d = (own[k].mean() - candidate.mean()).squaredNorm();
            if (d < best) { best = d; j = k; }
        }
        if (!intersects(candidate, own[j], config_.alpha)) return false;

        std::vector<Eigen::VectorXd> merged = candidate.samples();
        merged.insert(merged.end(), own[j].samples().begin(), own[j].samples().end());
        Component fused = Component::from_samples(std::move(merged), l, config_);
        const std::size_t keep = std::min(idx, j);
        const std::size_t drop = std::max(idx, j);
        own[keep] = std::move(fused);
        own.erase(own.begin() + static_cast<long>(drop));
        return true;
    }

private:
    void check_dim(const Eigen::VectorXd& x) const {
        if (x.size() != config_.feature_dim) {
            throw std::invalid_argument("feature dimension mismatch");
        }
    }

    static std::size_t closest_component(std::span<const Component> comps,
                                         const Eigen::VectorXd& x) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t k = 0; k < comps.size(); ++k) {
            const double d = (comps[k].mean() - x).squaredNorm();
            if (d < best) { best = d; arg = k; }
        }
        return arg;
    }

    static std::vector<double> log_terms(std::span<const Component> comps,
                                         const Eigen::VectorXd& x) {
        const std::vector<double> w = class_weights(comps);
        std::vector<double> lt(comps.size());
        for (std::size_t k = 0; k < comps.size(); ++k) {
            lt[k] = std::log(w[k]) + comps[k].log_density(x);
        }
        return lt;
    }

    double log_mixture(Label l, const Eigen::VectorXd& x) const {
        const auto& comps = classes_[label_index(l)];
        if (comps.empty()) return -std::numeric_limits<double>::infinity();
        const std::vector<double> lt = log_terms(comps, x);
        return stats::log_sum_exp(lt);
    }

    /// (1 + e^le) / (2 + e^le + e^lne), rescaled so that huge log densities
    /// cannot overflow. Grouped as (1+Ge) / ((1+Ge) + (1+Gne)) so symmetric
    /// inputs give exactly 1/2.
    static double combine_posterior(double le, double lne) {
        const double m = std::max({0.0, le, lne});
        const double one = std::exp(-m);
        const double ge = std::isfinite(le) ? std::exp(le - m) : 0.0;
        const double gne = std::isfinite(lne) ? std::exp(lne - m) : 0.0;
        const double num = one + ge;
        return num / (num + (one + gne));
    }

    CmmConfig config_;
    std::uint64_t seed_ = 0;
    std::array<std::vector<Component>, 2> classes_;
    std::mt19937_64 rng_;
};

}  // namespace affmap::cmm
