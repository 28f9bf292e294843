#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "affmap/cmm/types.hpp"
#include "affmap/stats/gaussian.hpp"

namespace affmap::cmm {

/// One labeled cluster of the feature space, modeled as a multivariate
/// normal distribution whose parameters are the sample estimators of the
/// stored samples. A single-sample component uses init_cov_scale * I as
/// covariance; estimators are recomputed in full whenever samples change.
class Component {
public:
    Component() = default;

    static Component from_samples(std::vector<Eigen::VectorXd> samples, Label label,
                                  const CmmConfig& cfg) {
        if (samples.empty()) throw std::invalid_argument("Component: needs at least one sample");
        Component c;
        c.label_ = label;
        c.samples_ = std::move(samples);
        c.recompute(cfg);
        return c;
    }

    void add(const Eigen::VectorXd& feature, const CmmConfig& cfg) {
        samples_.push_back(feature);
        recompute(cfg);
    }

    Label label() const { return label_; }
    std::size_t size() const { return samples_.size(); }
    const std::vector<Eigen::VectorXd>& samples() const { return samples_; }
    const Eigen::VectorXd& mean() const { return density_.mean(); }
    const Eigen::MatrixXd& covariance() const { return covariance_; }

    /// Density over the regularized covariance.
    const stats::GaussianDensity& density() const { return density_; }

    double log_density(const Eigen::VectorXd& x) const { return density_.log_density(x); }

private:
    void recompute(const CmmConfig& cfg) {
        const Eigen::Index p = samples_.front().size();
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
        for (const auto& s : samples_) mean += s;
        mean /= static_cast<double>(samples_.size());

        if (samples_.size() == 1) {
            covariance_ = cfg.init_cov_scale * Eigen::MatrixXd::Identity(p, p);
        } else {
            covariance_ = Eigen::MatrixXd::Zero(p, p);
            for (const auto& s : samples_) {
                const Eigen::VectorXd d = s - mean;
                covariance_.noalias() += d * d.transpose();
            }
            covariance_ /= static_cast<double>(samples_.size() - 1);
        }
        Eigen::MatrixXd regularized = covariance_;
        regularized.diagonal().array() += cfg.cov_regularization;
        density_ = stats::GaussianDensity(std::move(mean), regularized);
    }

    Label label_ = Label::no_effect;
    std::vector<Eigen::VectorXd> samples_;
    Eigen::MatrixXd covariance_;
    stats::GaussianDensity density_;
};

}  // namespace affmap::cmm
