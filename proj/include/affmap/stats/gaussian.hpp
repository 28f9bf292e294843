#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace affmap::stats {

/// Multivariate normal density evaluated through a cached Cholesky factor.
/// The covariance handed in must already be positive definite (callers add
/// their regularization term first).
class GaussianDensity {
public:
    GaussianDensity() = default;

    GaussianDensity(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance)
        : mean_(std::move(mean)) {
        if (covariance.rows() != mean_.size() || covariance.cols() != mean_.size()) {
            throw std::invalid_argument("GaussianDensity: covariance shape mismatch");
        }
        llt_.compute(covariance);
        if (llt_.info() != Eigen::Success) {
            throw std::runtime_error("GaussianDensity: covariance not positive definite");
        }
        log_det_ = 0.0;
        const auto& L = llt_.matrixLLT();
        for (Eigen::Index i = 0; i < L.rows(); ++i) {
            log_det_ += 2.0 * std::log(L(i, i));
        }
    }

    const Eigen::VectorXd& mean() const { return mean_; }
    double log_det() const { return log_det_; }

    double mahalanobis_squared(const Eigen::VectorXd& x) const {
        return llt_.matrixL().solve(x - mean_).squaredNorm();
    }

    double log_density(const Eigen::VectorXd& x) const {
        const double p = static_cast<double>(mean_.size());
        return -0.5 * (p * std::log(2.0 * M_PI) + log_det_ + mahalanobis_squared(x));
    }

private:
    Eigen::VectorXd mean_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double log_det_ = 0.0;
};

/// log(sum_i exp(v_i)); -inf for an empty set.
inline double log_sum_exp(std::span<const double> values) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    double m = values[0];
    for (double v : values) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - m);
    return m + std::log(acc);
}

}  // namespace affmap::stats
