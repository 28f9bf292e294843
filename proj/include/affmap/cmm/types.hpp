#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace affmap::cmm {

/// Binary outcome class of an interaction: the action either produced the
/// expected effect or it did not.
enum class Label : std::uint8_t { effect = 0, no_effect = 1 };

inline Label other(Label l) { return l == Label::effect ? Label::no_effect : Label::effect; }

inline std::size_t label_index(Label l) { return static_cast<std::size_t>(l); }

inline std::string to_string(Label l) { return l == Label::effect ? "effect" : "no_effect"; }

inline Label label_from_string(const std::string& s) {
    if (s == "effect") return Label::effect;
    if (s == "no_effect") return Label::no_effect;
    throw std::invalid_argument("unknown label: " + s);
}

struct LabeledSample {
    Eigen::VectorXd feature;
    Label label = Label::no_effect;
};

struct CmmConfig {
    double alpha = 0.6;              // intersection sensitivity; 1 disables split/merge
    int k_max = 4;                   // per-class component cap
    int feature_dim = 48;
    double init_cov_scale = 1.0;     // covariance of a fresh single-sample component
    double cov_regularization = 1e-6;  // added to the diagonal before factorization

    void validate() const {
        if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("CmmConfig: alpha must be in [0,1]");
        if (k_max < 1) throw std::invalid_argument("CmmConfig: k_max must be >= 1");
        if (feature_dim < 1) throw std::invalid_argument("CmmConfig: feature_dim must be >= 1");
        if (init_cov_scale <= 0.0) throw std::invalid_argument("CmmConfig: init_cov_scale must be positive");
        if (cov_regularization <= 0.0) throw std::invalid_argument("CmmConfig: cov_regularization must be positive");
    }
};

}  // namespace affmap::cmm
