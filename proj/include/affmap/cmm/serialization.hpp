#pragma once

#include <json.hpp>
#include <sstream>
#include <string>

#include "affmap/cmm/classifier.hpp"

namespace affmap::cmm {

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

/// Full classifier state as a versioned JSON document: config, generator
/// state, and per class every component with its samples. Doubles round-trip
/// exactly (shortest-representation printing).
inline nlohmann::json to_json(const MixtureClassifier& clf) {
    nlohmann::json doc;
    doc["format"] = "affmap-cmm";
    doc["version"] = kCheckpointVersion;
    const auto& cfg = clf.config();
    doc["config"] = {
        {"alpha", cfg.alpha},
        {"k_max", cfg.k_max},
        {"feature_dim", cfg.feature_dim},
        {"init_cov_scale", cfg.init_cov_scale},
        {"cov_regularization", cfg.cov_regularization},
    };
    doc["seed"] = clf.seed();
    std::ostringstream rng_state;
    rng_state << clf.rng();
    doc["rng_state"] = rng_state.str();

    for (Label l : {Label::effect, Label::no_effect}) {
        nlohmann::json comps = nlohmann::json::array();
        for (const auto& c : clf.components(l)) {
            nlohmann::json jc;
            jc["size"] = c.size();
            jc["mean"] = detail::vector_to_json(c.mean());
            jc["covariance"] = detail::matrix_to_json(c.covariance());
            nlohmann::json samples = nlohmann::json::array();
            for (const auto& s : c.samples()) samples.push_back(detail::vector_to_json(s));
            jc["samples"] = std::move(samples);
            comps.push_back(std::move(jc));
        }
        doc["classes"][to_string(l)] = std::move(comps);
    }
    return doc;
}

inline std::string serialize(const MixtureClassifier& clf) { return to_json(clf).dump(2) + "\n"; }

inline MixtureClassifier from_json(const nlohmann::json& doc) {
    if (doc.value("format", "") != "affmap-cmm") {
        throw std::runtime_error("not a classifier checkpoint");
    }
    if (doc.value("version", -1) != kCheckpointVersion) {
        throw std::runtime_error("unsupported checkpoint version");
    }
    CmmConfig cfg;
    const auto& jc = doc.at("config");
    cfg.alpha = jc.at("alpha").get<double>();
    cfg.k_max = jc.at("k_max").get<int>();
    cfg.feature_dim = jc.at("feature_dim").get<int>();
    cfg.init_cov_scale = jc.at("init_cov_scale").get<double>();
    cfg.cov_regularization = jc.at("cov_regularization").get<double>();

    MixtureClassifier clf(cfg, doc.at("seed").get<std::uint64_t>());
    std::istringstream rng_state(doc.at("rng_state").get<std::string>());
    rng_state >> clf.rng();

    for (Label l : {Label::effect, Label::no_effect}) {
        const auto& comps = doc.at("classes").at(to_string(l));
        for (const auto& c : comps) {
            std::vector<Eigen::VectorXd> samples;
            for (const auto& s : c.at("samples")) samples.push_back(detail::vector_from_json(s));
            clf.components_mutable(l).push_back(Component::from_samples(std::move(samples), l, cfg));
        }
    }
    return clf;
}

inline MixtureClassifier deserialize(const std::string& text) {
    return from_json(nlohmann::json::parse(text));
}

}  // namespace affmap::cmm
