#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "affmap/cmm/serialization.hpp"
#include "affmap/core/rng.hpp"

using affmap::cmm::CmmConfig;
using affmap::cmm::Label;
using affmap::cmm::MixtureClassifier;

namespace {

MixtureClassifier trained_classifier(int dim, std::uint64_t seed, int n_samples) {
    CmmConfig cfg;
    cfg.feature_dim = dim;
    MixtureClassifier clf(cfg, seed);
    std::mt19937_64 gen(seed + 1);
    for (int i = 0; i < n_samples; ++i) {
        Eigen::VectorXd x(dim);
        for (int d = 0; d < dim; ++d) x[d] = 2.0 * affmap::uniform01(gen) - 1.0;
        clf.add_sample({x, affmap::uniform01(gen) < 0.5 ? Label::effect : Label::no_effect});
    }
    return clf;
}

}  // namespace

TEST_CASE("classifier serialization round-trips bit-exactly") {
    const MixtureClassifier clf = trained_classifier(6, 42, 50);
    const std::string text = affmap::cmm::serialize(clf);
    const MixtureClassifier back = affmap::cmm::deserialize(text);

    CHECK(affmap::cmm::serialize(back) == text);
    for (Label l : {Label::effect, Label::no_effect}) {
        REQUIRE(back.components(l).size() == clf.components(l).size());
        for (std::size_t k = 0; k < clf.components(l).size(); ++k) {
            CHECK(back.components(l)[k].mean() == clf.components(l)[k].mean());
            CHECK(back.components(l)[k].covariance() == clf.components(l)[k].covariance());
            CHECK(back.components(l)[k].size() == clf.components(l)[k].size());
        }
    }
    // generator state survives: both classifiers continue identically
    MixtureClassifier a = clf, b = back;
    std::mt19937_64 gen(7);
    for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd x(6);
        for (int d = 0; d < 6; ++d) x[d] = affmap::normal01(gen);
        a.add_sample({x, Label::effect});
        b.add_sample({x, Label::effect});
    }
    CHECK(affmap::cmm::serialize(a) == affmap::cmm::serialize(b));
}

TEST_CASE("tampered checkpoints are rejected or detectably different") {
    const MixtureClassifier clf = trained_classifier(4, 9, 30);
    const std::string text = affmap::cmm::serialize(clf);

    CHECK_THROWS(affmap::cmm::deserialize("{\"format\":\"other\"}"));
    CHECK_THROWS(affmap::cmm::deserialize("{\"format\":\"affmap-cmm\",\"version\":99}"));

    // flipping one sample label changes the serialized state
    nlohmann::json doc = affmap::cmm::to_json(clf);
    auto& samples = doc["classes"]["effect"][0]["samples"];
    samples[0][0] = samples[0][0].get<double>() + 1.0;
    const MixtureClassifier tampered = affmap::cmm::from_json(doc);
    CHECK(affmap::cmm::serialize(tampered) != text);
}

TEST_CASE("golden checkpoint stays parseable and stable") {
    const std::filesystem::path golden =
        std::filesystem::path(AFFMAP_SCENARIO_DIR).parent_path() / "tests" / "golden" /
        "classifier_small.cmm";
    REQUIRE(std::filesystem::exists(golden));
    std::ifstream in(golden);
    std::stringstream buf;
    buf << in.rdbuf();

    const MixtureClassifier clf = affmap::cmm::deserialize(buf.str());
    CHECK(affmap::cmm::serialize(clf) == buf.str());
    // the golden file was produced by trained_classifier(5, 77, 40)
    const MixtureClassifier regen = trained_classifier(5, 77, 40);
    CHECK(affmap::cmm::serialize(regen) == buf.str());
}
