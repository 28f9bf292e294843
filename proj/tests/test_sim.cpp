#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "affmap/percept/render.hpp"
#include "affmap/percept/segment.hpp"
#include "affmap/sim/primitives.hpp"
#include "affmap/sim/scene.hpp"

using affmap::percept::PointCloud;
using affmap::percept::Segment;
using affmap::sim::ActionKind;
using affmap::sim::apply_button;
using affmap::sim::apply_lift;
using affmap::sim::apply_push;
using affmap::sim::Button;
using affmap::sim::detect_button_effect;
using affmap::sim::detect_change;
using affmap::sim::detect_lift;
using affmap::sim::NoiseParams;
using affmap::sim::Scene;
using affmap::sim::SceneObject;
using affmap::sim::SimParams;
using affmap::sim::ShapeKind;

namespace {

Scene test_scene() {
    Scene s;
    s.support = Eigen::AlignedBox2d(Eigen::Vector2d(-0.4, -0.3), Eigen::Vector2d(0.4, 0.3));
    s.back_y = 0.3;
    s.back_height = 0.3;
    s.render_density = 12000.0;

    SceneObject cube;
    cube.name = "cube";
    cube.shape = ShapeKind::box;
    cube.size = {0.08, 0.08, 0.08};
    cube.position = {-0.15, 0.0};
    cube.color_lab = {48, 60, 40};
    cube.pushable = true;
    cube.liftable = true;
    s.objects.push_back(cube);

    SceneObject fixture;
    fixture.name = "fixture";
    fixture.shape = ShapeKind::box;
    fixture.size = {0.1, 0.08, 0.15};
    fixture.position = {0.25, 0.12};
    fixture.color_lab = {55, 2, -2};
    s.objects.push_back(fixture);

    Button b;
    b.name = "btn";
    b.center = {0.0, 0.15};
    s.buttons.push_back(b);
    return s;
}

SimParams params() {
    SimParams p;
    p.push_offset = 0.04;
    p.surface_tolerance = 0.012;
    // grid spacing at density 12000 is 9.13 mm; the push displacement lands
    // 2.1+ mm off every face lattice, so this threshold separates real
    // motion from regridding
    p.change_threshold = 0.0012;
    return p;
}

}  // namespace

TEST_CASE("push on the background leaves the scene unchanged") {
    const Scene s = test_scene();
    std::mt19937_64 gen(1);
    const auto out = apply_push(s, {0.0, -0.2, 0.0}, gen, 0.0, params());
    CHECK(out.executed);
    CHECK(out.scene_after.objects[0].position == s.objects[0].position);
    CHECK(out.scene_after.objects[1].position == s.objects[1].position);
}

TEST_CASE("push out of the workspace does not execute") {
    const Scene s = test_scene();
    std::mt19937_64 gen(1);
    const auto out = apply_push(s, {5.0, 5.0, 5.0}, gen, 0.0, params());
    CHECK_FALSE(out.executed);
    CHECK(out.scene_after.objects[0].position == s.objects[0].position);
}

TEST_CASE("push on a pushable object moves it by exactly the offset") {
    const Scene s = test_scene();
    std::mt19937_64 gen(1);
    // target on the cube top face
    const Eigen::Vector3d target(-0.15, 0.0, 0.08);
    const auto out = apply_push(s, target, gen, 0.0, params());
    REQUIRE(out.executed);
    const Eigen::Vector2d moved = out.scene_after.objects[0].position - s.objects[0].position;
    CHECK_THAT(moved.norm(), Catch::Matchers::WithinAbs(0.04, 1e-12));
    CHECK_THAT(moved.normalized().dot(affmap::sim::push_direction()),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
    // a second push reverses the direction, so the object oscillates
    const Eigen::Vector3d target2 = target + 0.04 * Eigen::Vector3d(affmap::sim::push_direction().x(),
                                                                    affmap::sim::push_direction().y(), 0.0);
    const auto out2 = apply_push(out.scene_after, target2, gen, 0.0, params());
    CHECK((out2.scene_after.objects[0].position - s.objects[0].position).norm() < 1e-12);
}

TEST_CASE("push on the fixed structure does nothing") {
    const Scene s = test_scene();
    std::mt19937_64 gen(1);
    const auto out = apply_push(s, {0.25, 0.12, 0.15}, gen, 0.0, params());
    CHECK(out.executed);
    CHECK(out.scene_after.objects[1].position == s.objects[1].position);
}

TEST_CASE("push failure rate follows fail_prob") {
    const Scene s = test_scene();
    std::mt19937_64 gen(1234);
    const Eigen::Vector3d target(-0.15, 0.0, 0.08);
    int moved = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const auto out = apply_push(s, target, gen, 0.1, params());
        if (out.scene_after.objects[0].position != s.objects[0].position) ++moved;
    }
    CHECK_THAT(static_cast<double>(moved) / trials, Catch::Matchers::WithinAbs(0.9, 0.01));
}

TEST_CASE("identical clouds produce no change") {
    const Scene s = test_scene();
    std::mt19937_64 gen(2);
    const PointCloud cloud = affmap::percept::render(s, NoiseParams{}, gen);
    Segment seg;
    for (int i = 0; i < 200; ++i) seg.point_indices.push_back(i);
    CHECK_FALSE(detect_change(cloud, cloud, seg, 0.0));
}

TEST_CASE("a moved object is detected through the difference cloud") {
    const Scene s = test_scene();
    std::mt19937_64 gen(3);
    const PointCloud before = affmap::percept::render(s, NoiseParams{}, gen);
    std::mt19937_64 gen2(3);
    const auto out = apply_push(s, {-0.15, 0.0, 0.08}, gen2, 0.0, params());
    const PointCloud after = affmap::percept::render(out.scene_after, NoiseParams{}, gen);

    // segment = the cube's own points
    Segment on_cube, on_plane;
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (before.source[i] == affmap::sim::source_object(0)) {
            on_cube.point_indices.push_back(static_cast<int>(i));
        } else if (before.source[i] == affmap::sim::kSourceSupport &&
                   before.points[i].position.x() > 0.1) {
            on_plane.point_indices.push_back(static_cast<int>(i));
        }
    }
    CHECK(detect_change(before, after, on_cube, 0.0012));
    CHECK_FALSE(detect_change(before, after, on_plane, 0.0012));
}

TEST_CASE("noise-only displacement stays below the calibrated threshold") {
    // dense cloud relative to the noise, threshold at three sigma
    Scene s;
    s.support = Eigen::AlignedBox2d(Eigen::Vector2d(-0.06, -0.06), Eigen::Vector2d(0.06, 0.06));
    s.back_height = 0.0;
    s.render_density = 250000.0;  // 2 mm spacing
    NoiseParams noise;
    noise.sigma_depth = 0.002;
    std::mt19937_64 gen(5);
    const PointCloud before = affmap::percept::render(s, noise, gen);
    const PointCloud after = affmap::percept::render(s, noise, gen);
    Segment seg;
    for (std::size_t i = 0; i < before.size(); i += 40) {
        seg.point_indices.push_back(static_cast<int>(i));
    }
    CHECK_FALSE(detect_change(before, after, seg, 3.0 * noise.sigma_depth));
}

TEST_CASE("button effect requires the active disc") {
    Scene s = test_scene();
    const Button& b = s.buttons[0];
    const double disc_y = s.button_disc_face_y(b);

    // dead center of the disc
    auto out = apply_button(s, {b.center.x(), disc_y, b.center.y()}, params());
    CHECK(out.executed);
    CHECK(detect_button_effect(out));
    CHECK(out.scene_after.interface_flag);

    // on the housing, outside the disc
    out = apply_button(s, {b.center.x() + b.housing_half - 0.002, s.back_y - b.housing_depth,
                           b.center.y() + b.housing_half - 0.002},
                       params());
    CHECK(out.executed);
    CHECK_FALSE(detect_button_effect(out));

    // on the support plane
    out = apply_button(s, {0.0, -0.1, 0.0}, params());
    CHECK_FALSE(detect_button_effect(out));

    // deactivated buttons never fire
    s.buttons[0].activable = false;
    out = apply_button(s, {b.center.x(), disc_y, b.center.y()}, params());
    CHECK_FALSE(detect_button_effect(out));
}

TEST_CASE("lift grabs liftable objects only") {
    const Scene s = test_scene();
    std::mt19937_64 gen(1);
    // liftable cube
    auto out = apply_lift(s, {-0.15, 0.0, 0.08}, gen, 0.0, params());
    CHECK(out.gripper_aperture > 0.0);
    CHECK(detect_lift(out));
    CHECK_THAT(out.gripper_aperture, Catch::Matchers::WithinAbs(0.08 / 0.12, 1e-12));
    // non-liftable fixture
    out = apply_lift(s, {0.25, 0.12, 0.15}, gen, 0.0, params());
    CHECK(out.gripper_aperture == 0.0);
    CHECK_FALSE(detect_lift(out));
    // background
    out = apply_lift(s, {0.0, -0.2, 0.0}, gen, 0.0, params());
    CHECK_FALSE(detect_lift(out));
    // scene never changes pose under lift
    CHECK(out.scene_after.objects[0].position == s.objects[0].position);
}

TEST_CASE("no spontaneous change: noiseless renders of an untouched scene are identical") {
    const Scene s = test_scene();
    std::mt19937_64 g1(9), g2(10);
    const PointCloud a = affmap::percept::render(s, NoiseParams{}, g1);
    const PointCloud b = affmap::percept::render(s, NoiseParams{}, g2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.points[i].position == b.points[i].position);
    }
}

TEST_CASE("detector soundness: zero-noise labels agree with scene flags on every segment") {
    const Scene s = test_scene();
    std::mt19937_64 gen(11);
    const PointCloud cloud = affmap::percept::render(s, NoiseParams{}, gen);
    affmap::percept::SegmentationParams seg_params;
    seg_params.r_seed = 0.04;
    const auto segments = affmap::percept::segment(cloud, seg_params);

    const SimParams p = params();
    int checked = 0;
    for (const auto& seg : segments) {
        // skip segments whose points straddle scene elements; their centroid
        // is not a meaningful single-element target
        std::set<std::int32_t> sources;
        for (int i : seg.point_indices) sources.insert(cloud.source[static_cast<std::size_t>(i)]);
        if (sources.size() != 1) continue;
        const std::int32_t src = *sources.begin();
        ++checked;

        std::mt19937_64 g(100 + seg.id);
        const Eigen::Vector3d target = seg.centroid.position;

        // push: change detection matches the pushable flag
        {
            const auto out = apply_push(s, target, g, 0.0, p);
            std::mt19937_64 gr(55);
            const PointCloud after = affmap::percept::render(out.scene_after, NoiseParams{}, gr);
            const bool effect = detect_change(cloud, after, seg, p.change_threshold);
            CHECK(effect == affmap::sim::source_affords(s, src, ActionKind::push));
        }
        // lift
        {
            const auto out = apply_lift(s, target, g, 0.0, p);
            CHECK(detect_lift(out) == affmap::sim::source_affords(s, src, ActionKind::lift));
        }
        // button: fires exactly on active-disc segments (the housing counts
        // as ground truth for the metrics but never activates)
        {
            const auto out = apply_button(s, target, p);
            const bool on_disc = src >= 1000 && src % 2 == 1;
            CHECK(detect_button_effect(out) == on_disc);
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("scenario files round-trip through the loader") {
    nlohmann::json doc;
    doc["format"] = "affmap-scenario";
    doc["version"] = 1;
    doc["support"] = {{"x", {-0.4, 0.4}}, {"y", {-0.3, 0.3}}, {"color_lab", {82, 0, 2}}};
    doc["back_plane"] = {{"y", 0.3}, {"height", 0.3}, {"color_lab", {93, 0, 1}}};
    doc["workspace"] = {{"min", {-0.7, -0.5, -0.05}}, {"max", {0.7, 0.5, 0.6}}};
    doc["render_density"] = 9000.0;
    doc["objects"] = nlohmann::json::array({
        {{"name", "cube"}, {"shape", "box"}, {"size", {0.08, 0.08, 0.08}},
         {"position", {-0.1, 0.0}}, {"color_lab", {48, 60, 40}}, {"pushable", true},
         {"liftable", true}},
        {{"name", "pile"}, {"shape", "cylinder"}, {"radius", 0.06}, {"height", 0.1},
         {"position", {0.15, 0.05}}, {"color_lab", {60, 40, 55}}, {"pushable", true}},
    });
    doc["buttons"] = nlohmann::json::array({
        {{"name", "b1"}, {"center", {0.0, 0.15}}, {"active_radius", 0.02}},
    });
    doc["noise"] = {{"sigma_depth", 0.0004}, {"sigma_color", 0.6}};
    doc["sim"] = {{"push_offset", 0.05}, {"fail_prob", 0.1}, {"change_threshold", 0.012}};
    doc["segmentation"] = {{"r_seed", 0.04}, {"lambda", 0.3}};

    const auto scenario = affmap::sim::scenario_from_json(doc);
    CHECK(scenario.scene.objects.size() == 2);
    CHECK(scenario.scene.objects[1].shape == ShapeKind::cylinder);
    CHECK(scenario.scene.objects[1].radius() == 0.06);
    CHECK(scenario.scene.buttons.size() == 1);
    CHECK(scenario.noise.sigma_depth == 0.0004);
    CHECK(scenario.sim.fail_prob == 0.1);
    CHECK(scenario.sim.push_offset == 0.05);
    CHECK(scenario.seg_r_seed == 0.04);
    CHECK(scenario.seg_lambda == 0.3);
    CHECK(scenario.scene.render_density == 9000.0);

    CHECK_THROWS(affmap::sim::scenario_from_json(nlohmann::json{{"format", "bogus"}}));
}
