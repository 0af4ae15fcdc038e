#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "handpose/datagen/render.hpp"
#include "handpose/localization.hpp"
#include "handpose/nn/build.hpp"

using namespace handpose;

namespace {

CameraIntrinsics cam() { return {300.0, 300.0, 160.0, 120.0, 320, 240}; }

void zero_params(nn::Network<float>& net) {
    for (auto& p : net.parameters()) p.value->fill(0.0f);
}

}  // namespace

TEST_CASE("segmentation keeps the single object in a frame") {
    DepthFrame f(320, 240);
    for (int y = 100; y < 140; ++y)
        for (int x = 150; x < 190; ++x) f.at(x, y) = 500;

    const auto mask = segment_hand(f, 250.0);
    std::size_t on = 0;
    for (int y = 0; y < 240; ++y)
        for (int x = 0; x < 320; ++x) {
            if (mask[static_cast<std::size_t>(y) * 320 + x]) {
                ++on;
                CHECK(f.at(x, y) == 500);
            }
        }
    CHECK(on == 40 * 40);
}

TEST_CASE("segmentation excludes a far wall") {
    DepthFrame f(320, 240, 1200);  // wall
    for (int y = 100; y < 140; ++y)
        for (int x = 150; x < 190; ++x) f.at(x, y) = 400;  // hand

    const auto mask = segment_hand(f, 250.0);
    for (int y = 0; y < 240; ++y)
        for (int x = 0; x < 320; ++x)
            CHECK(static_cast<bool>(mask[static_cast<std::size_t>(y) * 320 + x]) ==
                  (f.at(x, y) == 400));
}

TEST_CASE("segmentation of an all-missing frame reports no hand") {
    DepthFrame f(64, 48, 0);
    CHECK_THROWS_AS(segment_hand(f, 250.0), NoHandError);
}

TEST_CASE("segmentation masks are monotone in the extent") {
    Rng rng(1);
    DepthFrame f(160, 120);
    for (auto& d : f.depth) d = rng.uniform() < 0.1 ? 0 : static_cast<std::uint16_t>(rng.uniform(350.0, 1300.0));

    std::vector<std::uint8_t> prev(f.depth.size(), 0);
    for (const double extent : {50.0, 150.0, 400.0, 900.0}) {
        const auto mask = segment_hand(f, extent);
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (prev[i]) CHECK(mask[i]);  // smaller extents are subsets
        prev = mask;
    }
}

TEST_CASE("center of mass of a single pixel is its backprojection") {
    DepthFrame f(320, 240, 0);
    f.at(210, 90) = 730;
    const auto mask = segment_hand(f, 100.0);
    const HandLocation loc = center_of_mass(f, mask, cam());
    const Vec3 expected = backproject(210, 90, 730, cam());
    CHECK(distance(loc.point, expected) <= 1e-12);
    CHECK(loc.source == LocationSource::CenterOfMass);
}

TEST_CASE("center of mass of a symmetric pair sits on the principal axis") {
    DepthFrame f(320, 240, 0);
    f.at(150, 120) = 600;  // symmetric about cx = 160
    f.at(170, 120) = 600;
    const auto mask = segment_hand(f, 50.0);
    const HandLocation loc = center_of_mass(f, mask, cam());
    CHECK(loc.point.x == doctest::Approx(0.0));
    CHECK(loc.point.y == doctest::Approx(0.0));
    CHECK(loc.point.z == doctest::Approx(600.0));
}

TEST_CASE("center of mass rejects an empty mask and mismatched sizes") {
    DepthFrame f(32, 32, 500);
    CHECK_THROWS_AS(center_of_mass(f, std::vector<std::uint8_t>(32 * 32, 0), cam()), NoHandError);
    CHECK_THROWS_AS(center_of_mass(f, std::vector<std::uint8_t>(10, 1), cam()), ShapeError);
}

TEST_CASE("center of mass matches an independent recomputation") {
    Rng rng(2);
    DepthFrame f(160, 120, 0);
    for (int y = 40; y < 90; ++y)
        for (int x = 50; x < 110; ++x)
            if (rng.uniform() < 0.6) f.at(x, y) = static_cast<std::uint16_t>(rng.uniform(420.0, 520.0));

    const auto mask = segment_hand(f, 300.0);
    CameraIntrinsics k{150.0, 150.0, 80.0, 60.0, 160, 120};
    const HandLocation loc = center_of_mass(f, mask, k);

    // Oracle: accumulate in a different (reverse) order.
    Vec3 sum;
    std::size_t n = 0;
    for (int y = 119; y >= 0; --y)
        for (int x = 159; x >= 0; --x)
            if (mask[static_cast<std::size_t>(y) * 160 + x]) {
                sum += backproject(x, y, f.at(x, y), k);
                ++n;
            }
    CHECK(distance(loc.point, sum / static_cast<double>(n)) <= 1e-9);
}

TEST_CASE("center of mass of a rendered sphere lands inside the sphere") {
    using namespace handpose::datagen;
    SyntheticSceneConfig cfg;
    cfg.missing_prob = 0.0;
    cfg.depth_jitter_mm = 0.0;
    const Vec3 center{30.0, -20.0, 650.0};
    const double radius = 60.0;

    DepthFrame f(cfg.intrinsics.width, cfg.intrinsics.height, 0);
    const Capsule sphere{center, center, radius};
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            const double d = ray_capsule_depth(x, y, cfg.intrinsics, sphere);
            if (std::isfinite(d)) f.at(x, y) = static_cast<std::uint16_t>(std::lround(d));
        }

    const HandLocation loc = center_of_mass(f, segment_hand(f, 2.0 * radius), cfg.intrinsics);
    CHECK(distance(loc.point, center) < radius);
}

TEST_CASE("a zero refinement network leaves the location unchanged") {
    using namespace handpose::datagen;
    SyntheticSceneConfig cfg;
    cfg.missing_prob = 0.0;
    const HandModel model = make_hand_model(1234, 0);
    Rng rng(3);
    const PoseSample sample = sample_pose(model, cfg, rng);
    const DepthFrame frame = render_depth(model, sample.pose, cfg, rng);

    nn::Network<float> net = nn::build_refinenet<float>(nn::RefineNetOptions{}, 4);
    zero_params(net);

    const HandLocation com = locate_com(frame, cfg.intrinsics, 250.0);
    const HandLocation refined = refine_location(frame, com, net, 300.0, cfg.intrinsics);
    CHECK(distance(refined.point, com.point) <= 1e-9);
    CHECK(refined.source == LocationSource::Refined);

    const HandLocation tracked = track(com, frame, net, 300.0, cfg.intrinsics);
    CHECK(distance(tracked.point, com.point) <= 1e-9);
    CHECK(tracked.source == LocationSource::Tracked);
}

TEST_CASE("tracking a hand that left the frame raises the empty-crop error") {
    DepthFrame f(320, 240, 1200);
    nn::Network<float> net = nn::build_refinenet<float>(nn::RefineNetOptions{}, 5);
    zero_params(net);
    const HandLocation far_away{{5000.0, 0.0, 700.0}, LocationSource::Refined};
    CHECK_THROWS_AS(track(far_away, f, net, 300.0, cam()), EmptyCropError);
}
