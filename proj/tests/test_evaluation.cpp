#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "handpose/evaluation.hpp"
#include "handpose/rng.hpp"

using namespace handpose;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Pose3D random_pose(Rng& rng, int joints = 14) {
    Pose3D p;
    for (int j = 0; j < joints; ++j)
        p.joints.push_back({rng.uniform(-200.0, 200.0), rng.uniform(-200.0, 200.0),
                            rng.uniform(400.0, 900.0)});
    return p;
}

std::pair<std::vector<Pose3D>, std::vector<Pose3D>> random_set(Rng& rng, int frames,
                                                               double noise) {
    std::vector<Pose3D> gts, preds;
    for (int f = 0; f < frames; ++f) {
        const Pose3D gt = random_pose(rng);
        Pose3D pred = gt;
        for (Vec3& j : pred.joints)
            j += Vec3{rng.normal(0.0, noise), rng.normal(0.0, noise), rng.normal(0.0, noise)};
        gts.push_back(gt);
        preds.push_back(pred);
    }
    return {preds, gts};
}

bool reports_equal(const EvalReport& a, const EvalReport& b) {
    return a.average_error_mm == b.average_error_mm && a.loc_error_mm == b.loc_error_mm &&
           a.per_joint_error_mm == b.per_joint_error_mm && a.frame_count == b.frame_count &&
           a.config_fingerprint == b.config_fingerprint &&
           a.all_joints.thresholds_mm == b.all_joints.thresholds_mm &&
           a.all_joints.fractions == b.all_joints.fractions &&
           a.per_frame_average.thresholds_mm == b.per_frame_average.thresholds_mm &&
           a.per_frame_average.fractions == b.per_frame_average.fractions;
}

}  // namespace

TEST_CASE("perfect predictions have zero error") {
    Rng rng(1);
    std::vector<Pose3D> poses;
    for (int i = 0; i < 5; ++i) poses.push_back(random_pose(rng));
    CHECK(average_3d_error(poses, poses) == 0.0);
    for (const double e : per_joint_error(poses, poses)) CHECK(e == 0.0);
    const MetricCurve curve = fraction_curve(poses, poses, default_thresholds(), CurveVariant::AllJoints);
    for (const double f : curve.fractions) CHECK(f == 1.0);
}

TEST_CASE("a 3-4-0 offset is a 5mm error") {
    Pose3D gt;
    gt.joints.push_back({10.0, 20.0, 500.0});
    Pose3D pred;
    pred.joints.push_back({13.0, 24.0, 500.0});
    CHECK(average_3d_error({pred}, {gt}) == doctest::Approx(5.0));
}

TEST_CASE("curves jump at the worst and at the mean error respectively") {
    // One frame, two joints with errors 10mm and 2mm: the all-joints curve
    // jumps at the worst (10mm), the per-frame-average curve at the mean (6mm).
    Pose3D gt;
    gt.joints.push_back({0.0, 0.0, 500.0});
    gt.joints.push_back({50.0, 0.0, 500.0});
    Pose3D pred = gt;
    pred.joints[0].x += 10.0;
    pred.joints[1].x += 2.0;

    const std::vector<double> thresholds = default_thresholds(20.0, 1.0);
    const MetricCurve worst = fraction_curve({pred}, {gt}, thresholds, CurveVariant::AllJoints);
    const MetricCurve mean = fraction_curve({pred}, {gt}, thresholds, CurveVariant::PerFrameAverage);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        CHECK(worst.fractions[i] == (thresholds[i] >= 10.0 ? 1.0 : 0.0));
        CHECK(mean.fractions[i] == (thresholds[i] >= 6.0 ? 1.0 : 0.0));
    }
}

TEST_CASE("curve properties hold over randomized prediction sets") {
    Rng rng(3);
    const std::vector<double> thresholds = default_thresholds();
    for (int trial = 0; trial < 100; ++trial) {
        const auto [preds, gts] = random_set(rng, 8, rng.uniform(1.0, 40.0));
        const MetricCurve all = fraction_curve(preds, gts, thresholds, CurveVariant::AllJoints);
        const MetricCurve avg =
            fraction_curve(preds, gts, thresholds, CurveVariant::PerFrameAverage);
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            CHECK(all.fractions[i] >= 0.0);
            CHECK(all.fractions[i] <= 1.0);
            if (i > 0) {
                CHECK(all.fractions[i] >= all.fractions[i - 1]);
                CHECK(avg.fractions[i] >= avg.fractions[i - 1]);
            }
            CHECK(all.fractions[i] <= avg.fractions[i]);  // max >= mean per frame
        }
    }
}

TEST_CASE("per-joint means average to the overall error") {
    Rng rng(5);
    const auto [preds, gts] = random_set(rng, 10, 12.0);
    const std::vector<double> per_joint = per_joint_error(preds, gts);
    double mean = 0.0;
    for (const double e : per_joint) mean += e;
    mean /= static_cast<double>(per_joint.size());
    CHECK(mean == doctest::Approx(average_3d_error(preds, gts)).epsilon(1e-12));

    // Brute-force recomputation per joint.
    for (std::size_t j = 0; j < per_joint.size(); ++j) {
        double acc = 0.0;
        for (std::size_t f = 0; f < preds.size(); ++f)
            acc += distance(preds[f].joints[j], gts[f].joints[j]);
        CHECK(per_joint[j] == doctest::Approx(acc / preds.size()).epsilon(1e-12));
    }
}

TEST_CASE("average error is symmetric and translation invariant") {
    Rng rng(7);
    const auto [preds, gts] = random_set(rng, 6, 9.0);
    CHECK(average_3d_error(preds, gts) == doctest::Approx(average_3d_error(gts, preds)));

    const Vec3 shift{13.0, -4.0, 21.0};
    auto moved_preds = preds;
    auto moved_gts = gts;
    for (auto& p : moved_preds)
        for (auto& j : p.joints) j += shift;
    for (auto& p : moved_gts)
        for (auto& j : p.joints) j += shift;
    CHECK(std::abs(average_3d_error(moved_preds, moved_gts) - average_3d_error(preds, gts)) <=
          1e-9);
}

TEST_CASE("metric inputs are validated") {
    Rng rng(9);
    const auto [preds, gts] = random_set(rng, 3, 5.0);
    auto short_preds = preds;
    short_preds.pop_back();
    CHECK_THROWS_AS(average_3d_error(short_preds, gts), ShapeError);

    auto bad_joints = preds;
    bad_joints[0].joints.pop_back();
    CHECK_THROWS_AS(average_3d_error(bad_joints, gts), ShapeError);

    CHECK_THROWS_AS(fraction_curve(preds, gts, {5.0, 5.0}, CurveVariant::AllJoints), DomainError);
    CHECK_THROWS_AS(average_3d_error({}, {}), InsufficientDataError);
}

TEST_CASE("default threshold grid runs 0..80mm in 1mm steps") {
    const std::vector<double> t = default_thresholds();
    REQUIRE(t.size() == 81);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 80.0);
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] - t[i - 1] == doctest::Approx(1.0));
}

TEST_CASE("reports export and import losslessly in both formats") {
    Rng rng(11);
    const auto [preds, gts] = random_set(rng, 7, 15.0);
    const EvalReport report = make_report(preds, gts, default_thresholds(), "cafebabe", 3.25);

    for (const ReportFormat fmt : {ReportFormat::Csv, ReportFormat::Json}) {
        const std::string path =
            tmp_path(fmt == ReportFormat::Csv ? "hp_report.csv" : "hp_report.json");
        export_report(report, path, fmt);
        const EvalReport back = import_report(path);
        CHECK(reports_equal(report, back));
    }
}

TEST_CASE("exports are byte-stable and CSV rows match the grid") {
    Rng rng(13);
    const auto [preds, gts] = random_set(rng, 5, 20.0);
    const EvalReport report = make_report(preds, gts, default_thresholds(), "0011223344556677");

    const std::string p1 = tmp_path("hp_rep_a.csv");
    const std::string p2 = tmp_path("hp_rep_b.csv");
    export_report(report, p1, ReportFormat::Csv);
    export_report(report, p2, ReportFormat::Csv);
    const std::string text = slurp(p1);
    CHECK(text == slurp(p2));

    std::size_t all_rows = 0, avg_rows = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("all_joints,", 0) == 0) ++all_rows;
        if (line.rfind("per_frame_average,", 0) == 0) ++avg_rows;
    }
    CHECK(all_rows == report.all_joints.thresholds_mm.size());
    CHECK(avg_rows == report.per_frame_average.thresholds_mm.size());
}
