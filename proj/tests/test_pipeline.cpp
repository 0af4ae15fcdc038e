#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "handpose/ablation.hpp"
#include "handpose/nn/build.hpp"
#include "handpose/pipeline.hpp"

using namespace handpose;

namespace {

RunConfig tiny_config() {
    RunConfig cfg;
    cfg.seed = 5;
    cfg.pca_k = 8;
    cfg.prior_samples = 2000;
    cfg.epochs = 2;
    cfg.batch_size = 8;
    cfg.learning_rate = 1e-3;
    cfg.refiner_epochs = 1;
    return cfg;
}

struct Data {
    datagen::Dataset train;
    datagen::Dataset test;
};

Data make_data(const RunConfig& cfg, int train_n = 24, int test_n = 8) {
    Data d;
    d.train = datagen::generate_dataset(train_n, 2, cfg.scene, cfg.seed, 0);
    d.test = datagen::generate_dataset(test_n, 1, cfg.scene, cfg.seed + 1, 2);
    return d;
}

PcaPrior quick_prior(const datagen::Dataset& ds, const RunConfig& cfg) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < ds.size(); ++i)
        rows.push_back(normalize_joints(ds.poses[i], CropCube{ds.poses[i].joints[0],
                                                              cfg.cube_size_mm}));
    return fit_pca(rows, cfg.pca_k);
}

}  // namespace

TEST_CASE("localization modes produce sensible centers and errors") {
    const RunConfig cfg = tiny_config();
    const Data d = make_data(cfg);

    const LocalizationResult gt = localize_dataset(d.test, LocMode::GroundTruth, cfg, nullptr);
    CHECK(gt.mean_error_mm == 0.0);

    const LocalizationResult noisy =
        localize_dataset(d.test, LocMode::GroundTruthNoisy, cfg, nullptr);
    CHECK(noisy.mean_error_mm > 0.0);
    CHECK(noisy.mean_error_mm < 40.0);  // ~sigma*sqrt(3) scale, not wild

    const LocalizationResult com = localize_dataset(d.test, LocMode::CenterOfMass, cfg, nullptr);
    CHECK(com.mean_error_mm > 0.0);

    CHECK_THROWS_AS(localize_dataset(d.test, LocMode::Refined, cfg, nullptr), DomainError);

    // The noisy mode is deterministic given the config seed.
    const LocalizationResult noisy2 =
        localize_dataset(d.test, LocMode::GroundTruthNoisy, cfg, nullptr);
    CHECK(noisy.errors_mm == noisy2.errors_mm);
}

TEST_CASE("evaluate_dataset wires localization, prediction, and metrics together") {
    const RunConfig cfg = tiny_config();
    const Data d = make_data(cfg);
    const PcaPrior prior = quick_prior(d.train, cfg);
    nn::Network<float> net = nn::build_posenet<float>(cfg.posenet_options(14), prior, 3);

    const EvalReport report = evaluate_dataset(net, d.test, LocMode::GroundTruth, cfg, nullptr);
    CHECK(report.frame_count == d.test.size());
    CHECK(report.average_error_mm > 0.0);
    CHECK(report.per_joint_error_mm.size() == 14);
    CHECK(report.loc_error_mm == 0.0);
    CHECK(report.config_fingerprint == cfg.fingerprint());
    CHECK(report.all_joints.thresholds_mm.size() == cfg.thresholds().size());
}

TEST_CASE("the mean-pose baseline matches a direct computation") {
    const RunConfig cfg = tiny_config();
    const Data d = make_data(cfg);
    const PcaPrior prior = quick_prior(d.train, cfg);

    std::vector<Pose3D> preds;
    for (std::size_t i = 0; i < d.test.size(); ++i)
        preds.push_back(denormalize_joints(prior.mean,
                                           CropCube{d.test.poses[i].joints[0], cfg.cube_size_mm}));
    CHECK(mean_pose_baseline_error(prior, d.test, cfg) ==
          doctest::Approx(average_3d_error(preds, d.test.poses)));
}

TEST_CASE("a single-cell ablation yields one report") {
    RunConfig cfg = tiny_config();
    const Data d = make_data(cfg, 30, 6);

    AblationCellSpec cell;
    cell.label = "only";
    cell.aug = AugmentConfig{};
    cell.loc = LocMode::GroundTruthNoisy;
    const auto rows = ablate(d.train, d.test, {cell}, cfg, 1);
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].failed);
    CHECK(rows[0].report.frame_count == d.test.size());
    CHECK(rows[0].seed_pose_errors_mm.size() == 1);
}

TEST_CASE("ablation presets mirror the published row structures") {
    const AugmentConfig base;
    const auto t4 = ablation_preset("table4", base);
    REQUIRE(t4.size() == 6);
    CHECK(t4[0].label == "No augmentation");
    CHECK(t4[1].label == "Translation (T)");
    CHECK(t4[2].label == "Rotation (R)");
    CHECK(t4[3].label == "Scale (S)");
    CHECK(t4[4].label == "All (R+T+S)");
    CHECK(t4[5].label == "All (R+T+S) & no prior aug.");
    CHECK_FALSE(t4[5].prior_from_augmented);
    CHECK(t4[4].aug.enable_rotation);
    CHECK_FALSE(t4[0].aug.any_enabled());

    const auto t5 = ablation_preset("table5", base);
    REQUIRE(t5.size() == 3);
    CHECK(t5[0].loc == LocMode::CenterOfMass);
    CHECK(t5[1].loc == LocMode::Refined);
    CHECK(t5[2].loc == LocMode::GroundTruth);

    const auto t6 = ablation_preset("table6", base);
    REQUIRE(t6.size() == 3);
    CHECK(t6[0].arch == "original");
    CHECK(t6[1].arch == "original_wide");
    CHECK(t6[2].arch == "resnet");

    CHECK_THROWS_AS(ablation_preset("table7", base), DataFormatError);
}

TEST_CASE("failing cells are recorded rather than fatal") {
    RunConfig cfg = tiny_config();
    cfg.learning_rate = 1e18;  // diverges
    const Data d = make_data(cfg, 16, 4);

    AblationCellSpec cell;
    cell.label = "diverges";
    const auto rows = ablate(d.train, d.test, {cell}, cfg, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].failed);
    CHECK_FALSE(rows[0].error.empty());
}

TEST_CASE("doubling the input resolution strictly reduces throughput") {
    RunConfig desk_cfg = tiny_config();
    const datagen::Dataset seq = datagen::generate_dataset(24, 1, desk_cfg.scene, 77);

    const PcaPrior prior = quick_prior(seq, desk_cfg);
    nn::PoseNetOptions desk_opt = desk_cfg.posenet_options(14);
    nn::Network<float> desk_net = nn::build_posenet<float>(desk_opt, prior, 5);

    RunConfig full_cfg = desk_cfg;
    full_cfg.scale = "full";
    full_cfg.patch_resolution = 128;
    nn::PoseNetOptions full_opt = full_cfg.posenet_options(14);
    nn::Network<float> full_net = nn::build_posenet<float>(full_opt, prior, 5);

    const FpsResult desk_fps =
        fps_benchmark(desk_net, nullptr, seq.frames, seq.intrinsics, desk_cfg, 4, 3);
    const FpsResult full_fps =
        fps_benchmark(full_net, nullptr, seq.frames, seq.intrinsics, full_cfg, 4, 3);
    CHECK(full_fps.mean_fps < desk_fps.mean_fps);
}

TEST_CASE("the benchmark rejects degenerate inputs") {
    RunConfig cfg = tiny_config();
    const datagen::Dataset seq = datagen::generate_dataset(12, 1, cfg.scene, 78);
    const PcaPrior prior = quick_prior(seq, cfg);
    nn::Network<float> net = nn::build_posenet<float>(cfg.posenet_options(14), prior, 6);
    CHECK_THROWS_AS(fps_benchmark(net, nullptr, seq.frames, seq.intrinsics, cfg, 12, 3),
                    DomainError);  // no frames left after warmup
    CHECK_THROWS_AS(fps_benchmark(net, nullptr, seq.frames, seq.intrinsics, cfg, 1, 0),
                    DomainError);  // no runs
}
