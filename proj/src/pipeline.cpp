#include "handpose/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "handpose/nn/build.hpp"
#include "handpose/nn/train.hpp"

namespace handpose {

LocMode loc_mode_from_string(const std::string& s) {
    if (s == "ground_truth" || s == "gt") return LocMode::GroundTruth;
    if (s == "ground_truth_noisy" || s == "gt_noisy") return LocMode::GroundTruthNoisy;
    if (s == "com") return LocMode::CenterOfMass;
    if (s == "refined") return LocMode::Refined;
    throw DataFormatError("unknown localization mode '" + s + "'");
}

std::string to_string(LocMode m) {
    switch (m) {
        case LocMode::GroundTruth: return "ground_truth";
        case LocMode::GroundTruthNoisy: return "ground_truth_noisy";
        case LocMode::CenterOfMass: return "com";
        case LocMode::Refined: return "refined";
    }
    return "?";
}

LocalizationResult localize_dataset(const datagen::Dataset& ds, LocMode mode, const RunConfig& cfg,
                                    nn::Network<float>* refiner) {
    if ((mode == LocMode::Refined) && refiner == nullptr)
        throw DomainError("localize_dataset: refined mode needs a refiner network");

    LocalizationResult out;
    out.centers.resize(ds.size());
    out.errors_mm.resize(ds.size());

    parallel_for(ds.size(), cfg.threads, [&](std::size_t i) {
        const Vec3 gt = ds.poses[i].joints.at(0);
        Vec3 center;
        switch (mode) {
            case LocMode::GroundTruth: center = gt; break;
            case LocMode::GroundTruthNoisy: {
                Rng rng(mix_seed(cfg.seed, i, 0x6e6f6973ull));
                center = gt + Vec3{rng.normal(0.0, cfg.loc_noise_std_mm),
                                   rng.normal(0.0, cfg.loc_noise_std_mm),
                                   rng.normal(0.0, cfg.loc_noise_std_mm)};
                break;
            }
            case LocMode::CenterOfMass:
                center = locate_com(ds.frames[i], ds.intrinsics, cfg.segment_extent_mm).point;
                break;
            case LocMode::Refined: {
                const HandLocation com =
                    locate_com(ds.frames[i], ds.intrinsics, cfg.segment_extent_mm);
                center = refine_location(ds.frames[i], com, *refiner, cfg.cube_size_mm,
                                         ds.intrinsics)
                             .point;
                break;
            }
        }
        out.centers[i] = center;
        out.errors_mm[i] = distance(center, gt);
    });

    double sum = 0.0;
    for (const double e : out.errors_mm) sum += e;
    out.mean_error_mm = sum / static_cast<double>(ds.size());
    return out;
}

std::vector<Pose3D> predict_dataset(nn::Network<float>& net, const datagen::Dataset& ds,
                                    const std::vector<Vec3>& centers, const RunConfig& cfg) {
    if (centers.size() != ds.size()) throw ShapeError("predict_dataset: center count mismatch");
    std::vector<Pose3D> preds(ds.size());
    // Forward passes share the immutable network, but layer caches are not
    // shareable; run frames sequentially unless callers clone per thread.
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const CropCube cube{centers[i], cfg.cube_size_mm};
        const NormalizedPatch patch =
            extract_crop(ds.frames[i], cube, ds.intrinsics, cfg.patch_resolution);
        preds[i] = nn::predict(net, patch);
    }
    return preds;
}

EvalReport evaluate_dataset(nn::Network<float>& net, const datagen::Dataset& ds, LocMode mode,
                            const RunConfig& cfg, nn::Network<float>* refiner) {
    const LocalizationResult loc = localize_dataset(ds, mode, cfg, refiner);
    const std::vector<Pose3D> preds = predict_dataset(net, ds, loc.centers, cfg);
    return make_report(preds, ds.poses, cfg.thresholds(), cfg.fingerprint(), loc.mean_error_mm);
}

double mean_pose_baseline_error(const PcaPrior& prior, const datagen::Dataset& ds,
                                const RunConfig& cfg) {
    std::vector<Pose3D> preds(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const CropCube cube{ds.poses[i].joints.at(0), cfg.cube_size_mm};
        preds[i] = denormalize_joints(prior.mean, cube);
    }
    return average_3d_error(preds, ds.poses);
}

namespace {

std::vector<Vec3> reference_centers(const datagen::Dataset& ds) {
    std::vector<Vec3> centers(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) centers[i] = ds.poses[i].joints.at(0);
    return centers;
}

std::vector<std::vector<double>> normalized_poses(const datagen::Dataset& ds, double cube_size) {
    std::vector<std::vector<double>> rows;
    rows.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        rows.push_back(normalize_joints(ds.poses[i], CropCube{ds.poses[i].joints.at(0), cube_size}));
    return rows;
}

}  // namespace

TrainedPose train_posenet_on(const datagen::Dataset& train, const RunConfig& cfg,
                             std::uint64_t seed, int epochs, const nn::ProgressFn& progress) {
    TrainedPose out;

    if (cfg.prior_from_augmented && cfg.aug.any_enabled()) {
        out.prior = fit_robust_prior(train.poses, cfg.aug, cfg.prior_samples, cfg.pca_k,
                                     cfg.cube_size_mm, mix_seed(seed, 0x7072696full));
    } else {
        out.prior = fit_pca(normalized_poses(train, cfg.cube_size_mm), cfg.pca_k);
    }

    const nn::PoseNetOptions opt = cfg.posenet_options(train.joint_count());
    if (opt.input_resolution() != cfg.patch_resolution)
        throw ShapeError("train_posenet_on: patch resolution does not match the network scale");
    out.net = nn::build_posenet<float>(opt, out.prior, seed);

    StreamConfig sc;
    sc.aug = cfg.aug;
    sc.cube_size = cfg.cube_size_mm;
    sc.resolution = cfg.patch_resolution;
    sc.target = TargetKind::FullPose;
    sc.seed = mix_seed(seed, 0x73747265ull);
    const TrainingStream stream(train.frames, train.poses, reference_centers(train),
                                train.intrinsics, sc);
    out.history = nn::train(out.net, stream, cfg.train_config(seed, epochs), progress);
    return out;
}

nn::Network<float> train_refiner_on(const datagen::Dataset& train, const RunConfig& cfg,
                                    std::uint64_t seed, const nn::ProgressFn& progress) {
    // Crops are centered on the center of mass, exactly as at test time.
    std::vector<Vec3> centers(train.size());
    parallel_for(train.size(), cfg.threads, [&](std::size_t i) {
        centers[i] = locate_com(train.frames[i], train.intrinsics, cfg.segment_extent_mm).point;
    });

    const nn::RefineNetOptions opt = cfg.refinenet_options();
    if (opt.input_resolution() != cfg.patch_resolution)
        throw ShapeError("train_refiner_on: patch resolution does not match the network scale");
    nn::Network<float> net = nn::build_refinenet<float>(opt, mix_seed(seed, 0x72656669ull));

    StreamConfig sc;
    sc.aug = cfg.aug;
    sc.aug.enable_translation = true;
    sc.aug.translation_sigma_mm = cfg.refiner_noise_mm;
    sc.cube_size = cfg.cube_size_mm;
    sc.resolution = cfg.patch_resolution;
    sc.target = TargetKind::McpOffset;
    sc.seed = mix_seed(seed, 0x72737472ull);
    const TrainingStream stream(train.frames, train.poses, std::move(centers), train.intrinsics,
                                sc);
    nn::train(net, stream, cfg.train_config(mix_seed(seed, 0x72ull), cfg.refiner_epochs), progress);
    return net;
}

FpsResult fps_benchmark(nn::Network<float>& posenet, nn::Network<float>* refiner,
                        const std::vector<DepthFrame>& frames, const CameraIntrinsics& k,
                        const RunConfig& cfg, int warmup, int runs) {
    if (static_cast<int>(frames.size()) <= warmup)
        throw DomainError("fps_benchmark: no frames left after warmup");
    if (runs < 1) throw DomainError("fps_benchmark: need at least one run");

    const auto process = [&](const DepthFrame& f, const HandLocation* prev) -> HandLocation {
        HandLocation loc;
        if (refiner != nullptr && prev != nullptr) {
            try {
                loc = track(*prev, f, *refiner, cfg.cube_size_mm, k);
            } catch (const EmptyCropError&) {
                loc = locate_com(f, k, cfg.segment_extent_mm);  // tracking lost, reacquire
            }
        } else {
            loc = locate_com(f, k, cfg.segment_extent_mm);
            if (refiner != nullptr) loc = refine_location(f, loc, *refiner, cfg.cube_size_mm, k);
        }
        const NormalizedPatch patch =
            extract_crop(f, CropCube{loc.point, cfg.cube_size_mm}, k, cfg.patch_resolution);
        (void)nn::predict(posenet, patch);
        return loc;
    };

    FpsResult result;
    HandLocation prev;
    bool has_prev = false;
    for (int w = 0; w < warmup; ++w) {
        prev = process(frames[static_cast<std::size_t>(w)], has_prev ? &prev : nullptr);
        has_prev = true;
    }

    const std::size_t timed = frames.size() - static_cast<std::size_t>(warmup);
    for (int r = 0; r < runs; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = static_cast<std::size_t>(warmup); i < frames.size(); ++i) {
            prev = process(frames[i], has_prev ? &prev : nullptr);
            has_prev = true;
        }
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.run_fps.push_back(static_cast<double>(timed) / sec);
    }

    double mean = 0.0;
    for (const double f : result.run_fps) mean += f;
    mean /= static_cast<double>(result.run_fps.size());
    double var = 0.0;
    for (const double f : result.run_fps) var += (f - mean) * (f - mean);
    var /= static_cast<double>(result.run_fps.size());
    result.mean_fps = mean;
    result.std_fps = std::sqrt(var);
    return result;
}

}  // namespace handpose
