#pragma once

#include "handpose/config.hpp"
#include "handpose/datagen/dataset.hpp"
#include "handpose/evaluation.hpp"
#include "handpose/localization.hpp"
#include "handpose/prior.hpp"

namespace handpose {

enum class LocMode { GroundTruth, GroundTruthNoisy, CenterOfMass, Refined };

LocMode loc_mode_from_string(const std::string& s);
std::string to_string(LocMode m);

struct LocalizationResult {
    std::vector<Vec3> centers;
    std::vector<double> errors_mm;  // distance to the ground-truth reference joint
    double mean_error_mm = 0.0;
};

/// Cube centers for every frame under the requested localization mode.
/// Refined mode needs a trained refiner network.
LocalizationResult localize_dataset(const datagen::Dataset& ds, LocMode mode, const RunConfig& cfg,
                                    nn::Network<float>* refiner);

/// Crop at each center and run the pose network; returns camera-space poses.
std::vector<Pose3D> predict_dataset(nn::Network<float>& net, const datagen::Dataset& ds,
                                    const std::vector<Vec3>& centers, const RunConfig& cfg);

/// localize + predict + metrics in one step.
EvalReport evaluate_dataset(nn::Network<float>& net, const datagen::Dataset& ds, LocMode mode,
                            const RunConfig& cfg, nn::Network<float>* refiner);

/// Mean-pose baseline: predict the prior mean for every frame (ground-truth
/// cubes). The floor any trained model has to beat.
double mean_pose_baseline_error(const PcaPrior& prior, const datagen::Dataset& ds,
                                const RunConfig& cfg);

struct TrainedPose {
    nn::Network<float> net;
    PcaPrior prior;
    nn::TrainResult history;
};

/// Fit the prior (robust or plain per cfg), build the pose network, and train
/// it on ground-truth-centered cubes with the configured augmentation.
TrainedPose train_posenet_on(const datagen::Dataset& train, const RunConfig& cfg,
                             std::uint64_t seed, int epochs,
                             const nn::ProgressFn& progress = nullptr);

/// Train the localization refiner on center-of-mass crops with targets
/// pointing at the reference joint.
nn::Network<float> train_refiner_on(const datagen::Dataset& train, const RunConfig& cfg,
                                    std::uint64_t seed,
                                    const nn::ProgressFn& progress = nullptr);

struct FpsResult {
    double mean_fps = 0.0;
    double std_fps = 0.0;
    std::vector<double> run_fps;
};

/// Wall-clock throughput of the track -> predict loop, single thread, after a
/// warmup pass; mean and std over `runs` repetitions.
FpsResult fps_benchmark(nn::Network<float>& posenet, nn::Network<float>* refiner,
                        const std::vector<DepthFrame>& frames, const CameraIntrinsics& k,
                        const RunConfig& cfg, int warmup, int runs = 5);

}  // namespace handpose
