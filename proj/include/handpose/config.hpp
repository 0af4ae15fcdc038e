#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>

#include "handpose/augmentation.hpp"
#include "handpose/datagen/render.hpp"
#include "handpose/nn/build.hpp"
#include "handpose/nn/train.hpp"

namespace handpose {

/// One JSON document covering data generation, augmentation, the prior, the
/// architecture preset, the optimizer, and evaluation grids. Every run logs
/// its fingerprint into reports so results are traceable to a configuration.
struct RunConfig {
    std::uint64_t seed = 1;
    int threads = 1;

    // synthetic data
    int train_frames = 2000;
    int test_frames = 500;
    int train_subjects = 8;
    int test_subjects = 2;
    datagen::SyntheticSceneConfig scene;

    // crop + localization
    double cube_size_mm = 300.0;
    int patch_resolution = 64;
    double segment_extent_mm = 250.0;
    double loc_noise_std_mm = 5.0;  // test-time noise for the noisy-GT mode

    // prior
    int pca_k = 30;
    std::uint64_t prior_samples = 100000;  // desk-scale default; 1000000 at full scale
    bool prior_from_augmented = true;

    AugmentConfig aug;

    // networks
    std::string scale = "desk";   // desk | full
    std::string arch = "resnet";  // resnet | original | original_wide
    double dropout = 0.3;
    bool basic_blocks = false;
    bool freeze_prior = false;
    int fc_width = 0;

    // optimization
    int epochs = 100;
    int batch_size = 128;
    double learning_rate = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    // refiner training
    int refiner_epochs = 30;
    double refiner_noise_mm = 15.0;  // translation sigma while training the refiner

    // evaluation grid
    double threshold_max_mm = 80.0;
    double threshold_step_mm = 1.0;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;

    /// FNV-1a hash of the canonical JSON dump.
    std::string fingerprint() const;

    nn::NetScale net_scale() const;
    nn::ArchPreset arch_preset() const;
    nn::PoseNetOptions posenet_options(int joints) const;
    nn::RefineNetOptions refinenet_options() const;
    nn::TrainConfig train_config(std::uint64_t run_seed, int run_epochs) const;
    std::vector<double> thresholds() const;
};

}  // namespace handpose
