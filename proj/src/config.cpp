#include "handpose/config.hpp"

#include <fstream>

#include "handpose/evaluation.hpp"

namespace handpose {

namespace {

nlohmann::json aug_to_json(const AugmentConfig& a) {
    return {{"rotation", a.enable_rotation},
            {"scale", a.enable_scale},
            {"translation", a.enable_translation},
            {"rotation_range_deg", a.rotation_range_deg},
            {"scale_sigma", a.scale_sigma},
            {"translation_sigma_mm", a.translation_sigma_mm},
            {"sigmas_are_variance", a.sigmas_are_variance}};
}

AugmentConfig aug_from_json(const nlohmann::json& j) {
    AugmentConfig a;
    a.enable_rotation = j.value("rotation", a.enable_rotation);
    a.enable_scale = j.value("scale", a.enable_scale);
    a.enable_translation = j.value("translation", a.enable_translation);
    a.rotation_range_deg = j.value("rotation_range_deg", a.rotation_range_deg);
    a.scale_sigma = j.value("scale_sigma", a.scale_sigma);
    a.translation_sigma_mm = j.value("translation_sigma_mm", a.translation_sigma_mm);
    a.sigmas_are_variance = j.value("sigmas_are_variance", a.sigmas_are_variance);
    return a;
}

nlohmann::json scene_to_json(const datagen::SyntheticSceneConfig& s) {
    return {{"fx", s.intrinsics.fx},
            {"fy", s.intrinsics.fy},
            {"cx", s.intrinsics.cx},
            {"cy", s.intrinsics.cy},
            {"width", s.intrinsics.width},
            {"height", s.intrinsics.height},
            {"min_distance_mm", s.min_distance_mm},
            {"max_distance_mm", s.max_distance_mm},
            {"lateral_range_mm", s.lateral_range_mm},
            {"background_depth_mm", s.background_depth_mm},
            {"missing_prob", s.missing_prob},
            {"depth_jitter_mm", s.depth_jitter_mm},
            {"yaw_range_deg", s.limits.yaw_range_deg},
            {"tilt_range_rad", s.limits.tilt_range_rad},
            {"yaw_habit_range_deg", s.yaw_habit_range_deg},
            {"subject_seed", s.subject_seed}};
}

datagen::SyntheticSceneConfig scene_from_json(const nlohmann::json& j) {
    datagen::SyntheticSceneConfig s;
    s.intrinsics.fx = j.value("fx", s.intrinsics.fx);
    s.intrinsics.fy = j.value("fy", s.intrinsics.fy);
    s.intrinsics.cx = j.value("cx", s.intrinsics.cx);
    s.intrinsics.cy = j.value("cy", s.intrinsics.cy);
    s.intrinsics.width = j.value("width", s.intrinsics.width);
    s.intrinsics.height = j.value("height", s.intrinsics.height);
    s.min_distance_mm = j.value("min_distance_mm", s.min_distance_mm);
    s.max_distance_mm = j.value("max_distance_mm", s.max_distance_mm);
    s.lateral_range_mm = j.value("lateral_range_mm", s.lateral_range_mm);
    s.background_depth_mm = j.value("background_depth_mm", s.background_depth_mm);
    s.missing_prob = j.value("missing_prob", s.missing_prob);
    s.depth_jitter_mm = j.value("depth_jitter_mm", s.depth_jitter_mm);
    s.limits.yaw_range_deg = j.value("yaw_range_deg", s.limits.yaw_range_deg);
    s.limits.tilt_range_rad = j.value("tilt_range_rad", s.limits.tilt_range_rad);
    s.yaw_habit_range_deg = j.value("yaw_habit_range_deg", s.yaw_habit_range_deg);
    s.subject_seed = j.value("subject_seed", s.subject_seed);
    return s;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
    return {{"seed", seed},
            {"threads", threads},
            {"data",
             {{"train_frames", train_frames},
              {"test_frames", test_frames},
              {"train_subjects", train_subjects},
              {"test_subjects", test_subjects},
              {"scene", scene_to_json(scene)}}},
            {"crop",
             {{"cube_size_mm", cube_size_mm},
              {"patch_resolution", patch_resolution},
              {"segment_extent_mm", segment_extent_mm},
              {"loc_noise_std_mm", loc_noise_std_mm}}},
            {"prior",
             {{"k", pca_k},
              {"samples", prior_samples},
              {"from_augmented", prior_from_augmented}}},
            {"augmentation", aug_to_json(aug)},
            {"network",
             {{"scale", scale},
              {"arch", arch},
              {"dropout", dropout},
              {"basic_blocks", basic_blocks},
              {"freeze_prior", freeze_prior},
              {"fc_width", fc_width}}},
            {"optimizer",
             {{"epochs", epochs},
              {"batch_size", batch_size},
              {"learning_rate", learning_rate},
              {"beta1", adam_beta1},
              {"beta2", adam_beta2},
              {"eps", adam_eps}}},
            {"refiner", {{"epochs", refiner_epochs}, {"noise_mm", refiner_noise_mm}}},
            {"evaluation",
             {{"threshold_max_mm", threshold_max_mm}, {"threshold_step_mm", threshold_step_mm}}}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    if (j.contains("data")) {
        const auto& d = j.at("data");
        c.train_frames = d.value("train_frames", c.train_frames);
        c.test_frames = d.value("test_frames", c.test_frames);
        c.train_subjects = d.value("train_subjects", c.train_subjects);
        c.test_subjects = d.value("test_subjects", c.test_subjects);
        if (d.contains("scene")) c.scene = scene_from_json(d.at("scene"));
    }
    if (j.contains("crop")) {
        const auto& d = j.at("crop");
        c.cube_size_mm = d.value("cube_size_mm", c.cube_size_mm);
        c.patch_resolution = d.value("patch_resolution", c.patch_resolution);
        c.segment_extent_mm = d.value("segment_extent_mm", c.segment_extent_mm);
        c.loc_noise_std_mm = d.value("loc_noise_std_mm", c.loc_noise_std_mm);
    }
    if (j.contains("prior")) {
        const auto& d = j.at("prior");
        c.pca_k = d.value("k", c.pca_k);
        c.prior_samples = d.value("samples", c.prior_samples);
        c.prior_from_augmented = d.value("from_augmented", c.prior_from_augmented);
    }
    if (j.contains("augmentation")) c.aug = aug_from_json(j.at("augmentation"));
    if (j.contains("network")) {
        const auto& d = j.at("network");
        c.scale = d.value("scale", c.scale);
        c.arch = d.value("arch", c.arch);
        c.dropout = d.value("dropout", c.dropout);
        c.basic_blocks = d.value("basic_blocks", c.basic_blocks);
        c.freeze_prior = d.value("freeze_prior", c.freeze_prior);
        c.fc_width = d.value("fc_width", c.fc_width);
    }
    if (j.contains("optimizer")) {
        const auto& d = j.at("optimizer");
        c.epochs = d.value("epochs", c.epochs);
        c.batch_size = d.value("batch_size", c.batch_size);
        c.learning_rate = d.value("learning_rate", c.learning_rate);
        c.adam_beta1 = d.value("beta1", c.adam_beta1);
        c.adam_beta2 = d.value("beta2", c.adam_beta2);
        c.adam_eps = d.value("eps", c.adam_eps);
    }
    if (j.contains("refiner")) {
        const auto& d = j.at("refiner");
        c.refiner_epochs = d.value("epochs", c.refiner_epochs);
        c.refiner_noise_mm = d.value("noise_mm", c.refiner_noise_mm);
    }
    if (j.contains("evaluation")) {
        const auto& d = j.at("evaluation");
        c.threshold_max_mm = d.value("threshold_max_mm", c.threshold_max_mm);
        c.threshold_step_mm = d.value("threshold_step_mm", c.threshold_step_mm);
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataFormatError("cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataFormatError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

void RunConfig::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataFormatError("cannot write config " + path);
    out << to_json().dump(2) << "\n";
}

std::string RunConfig::fingerprint() const { return to_hex(fnv1a64(to_json().dump())); }

nn::NetScale RunConfig::net_scale() const {
    if (scale == "full") return nn::NetScale::Full;
    if (scale == "desk") return nn::NetScale::Desk;
    throw DataFormatError("config: unknown scale '" + scale + "'");
}

nn::ArchPreset RunConfig::arch_preset() const {
    if (arch == "resnet") return nn::ArchPreset::ResNet;
    if (arch == "original") return nn::ArchPreset::Original;
    if (arch == "original_wide") return nn::ArchPreset::OriginalWide;
    throw DataFormatError("config: unknown arch '" + arch + "'");
}

nn::PoseNetOptions RunConfig::posenet_options(int joints) const {
    nn::PoseNetOptions o;
    o.scale = net_scale();
    o.arch = arch_preset();
    o.joints = joints;
    o.pca_k = pca_k;
    o.dropout = dropout;
    o.basic_blocks = basic_blocks;
    o.freeze_prior = freeze_prior;
    o.fc_width = fc_width;
    return o;
}

nn::RefineNetOptions RunConfig::refinenet_options() const {
    nn::RefineNetOptions o;
    o.scale = net_scale();
    o.dropout = dropout;
    return o;
}

nn::TrainConfig RunConfig::train_config(std::uint64_t run_seed, int run_epochs) const {
    nn::TrainConfig t;
    t.epochs = run_epochs;
    t.batch_size = batch_size;
    t.adam.lr = learning_rate;
    t.adam.beta1 = adam_beta1;
    t.adam.beta2 = adam_beta2;
    t.adam.eps = adam_eps;
    t.seed = run_seed;
    return t;
}

std::vector<double> RunConfig::thresholds() const {
    return default_thresholds(threshold_max_mm, threshold_step_mm);
}

}  // namespace handpose
