#pragma once

#include "handpose/datagen/hand_model.hpp"
#include "handpose/geometry.hpp"
#include "handpose/rng.hpp"

namespace handpose::datagen {

struct SyntheticSceneConfig {
    CameraIntrinsics intrinsics{300.0, 300.0, 160.0, 120.0, 320, 240};
    double min_distance_mm = 500.0;
    double max_distance_mm = 900.0;
    double lateral_range_mm = 40.0;
    double background_depth_mm = 1500.0;
    double missing_prob = 0.02;
    double depth_jitter_mm = 1.0;
    PoseLimits limits;
    double yaw_habit_range_deg = 15.0;  // per-subject orientation habit spread
    std::uint64_t subject_seed = 1234;  // subject geometry stream, shared across datasets
};

/// Nearest-surface depth of the ray through pixel-center (u, v), or +inf.
double ray_capsule_depth(double u, double v, const CameraIntrinsics& k, const Capsule& cap);

/// Z-buffer render of the capsule hand over a background plane. Depths are
/// quantized to whole millimetres; sensor noise (missing pixels, Gaussian
/// jitter) is applied per config. Throws DomainError if the hand reference
/// joint is outside the camera frustum.
DepthFrame render_depth(const HandModel& model, const Pose3D& pose,
                        const SyntheticSceneConfig& cfg, Rng& rng);

/// One posed sample: angles drawn within limits, wrist placed so the hand
/// stays in view.
struct PoseSample {
    JointAngles angles;
    Vec3 wrist;
    Pose3D pose;
};

PoseSample sample_pose(const HandModel& model, const SyntheticSceneConfig& cfg, Rng& rng);

}  // namespace handpose::datagen
