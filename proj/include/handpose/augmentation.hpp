#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "handpose/geometry.hpp"
#include "handpose/rng.hpp"

namespace handpose {

/// One draw of augmentation parameters. Identity is (0, 1, (0,0,0)).
struct AugmentParams {
    double angle_deg = 0.0;
    double scale = 1.0;
    Vec3 offset;

    bool is_identity() const {
        return angle_deg == 0.0 && scale == 1.0 && offset.x == 0.0 && offset.y == 0.0 &&
               offset.z == 0.0;
    }
};

struct AugmentConfig {
    bool enable_rotation = true;
    bool enable_scale = true;
    bool enable_translation = true;
    double rotation_range_deg = 180.0;  // uniform in [-range, range]
    double scale_sigma = 0.02;
    double translation_sigma_mm = 5.0;
    // When true, the two sigmas above are treated as variances and their
    // square roots are used. Off by default; a variance of 5 mm^2 would give
    // offsets far smaller than realistic detector error.
    bool sigmas_are_variance = false;

    bool any_enabled() const { return enable_rotation || enable_scale || enable_translation; }

    AugmentConfig with_none() const {
        AugmentConfig c = *this;
        c.enable_rotation = c.enable_scale = c.enable_translation = false;
        return c;
    }
};

/// Draw order is fixed (angle, scale, offset xyz) so streams are reproducible.
AugmentParams sample_params(const AugmentConfig& cfg, Rng& rng);

/// Rotate a 2D image point about a pivot; positive angles rotate u toward v.
std::pair<double, double> rotate2d(double u, double v, double pu, double pv, double angle_deg);

/// In-plane rotation of a patch about its center, nearest-neighbor, pixels
/// leaving the patch replaced by background (1).
NormalizedPatch rotate_patch(const NormalizedPatch& patch, double angle_deg);

/// Apply one augmentation draw to a frame/pose pair: translate the cube,
/// scale it, extract the crop, rotate the patch in-plane, and transform the
/// annotations through project -> rotate2d -> backproject so image and
/// target stay consistent. Returns the patch and the normalized 3J target.
std::pair<NormalizedPatch, std::vector<double>> augment(const DepthFrame& f, const Pose3D& p,
                                                        const CropCube& c,
                                                        const CameraIntrinsics& k,
                                                        const AugmentParams& params,
                                                        int resolution);

/// Pose-only augmentation: rotate about the camera-axis through the pivot,
/// scale about the pivot, then translate. No image involved.
Pose3D augment_pose(const Pose3D& p, const AugmentParams& params, const Vec3& pivot);

struct TrainingSample {
    NormalizedPatch patch;
    std::vector<double> target;
};

enum class TargetKind {
    FullPose,   // normalized 3J joint vector
    McpOffset,  // normalized offset from crop center to joint 0, clipped to [-1,1]
};

struct StreamConfig {
    AugmentConfig aug;
    double cube_size = 300.0;
    int resolution = 128;
    TargetKind target = TargetKind::FullPose;
    std::uint64_t seed = 0;
    bool shuffle = true;
};

/// Online augmentation stream: each epoch visits every base sample once with
/// freshly drawn parameters. sample(epoch, i) is a pure function of
/// (seed, epoch, i), so parallel producers and re-runs agree exactly.
class TrainingStream {
public:
    TrainingStream(const std::vector<DepthFrame>& frames, const std::vector<Pose3D>& poses,
                   std::vector<Vec3> cube_centers, const CameraIntrinsics& k, StreamConfig cfg);

    std::size_t size() const { return frames_->size(); }
    int target_dim() const;

    /// Visiting order for one epoch (a permutation of [0, size)).
    std::vector<std::size_t> epoch_order(int epoch) const;

    /// Augmented sample for base index `index` in epoch `epoch`.
    TrainingSample sample(int epoch, std::size_t index) const;

    const CropCube cube_at(std::size_t index) const {
        return CropCube{centers_[index], cfg_.cube_size};
    }

private:
    const std::vector<DepthFrame>* frames_;
    const std::vector<Pose3D>* poses_;
    std::vector<Vec3> centers_;
    CameraIntrinsics intrinsics_;
    StreamConfig cfg_;
};

}  // namespace handpose
