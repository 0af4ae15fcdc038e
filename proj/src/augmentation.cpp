#include "handpose/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace handpose {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

AugmentParams sample_params(const AugmentConfig& cfg, Rng& rng) {
    const double scale_sigma =
        cfg.sigmas_are_variance ? std::sqrt(cfg.scale_sigma) : cfg.scale_sigma;
    const double trans_sigma =
        cfg.sigmas_are_variance ? std::sqrt(cfg.translation_sigma_mm) : cfg.translation_sigma_mm;

    AugmentParams p;
    if (cfg.enable_rotation)
        p.angle_deg = rng.uniform(-cfg.rotation_range_deg, cfg.rotation_range_deg);
    if (cfg.enable_scale) {
        p.scale = rng.normal(1.0, scale_sigma);
        // A non-positive cube size is meaningless; clamp the rare far tail.
        p.scale = std::max(p.scale, 0.05);
    }
    if (cfg.enable_translation) {
        p.offset.x = rng.normal(0.0, trans_sigma);
        p.offset.y = rng.normal(0.0, trans_sigma);
        p.offset.z = rng.normal(0.0, trans_sigma);
    }
    return p;
}

std::pair<double, double> rotate2d(double u, double v, double pu, double pv, double angle_deg) {
    const double a = angle_deg * kPi / 180.0;
    const double c = std::cos(a);
    const double s = std::sin(a);
    const double du = u - pu;
    const double dv = v - pv;
    return {pu + c * du - s * dv, pv + s * du + c * dv};
}

NormalizedPatch rotate_patch(const NormalizedPatch& patch, double angle_deg) {
    if (angle_deg == 0.0) return patch;
    const int res = patch.resolution;
    const double ctr = (res - 1) * 0.5;
    const double a = angle_deg * kPi / 180.0;
    const double c = std::cos(a);
    const double s = std::sin(a);

    NormalizedPatch out = patch;
    for (int y = 0; y < res; ++y) {
        const double dy = y - ctr;
        for (int x = 0; x < res; ++x) {
            const double dx = x - ctr;
            // Inverse rotation: where did this output pixel come from?
            const int sx = static_cast<int>(std::lround(ctr + c * dx + s * dy));
            const int sy = static_cast<int>(std::lround(ctr - s * dx + c * dy));
            out.at(x, y) = (sx >= 0 && sx < res && sy >= 0 && sy < res) ? patch.at(sx, sy) : 1.0f;
        }
    }
    return out;
}

std::pair<NormalizedPatch, std::vector<double>> augment(const DepthFrame& f, const Pose3D& p,
                                                        const CropCube& c,
                                                        const CameraIntrinsics& k,
                                                        const AugmentParams& params,
                                                        int resolution) {
    // Application order: translate the cube, scale it, crop, rotate in-plane.
    CropCube cube{c.center + params.offset, c.size * params.scale};
    NormalizedPatch patch = extract_crop(f, cube, k, resolution);

    Pose3D pose = p;
    if (params.angle_deg != 0.0) {
        patch = rotate_patch(patch, params.angle_deg);
        const PixelPoint ctr = project(cube.center, k);
        for (Vec3& j : pose.joints) {
            const PixelPoint pp = project(j, k);
            const auto [u, v] = rotate2d(pp.u, pp.v, ctr.u, ctr.v, params.angle_deg);
            j = backproject(u, v, pp.d, k);
        }
    }
    return {std::move(patch), normalize_joints(pose, cube)};
}

Pose3D augment_pose(const Pose3D& p, const AugmentParams& params, const Vec3& pivot) {
    const double a = params.angle_deg * kPi / 180.0;
    const double c = std::cos(a);
    const double s = std::sin(a);
    Pose3D out = p;
    for (Vec3& j : out.joints) {
        const Vec3 d = j - pivot;
        const Vec3 rotated{c * d.x - s * d.y, s * d.x + c * d.y, d.z};
        j = pivot + rotated * params.scale + params.offset;
    }
    return out;
}

TrainingStream::TrainingStream(const std::vector<DepthFrame>& frames,
                               const std::vector<Pose3D>& poses, std::vector<Vec3> cube_centers,
                               const CameraIntrinsics& k, StreamConfig cfg)
    : frames_(&frames),
      poses_(&poses),
      centers_(std::move(cube_centers)),
      intrinsics_(k),
      cfg_(cfg) {
    if (frames.empty()) throw InsufficientDataError("training stream: empty dataset");
    if (frames.size() != poses.size() || frames.size() != centers_.size())
        throw ShapeError("training stream: frames/poses/centers length mismatch");
}

int TrainingStream::target_dim() const {
    if (cfg_.target == TargetKind::McpOffset) return 3;
    return static_cast<int>(poses_->front().joint_count()) * 3;
}

std::vector<std::size_t> TrainingStream::epoch_order(int epoch) const {
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (cfg_.shuffle) {
        // Tag `size()` cannot collide with per-sample tags, which are < size().
        Rng rng(mix_seed(cfg_.seed, static_cast<std::uint64_t>(epoch), size()));
        rng.shuffle(order);
    }
    return order;
}

TrainingSample TrainingStream::sample(int epoch, std::size_t index) const {
    Rng rng(mix_seed(cfg_.seed, static_cast<std::uint64_t>(epoch), index));
    const AugmentParams params = sample_params(cfg_.aug, rng);
    const CropCube cube{centers_[index], cfg_.cube_size};

    if (cfg_.target == TargetKind::McpOffset) {
        Pose3D mcp;
        mcp.joints.push_back((*poses_)[index].joints.at(0));
        auto [patch, target] =
            augment((*frames_)[index], mcp, cube, intrinsics_, params, cfg_.resolution);
        for (double& t : target) t = std::clamp(t, -1.0, 1.0);
        return {std::move(patch), std::move(target)};
    }

    auto [patch, target] =
        augment((*frames_)[index], (*poses_)[index], cube, intrinsics_, params, cfg_.resolution);
    return {std::move(patch), std::move(target)};
}

}  // namespace handpose
