#include "handpose/datagen/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace handpose::datagen {

namespace {

// Smallest positive t with |t*dir - c| = r, or +inf. dir is unnormalized with
// dir.z = 1, so t equals the camera-space z of the hit.
double ray_sphere(const Vec3& dir, const Vec3& c, double r) {
    const double a = dir.dot(dir);
    const double b = -2.0 * dir.dot(c);
    const double cc = c.dot(c) - r * r;
    const double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0) return std::numeric_limits<double>::infinity();
    const double sq = std::sqrt(disc);
    const double t1 = (-b - sq) / (2.0 * a);
    if (t1 > 0.0) return t1;
    const double t2 = (-b + sq) / (2.0 * a);
    return t2 > 0.0 ? t2 : std::numeric_limits<double>::infinity();
}

}  // namespace

double ray_capsule_depth(double u, double v, const CameraIntrinsics& k, const Capsule& cap) {
    const Vec3 dir{(u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0};
    const Vec3 axis = cap.b - cap.a;
    const double axis_len2 = axis.dot(axis);
    if (axis_len2 < 1e-12) return ray_sphere(dir, cap.a, cap.radius);

    // Infinite cylinder around the segment axis.
    const Vec3 unit = axis / std::sqrt(axis_len2);
    const Vec3 d_perp = dir - unit * dir.dot(unit);
    const Vec3 a_perp = cap.a - unit * cap.a.dot(unit);
    const double qa = d_perp.dot(d_perp);
    double best = std::numeric_limits<double>::infinity();
    if (qa > 1e-14) {
        const double qb = -2.0 * d_perp.dot(a_perp);
        const double qc = a_perp.dot(a_perp) - cap.radius * cap.radius;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (const double t : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)}) {
                if (t <= 0.0 || t >= best) continue;
                const double axial = (dir * t - cap.a).dot(unit);
                if (axial >= 0.0 && axial * axial <= axis_len2) best = t;
            }
        }
    }
    best = std::min(best, ray_sphere(dir, cap.a, cap.radius));
    best = std::min(best, ray_sphere(dir, cap.b, cap.radius));
    return best;
}

DepthFrame render_depth(const HandModel& model, const Pose3D& pose,
                        const SyntheticSceneConfig& cfg, Rng& rng) {
    const CameraIntrinsics& k = cfg.intrinsics;
    const Vec3& ref = pose.joints.at(kMiddleMcp);
    if (ref.z <= 0.0) throw DomainError("render_depth: hand behind the camera");
    const PixelPoint ref_px = project(ref, k);
    if (ref_px.u < 0.0 || ref_px.u >= k.width || ref_px.v < 0.0 || ref_px.v >= k.height)
        throw DomainError("render_depth: hand reference joint outside the frustum");

    const std::vector<Capsule> caps = hand_capsules(model, pose);

    // Cull per pixel with the projected bounding box of all capsules.
    double umin = k.width, umax = 0.0, vmin = k.height, vmax = 0.0;
    for (const Capsule& c : caps) {
        for (const Vec3* e : {&c.a, &c.b}) {
            const double zf = std::max(1.0, e->z - c.radius);
            const double pad_u = c.radius * k.fx / zf;
            const double pad_v = c.radius * k.fy / zf;
            const PixelPoint pp = project(*e, k);
            umin = std::min(umin, pp.u - pad_u);
            umax = std::max(umax, pp.u + pad_u);
            vmin = std::min(vmin, pp.v - pad_v);
            vmax = std::max(vmax, pp.v + pad_v);
        }
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(umin)));
    const int x1 = std::min(k.width - 1, static_cast<int>(std::ceil(umax)));
    const int y0 = std::max(0, static_cast<int>(std::floor(vmin)));
    const int y1 = std::min(k.height - 1, static_cast<int>(std::ceil(vmax)));

    DepthFrame frame(k.width, k.height);
    const double bg = cfg.background_depth_mm;
    std::vector<double> depths(frame.depth.size(), bg);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            double best = bg;
            for (const Capsule& c : caps)
                best = std::min(best, ray_capsule_depth(x, y, k, c));
            depths[static_cast<std::size_t>(y) * k.width + x] = best;
        }
    }

    // Noise and quantization; iteration order fixes the rng stream.
    for (std::size_t i = 0; i < depths.size(); ++i) {
        double d = depths[i];
        if (cfg.missing_prob > 0.0 && rng.uniform() < cfg.missing_prob) {
            frame.depth[i] = 0;
            continue;
        }
        if (cfg.depth_jitter_mm > 0.0) d += rng.normal(0.0, cfg.depth_jitter_mm);
        const long q = std::lround(std::clamp(d, 1.0, 65535.0));
        frame.depth[i] = static_cast<std::uint16_t>(q);
    }
    return frame;
}

PoseSample sample_pose(const HandModel& model, const SyntheticSceneConfig& cfg, Rng& rng) {
    PoseSample s;
    s.angles = sample_joint_angles(cfg.limits, rng);
    s.angles.yaw += model.yaw_habit_deg * 3.14159265358979323846 / 180.0;
    const double z = rng.uniform(cfg.min_distance_mm, cfg.max_distance_mm);
    const double x = rng.uniform(-cfg.lateral_range_mm, cfg.lateral_range_mm);
    const double y = rng.uniform(-cfg.lateral_range_mm, cfg.lateral_range_mm);
    // The wrist is placed so the palm (not the wrist) is roughly centered.
    s.wrist = Vec3{x, y + 0.55 * model.palm_length, z};
    s.pose = forward_kinematics(model, s.angles, s.wrist);
    return s;
}

}  // namespace handpose::datagen
