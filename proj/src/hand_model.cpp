#include "handpose/datagen/hand_model.hpp"

#include <cmath>

namespace handpose::datagen {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Thumb base direction relative to the finger axis (points off the index side).
constexpr double kThumbBaseAbduction = -1.2;

Vec3 rot_z(const Vec3& v, double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

Vec3 rot_x(const Vec3& v, double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {v.x, c * v.y - s * v.z, s * v.y + c * v.z};
}

Vec3 rot_y(const Vec3& v, double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {c * v.x + s * v.z, v.y, -s * v.x + c * v.z};
}

// Segment direction for abduction about z and flexion about x; the rest
// direction is (0,-1,0), flexion bends toward the camera (-z).
Vec3 finger_dir(double abduction, double flexion) {
    return rot_z(rot_x(Vec3{0.0, -1.0, 0.0}, flexion), abduction);
}

}  // namespace

std::vector<int> HandModel::parents() {
    std::vector<int> p(kHandJointCount, -1);
    p[kMiddleMcp] = kWrist;
    p[kThumbMcp] = kWrist;
    p[kThumbTip] = kThumbMcp;
    p[kIndexMcp] = kWrist;
    p[kIndexPip] = kIndexMcp;
    p[kIndexTip] = kIndexPip;
    p[kMiddlePip] = kMiddleMcp;
    p[kMiddleTip] = kMiddlePip;
    p[kRingMcp] = kWrist;
    p[kRingPip] = kRingMcp;
    p[kRingTip] = kRingPip;
    p[kPinkyMcp] = kWrist;
    p[kPinkyTip] = kPinkyMcp;
    return p;
}

Vec3 HandModel::joint_offset(int joint) const {
    const double w = palm_width;
    const double l = palm_length;
    switch (joint) {
        case kIndexMcp: return {-0.45 * w, -0.95 * l, 0.0};
        case kMiddleMcp: return {-0.15 * w, -l, 0.0};
        case kRingMcp: return {0.15 * w, -0.96 * l, 0.0};
        case kPinkyMcp: return {0.45 * w, -0.84 * l, 0.0};
        case kThumbMcp: return {-0.55 * w, -0.30 * l, 0.0};
        default: return {0.0, 0.0, 0.0};
    }
}

std::vector<double> HandModel::bone_lengths() const {
    std::vector<double> lengths(kHandJointCount, 0.0);
    const auto offset_len = [this](int j) { return joint_offset(j).norm(); };
    lengths[kMiddleMcp] = offset_len(kMiddleMcp);
    lengths[kThumbMcp] = offset_len(kThumbMcp);
    lengths[kIndexMcp] = offset_len(kIndexMcp);
    lengths[kRingMcp] = offset_len(kRingMcp);
    lengths[kPinkyMcp] = offset_len(kPinkyMcp);
    lengths[kThumbTip] = thumb_length;
    lengths[kIndexPip] = proximal_length[0];
    lengths[kIndexTip] = distal_length[0];
    lengths[kMiddlePip] = proximal_length[1];
    lengths[kMiddleTip] = distal_length[1];
    lengths[kRingPip] = proximal_length[2];
    lengths[kRingTip] = distal_length[2];
    lengths[kPinkyTip] = pinky_length;
    return lengths;
}

HandModel make_hand_model(std::uint64_t subject_seed, int subject_id,
                          double yaw_habit_range_deg) {
    Rng rng(mix_seed(subject_seed, static_cast<std::uint64_t>(subject_id), 0x68616e64ull));
    const double scale = rng.uniform(0.85, 1.15);
    HandModel m;
    m.palm_width *= scale * rng.uniform(0.95, 1.05);
    m.palm_length *= scale * rng.uniform(0.95, 1.05);
    m.palm_radius *= scale;
    m.finger_radius *= scale;
    m.thumb_radius *= scale;
    for (int f = 0; f < 3; ++f) {
        m.proximal_length[f] *= scale * rng.uniform(0.94, 1.06);
        m.distal_length[f] *= scale * rng.uniform(0.94, 1.06);
    }
    m.pinky_length *= scale * rng.uniform(0.94, 1.06);
    m.thumb_length *= scale * rng.uniform(0.94, 1.06);
    m.yaw_habit_deg = rng.uniform(-yaw_habit_range_deg, yaw_habit_range_deg);
    return m;
}

JointAngles sample_joint_angles(const PoseLimits& limits, Rng& rng) {
    JointAngles a;
    const double yaw_range = limits.yaw_range_deg * kPi / 180.0;
    a.yaw = rng.uniform(-yaw_range, yaw_range);
    a.tilt_x = rng.uniform(-limits.tilt_range_rad, limits.tilt_range_rad);
    a.tilt_y = rng.uniform(-limits.tilt_range_rad, limits.tilt_range_rad);
    for (auto& finger : a.fingers) {
        finger[0] = rng.uniform(-limits.abduction_range_rad, limits.abduction_range_rad);
        finger[1] = rng.uniform(0.0, limits.mcp_flex_max_rad);
        finger[2] = rng.uniform(0.0, limits.pip_flex_max_rad);
    }
    a.pinky[0] = rng.uniform(-limits.abduction_range_rad, limits.abduction_range_rad);
    a.pinky[1] = rng.uniform(0.0, limits.pinky_flex_max_rad);
    a.thumb[0] = rng.uniform(-limits.thumb_abduction_range_rad, limits.thumb_abduction_range_rad);
    a.thumb[1] = rng.uniform(0.0, limits.thumb_flex_max_rad);
    return a;
}

Pose3D forward_kinematics(const HandModel& model, const JointAngles& angles, const Vec3& wrist) {
    // Joint positions in the wrist frame first.
    std::vector<Vec3> local(kHandJointCount);
    local[kWrist] = {0.0, 0.0, 0.0};
    for (int j : {kMiddleMcp, kThumbMcp, kIndexMcp, kRingMcp, kPinkyMcp})
        local[j] = model.joint_offset(j);

    const int mcp_of[3] = {kIndexMcp, kMiddleMcp, kRingMcp};
    const int pip_of[3] = {kIndexPip, kMiddlePip, kRingPip};
    const int tip_of[3] = {kIndexTip, kMiddleTip, kRingTip};
    for (int f = 0; f < 3; ++f) {
        const auto& [abduction, mcp_flex, pip_flex] = angles.fingers[f];
        const Vec3 d1 = finger_dir(abduction, mcp_flex);
        const Vec3 d2 = finger_dir(abduction, mcp_flex + pip_flex);
        local[pip_of[f]] = local[mcp_of[f]] + d1 * model.proximal_length[f];
        local[tip_of[f]] = local[pip_of[f]] + d2 * model.distal_length[f];
    }
    local[kPinkyTip] =
        local[kPinkyMcp] + finger_dir(angles.pinky[0], angles.pinky[1]) * model.pinky_length;
    local[kThumbTip] =
        local[kThumbMcp] +
        finger_dir(kThumbBaseAbduction + angles.thumb[0], angles.thumb[1]) * model.thumb_length;

    Pose3D pose;
    pose.joints.resize(kHandJointCount);
    for (int j = 0; j < kHandJointCount; ++j) {
        const Vec3 rotated = rot_z(rot_x(rot_y(local[j], angles.tilt_y), angles.tilt_x), angles.yaw);
        pose.joints[j] = wrist + rotated;
    }
    return pose;
}

std::vector<Capsule> hand_capsules(const HandModel& model, const Pose3D& pose) {
    const auto& j = pose.joints;
    std::vector<Capsule> caps;
    caps.reserve(16);

    // Palm: struts from the wrist to each MCP plus a bar across the MCP row.
    for (int mcp : {kIndexMcp, kMiddleMcp, kRingMcp, kPinkyMcp})
        caps.push_back({j[kWrist], j[mcp], model.palm_radius});
    caps.push_back({j[kIndexMcp], j[kPinkyMcp], model.palm_radius});
    caps.push_back({j[kWrist], j[kWrist], model.palm_radius * 1.15});

    const int chain[3][3] = {{kIndexMcp, kIndexPip, kIndexTip},
                             {kMiddleMcp, kMiddlePip, kMiddleTip},
                             {kRingMcp, kRingPip, kRingTip}};
    for (const auto& c : chain) {
        caps.push_back({j[c[0]], j[c[1]], model.finger_radius});
        caps.push_back({j[c[1]], j[c[2]], model.finger_radius * 0.9});
    }
    caps.push_back({j[kPinkyMcp], j[kPinkyTip], model.finger_radius * 0.85});
    caps.push_back({j[kThumbMcp], j[kThumbTip], model.thumb_radius});
    return caps;
}

}  // namespace handpose::datagen
