#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "handpose/geometry.hpp"
#include "handpose/rng.hpp"

namespace handpose::datagen {

/// Joint indices of the synthetic 14-joint hand (NYU-style joint count).
enum HandJoint : int {
    kMiddleMcp = 0,  // reference joint
    kWrist = 1,
    kThumbMcp = 2,
    kThumbTip = 3,
    kIndexMcp = 4,
    kIndexPip = 5,
    kIndexTip = 6,
    kMiddlePip = 7,
    kMiddleTip = 8,
    kRingMcp = 9,
    kRingPip = 10,
    kRingTip = 11,
    kPinkyMcp = 12,
    kPinkyTip = 13,
};

constexpr int kHandJointCount = 14;

/// Per-subject hand geometry in millimetres. The kinematic tree is rigid:
/// MCP joints sit at fixed offsets in the wrist frame, fingers articulate at
/// their MCPs, so every parent-child distance is constant under any pose.
struct HandModel {
    double palm_width = 78.0;   // across the MCP row
    double palm_length = 92.0;  // wrist to middle MCP
    double palm_radius = 13.0;  // palm capsule radius
    double finger_radius = 7.5;
    double thumb_radius = 10.0;
    // index, middle, ring: two articulated segments per finger
    std::array<double, 3> proximal_length{42.0, 48.0, 44.0};
    std::array<double, 3> distal_length{38.0, 44.0, 40.0};
    double pinky_length = 55.0;
    double thumb_length = 62.0;
    // Subjects also differ in how they habitually orient the hand; per-frame
    // yaw varies around this center.
    double yaw_habit_deg = 0.0;

    static std::vector<int> parents();
    /// Designed parent-child distance of every non-root joint.
    std::vector<double> bone_lengths() const;
    /// MCP-row and thumb-base offsets in the wrist frame.
    Vec3 joint_offset(int joint) const;
};

/// Angle layout produced by sample_pose and consumed by forward_kinematics.
struct JointAngles {
    double yaw = 0.0;     // in-plane rotation, radians
    double tilt_x = 0.0;  // out-of-plane tilts
    double tilt_y = 0.0;
    // index, middle, ring: {abduction, mcp flexion, pip flexion}
    std::array<std::array<double, 3>, 3> fingers{};
    std::array<double, 2> pinky{};  // abduction, flexion
    std::array<double, 2> thumb{};  // abduction, flexion
};

struct PoseLimits {
    double yaw_range_deg = 30.0;
    double tilt_range_rad = 0.35;
    double abduction_range_rad = 0.15;
    double mcp_flex_max_rad = 1.4;
    double pip_flex_max_rad = 1.7;
    double pinky_flex_max_rad = 1.5;
    double thumb_abduction_range_rad = 0.5;
    double thumb_flex_max_rad = 1.1;
};

/// Subject geometry: global scale plus small per-segment jitter, all
/// deterministic in (subject_seed, subject id). The yaw habit is drawn
/// uniformly within +-yaw_habit_range_deg.
HandModel make_hand_model(std::uint64_t subject_seed, int subject_id,
                          double yaw_habit_range_deg = 0.0);

/// Joint positions in camera space for a hand whose wrist sits at `wrist`.
Pose3D forward_kinematics(const HandModel& model, const JointAngles& angles, const Vec3& wrist);

/// Uniform draw within the limits; a deterministic function of the rng state.
JointAngles sample_joint_angles(const PoseLimits& limits, Rng& rng);

/// Capsule primitive used by the renderer (a == b degenerates to a sphere).
struct Capsule {
    Vec3 a;
    Vec3 b;
    double radius;
};

/// Surface primitives for a posed hand.
std::vector<Capsule> hand_capsules(const HandModel& model, const Pose3D& pose);

}  // namespace handpose::datagen
