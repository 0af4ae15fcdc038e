#pragma once

#include <cstdint>
#include <vector>

#include "handpose/common.hpp"

namespace handpose {

/// Pinhole camera parameters. Pixel (ix, iy) samples the ray through the
/// continuous image point (u, v) = (ix, iy).
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    void validate() const;
};

/// Row-major depth grid in whole millimetres (sensor convention); 0 marks a
/// missing measurement.
struct DepthFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> depth;

    DepthFrame() = default;
    DepthFrame(int w, int h, std::uint16_t fill = 0)
        : width(w), height(h), depth(static_cast<std::size_t>(w) * h, fill) {}

    std::uint16_t at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
    std::uint16_t& at(int x, int y) { return depth[static_cast<std::size_t>(y) * width + x]; }
    bool missing(int x, int y) const { return at(x, y) == 0; }
};

/// Ordered joint positions in camera-space mm. Joint 0 is the middle-finger
/// MCP by convention.
struct Pose3D {
    std::vector<Vec3> joints;

    Pose3D() = default;
    explicit Pose3D(std::vector<Vec3> j) : joints(std::move(j)) {}

    std::size_t joint_count() const { return joints.size(); }
};

/// Axis-aligned cube in camera space; everything inside becomes network input.
struct CropCube {
    Vec3 center;
    double size = 300.0;

    double half() const { return size * 0.5; }
    void validate() const;
};

/// Square patch of depths normalized to [-1, 1]; missing/far pixels hold 1.
struct NormalizedPatch {
    int resolution = 0;
    std::vector<float> values;
    CropCube cube;
    CameraIntrinsics intrinsics;

    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * resolution + x]; }
    float& at(int x, int y) { return values[static_cast<std::size_t>(y) * resolution + x]; }
};

struct PixelPoint {
    double u = 0.0;
    double v = 0.0;
    double d = 0.0;  // depth in mm
};

/// Perspective projection of a camera-space point. Throws DomainError for
/// points at or behind the camera.
PixelPoint project(const Vec3& p, const CameraIntrinsics& k);

/// Exact inverse of project.
Vec3 backproject(double u, double v, double d, const CameraIntrinsics& k);

/// Resample the image region covered by the projected cube into a
/// resolution x resolution patch with depths normalized to [-1, 1].
///
/// The crop window is the smallest axis-aligned square centered on the
/// projected cube center that contains all eight projected cube corners, so
/// an in-plane rotation of the patch corresponds exactly to the same rotation
/// of the image about the projected center. Resampling is nearest-neighbor.
NormalizedPatch extract_crop(const DepthFrame& f, const CropCube& c, const CameraIntrinsics& k,
                             int resolution = 128);

/// Flatten a pose into cube-relative coordinates: (coord - center) / (size/2)
/// per axis. Joints inside the cube land in [-1, 1]; outliers pass through.
std::vector<double> normalize_joints(const Pose3D& p, const CropCube& c);

/// Exact inverse of normalize_joints. Throws ShapeError unless v.size() is a
/// multiple of 3.
Pose3D denormalize_joints(const std::vector<double>& v, const CropCube& c);

}  // namespace handpose
