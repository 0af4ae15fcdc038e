#include "handpose/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace handpose {

void CameraIntrinsics::validate() const {
    if (fx <= 0.0 || fy <= 0.0) throw DomainError("intrinsics: focal lengths must be positive");
    if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height)
        throw DomainError("intrinsics: principal point outside sensor");
}

void CropCube::validate() const {
    if (size <= 0.0) throw DomainError("crop cube: size must be positive");
    if (center.z <= half()) throw DomainError("crop cube: cube not fully in front of camera");
}

PixelPoint project(const Vec3& p, const CameraIntrinsics& k) {
    if (p.z <= 0.0) throw DomainError("project: point has non-positive depth");
    return {p.x * k.fx / p.z + k.cx, p.y * k.fy / p.z + k.cy, p.z};
}

Vec3 backproject(double u, double v, double d, const CameraIntrinsics& k) {
    if (d <= 0.0) throw DomainError("backproject: non-positive depth");
    return {(u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d};
}

NormalizedPatch extract_crop(const DepthFrame& f, const CropCube& c, const CameraIntrinsics& k,
                             int resolution) {
    c.validate();
    if (resolution < 8) throw DomainError("extract_crop: resolution must be >= 8");

    const PixelPoint center = project(c.center, k);

    // Window half-extent: cover all eight projected cube corners.
    double extent = 0.0;
    const double h = c.half();
    for (int dx = -1; dx <= 1; dx += 2) {
        for (int dy = -1; dy <= 1; dy += 2) {
            for (int dz = -1; dz <= 1; dz += 2) {
                const Vec3 corner{c.center.x + dx * h, c.center.y + dy * h, c.center.z + dz * h};
                const PixelPoint pp = project(corner, k);
                extent = std::max(extent, std::abs(pp.u - center.u));
                extent = std::max(extent, std::abs(pp.v - center.v));
            }
        }
    }

    const double u0 = center.u - extent;
    const double v0 = center.v - extent;
    const double span = 2.0 * extent;
    if (center.u + extent < 0.0 || u0 > f.width - 1 || center.v + extent < 0.0 || v0 > f.height - 1)
        throw EmptyCropError("extract_crop: cube projects entirely outside the frame");

    NormalizedPatch patch;
    patch.resolution = resolution;
    patch.values.resize(static_cast<std::size_t>(resolution) * resolution);
    patch.cube = c;
    patch.intrinsics = k;

    const double step = span / resolution;
    const double inv_half = 1.0 / h;
    for (int py = 0; py < resolution; ++py) {
        const int sy = static_cast<int>(std::lround(v0 + (py + 0.5) * step));
        for (int px = 0; px < resolution; ++px) {
            const int sx = static_cast<int>(std::lround(u0 + (px + 0.5) * step));
            float value = 1.0f;  // background / missing
            if (sx >= 0 && sx < f.width && sy >= 0 && sy < f.height) {
                const std::uint16_t d = f.at(sx, sy);
                if (d != 0) {
                    const double n = (static_cast<double>(d) - c.center.z) * inv_half;
                    value = static_cast<float>(std::clamp(n, -1.0, 1.0));
                }
            }
            patch.at(px, py) = value;
        }
    }
    return patch;
}

std::vector<double> normalize_joints(const Pose3D& p, const CropCube& c) {
    const double inv_half = 1.0 / c.half();
    std::vector<double> out;
    out.reserve(p.joints.size() * 3);
    for (const Vec3& j : p.joints) {
        out.push_back((j.x - c.center.x) * inv_half);
        out.push_back((j.y - c.center.y) * inv_half);
        out.push_back((j.z - c.center.z) * inv_half);
    }
    return out;
}

Pose3D denormalize_joints(const std::vector<double>& v, const CropCube& c) {
    if (v.size() % 3 != 0) throw ShapeError("denormalize_joints: vector length not a multiple of 3");
    const double half = c.half();
    Pose3D p;
    p.joints.reserve(v.size() / 3);
    for (std::size_t i = 0; i < v.size(); i += 3) {
        p.joints.push_back({v[i] * half + c.center.x, v[i + 1] * half + c.center.y,
                            v[i + 2] * half + c.center.z});
    }
    return p;
}

}  // namespace handpose
