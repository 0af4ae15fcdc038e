#include "handpose/localization.hpp"

#include <limits>

#include "handpose/nn/build.hpp"

namespace handpose {

std::vector<std::uint8_t> segment_hand(const DepthFrame& f, double extent_mm) {
    std::uint16_t d_min = std::numeric_limits<std::uint16_t>::max();
    bool any = false;
    for (const std::uint16_t d : f.depth) {
        if (d != 0 && d < d_min) {
            d_min = d;
            any = true;
        }
    }
    if (!any) throw NoHandError("segment_hand: frame has no valid depth");

    const double limit = static_cast<double>(d_min) + extent_mm;
    std::vector<std::uint8_t> mask(f.depth.size(), 0);
    for (std::size_t i = 0; i < f.depth.size(); ++i) {
        const std::uint16_t d = f.depth[i];
        mask[i] = (d != 0 && static_cast<double>(d) <= limit) ? 1 : 0;
    }
    return mask;
}

HandLocation center_of_mass(const DepthFrame& f, const std::vector<std::uint8_t>& mask,
                            const CameraIntrinsics& k) {
    if (mask.size() != f.depth.size()) throw ShapeError("center_of_mass: mask size mismatch");
    Vec3 sum;
    std::size_t count = 0;
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * f.width + x;
            if (!mask[i]) continue;
            sum += backproject(x, y, static_cast<double>(f.depth[i]), k);
            ++count;
        }
    }
    if (count == 0) throw NoHandError("center_of_mass: empty mask");
    return {sum / static_cast<double>(count), LocationSource::CenterOfMass};
}

HandLocation locate_com(const DepthFrame& f, const CameraIntrinsics& k, double extent_mm) {
    return center_of_mass(f, segment_hand(f, extent_mm), k);
}

HandLocation refine_location(const DepthFrame& f, const HandLocation& loc,
                             nn::Network<float>& net, double cube_size_mm,
                             const CameraIntrinsics& k, int iterations) {
    const int res = net.input_shape().empty() ? 64 : net.input_shape()[1];
    Vec3 point = loc.point;
    for (int i = 0; i < std::max(1, iterations); ++i) {
        const CropCube cube{point, cube_size_mm};
        const NormalizedPatch patch = extract_crop(f, cube, k, res);
        const std::vector<double> offset = nn::forward_vector(net, patch);
        if (offset.size() != 3) throw ShapeError("refine_location: net must output 3 values");
        const double half = cube.half();
        point += Vec3{offset[0] * half, offset[1] * half, offset[2] * half};
    }
    return {point, LocationSource::Refined};
}

HandLocation track(const HandLocation& prev, const DepthFrame& f, nn::Network<float>& net,
                   double cube_size_mm, const CameraIntrinsics& k) {
    HandLocation refined = refine_location(f, prev, net, cube_size_mm, k);
    refined.source = LocationSource::Tracked;
    return refined;
}

}  // namespace handpose
