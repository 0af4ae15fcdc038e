#pragma once

#include <cstdint>
#include <vector>

#include "handpose/geometry.hpp"
#include "handpose/nn/network.hpp"

namespace handpose {

enum class LocationSource { CenterOfMass, Refined, Tracked, GroundTruth };

struct HandLocation {
    Vec3 point;
    LocationSource source = LocationSource::CenterOfMass;
};

/// Pixels within `extent` mm of the nearest measured depth; the hand is
/// assumed to be the closest object to the camera.
std::vector<std::uint8_t> segment_hand(const DepthFrame& f, double extent_mm);

/// Mean of the backprojected masked pixels.
HandLocation center_of_mass(const DepthFrame& f, const std::vector<std::uint8_t>& mask,
                            const CameraIntrinsics& k);

/// Convenience: segmentation followed by center of mass.
HandLocation locate_com(const DepthFrame& f, const CameraIntrinsics& k, double extent_mm = 250.0);

/// Trained refinement: crop at `loc`, run the 3-output net, add the
/// denormalized offset. Applied once by default; `iterations` re-crops at the
/// updated location. Cube size matches the pose pipeline cube.
HandLocation refine_location(const DepthFrame& f, const HandLocation& loc,
                             nn::Network<float>& net, double cube_size_mm,
                             const CameraIntrinsics& k, int iterations = 1);

/// Tracking mode: refine starting from the previous frame's location instead
/// of recomputing the center of mass. Callers fall back to locate_com when
/// this throws (hand left the crop).
HandLocation track(const HandLocation& prev, const DepthFrame& f, nn::Network<float>& net,
                   double cube_size_mm, const CameraIntrinsics& k);

}  // namespace handpose
