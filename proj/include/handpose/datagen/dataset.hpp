#pragma once

#include <string>
#include <vector>

#include "handpose/datagen/render.hpp"
#include "handpose/geometry.hpp"

namespace handpose::datagen {

/// Frames with ground-truth annotations and subject tags.
struct Dataset {
    std::vector<DepthFrame> frames;
    std::vector<Pose3D> poses;
    std::vector<int> subjects;
    CameraIntrinsics intrinsics;

    std::size_t size() const { return frames.size(); }
    int joint_count() const { return poses.empty() ? 0 : static_cast<int>(poses[0].joint_count()); }
};

/// Render `n_frames` across `n_subjects` subjects (ids subject_base ..
/// subject_base + n_subjects - 1, interleaved). Subject geometry depends only
/// on (cfg.subject_seed, subject id), so different datasets can share or hold
/// out subjects. Deterministic in (cfg, seed); frames may render in parallel.
Dataset generate_dataset(int n_frames, int n_subjects, const SyntheticSceneConfig& cfg,
                         std::uint64_t seed, int subject_base = 0, int threads = 1);

/// Binary container: header (magic, version, counts, intrinsics as 64-bit
/// floats), per frame a subject id plus little-endian uint16 depths, and a
/// CRC32 trailer. Annotations go to a sidecar JSON at path + ".json".
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace handpose::datagen
