#pragma once

#include <string>

#include "handpose/nn/network.hpp"
#include "handpose/prior.hpp"

namespace handpose::datagen {

/// Everything needed to reload a network and predict bit-identically:
/// architecture, parameters (stored as 64-bit floats), the pose prior when
/// present, and the configuration fingerprint of the run that produced it.
struct SavedModel {
    std::string kind;  // "pose" or "refine"
    int joints = 0;    // 0 for refine models
    int pca_k = 0;
    std::string config_fingerprint;
    nn::Network<float> net;
    PcaPrior prior;  // empty for refine models

    bool has_prior() const { return !prior.mean.empty(); }
};

/// Versioned binary: header + architecture JSON + parameter blobs + prior
/// block + CRC32 trailer.
void save_model(const SavedModel& model, const std::string& path);

/// Loads a model; when expected_kind is non-empty a mismatching file raises
/// ArchitectureMismatchError.
SavedModel load_model(const std::string& path, const std::string& expected_kind = "");

}  // namespace handpose::datagen
