#pragma once

#include <ostream>

#include "handpose/pipeline.hpp"

namespace handpose {

/// One row of an ablation table.
struct AblationCellSpec {
    std::string label;
    AugmentConfig aug;
    bool prior_from_augmented = true;
    LocMode loc = LocMode::GroundTruthNoisy;
    std::string arch = "resnet";
};

struct AblationCellResult {
    std::string label;
    bool failed = false;
    std::string error;
    std::vector<double> seed_pose_errors_mm;
    std::vector<double> seed_loc_errors_mm;
    double mean_pose_error_mm = 0.0;
    double mean_loc_error_mm = 0.0;
    EvalReport report;  // curves averaged pointwise over seeds
};

/// Row structures mirroring the three ablation studies: "table4" varies the
/// augmentation recipe, "table5" the localization source, "table6" the
/// architecture preset. Throws DataFormatError for unknown names.
std::vector<AblationCellSpec> ablation_preset(const std::string& name, const AugmentConfig& base);

/// Train and evaluate every cell under a shared seed schedule: cell seeds
/// depend only on (cfg.seed, seed index), so identical cells produce
/// identical reports. Training failures are recorded per cell, not fatal.
std::vector<AblationCellResult> ablate(const datagen::Dataset& train,
                                       const datagen::Dataset& test,
                                       const std::vector<AblationCellSpec>& cells,
                                       const RunConfig& cfg, int seeds,
                                       std::ostream* progress = nullptr);

/// Plain-text table for terminal output.
std::string format_ablation_table(const std::vector<AblationCellResult>& rows);

/// Machine-readable dump of all rows.
nlohmann::json ablation_to_json(const std::vector<AblationCellResult>& rows);

}  // namespace handpose
