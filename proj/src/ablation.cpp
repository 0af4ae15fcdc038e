#include "handpose/ablation.hpp"

#include <cstdio>
#include <map>

namespace handpose {

namespace {

AugmentConfig with_flags(const AugmentConfig& base, bool r, bool s, bool t) {
    AugmentConfig a = base;
    a.enable_rotation = r;
    a.enable_scale = s;
    a.enable_translation = t;
    return a;
}

std::string cell_key(const AblationCellSpec& cell, std::uint64_t seed, const RunConfig& cfg) {
    RunConfig c = cfg;
    c.aug = cell.aug;
    c.prior_from_augmented = cell.prior_from_augmented;
    c.arch = cell.arch;
    return c.fingerprint() + ":" + std::to_string(seed);
}

}  // namespace

std::vector<AblationCellSpec> ablation_preset(const std::string& name, const AugmentConfig& base) {
    std::vector<AblationCellSpec> cells;
    if (name == "table4") {
        cells.push_back({"No augmentation", with_flags(base, false, false, false), true,
                         LocMode::GroundTruthNoisy, "resnet"});
        cells.push_back({"Translation (T)", with_flags(base, false, false, true), true,
                         LocMode::GroundTruthNoisy, "resnet"});
        cells.push_back({"Rotation (R)", with_flags(base, true, false, false), true,
                         LocMode::GroundTruthNoisy, "resnet"});
        cells.push_back({"Scale (S)", with_flags(base, false, true, false), true,
                         LocMode::GroundTruthNoisy, "resnet"});
        cells.push_back({"All (R+T+S)", with_flags(base, true, true, true), true,
                         LocMode::GroundTruthNoisy, "resnet"});
        cells.push_back({"All (R+T+S) & no prior aug.", with_flags(base, true, true, true), false,
                         LocMode::GroundTruthNoisy, "resnet"});
        return cells;
    }
    if (name == "table5") {
        const AugmentConfig all = with_flags(base, true, true, true);
        cells.push_back({"CoM", all, true, LocMode::CenterOfMass, "resnet"});
        cells.push_back({"Refined CoM", all, true, LocMode::Refined, "resnet"});
        cells.push_back({"Ground truth", all, true, LocMode::GroundTruth, "resnet"});
        return cells;
    }
    if (name == "table6") {
        const AugmentConfig all = with_flags(base, true, true, true);
        cells.push_back({"Original", all, true, LocMode::Refined, "original"});
        cells.push_back({"Original with more filters", all, true, LocMode::Refined,
                         "original_wide"});
        cells.push_back({"ResNet", all, true, LocMode::Refined, "resnet"});
        return cells;
    }
    throw DataFormatError("unknown ablation preset '" + name + "'");
}

std::vector<AblationCellResult> ablate(const datagen::Dataset& train,
                                       const datagen::Dataset& test,
                                       const std::vector<AblationCellSpec>& cells,
                                       const RunConfig& cfg, int seeds, std::ostream* progress) {
    if (seeds < 1) throw DomainError("ablate: need at least one seed");

    // Identical (config, seed) pairs across cells share one training run.
    std::map<std::string, TrainedPose> pose_cache;
    std::map<std::string, nn::Network<float>> refiner_cache;

    std::vector<AblationCellResult> results;
    for (const AblationCellSpec& cell : cells) {
        AblationCellResult row;
        row.label = cell.label;
        try {
            EvalReport merged;
            for (int s = 0; s < seeds; ++s) {
                const std::uint64_t seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(s),
                                                    0x61626c61ull);
                RunConfig cell_cfg = cfg;
                cell_cfg.aug = cell.aug;
                cell_cfg.prior_from_augmented = cell.prior_from_augmented;
                cell_cfg.arch = cell.arch;

                const std::string key = cell_key(cell, seed, cfg);
                auto it = pose_cache.find(key);
                if (it == pose_cache.end()) {
                    if (progress)
                        (*progress) << "ablate: training [" << cell.label << "] seed " << s
                                    << std::endl;
                    it = pose_cache
                             .emplace(key, train_posenet_on(train, cell_cfg, seed, cfg.epochs))
                             .first;
                }

                nn::Network<float>* refiner = nullptr;
                if (cell.loc == LocMode::Refined) {
                    const std::string rkey = cell_key(cell, seed, cfg) + ":refiner";
                    auto rit = refiner_cache.find(rkey);
                    if (rit == refiner_cache.end()) {
                        if (progress)
                            (*progress) << "ablate: training refiner seed " << s << std::endl;
                        rit = refiner_cache.emplace(rkey, train_refiner_on(train, cell_cfg, seed))
                                  .first;
                    }
                    refiner = &rit->second;
                }

                const EvalReport report =
                    evaluate_dataset(it->second.net, test, cell.loc, cell_cfg, refiner);
                row.seed_pose_errors_mm.push_back(report.average_error_mm);
                row.seed_loc_errors_mm.push_back(report.loc_error_mm);

                if (s == 0) {
                    merged = report;
                } else {
                    for (std::size_t i = 0; i < merged.all_joints.fractions.size(); ++i)
                        merged.all_joints.fractions[i] += report.all_joints.fractions[i];
                    for (std::size_t i = 0; i < merged.per_frame_average.fractions.size(); ++i)
                        merged.per_frame_average.fractions[i] +=
                            report.per_frame_average.fractions[i];
                    for (std::size_t i = 0; i < merged.per_joint_error_mm.size(); ++i)
                        merged.per_joint_error_mm[i] += report.per_joint_error_mm[i];
                }
            }

            const double inv = 1.0 / static_cast<double>(seeds);
            for (double& f : merged.all_joints.fractions) f *= inv;
            for (double& f : merged.per_frame_average.fractions) f *= inv;
            for (double& e : merged.per_joint_error_mm) e *= inv;

            double pose_sum = 0.0, loc_sum = 0.0;
            for (const double e : row.seed_pose_errors_mm) pose_sum += e;
            for (const double e : row.seed_loc_errors_mm) loc_sum += e;
            row.mean_pose_error_mm = pose_sum * inv;
            row.mean_loc_error_mm = loc_sum * inv;
            merged.average_error_mm = row.mean_pose_error_mm;
            merged.loc_error_mm = row.mean_loc_error_mm;
            row.report = merged;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        results.push_back(std::move(row));
        if (progress && results.back().failed)
            (*progress) << "ablate: cell [" << cell.label << "] failed: " << results.back().error
                        << std::endl;
    }
    return results;
}

std::string format_ablation_table(const std::vector<AblationCellResult>& rows) {
    std::size_t width = 12;
    for (const auto& r : rows) width = std::max(width, r.label.size());

    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-*s  %-18s  %-18s\n", static_cast<int>(width), "Row",
                  "Avg. 3D pose error", "Loc. 3D error");
    out += buf;
    for (const auto& r : rows) {
        if (r.failed) {
            std::snprintf(buf, sizeof(buf), "%-*s  failed: %s\n", static_cast<int>(width),
                          r.label.c_str(), r.error.c_str());
        } else if (r.mean_loc_error_mm >= 0.0) {
            std::snprintf(buf, sizeof(buf), "%-*s  %8.2fmm          %8.2fmm\n",
                          static_cast<int>(width), r.label.c_str(), r.mean_pose_error_mm,
                          r.mean_loc_error_mm);
        } else {
            std::snprintf(buf, sizeof(buf), "%-*s  %8.2fmm\n", static_cast<int>(width),
                          r.label.c_str(), r.mean_pose_error_mm);
        }
        out += buf;
    }
    return out;
}

nlohmann::json ablation_to_json(const std::vector<AblationCellResult>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j = {{"label", r.label}, {"failed", r.failed}};
        if (r.failed) {
            j["error"] = r.error;
        } else {
            j["mean_pose_error_mm"] = r.mean_pose_error_mm;
            j["mean_loc_error_mm"] = r.mean_loc_error_mm;
            j["seed_pose_errors_mm"] = r.seed_pose_errors_mm;
            j["seed_loc_errors_mm"] = r.seed_loc_errors_mm;
        }
        out.push_back(std::move(j));
    }
    return out;
}

}  // namespace handpose
