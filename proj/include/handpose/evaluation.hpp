#pragma once

#include <string>
#include <vector>

#include "handpose/geometry.hpp"

namespace handpose {

enum class CurveVariant { AllJoints, PerFrameAverage };

/// Fraction-of-frames curve over an increasing threshold grid.
struct MetricCurve {
    std::vector<double> thresholds_mm;
    std::vector<double> fractions;
    CurveVariant variant = CurveVariant::AllJoints;
};

struct EvalReport {
    double average_error_mm = 0.0;
    double loc_error_mm = -1.0;  // mean localization error; < 0 when not applicable
    std::vector<double> per_joint_error_mm;
    MetricCurve all_joints;
    MetricCurve per_frame_average;
    std::size_t frame_count = 0;
    std::string config_fingerprint;
};

/// Mean Euclidean distance in mm over all frames and joints.
double average_3d_error(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts);

/// Per-joint mean Euclidean distances.
std::vector<double> per_joint_error(const std::vector<Pose3D>& preds,
                                    const std::vector<Pose3D>& gts);

/// AllJoints: fraction of frames whose worst joint error is <= threshold.
/// PerFrameAverage: fraction whose mean joint error is <= threshold.
MetricCurve fraction_curve(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts,
                           const std::vector<double>& thresholds, CurveVariant variant);

/// 0..80 mm in 1 mm steps.
std::vector<double> default_thresholds(double max_mm = 80.0, double step_mm = 1.0);

EvalReport make_report(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts,
                       const std::vector<double>& thresholds,
                       const std::string& config_fingerprint, double loc_error_mm = -1.0);

enum class ReportFormat { Csv, Json };

/// Byte-stable export; identical reports produce identical files.
void export_report(const EvalReport& report, const std::string& path, ReportFormat format);
EvalReport import_report(const std::string& path);

}  // namespace handpose
