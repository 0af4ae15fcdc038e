#include "handpose/evaluation.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace handpose {

namespace {

void check_inputs(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts) {
    if (preds.size() != gts.size()) throw ShapeError("evaluation: frame count mismatch");
    if (preds.empty()) throw InsufficientDataError("evaluation: no frames");
    const std::size_t j = gts[0].joint_count();
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i].joint_count() != j || gts[i].joint_count() != j)
            throw ShapeError("evaluation: joint count mismatch");
}

}  // namespace

double average_3d_error(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts) {
    check_inputs(preds, gts);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t f = 0; f < preds.size(); ++f) {
        for (std::size_t j = 0; j < gts[f].joint_count(); ++j) {
            sum += distance(preds[f].joints[j], gts[f].joints[j]);
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

std::vector<double> per_joint_error(const std::vector<Pose3D>& preds,
                                    const std::vector<Pose3D>& gts) {
    check_inputs(preds, gts);
    const std::size_t joints = gts[0].joint_count();
    std::vector<double> means(joints, 0.0);
    for (std::size_t f = 0; f < preds.size(); ++f)
        for (std::size_t j = 0; j < joints; ++j)
            means[j] += distance(preds[f].joints[j], gts[f].joints[j]);
    for (double& m : means) m /= static_cast<double>(preds.size());
    return means;
}

MetricCurve fraction_curve(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts,
                           const std::vector<double>& thresholds, CurveVariant variant) {
    check_inputs(preds, gts);
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (thresholds[i] <= thresholds[i - 1])
            throw DomainError("fraction_curve: thresholds must be strictly increasing");

    // One summary statistic per frame; the curve is its empirical CDF.
    std::vector<double> stats(preds.size(), 0.0);
    for (std::size_t f = 0; f < preds.size(); ++f) {
        double worst = 0.0;
        double sum = 0.0;
        for (std::size_t j = 0; j < gts[f].joint_count(); ++j) {
            const double e = distance(preds[f].joints[j], gts[f].joints[j]);
            worst = std::max(worst, e);
            sum += e;
        }
        stats[f] = variant == CurveVariant::AllJoints
                       ? worst
                       : sum / static_cast<double>(gts[f].joint_count());
    }

    MetricCurve curve;
    curve.variant = variant;
    curve.thresholds_mm = thresholds;
    curve.fractions.reserve(thresholds.size());
    for (const double t : thresholds) {
        std::size_t below = 0;
        for (const double s : stats)
            if (s <= t) ++below;
        curve.fractions.push_back(static_cast<double>(below) / static_cast<double>(stats.size()));
    }
    return curve;
}

std::vector<double> default_thresholds(double max_mm, double step_mm) {
    std::vector<double> t;
    for (double v = 0.0; v <= max_mm + 1e-9; v += step_mm) t.push_back(v);
    return t;
}

EvalReport make_report(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts,
                       const std::vector<double>& thresholds,
                       const std::string& config_fingerprint, double loc_error_mm) {
    EvalReport report;
    report.average_error_mm = average_3d_error(preds, gts);
    report.per_joint_error_mm = per_joint_error(preds, gts);
    report.all_joints = fraction_curve(preds, gts, thresholds, CurveVariant::AllJoints);
    report.per_frame_average = fraction_curve(preds, gts, thresholds, CurveVariant::PerFrameAverage);
    report.frame_count = preds.size();
    report.config_fingerprint = config_fingerprint;
    report.loc_error_mm = loc_error_mm;
    return report;
}

namespace {

nlohmann::json curve_to_json(const MetricCurve& c) {
    return {{"thresholds_mm", c.thresholds_mm}, {"fractions", c.fractions}};
}

MetricCurve curve_from_json(const nlohmann::json& j, CurveVariant variant) {
    MetricCurve c;
    c.variant = variant;
    c.thresholds_mm = j.at("thresholds_mm").get<std::vector<double>>();
    c.fractions = j.at("fractions").get<std::vector<double>>();
    return c;
}

std::string report_to_csv(const EvalReport& r) {
    std::string out;
    out += "# average_3d_error_mm," + format_double(r.average_error_mm) + "\n";
    out += "# loc_error_mm," + format_double(r.loc_error_mm) + "\n";
    out += "# frame_count," + std::to_string(r.frame_count) + "\n";
    out += "# config_fingerprint," + r.config_fingerprint + "\n";
    out += "# per_joint_error_mm";
    for (const double v : r.per_joint_error_mm) out += "," + format_double(v);
    out += "\n";
    out += "curve,threshold_mm,fraction\n";
    const auto dump_curve = [&out](const char* name, const MetricCurve& c) {
        for (std::size_t i = 0; i < c.thresholds_mm.size(); ++i)
            out += std::string(name) + "," + format_double(c.thresholds_mm[i]) + "," +
                   format_double(c.fractions[i]) + "\n";
    };
    dump_curve("all_joints", r.all_joints);
    dump_curve("per_frame_average", r.per_frame_average);
    return out;
}

EvalReport report_from_csv(const std::string& text) {
    EvalReport r;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(2);
            const std::size_t comma = body.find(',');
            const std::string key = body.substr(0, comma);
            const std::string rest = comma == std::string::npos ? "" : body.substr(comma + 1);
            if (key == "average_3d_error_mm") r.average_error_mm = parse_double(rest);
            else if (key == "loc_error_mm") r.loc_error_mm = parse_double(rest);
            else if (key == "frame_count") r.frame_count = static_cast<std::size_t>(std::stoull(rest));
            else if (key == "config_fingerprint") r.config_fingerprint = rest;
            else if (key == "per_joint_error_mm") {
                std::istringstream vals(rest);
                std::string tok;
                while (std::getline(vals, tok, ',')) r.per_joint_error_mm.push_back(parse_double(tok));
            }
            continue;
        }
        if (line.rfind("curve,", 0) == 0) continue;  // column header
        std::istringstream row(line);
        std::string name, t, f;
        std::getline(row, name, ',');
        std::getline(row, t, ',');
        std::getline(row, f, ',');
        MetricCurve& c = name == "all_joints" ? r.all_joints : r.per_frame_average;
        c.thresholds_mm.push_back(parse_double(t));
        c.fractions.push_back(parse_double(f));
    }
    r.all_joints.variant = CurveVariant::AllJoints;
    r.per_frame_average.variant = CurveVariant::PerFrameAverage;
    return r;
}

}  // namespace

void export_report(const EvalReport& report, const std::string& path, ReportFormat format) {
    std::string payload;
    if (format == ReportFormat::Json) {
        const nlohmann::json j = {{"average_3d_error_mm", report.average_error_mm},
                                  {"loc_error_mm", report.loc_error_mm},
                                  {"per_joint_error_mm", report.per_joint_error_mm},
                                  {"frame_count", report.frame_count},
                                  {"config_fingerprint", report.config_fingerprint},
                                  {"curves",
                                   {{"all_joints", curve_to_json(report.all_joints)},
                                    {"per_frame_average", curve_to_json(report.per_frame_average)}}}};
        payload = j.dump(2) + "\n";
    } else {
        payload = report_to_csv(report);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataFormatError("cannot write " + path);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw DataFormatError("write failed for " + path);
}

EvalReport import_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataFormatError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.empty()) throw TruncationError("report: empty file");

    if (text[0] == '{') {
        const nlohmann::json j = nlohmann::json::parse(text);
        EvalReport r;
        r.average_error_mm = j.at("average_3d_error_mm").get<double>();
        r.loc_error_mm = j.at("loc_error_mm").get<double>();
        r.per_joint_error_mm = j.at("per_joint_error_mm").get<std::vector<double>>();
        r.frame_count = j.at("frame_count").get<std::size_t>();
        r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
        r.all_joints = curve_from_json(j.at("curves").at("all_joints"), CurveVariant::AllJoints);
        r.per_frame_average =
            curve_from_json(j.at("curves").at("per_frame_average"), CurveVariant::PerFrameAverage);
        return r;
    }
    return report_from_csv(text);
}

}  // namespace handpose
