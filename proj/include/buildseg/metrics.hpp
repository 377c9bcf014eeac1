#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "buildseg/error.hpp"
#include "buildseg/morphology.hpp"
#include "buildseg/raster.hpp"

namespace buildseg {

enum class Aggregation { macro, micro };

inline const char* to_string(Aggregation a) {
    return a == Aggregation::macro ? "macro" : "micro";
}

struct EvalConfig {
    double biou_ratio = 0.02; // band distance d = max(1, round(ratio * diagonal))
    Aggregation aggregation = Aggregation::macro;
};

struct EvalReport {
    std::string image_id;
    double iou = 0.0;
    double biou = 0.0;
    double averaged = 0.0;
};

/// Summed pixel tallies backing micro aggregation.
struct PixelTally {
    std::uint64_t iou_inter = 0;
    std::uint64_t iou_union = 0;
    std::uint64_t biou_inter = 0;
    std::uint64_t biou_union = 0;

    PixelTally& operator+=(const PixelTally& o) {
        iou_inter += o.iou_inter;
        iou_union += o.iou_union;
        biou_inter += o.biou_inter;
        biou_union += o.biou_union;
        return *this;
    }
};

struct DatasetReport {
    std::vector<EvalReport> per_image;
    double mean_iou = 0.0;
    double mean_biou = 0.0;
    double mean_averaged = 0.0;
    Aggregation mode = Aggregation::macro;
};

namespace detail {

struct Counts {
    std::uint64_t inter = 0;
    std::uint64_t uni = 0;
};

inline Counts overlap_counts(const BinaryMask& a, const BinaryMask& b) {
    Counts c;
    const auto& pa = a.pixels();
    const auto& pb = b.pixels();
    for (std::size_t i = 0; i < pa.size(); ++i) {
        c.inter += pa[i] & pb[i];
        c.uni += pa[i] | pb[i];
    }
    return c;
}

inline double ratio_or_one(std::uint64_t inter, std::uint64_t uni) {
    // Empty union means both masks are empty: a perfect match by convention.
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline void check_same_dims(const BinaryMask& a, const BinaryMask& b, const char* what) {
    if (a.width() != b.width() || a.height() != b.height())
        throw DimensionError(std::string(what) + ": mask dimensions differ (" +
                             std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                             " vs " + std::to_string(b.width()) + "x" +
                             std::to_string(b.height()) + ")");
}

} // namespace detail

/// |pred ∩ gt| / |pred ∪ gt|; both empty -> 1.0, exactly one empty -> 0.0.
inline double iou(const BinaryMask& pred, const BinaryMask& gt) {
    detail::check_same_dims(pred, gt, "iou");
    const detail::Counts c = detail::overlap_counts(pred, gt);
    return detail::ratio_or_one(c.inter, c.uni);
}

/// Band distance for a W x H image: max(1, round(ratio * diagonal)).
inline int band_distance(int width, int height, double biou_ratio) {
    if (!(biou_ratio > 0.0 && biou_ratio <= 1.0))
        throw ConfigError("biou_ratio must be in (0,1]");
    const long d = std::lround(biou_ratio * std::hypot(static_cast<double>(width),
                                                       static_cast<double>(height)));
    return static_cast<int>(std::max(1L, d));
}

/// IOU of the masks' boundary bands at an explicit band distance d.
inline double boundary_iou(const BinaryMask& pred, const BinaryMask& gt, int d) {
    detail::check_same_dims(pred, gt, "boundary_iou");
    const detail::Counts c =
        detail::overlap_counts(boundary_band(pred, d), boundary_band(gt, d));
    return detail::ratio_or_one(c.inter, c.uni);
}

inline double boundary_iou(const BinaryMask& pred, const BinaryMask& gt,
                           const EvalConfig& cfg) {
    detail::check_same_dims(pred, gt, "boundary_iou");
    return boundary_iou(pred, gt, band_distance(pred.width(), pred.height(), cfg.biou_ratio));
}

/// Arithmetic mean of the two scores.
inline double averaged_score(double iou_score, double biou_score) {
    return (iou_score + biou_score) / 2.0;
}

/// Full per-image evaluation; optionally accumulates the pixel tallies
/// needed for micro aggregation.
inline EvalReport evaluate_pair(const BinaryMask& pred, const BinaryMask& gt,
                                const EvalConfig& cfg, std::string image_id,
                                PixelTally* tally = nullptr) {
    detail::check_same_dims(pred, gt, "evaluate_pair");
    const int d = band_distance(pred.width(), pred.height(), cfg.biou_ratio);
    const detail::Counts c = detail::overlap_counts(pred, gt);
    const detail::Counts bc =
        detail::overlap_counts(boundary_band(pred, d), boundary_band(gt, d));
    if (tally) {
        tally->iou_inter += c.inter;
        tally->iou_union += c.uni;
        tally->biou_inter += bc.inter;
        tally->biou_union += bc.uni;
    }
    EvalReport r;
    r.image_id = std::move(image_id);
    r.iou = detail::ratio_or_one(c.inter, c.uni);
    r.biou = detail::ratio_or_one(bc.inter, bc.uni);
    r.averaged = averaged_score(r.iou, r.biou);
    return r;
}

/// Dataset-level aggregation. Macro averages per-image scores; micro takes
/// ratios of the summed pixel tallies (which must be supplied). Per-image
/// entries are ordered by image id so the fold is deterministic.
inline DatasetReport aggregate(std::vector<EvalReport> reports, Aggregation mode,
                               const PixelTally* totals = nullptr) {
    if (reports.empty())
        throw ConfigError("cannot aggregate an empty report list");
    if (mode == Aggregation::micro && !totals)
        throw ConfigError("micro aggregation requires pixel tallies");

    std::sort(reports.begin(), reports.end(),
              [](const EvalReport& a, const EvalReport& b) { return a.image_id < b.image_id; });

    DatasetReport out;
    out.mode = mode;
    if (mode == Aggregation::macro) {
        double si = 0, sb = 0, sa = 0;
        for (const EvalReport& r : reports) {
            si += r.iou;
            sb += r.biou;
            sa += r.averaged;
        }
        const double n = static_cast<double>(reports.size());
        out.mean_iou = si / n;
        out.mean_biou = sb / n;
        out.mean_averaged = sa / n;
    } else {
        out.mean_iou = detail::ratio_or_one(totals->iou_inter, totals->iou_union);
        out.mean_biou = detail::ratio_or_one(totals->biou_inter, totals->biou_union);
        out.mean_averaged = averaged_score(out.mean_iou, out.mean_biou);
    }
    out.per_image = std::move(reports);
    return out;
}

/// Round to 4 decimal places, ties to even — the precision used in emitted
/// reports (full precision is retained internally).
inline double round4(double x) {
    return std::nearbyint(x * 1e4) / 1e4;
}

/// JSON report with fixed field order:
/// {"config":{...},"per_image":[{"id","iou","biou","averaged"}...],
///  "summary":{"mean_iou","mean_biou","mean_averaged","mode"}}
inline nlohmann::ordered_json report_to_json(const DatasetReport& report,
                                             const EvalConfig& cfg) {
    nlohmann::ordered_json j;
    j["config"] = {{"biou_ratio", cfg.biou_ratio}, {"aggregation", to_string(cfg.aggregation)}};
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (const EvalReport& r : report.per_image) {
        per.push_back({{"id", r.image_id},
                       {"iou", round4(r.iou)},
                       {"biou", round4(r.biou)},
                       {"averaged", round4(r.averaged)}});
    }
    j["per_image"] = std::move(per);
    j["summary"] = {{"mean_iou", round4(report.mean_iou)},
                    {"mean_biou", round4(report.mean_biou)},
                    {"mean_averaged", round4(report.mean_averaged)},
                    {"mode", to_string(report.mode)}};
    return j;
}

/// CSV view of the per-image entries, same columns as the JSON report.
inline std::string report_to_csv(const DatasetReport& report) {
    std::string out = "id,iou,biou,averaged\n";
    char line[160];
    for (const EvalReport& r : report.per_image) {
        std::snprintf(line, sizeof(line), ",%.4f,%.4f,%.4f\n", round4(r.iou), round4(r.biou),
                      round4(r.averaged));
        out += r.image_id;
        out += line;
    }
    return out;
}

} // namespace buildseg
