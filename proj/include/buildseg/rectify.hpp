#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "buildseg/error.hpp"
#include "buildseg/morphology.hpp"
#include "buildseg/raster.hpp"

namespace buildseg {

/// Minimum-area enclosing rectangle of a pixel set. `angle_deg` in [0,180)
/// is the direction of the `width` side; width >= height. Squares, whose
/// two side directions tie, are canonicalized to [0,90).
struct RotatedRect {
    double center_x = 0.0;
    double center_y = 0.0;
    double width = 0.0;
    double height = 0.0;
    double angle_deg = 0.0;

    double area() const { return width * height; }
};

struct RectifyConfig {
    int denoise_se_size = 3;     // square opening+closing kernel side (odd)
    int line_se_length = 5;      // line kernel cell count (odd)
    double rect_threshold = 0.85; // rectangularity needed to snap
    int min_component_area = 4;  // components below this are removed
};

enum class RectifyAction { removed, snapped, kept };

inline const char* to_string(RectifyAction a) {
    switch (a) {
    case RectifyAction::removed: return "removed";
    case RectifyAction::snapped: return "snapped";
    default: return "kept";
    }
}

struct RectifyRecord {
    int label = 0;
    std::int64_t area_before = 0;
    double rectangularity = 0.0;
    RectifyAction action = RectifyAction::kept;
    std::int64_t area_after = 0;
};

struct RectifyTrace {
    std::vector<RectifyRecord> records;
};

namespace detail {

inline void validate(const RectifyConfig& cfg) {
    if (cfg.denoise_se_size < 1 || cfg.denoise_se_size % 2 == 0)
        throw ConfigError("denoise_se_size must be odd and at least 1");
    if (cfg.line_se_length < 1 || cfg.line_se_length % 2 == 0)
        throw ConfigError("line_se_length must be odd and at least 1");
    if (!(cfg.rect_threshold > 0.0 && cfg.rect_threshold <= 1.0))
        throw ConfigError("rect_threshold must be in (0,1]");
    if (cfg.min_component_area < 1)
        throw ConfigError("min_component_area must be at least 1");
}

struct IPoint {
    std::int64_t x = 0;
    std::int64_t y = 0;
    friend bool operator==(const IPoint&, const IPoint&) = default;
    friend bool operator<(const IPoint& a, const IPoint& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    }
};

inline std::int64_t cross(const IPoint& o, const IPoint& a, const IPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Andrew's monotone chain; strictly convex output (no collinear vertices),
/// starting at the lexicographically smallest point.
inline std::vector<IPoint> convex_hull(std::vector<IPoint> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<IPoint> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) { // lower hull
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) { // upper hull
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1); // last point equals the first
    return hull;
}

/// Exact description of the selected minimum-area rectangle: the integer
/// edge direction u=(ex,ey) (v is u rotated 90°) and the unnormalized
/// corner-point projection ranges. True area = du*dv/(ex^2+ey^2), kept in
/// integer form so comparisons and rasterization are exact.
struct MinRectFrame {
    std::int64_t ex = 1, ey = 0;
    std::int64_t min_u = 0, max_u = 0;
    std::int64_t min_v = 0, max_v = 0;

    std::int64_t len2() const { return ex * ex + ey * ey; }
    std::int64_t du() const { return max_u - min_u; }
    std::int64_t dv() const { return max_v - min_v; }
    double area() const {
        return static_cast<double>(du()) * static_cast<double>(dv()) /
               static_cast<double>(len2());
    }
};

/// Corner lattice points of the set's boundary pixels (pixels treated as
/// unit squares). Interior pixels contribute nothing to the convex hull, so
/// restricting to boundary pixels is exact.
inline std::vector<IPoint> corner_points(const std::vector<Pixel>& pixels) {
    int x0 = pixels[0].x, x1 = pixels[0].x, y0 = pixels[0].y, y1 = pixels[0].y;
    for (const Pixel& p : pixels) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const int w = x1 - x0 + 1, h = y1 - y0 + 1;
    std::vector<std::uint8_t> local(static_cast<std::size_t>(w) * h, 0);
    for (const Pixel& p : pixels)
        local[static_cast<std::size_t>(p.y - y0) * w + (p.x - x0)] = 1;

    auto fg = [&](int lx, int ly) {
        return lx >= 0 && ly >= 0 && lx < w && ly < h &&
               local[static_cast<std::size_t>(ly) * w + lx] != 0;
    };
    std::vector<IPoint> corners;
    for (int ly = 0; ly < h; ++ly) {
        for (int lx = 0; lx < w; ++lx) {
            if (!fg(lx, ly)) continue;
            if (fg(lx - 1, ly) && fg(lx + 1, ly) && fg(lx, ly - 1) && fg(lx, ly + 1))
                continue; // interior
            const std::int64_t gx = lx + x0, gy = ly + y0;
            corners.push_back({gx, gy});
            corners.push_back({gx + 1, gy});
            corners.push_back({gx, gy + 1});
            corners.push_back({gx + 1, gy + 1});
        }
    }
    return corners;
}

/// Rotating-calipers selection over hull edges with exact integer area
/// comparison; the first strictly smaller candidate wins, so the result is
/// deterministic.
inline MinRectFrame min_rect_frame(const std::vector<Pixel>& pixels) {
    if (pixels.empty())
        throw ConfigError("minimum-area rectangle requires a non-empty pixel set");
    const std::vector<IPoint> hull = convex_hull(corner_points(pixels));
    const std::size_t n = hull.size();

    MinRectFrame best;
    bool have_best = false;
    for (std::size_t i = 0; i < n; ++i) {
        const IPoint& a = hull[i];
        const IPoint& b = hull[(i + 1) % n];
        MinRectFrame cand;
        cand.ex = b.x - a.x;
        cand.ey = b.y - a.y;
        bool first = true;
        for (const IPoint& p : hull) {
            const std::int64_t u = p.x * cand.ex + p.y * cand.ey;
            const std::int64_t v = -p.x * cand.ey + p.y * cand.ex;
            if (first) {
                cand.min_u = cand.max_u = u;
                cand.min_v = cand.max_v = v;
                first = false;
            } else {
                cand.min_u = std::min(cand.min_u, u);
                cand.max_u = std::max(cand.max_u, u);
                cand.min_v = std::min(cand.min_v, v);
                cand.max_v = std::max(cand.max_v, v);
            }
        }
        if (!have_best) {
            best = cand;
            have_best = true;
        } else {
            // cand.area < best.area, cross-multiplied to stay in integers
            const __int128 lhs =
                static_cast<__int128>(cand.du()) * cand.dv() * best.len2();
            const __int128 rhs =
                static_cast<__int128>(best.du()) * best.dv() * cand.len2();
            if (lhs < rhs) best = cand;
        }
    }
    return best;
}

inline double fold_angle_180(double deg) {
    while (deg < 0.0) deg += 180.0;
    while (deg >= 180.0) deg -= 180.0;
    return deg;
}

inline RotatedRect frame_to_rect(const MinRectFrame& f) {
    const double len = std::sqrt(static_cast<double>(f.len2()));
    const double wu = static_cast<double>(f.du()) / len;
    const double wv = static_cast<double>(f.dv()) / len;
    const double cu = (static_cast<double>(f.min_u) + static_cast<double>(f.max_u)) / 2.0;
    const double cv = (static_cast<double>(f.min_v) + static_cast<double>(f.max_v)) / 2.0;
    const double l2 = static_cast<double>(f.len2());

    RotatedRect r;
    r.center_x = (cu * f.ex - cv * f.ey) / l2;
    r.center_y = (cu * f.ey + cv * f.ex) / l2;
    const double angle_u =
        fold_angle_180(std::atan2(static_cast<double>(f.ey), static_cast<double>(f.ex)) *
                       180.0 / 3.14159265358979323846);
    if (f.du() > f.dv()) {
        r.width = wu;
        r.height = wv;
        r.angle_deg = angle_u;
    } else if (f.du() < f.dv()) {
        r.width = wv;
        r.height = wu;
        r.angle_deg = fold_angle_180(angle_u + 90.0);
    } else { // square: both side directions are minimal; take the one < 90
        r.width = wu;
        r.height = wv;
        r.angle_deg = angle_u < 90.0 ? angle_u : angle_u - 90.0;
    }
    return r;
}

/// Pixels whose center lies inside the rectangle (centers exactly on an
/// edge count as inside). The test doubles the projection so everything
/// stays in integers. Negative grid dims mean "unclipped".
inline std::vector<Pixel> rasterize_frame(const MinRectFrame& f, int grid_w, int grid_h) {
    // Pixel-range bounds from the rectangle's corners, padded one pixel.
    const double l2 = static_cast<double>(f.len2());
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    for (const double su : {static_cast<double>(f.min_u), static_cast<double>(f.max_u)}) {
        for (const double sv : {static_cast<double>(f.min_v), static_cast<double>(f.max_v)}) {
            const double x = (su * f.ex - sv * f.ey) / l2;
            const double y = (su * f.ey + sv * f.ex) / l2;
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    }
    int x0 = static_cast<int>(std::floor(xmin)) - 1;
    int x1 = static_cast<int>(std::ceil(xmax)) + 1;
    int y0 = static_cast<int>(std::floor(ymin)) - 1;
    int y1 = static_cast<int>(std::ceil(ymax)) + 1;
    if (grid_w >= 0) {
        x0 = std::max(x0, 0);
        x1 = std::min(x1, grid_w - 1);
    }
    if (grid_h >= 0) {
        y0 = std::max(y0, 0);
        y1 = std::min(y1, grid_h - 1);
    }

    std::vector<Pixel> out;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const std::int64_t u2 =
                (2 * static_cast<std::int64_t>(x) + 1) * f.ex +
                (2 * static_cast<std::int64_t>(y) + 1) * f.ey;
            const std::int64_t v2 =
                -(2 * static_cast<std::int64_t>(x) + 1) * f.ey +
                (2 * static_cast<std::int64_t>(y) + 1) * f.ex;
            if (2 * f.min_u <= u2 && u2 <= 2 * f.max_u && 2 * f.min_v <= v2 &&
                v2 <= 2 * f.max_v)
                out.push_back({x, y});
        }
    }
    return out;
}

inline double rectangularity_of_frame(const MinRectFrame& f, std::size_t pixel_count) {
    return static_cast<double>(pixel_count) * static_cast<double>(f.len2()) /
           (static_cast<double>(f.du()) * static_cast<double>(f.dv()));
}

} // namespace detail

/// Minimum-area enclosing rotated rectangle of a pixel set; pixels are
/// treated as unit squares (hull over boundary-pixel corners, rotating
/// calipers with exact integer comparisons).
inline RotatedRect min_area_rect(const std::vector<Pixel>& component_pixels) {
    return detail::frame_to_rect(detail::min_rect_frame(component_pixels));
}

/// Pixel count divided by the minimum-area rectangle's area; in (0,1],
/// exactly 1.0 for solid axis-aligned rectangles.
inline double rectangularity(const std::vector<Pixel>& component_pixels) {
    const detail::MinRectFrame f = detail::min_rect_frame(component_pixels);
    return detail::rectangularity_of_frame(f, component_pixels.size());
}

/// Regularize one connected component:
///   - below min_component_area       -> removed (empty output)
///   - rectangularity >= threshold    -> snapped to the rasterized min rect
///   - otherwise                      -> union of openings with line kernels
///                                       along the rectangle's two axes
/// Grid dims (when non-negative) clip snapped output to the image.
inline std::vector<Pixel> rectify_component(const std::vector<Pixel>& component_pixels,
                                            const RectifyConfig& cfg,
                                            RectifyRecord* record = nullptr,
                                            int grid_w = -1, int grid_h = -1) {
    detail::validate(cfg);
    if (component_pixels.empty())
        throw ConfigError("rectify_component requires a non-empty pixel set");

    const detail::MinRectFrame frame = detail::min_rect_frame(component_pixels);
    const double rect_score =
        detail::rectangularity_of_frame(frame, component_pixels.size());

    RectifyAction action;
    std::vector<Pixel> out;
    if (static_cast<std::int64_t>(component_pixels.size()) < cfg.min_component_area) {
        action = RectifyAction::removed;
    } else if (rect_score >= cfg.rect_threshold) {
        action = RectifyAction::snapped;
        out = detail::rasterize_frame(frame, grid_w, grid_h);
    } else {
        action = RectifyAction::kept;
        // Open along the rectangle's axes. Directions come from the exact
        // integer edge vector so mirrored components produce mirrored kernels.
        int x0 = component_pixels[0].x, y0 = component_pixels[0].y;
        int x1 = x0, y1 = y0;
        for (const Pixel& p : component_pixels) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        BinaryMask local(x1 - x0 + 1, y1 - y0 + 1);
        for (const Pixel& p : component_pixels)
            local.set(p.x - x0, p.y - y0, true);
        const StructuringElement along = make_line_se(
            static_cast<double>(frame.ex), static_cast<double>(frame.ey), cfg.line_se_length);
        const StructuringElement across = make_line_se(
            -static_cast<double>(frame.ey), static_cast<double>(frame.ex), cfg.line_se_length);
        const BinaryMask a = open(local, along);
        const BinaryMask b = open(local, across);
        for (int y = 0; y < local.height(); ++y)
            for (int x = 0; x < local.width(); ++x)
                if (a.at(x, y) || b.at(x, y)) out.push_back({x + x0, y + y0});
    }

    if (record) {
        record->area_before = static_cast<std::int64_t>(component_pixels.size());
        record->rectangularity = rect_score;
        record->action = action;
        record->area_after = static_cast<std::int64_t>(out.size());
    }
    return out;
}

struct RectifyResult {
    BinaryMask mask;
    RectifyTrace trace;
};

/// Full post-processing pipeline: denoise with a square opening then
/// closing, label 8-connected components, regularize each component, and
/// union the results (components processed in label order).
inline RectifyResult rectify_mask(const BinaryMask& mask, const RectifyConfig& cfg) {
    detail::validate(cfg);
    const StructuringElement denoise = make_se(SeShape::square, cfg.denoise_se_size);
    const BinaryMask cleaned = close(open(mask, denoise), denoise);
    const LabelMap labels = connected_components(cleaned, 8);
    const std::vector<std::vector<Pixel>> comps = component_pixels(labels);

    RectifyResult result{BinaryMask(mask.width(), mask.height()), {}};
    result.trace.records.reserve(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
        RectifyRecord rec;
        rec.label = static_cast<int>(i + 1);
        const std::vector<Pixel> pixels =
            rectify_component(comps[i], cfg, &rec, mask.width(), mask.height());
        for (const Pixel& p : pixels)
            result.mask.set(p.x, p.y, true);
        result.trace.records.push_back(rec);
    }
    return result;
}

inline nlohmann::ordered_json trace_record_json(const RectifyRecord& r) {
    return {{"label", r.label},
            {"area_before", r.area_before},
            {"rectangularity", r.rectangularity},
            {"action", to_string(r.action)},
            {"area_after", r.area_after}};
}

/// One JSON object per line, one line per component record.
inline std::string trace_to_jsonl(const RectifyTrace& trace) {
    std::string out;
    for (const RectifyRecord& r : trace.records) {
        out += trace_record_json(r).dump();
        out += '\n';
    }
    return out;
}

} // namespace buildseg
