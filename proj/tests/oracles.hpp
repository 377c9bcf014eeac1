#pragma once

// Independent reference implementations used to validate library results.
// These favour clarity over speed: direct double loops, flood fill, and a
// dense angle sweep instead of the library's optimized algorithms.

#include <buildseg/morphology.hpp>
#include <buildseg/raster.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracles {

// Erosion from the definition: a pixel stays set iff every element offset
// lands on a set pixel; anything outside the grid counts as background.
inline buildseg::BinaryMask erode(const buildseg::BinaryMask& m,
                                  const buildseg::StructuringElement& se) {
    buildseg::BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            bool all = true;
            for (const auto& d : se.offsets()) {
                const int nx = x + d.x;
                const int ny = y + d.y;
                if (nx < 0 || ny < 0 || nx >= m.width() || ny >= m.height() ||
                    !m.at(nx, ny)) {
                    all = false;
                    break;
                }
            }
            out.set(x, y, all);
        }
    }
    return out;
}

// Dilation from the definition: a pixel becomes set iff some element offset,
// taken from the pixel backwards, lands on a set pixel.
inline buildseg::BinaryMask dilate(const buildseg::BinaryMask& m,
                                   const buildseg::StructuringElement& se) {
    buildseg::BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            bool any = false;
            for (const auto& d : se.offsets()) {
                const int nx = x - d.x;
                const int ny = y - d.y;
                if (nx >= 0 && ny >= 0 && nx < m.width() && ny < m.height() &&
                    m.at(nx, ny)) {
                    any = true;
                    break;
                }
            }
            out.set(x, y, any);
        }
    }
    return out;
}

// Exact squared distance from each pixel to the nearest background pixel,
// where everything beyond the grid border is background. O(N^2) pair scan
// plus the four straight-line distances to the border.
inline std::vector<std::int64_t> squared_distance_to_background(const buildseg::BinaryMask& m) {
    const int w = m.width();
    const int h = m.height();
    std::vector<std::int64_t> dist(static_cast<std::size_t>(w) * h, 0);
    std::vector<buildseg::Pixel> bg;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) bg.push_back({x, y});
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            const std::int64_t border =
                std::min(std::min(x + 1, w - x), std::min(y + 1, h - y));
            std::int64_t best = border * border;
            for (const auto& q : bg) {
                const std::int64_t dx = q.x - x;
                const std::int64_t dy = q.y - y;
                best = std::min(best, dx * dx + dy * dy);
            }
            dist[static_cast<std::size_t>(y) * w + x] = best;
        }
    }
    return dist;
}

// Foreground pixels within distance d of background, via the pair scan above.
inline buildseg::BinaryMask boundary_band(const buildseg::BinaryMask& m, int d) {
    const auto dist = squared_distance_to_background(m);
    buildseg::BinaryMask out(m.width(), m.height());
    const std::int64_t limit = static_cast<std::int64_t>(d) * d;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (m.at(x, y) && dist[static_cast<std::size_t>(y) * m.width() + x] <= limit) {
                out.set(x, y, true);
            }
        }
    }
    return out;
}

// Plain counting IOU; empty-union convention matches the library contract.
inline double iou(const buildseg::BinaryMask& a, const buildseg::BinaryMask& b) {
    std::int64_t inter = 0, uni = 0;
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            const bool pa = a.at(x, y);
            const bool pb = b.at(x, y);
            if (pa && pb) ++inter;
            if (pa || pb) ++uni;
        }
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Connected components by iterative flood fill, labelled in scan order of
// each component's first-encountered pixel.
inline buildseg::LabelMap connected_components(const buildseg::BinaryMask& m,
                                               int connectivity = 8) {
    const int w = m.width();
    const int h = m.height();
    buildseg::LabelMap lm(w, h);
    auto& labels = lm.mutable_labels();
    int count = 0;
    std::vector<buildseg::Pixel> stack;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (!m.at(sx, sy) || labels[static_cast<std::size_t>(sy) * w + sx] != 0) {
                continue;
            }
            const int label = ++count;
            stack.push_back({sx, sy});
            labels[static_cast<std::size_t>(sy) * w + sx] = label;
            while (!stack.empty()) {
                const auto p = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        if (connectivity == 4 && dx != 0 && dy != 0) continue;
                        const int nx = p.x + dx;
                        const int ny = p.y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        auto& cell = labels[static_cast<std::size_t>(ny) * w + nx];
                        if (m.at(nx, ny) && cell == 0) {
                            cell = label;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
        }
    }
    lm.set_component_count(count);
    return lm;
}

// Minimum enclosing-rectangle area by sweeping candidate orientations at a
// 0.1 degree step over [0, 90). The pixels are treated as unit squares; the
// sweep can only overshoot the true optimum, never undershoot it.
inline double min_rect_area_sweep(const std::vector<buildseg::Pixel>& pixels) {
    std::vector<std::pair<double, double>> corners;
    corners.reserve(pixels.size() * 4);
    for (const auto& p : pixels) {
        corners.emplace_back(p.x, p.y);
        corners.emplace_back(p.x + 1.0, p.y);
        corners.emplace_back(p.x, p.y + 1.0);
        corners.emplace_back(p.x + 1.0, p.y + 1.0);
    }
    double best = std::numeric_limits<double>::infinity();
    constexpr double kPi = 3.14159265358979323846;
    for (int step = 0; step < 900; ++step) {
        const double theta = step * 0.1 * kPi / 180.0;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        double min_u = std::numeric_limits<double>::infinity();
        double max_u = -min_u;
        double min_v = min_u;
        double max_v = -min_u;
        for (const auto& [px, py] : corners) {
            const double u = px * c + py * s;
            const double v = -px * s + py * c;
            min_u = std::min(min_u, u);
            max_u = std::max(max_u, u);
            min_v = std::min(min_v, v);
            max_v = std::max(max_v, v);
        }
        best = std::min(best, (max_u - min_u) * (max_v - min_v));
    }
    return best;
}

} // namespace oracles
