#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "buildseg/error.hpp"
#include "buildseg/raster.hpp"

namespace buildseg {

enum class SeShape { square, disk, line };

/// Small boolean kernel, stored as offsets relative to the anchor (center).
/// Kernel extents are symmetric, so kernel dimensions are always odd and the
/// anchor is the center cell.
class StructuringElement {
public:
    StructuringElement(SeShape shape, int size, double angle_deg, std::vector<Pixel> offsets)
        : shape_(shape), size_(size), angle_deg_(angle_deg), offsets_(std::move(offsets)) {
        for (const Pixel& p : offsets_) {
            extent_x_ = std::max(extent_x_, std::abs(p.x));
            extent_y_ = std::max(extent_y_, std::abs(p.y));
        }
    }

    SeShape shape() const { return shape_; }
    int size() const { return size_; }
    double angle_deg() const { return angle_deg_; }
    const std::vector<Pixel>& offsets() const { return offsets_; }
    int extent_x() const { return extent_x_; }
    int extent_y() const { return extent_y_; }
    int kernel_width() const { return 2 * extent_x_ + 1; }
    int kernel_height() const { return 2 * extent_y_ + 1; }

    bool contains(int dx, int dy) const {
        for (const Pixel& p : offsets_)
            if (p.x == dx && p.y == dy) return true;
        return false;
    }

private:
    SeShape shape_;
    int size_;
    double angle_deg_;
    std::vector<Pixel> offsets_; // always includes (0,0)
    int extent_x_ = 0;
    int extent_y_ = 0;
};

namespace detail {

/// Midpoint rasterization of a `length`-cell segment through the origin along
/// direction (vx, vy): one cell per unit step of the major axis. Symmetric
/// under negation of either axis, which keeps line kernels flip-exact.
inline std::vector<Pixel> line_offsets(double vx, double vy, int length) {
    std::vector<Pixel> cells;
    cells.reserve(length);
    const int half = (length - 1) / 2;
    const bool x_major = std::abs(vx) >= std::abs(vy);
    for (int i = -half; i <= half; ++i) {
        if (x_major)
            cells.push_back({i, static_cast<int>(std::lround(i * vy / vx))});
        else
            cells.push_back({static_cast<int>(std::lround(i * vx / vy)), i});
    }
    return cells;
}

} // namespace detail

/// Build a structuring element.
///  - square: `size` is the (odd) side length
///  - disk:   `size` is the radius; cells with Euclidean distance <= size
///  - line:   `size` is the (odd) cell count; `angle_deg` in [0,180)
inline StructuringElement make_se(SeShape shape, int size, double angle_deg = 0.0) {
    if (size < 1)
        throw ConfigError("structuring element size must be at least 1");
    std::vector<Pixel> offsets;
    switch (shape) {
    case SeShape::square: {
        if (size % 2 == 0)
            throw ConfigError("square structuring element size must be odd");
        const int half = size / 2;
        for (int dy = -half; dy <= half; ++dy)
            for (int dx = -half; dx <= half; ++dx)
                offsets.push_back({dx, dy});
        break;
    }
    case SeShape::disk: {
        for (int dy = -size; dy <= size; ++dy)
            for (int dx = -size; dx <= size; ++dx)
                if (dx * dx + dy * dy <= size * size)
                    offsets.push_back({dx, dy});
        break;
    }
    case SeShape::line: {
        if (size % 2 == 0)
            throw ConfigError("line structuring element length must be odd");
        if (!(angle_deg >= 0.0 && angle_deg < 180.0))
            throw ConfigError("line structuring element angle must be in [0,180)");
        const double rad = angle_deg * 3.14159265358979323846 / 180.0;
        offsets = detail::line_offsets(std::cos(rad), std::sin(rad), size);
        break;
    }
    }
    return StructuringElement(shape, size, angle_deg, std::move(offsets));
}

/// Line kernel along an explicit direction vector. Used where the direction
/// comes from integer geometry (component edges), so that mirrored inputs
/// produce exactly mirrored kernels.
inline StructuringElement make_line_se(double dir_x, double dir_y, int length) {
    if (length < 1 || length % 2 == 0)
        throw ConfigError("line structuring element length must be odd and positive");
    if (dir_x == 0.0 && dir_y == 0.0)
        throw ConfigError("line structuring element direction must be non-zero");
    double angle = std::atan2(dir_y, dir_x) * 180.0 / 3.14159265358979323846;
    if (angle < 0) angle += 180.0;
    if (angle >= 180.0) angle -= 180.0;
    return StructuringElement(SeShape::line, length, angle,
                              detail::line_offsets(dir_x, dir_y, length));
}

/// Erosion: output pixel is true iff every kernel cell anchored there lands
/// on a true pixel. Out-of-bounds pixels count as background.
inline BinaryMask erode(const BinaryMask& m, const StructuringElement& se) {
    const int w = m.width(), h = m.height();
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool all = true;
            for (const Pixel& d : se.offsets()) {
                const int nx = x + d.x, ny = y + d.y;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h || !m.at(nx, ny)) {
                    all = false;
                    break;
                }
            }
            out.set(x, y, all);
        }
    }
    return out;
}

/// Dilation: output pixel is true iff any reflected kernel cell anchored
/// there lands on a true pixel. Out-of-bounds pixels count as background.
inline BinaryMask dilate(const BinaryMask& m, const StructuringElement& se) {
    const int w = m.width(), h = m.height();
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool any = false;
            for (const Pixel& d : se.offsets()) {
                const int nx = x - d.x, ny = y - d.y;
                if (nx >= 0 && ny >= 0 && nx < w && ny < h && m.at(nx, ny)) {
                    any = true;
                    break;
                }
            }
            out.set(x, y, any);
        }
    }
    return out;
}

/// Opening: erosion then dilation. Because the eroded set (the kernel
/// contains its anchor) and every dilated pixel stay inside the original
/// mask, computing on the image grid is exact.
inline BinaryMask open(const BinaryMask& m, const StructuringElement& se) {
    return dilate(erode(m, se), se);
}

/// Closing: dilation then erosion, evaluated on a canvas padded by the
/// kernel extent. Without the padding, the clipped dilation would let the
/// erosion eat mask pixels near the image border and closing would not be
/// extensive (id ⊆ close) there. The result equals the infinite-plane
/// closing restricted to the image grid.
inline BinaryMask close(const BinaryMask& m, const StructuringElement& se) {
    const int px = se.extent_x(), py = se.extent_y();
    const int w = m.width(), h = m.height();
    if (px == 0 && py == 0) {
        BinaryMask id = m;
        return id;
    }
    BinaryMask padded(w + 2 * px, h + 2 * py);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (m.at(x, y)) padded.set(x + px, y + py, true);
    BinaryMask closed = erode(dilate(padded, se), se);
    return crop(closed, PixelRect{px, py, w, h});
}

/// Dense component labels, 0 = background.
class LabelMap {
public:
    LabelMap(int width, int height)
        : width_(width), height_(height),
          labels_(static_cast<std::size_t>(width) * height, 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    int component_count() const { return component_count_; }
    std::int32_t at(int x, int y) const {
        return labels_[static_cast<std::size_t>(y) * width_ + x];
    }
    const std::vector<std::int32_t>& labels() const { return labels_; }

    std::vector<std::int32_t>& mutable_labels() { return labels_; }
    void set_component_count(int n) { component_count_ = n; }

private:
    int width_;
    int height_;
    std::vector<std::int32_t> labels_;
    int component_count_ = 0;
};

namespace detail {

struct UnionFind {
    std::vector<std::int32_t> parent;
    std::int32_t add() {
        parent.push_back(static_cast<std::int32_t>(parent.size()));
        return parent.back();
    }
    std::int32_t find(std::int32_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]]; // path halving
            a = parent[a];
        }
        return a;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace detail

/// Two-pass union-find labeling. Final labels are dense (1..count) and
/// assigned by scan order of each component's first-encountered pixel, so
/// the result is a pure function of the mask.
inline LabelMap connected_components(const BinaryMask& m, int connectivity = 8) {
    if (connectivity != 4 && connectivity != 8)
        throw ConfigError("connectivity must be 4 or 8");
    const int w = m.width(), h = m.height();
    LabelMap map(w, h);
    std::vector<std::int32_t>& labels = map.mutable_labels();
    detail::UnionFind uf;
    uf.parent.reserve(64);

    // Provisional labels; only already-scanned neighbors need checking.
    const Pixel neighbors4[] = {{-1, 0}, {0, -1}};
    const Pixel neighbors8[] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    const Pixel* neigh = connectivity == 4 ? neighbors4 : neighbors8;
    const int ncount = connectivity == 4 ? 2 : 4;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            std::int32_t label = -1;
            for (int i = 0; i < ncount; ++i) {
                const int nx = x + neigh[i].x, ny = y + neigh[i].y;
                if (nx < 0 || ny < 0 || nx >= w || !m.at(nx, ny)) continue;
                const std::int32_t nl = labels[static_cast<std::size_t>(ny) * w + nx] - 1;
                if (label < 0)
                    label = nl;
                else
                    uf.unite(label, nl);
            }
            if (label < 0) label = uf.add();
            labels[static_cast<std::size_t>(y) * w + x] = label + 1;
        }
    }

    // Second pass: resolve roots and renumber densely in scan order.
    std::vector<std::int32_t> dense(uf.parent.size(), 0);
    std::int32_t next = 0;
    for (std::int32_t& l : labels) {
        if (l == 0) continue;
        const std::int32_t root = uf.find(l - 1);
        if (dense[root] == 0) dense[root] = ++next;
        l = dense[root];
    }
    map.set_component_count(next);
    return map;
}

/// Pixel lists per component, in label order; pixels in scan order.
inline std::vector<std::vector<Pixel>> component_pixels(const LabelMap& map) {
    std::vector<std::vector<Pixel>> out(map.component_count());
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            if (std::int32_t l = map.at(x, y); l > 0) out[l - 1].push_back({x, y});
    return out;
}

namespace detail {

/// Exact squared Euclidean distance from every pixel to the nearest
/// background pixel, where everything beyond the image border is background.
/// Two-phase algorithm (per-column scan, then per-row lower envelope of
/// parabolas) on a grid padded with a 1-pixel background ring; integer
/// arithmetic throughout, so distances are exact.
inline std::vector<std::int64_t> squared_distance_to_background(const BinaryMask& m) {
    const int w = m.width(), h = m.height();
    const int pw = w + 2, ph = h + 2;
    const std::int64_t INF = static_cast<std::int64_t>(pw + ph);

    // Phase 1: vertical distances g(x,y) to nearest background in column x.
    std::vector<std::int64_t> g(static_cast<std::size_t>(pw) * ph);
    for (int x = 0; x < pw; ++x) {
        g[x] = 0; // padded top row is background
        for (int y = 1; y < ph; ++y) {
            const bool bg = y == ph - 1 || x == 0 || x == pw - 1 ||
                            !m.at(x - 1, y - 1);
            g[static_cast<std::size_t>(y) * pw + x] =
                bg ? 0 : std::min(INF, g[static_cast<std::size_t>(y - 1) * pw + x] + 1);
        }
        for (int y = ph - 2; y >= 0; --y) {
            auto& cur = g[static_cast<std::size_t>(y) * pw + x];
            cur = std::min(cur, g[static_cast<std::size_t>(y + 1) * pw + x] + 1);
        }
    }

    // Phase 2: per row, lower envelope of parabolas i -> (x-i)^2 + g(i)^2.
    std::vector<std::int64_t> dist(static_cast<std::size_t>(w) * h);
    std::vector<int> s(pw), t(pw);
    auto f = [&](int x, int i, const std::int64_t* row) {
        const std::int64_t dx = x - i;
        return dx * dx + row[i] * row[i];
    };
    auto sep = [&](int i, int u, const std::int64_t* row) {
        return static_cast<int>((static_cast<std::int64_t>(u) * u - static_cast<std::int64_t>(i) * i +
                                 row[u] * row[u] - row[i] * row[i]) /
                                (2 * static_cast<std::int64_t>(u - i)));
    };
    for (int y = 1; y < ph - 1; ++y) {
        const std::int64_t* row = g.data() + static_cast<std::size_t>(y) * pw;
        int q = 0;
        s[0] = 0;
        t[0] = 0;
        for (int u = 1; u < pw; ++u) {
            while (q >= 0 && f(t[q], s[q], row) > f(t[q], u, row)) --q;
            if (q < 0) {
                q = 0;
                s[0] = u;
                t[0] = 0;
            } else {
                const int wpos = 1 + sep(s[q], u, row);
                if (wpos < pw) {
                    ++q;
                    s[q] = u;
                    t[q] = wpos;
                }
            }
        }
        for (int x = pw - 1; x >= 0; --x) {
            while (q > 0 && x < t[q]) --q;
            if (x >= 1 && x <= w)
                dist[static_cast<std::size_t>(y - 1) * w + (x - 1)] = f(x, s[q], row);
        }
    }
    return dist;
}

} // namespace detail

/// Pixels of the mask whose Euclidean distance to the nearest background
/// pixel (including the implicit background beyond the image border) is <= d.
inline BinaryMask boundary_band(const BinaryMask& m, int d) {
    if (d < 1)
        throw ConfigError("boundary band distance must be at least 1");
    const std::vector<std::int64_t> sq = detail::squared_distance_to_background(m);
    const std::int64_t limit = static_cast<std::int64_t>(d) * d;
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            out.set(x, y, m.at(x, y) && sq[static_cast<std::size_t>(y) * m.width() + x] <= limit);
    return out;
}

} // namespace buildseg
