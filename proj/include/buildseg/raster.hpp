#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "buildseg/error.hpp"

namespace buildseg {

/// Integer pixel coordinate, x to the right, y downward.
struct Pixel {
    int x = 0;
    int y = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Axis-aligned pixel rectangle: origin (x, y), extent (w, h).
struct PixelRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Single-channel boolean pixel grid, row-major, true = building.
class BinaryMask {
public:
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw DimensionError("mask dimensions must be at least 1x1");
        pixels_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int x, int y) const {
        assert(in_bounds(x, y));
        return pixels_[index(x, y)] != 0;
    }

    void set(int x, int y, bool value) {
        assert(in_bounds(x, y));
        pixels_[index(x, y)] = value ? 1 : 0;
    }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    /// Number of foreground pixels.
    std::int64_t count() const {
        std::int64_t n = 0;
        for (std::uint8_t p : pixels_) n += p;
        return n;
    }

    bool empty() const { return count() == 0; }

    const std::vector<std::uint8_t>& pixels() const { return pixels_; }
    std::vector<std::uint8_t>& pixels() { return pixels_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_; // 0 or 1
};

/// Multi-channel 8-bit image grid. Samples are row-major interleaved.
/// Channels is 1 (gray), 3 (RGB) or 4 (R,G,B,H after height fusion).
class Raster {
public:
    Raster(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width), height_(height), channels_(channels) {
        if (width < 1 || height < 1)
            throw DimensionError("raster dimensions must be at least 1x1");
        if (channels != 1 && channels != 3 && channels != 4)
            throw FormatError("raster channel count must be 1, 3 or 4");
        samples_.assign(static_cast<std::size_t>(width) * height * channels, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }

    std::uint8_t at(int x, int y, int c) const {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_ && c >= 0 && c < channels_);
        return samples_[index(x, y, c)];
    }

    void set(int x, int y, int c, std::uint8_t value) {
        samples_[index(x, y, c)] = value;
    }

    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    const std::vector<std::uint8_t>& samples() const { return samples_; }
    std::vector<std::uint8_t>& samples() { return samples_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_;
    int height_;
    int channels_;
    std::vector<std::uint8_t> samples_;
};

/// Real-valued height grid (meters) with a nodata sentinel.
class HeightGrid {
public:
    HeightGrid(int width, int height, std::vector<double> values, double nodata)
        : width_(width), height_(height), values_(std::move(values)), nodata_(nodata) {
        if (width < 1 || height < 1)
            throw DimensionError("height grid dimensions must be at least 1x1");
        if (values_.size() != static_cast<std::size_t>(width) * height)
            throw DimensionError("height grid value count does not match dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    double nodata() const { return nodata_; }

    double at(int x, int y) const {
        return values_[static_cast<std::size_t>(y) * width_ + x];
    }

    bool is_nodata(int x, int y) const { return at(x, y) == nodata_; }

    const std::vector<double>& values() const { return values_; }

private:
    int width_;
    int height_;
    std::vector<double> values_;
    double nodata_;
};

/// Linear height-to-byte mapping: lo maps to 0, hi to 255, clamped.
struct NormSpec {
    double lo = 0.0;  // meters
    double hi = 30.0; // meters
};

namespace detail {

inline void check_rect(const PixelRect& r, int w, int h, const char* what) {
    if (r.w < 1 || r.h < 1)
        throw DimensionError(std::string(what) + ": rectangle extent must be at least 1x1");
    if (r.x < 0 || r.y < 0 || r.x + r.w > w || r.y + r.h > h)
        throw DimensionError(std::string(what) + ": rectangle (" + std::to_string(r.x) + "," +
                             std::to_string(r.y) + "," + std::to_string(r.w) + "," +
                             std::to_string(r.h) + ") out of bounds for " + std::to_string(w) +
                             "x" + std::to_string(h));
}

} // namespace detail

/// Copy the sub-grid described by rect. The rect must lie inside the source.
inline BinaryMask crop(const BinaryMask& m, const PixelRect& rect) {
    detail::check_rect(rect, m.width(), m.height(), "crop");
    BinaryMask out(rect.w, rect.h);
    for (int y = 0; y < rect.h; ++y)
        for (int x = 0; x < rect.w; ++x)
            out.set(x, y, m.at(rect.x + x, rect.y + y));
    return out;
}

inline Raster crop(const Raster& r, const PixelRect& rect) {
    detail::check_rect(rect, r.width(), r.height(), "crop");
    Raster out(rect.w, rect.h, r.channels());
    const int ch = r.channels();
    for (int y = 0; y < rect.h; ++y)
        for (int x = 0; x < rect.w; ++x)
            for (int c = 0; c < ch; ++c)
                out.set(x, y, c, r.at(rect.x + x, rect.y + y, c));
    return out;
}

/// Append a height channel: value = round(clamp((h - lo)/(hi - lo), 0, 1) * 255),
/// half-up; nodata cells map to 0. The color channels are copied verbatim.
inline Raster fuse_channels(const Raster& image, const HeightGrid& grid, const NormSpec& norm = {}) {
    if (image.channels() != 3)
        throw FormatError("fuse_channels expects a 3-channel image");
    if (!(norm.hi > norm.lo))
        throw ConfigError("NormSpec requires hi > lo");
    if (image.width() != grid.width() || image.height() != grid.height())
        throw DimensionError("image and height grid dimensions differ: " +
                             std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                             " vs " + std::to_string(grid.width()) + "x" +
                             std::to_string(grid.height()));
    Raster out(image.width(), image.height(), 4);
    const double span = norm.hi - norm.lo;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            for (int c = 0; c < 3; ++c)
                out.set(x, y, c, image.at(x, y, c));
            std::uint8_t v = 0;
            if (!grid.is_nodata(x, y)) {
                double t = (grid.at(x, y) - norm.lo) / span;
                t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
                v = static_cast<std::uint8_t>(std::floor(t * 255.0 + 0.5));
            }
            out.set(x, y, 3, v);
        }
    }
    return out;
}

/// Mirror left-right.
inline BinaryMask hflip(const BinaryMask& m) {
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            out.set(x, y, m.at(m.width() - 1 - x, y));
    return out;
}

inline Raster hflip(const Raster& r) {
    Raster out(r.width(), r.height(), r.channels());
    for (int y = 0; y < r.height(); ++y)
        for (int x = 0; x < r.width(); ++x)
            for (int c = 0; c < r.channels(); ++c)
                out.set(x, y, c, r.at(r.width() - 1 - x, y, c));
    return out;
}

/// Mirror top-bottom.
inline BinaryMask vflip(const BinaryMask& m) {
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            out.set(x, y, m.at(x, m.height() - 1 - y));
    return out;
}

inline Raster vflip(const Raster& r) {
    Raster out(r.width(), r.height(), r.channels());
    for (int y = 0; y < r.height(); ++y)
        for (int x = 0; x < r.width(); ++x)
            for (int c = 0; c < r.channels(); ++c)
                out.set(x, y, c, r.at(x, r.height() - 1 - y, c));
    return out;
}

} // namespace buildseg
