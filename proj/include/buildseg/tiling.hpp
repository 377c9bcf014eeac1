#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "buildseg/error.hpp"
#include "buildseg/raster.hpp"

namespace buildseg {

/// Row-major tiling of a source raster into fixed-size windows. The last
/// row/column of tiles is shifted inward so every tile is full-size and
/// in-bounds (edge tiles then overlap their neighbors implicitly).
struct TileGrid {
    int source_w = 0;
    int source_h = 0;
    int tile_size = 0;
    int overlap = 0;
    std::vector<PixelRect> tiles;
};

namespace detail {

inline std::vector<int> tile_origins(int extent, int tile, int stride) {
    std::vector<int> origins;
    for (int pos = 0;; pos += stride) {
        if (pos + tile >= extent) {
            origins.push_back(extent - tile);
            break;
        }
        origins.push_back(pos);
    }
    return origins;
}

} // namespace detail

inline TileGrid plan_tiles(int width, int height, int tile_size = 500, int overlap = 0) {
    if (width < 1 || height < 1)
        throw DimensionError("source dimensions must be at least 1x1");
    if (tile_size < 1 || tile_size > std::min(width, height))
        throw ConfigError("tile size must be in [1, min(width, height)]");
    if (overlap < 0 || overlap >= tile_size)
        throw ConfigError("overlap must be in [0, tile_size)");

    TileGrid grid{width, height, tile_size, overlap, {}};
    const int stride = tile_size - overlap;
    const std::vector<int> xs = detail::tile_origins(width, tile_size, stride);
    const std::vector<int> ys = detail::tile_origins(height, tile_size, stride);
    grid.tiles.reserve(xs.size() * ys.size());
    for (int y : ys)
        for (int x : xs)
            grid.tiles.push_back({x, y, tile_size, tile_size});
    return grid;
}

namespace detail {

template <typename T>
inline void check_grid_dims(const T& source, const TileGrid& grid) {
    if (source.width() != grid.source_w || source.height() != grid.source_h)
        throw DimensionError("source dimensions do not match the tile grid (" +
                             std::to_string(source.width()) + "x" +
                             std::to_string(source.height()) + " vs " +
                             std::to_string(grid.source_w) + "x" +
                             std::to_string(grid.source_h) + ")");
}

} // namespace detail

inline std::vector<BinaryMask> extract_tiles(const BinaryMask& m, const TileGrid& grid) {
    detail::check_grid_dims(m, grid);
    std::vector<BinaryMask> out;
    out.reserve(grid.tiles.size());
    for (const PixelRect& r : grid.tiles)
        out.push_back(crop(m, r));
    return out;
}

inline std::vector<Raster> extract_tiles(const Raster& r, const TileGrid& grid) {
    detail::check_grid_dims(r, grid);
    std::vector<Raster> out;
    out.reserve(grid.tiles.size());
    for (const PixelRect& rect : grid.tiles)
        out.push_back(crop(r, rect));
    return out;
}

/// Per-tile foreground probabilities in [0,1].
struct ProbGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values; // row-major

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

inline ProbGrid prob_from_mask(const BinaryMask& m) {
    ProbGrid g{m.width(), m.height(), {}};
    g.values.reserve(m.pixels().size());
    for (std::uint8_t p : m.pixels())
        g.values.push_back(p ? 1.0 : 0.0);
    return g;
}

/// Interpret an 8-bit grayscale raster as probabilities (value / 255).
inline ProbGrid prob_from_gray(const Raster& r) {
    if (r.channels() != 1)
        throw FormatError("probability tiles must be single-channel");
    ProbGrid g{r.width(), r.height(), {}};
    g.values.reserve(r.samples().size());
    for (std::uint8_t v : r.samples())
        g.values.push_back(v / 255.0);
    return g;
}

/// Average all covering tiles' probabilities per source pixel; a pixel is
/// foreground iff the mean is >= 0.5 (ties go to foreground). Tiles are
/// accumulated in grid order, so the result is deterministic.
inline BinaryMask merge_tiles(const std::vector<ProbGrid>& tiles, const TileGrid& grid) {
    if (tiles.size() != grid.tiles.size())
        throw DimensionError("tile count does not match the grid (" +
                             std::to_string(tiles.size()) + " vs " +
                             std::to_string(grid.tiles.size()) + ")");
    const std::size_t n = static_cast<std::size_t>(grid.source_w) * grid.source_h;
    std::vector<double> sum(n, 0.0);
    std::vector<std::uint32_t> count(n, 0);

    for (std::size_t i = 0; i < tiles.size(); ++i) {
        const ProbGrid& t = tiles[i];
        const PixelRect& r = grid.tiles[i];
        if (t.width != r.w || t.height != r.h)
            throw DimensionError("tile " + std::to_string(i) + " dimensions do not match its rect");
        for (int y = 0; y < t.height; ++y) {
            for (int x = 0; x < t.width; ++x) {
                const double p = t.at(x, y);
                if (!(p >= 0.0 && p <= 1.0))
                    throw ConfigError("tile probabilities must be in [0,1]");
                const std::size_t idx =
                    static_cast<std::size_t>(r.y + y) * grid.source_w + (r.x + x);
                sum[idx] += p;
                ++count[idx];
            }
        }
    }

    BinaryMask out(grid.source_w, grid.source_h);
    for (int y = 0; y < grid.source_h; ++y) {
        for (int x = 0; x < grid.source_w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * grid.source_w + x;
            if (count[idx] == 0)
                throw ConfigError("tile grid leaves pixel (" + std::to_string(x) + "," +
                                  std::to_string(y) + ") uncovered");
            out.set(x, y, sum[idx] * 2.0 >= static_cast<double>(count[idx]));
        }
    }
    return out;
}

/// Sidecar schema: {"source_w","source_h","tile_size","overlap",
///                  "tiles":[[x,y,w,h]...]}
inline nlohmann::ordered_json grid_to_json(const TileGrid& grid) {
    nlohmann::ordered_json j;
    j["source_w"] = grid.source_w;
    j["source_h"] = grid.source_h;
    j["tile_size"] = grid.tile_size;
    j["overlap"] = grid.overlap;
    nlohmann::ordered_json tiles = nlohmann::ordered_json::array();
    for (const PixelRect& r : grid.tiles)
        tiles.push_back({r.x, r.y, r.w, r.h});
    j["tiles"] = std::move(tiles);
    return j;
}

inline TileGrid grid_from_json(const nlohmann::json& j) {
    TileGrid grid;
    try {
        grid.source_w = j.at("source_w").get<int>();
        grid.source_h = j.at("source_h").get<int>();
        grid.tile_size = j.at("tile_size").get<int>();
        grid.overlap = j.at("overlap").get<int>();
        for (const auto& t : j.at("tiles")) {
            if (!t.is_array() || t.size() != 4)
                throw ParseError("tile grid: each tile must be [x,y,w,h]");
            grid.tiles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>(),
                                  t[3].get<int>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tile grid JSON: ") + e.what());
    }
    if (grid.source_w < 1 || grid.source_h < 1 || grid.tile_size < 1 || grid.tiles.empty())
        throw ParseError("tile grid JSON: invalid geometry");
    for (const PixelRect& r : grid.tiles) {
        if (r.w != grid.tile_size || r.h != grid.tile_size || r.x < 0 || r.y < 0 ||
            r.x + r.w > grid.source_w || r.y + r.h > grid.source_h)
            throw ParseError("tile grid JSON: tile out of bounds or not full-size");
    }
    return grid;
}

} // namespace buildseg
