#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "buildseg/ascii_grid.hpp"
#include "buildseg/error.hpp"
#include "buildseg/png_io.hpp"

namespace buildseg {

struct ManifestEntry {
    std::string source;
    std::string image;
    std::string mask;
    std::optional<std::string> lidar;
    std::string split = "train";
};

struct Manifest {
    std::vector<ManifestEntry> entries;
};

struct SourceSpec {
    std::string name;
    std::filesystem::path dir;
};

/// Enumerate dataset sources into a manifest. Each source directory must
/// contain images/ and masks/ with matching PNG filenames; an optional
/// lidar/ directory supplies <stem>.asc height grids. Entries are ordered
/// lexicographically by image path; existence/parseability is checked by
/// validate_manifest, not here.
inline Manifest build_manifest(const std::vector<SourceSpec>& sources) {
    namespace fs = std::filesystem;
    Manifest m;
    for (const SourceSpec& src : sources) {
        const fs::path images = src.dir / "images";
        std::error_code ec;
        if (!fs::is_directory(images, ec))
            throw IoError("unreadable source directory: " + images.string());
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(images)) {
            if (e.is_regular_file() && e.path().extension() == ".png")
                files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& img : files) {
            ManifestEntry entry;
            entry.source = src.name;
            entry.image = img.string();
            entry.mask = (src.dir / "masks" / img.filename()).string();
            const fs::path lidar = src.dir / "lidar" / (img.stem().string() + ".asc");
            if (fs::is_regular_file(lidar, ec))
                entry.lidar = lidar.string();
            m.entries.push_back(std::move(entry));
        }
    }
    std::sort(m.entries.begin(), m.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.image < b.image; });

    std::set<std::string> seen;
    for (const ManifestEntry& e : m.entries)
        if (!seen.insert(e.image).second)
            throw ConfigError("duplicate image path in manifest: " + e.image);
    return m;
}

/// Check every entry: referenced files must exist and parse, and image,
/// mask and (when present) lidar grid dimensions must agree. Returns one
/// human-readable violation per problem; empty means valid.
inline std::vector<std::string> validate_manifest(const Manifest& m) {
    std::vector<std::string> violations;
    for (const ManifestEntry& e : m.entries) {
        int iw = -1, ih = -1;
        try {
            const Raster img = load_image(e.image);
            iw = img.width();
            ih = img.height();
        } catch (const Error& err) {
            violations.push_back(e.image + ": " + err.what());
        }
        try {
            const BinaryMask mask = load_mask(e.mask);
            if (iw >= 0 && (mask.width() != iw || mask.height() != ih))
                violations.push_back(e.mask + ": mask is " + std::to_string(mask.width()) +
                                     "x" + std::to_string(mask.height()) + " but image is " +
                                     std::to_string(iw) + "x" + std::to_string(ih));
        } catch (const Error& err) {
            violations.push_back(e.mask + ": " + err.what());
        }
        if (e.lidar) {
            try {
                const HeightGrid grid = load_height_grid(*e.lidar);
                if (iw >= 0 && (grid.width() != iw || grid.height() != ih))
                    violations.push_back(*e.lidar + ": height grid is " +
                                         std::to_string(grid.width()) + "x" +
                                         std::to_string(grid.height()) + " but image is " +
                                         std::to_string(iw) + "x" + std::to_string(ih));
            } catch (const Error& err) {
                violations.push_back(*e.lidar + ": " + err.what());
            }
        }
    }
    return violations;
}

/// Schema: {"entries":[{"source","image","mask","lidar"?,"split"}...]}
inline nlohmann::ordered_json manifest_to_json(const Manifest& m) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const ManifestEntry& e : m.entries) {
        nlohmann::ordered_json j;
        j["source"] = e.source;
        j["image"] = e.image;
        j["mask"] = e.mask;
        if (e.lidar) j["lidar"] = *e.lidar;
        j["split"] = e.split;
        entries.push_back(std::move(j));
    }
    return nlohmann::ordered_json{{"entries", std::move(entries)}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    try {
        for (const auto& e : j.at("entries")) {
            ManifestEntry entry;
            entry.source = e.at("source").get<std::string>();
            entry.image = e.at("image").get<std::string>();
            entry.mask = e.at("mask").get<std::string>();
            if (e.contains("lidar")) entry.lidar = e.at("lidar").get<std::string>();
            entry.split = e.at("split").get<std::string>();
            m.entries.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest JSON: ") + e.what());
    }
    return m;
}

} // namespace buildseg
