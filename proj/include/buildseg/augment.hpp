#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "buildseg/error.hpp"
#include "buildseg/raster.hpp"
#include "buildseg/rng.hpp"

namespace buildseg {

struct AugmentationConfig {
    int crop_size = 500;
    double hflip_prob = 0.5;
    double vflip_prob = 0.5;
    double brightness_delta = 32.0;                  // additive, 8-bit units
    std::pair<double, double> contrast_range{0.5, 1.5};
    std::pair<double, double> saturation_range{0.5, 1.5};
    double hue_delta = 18.0;                         // on a [0,180) hue wheel
    std::uint64_t seed = 0;
};

/// Configuration under which augment() is a byte-exact no-op.
inline AugmentationConfig identity_augmentation(int crop_size) {
    AugmentationConfig cfg;
    cfg.crop_size = crop_size;
    cfg.hflip_prob = 0.0;
    cfg.vflip_prob = 0.0;
    cfg.brightness_delta = 0.0;
    cfg.contrast_range = {1.0, 1.0};
    cfg.saturation_range = {1.0, 1.0};
    cfg.hue_delta = 0.0;
    return cfg;
}

struct Sample {
    Raster image;
    BinaryMask mask;
    std::string source_id;
};

namespace detail {

inline void validate(const AugmentationConfig& cfg) {
    if (cfg.crop_size < 1)
        throw ConfigError("crop_size must be at least 1");
    if (!(cfg.hflip_prob >= 0.0 && cfg.hflip_prob <= 1.0) ||
        !(cfg.vflip_prob >= 0.0 && cfg.vflip_prob <= 1.0))
        throw ConfigError("flip probabilities must be in [0,1]");
    if (!(cfg.brightness_delta >= 0.0) || !(cfg.hue_delta >= 0.0))
        throw ConfigError("brightness_delta and hue_delta must be non-negative");
    if (!(cfg.contrast_range.first > 0.0) ||
        !(cfg.contrast_range.second >= cfg.contrast_range.first))
        throw ConfigError("contrast_range must satisfy 0 < lo <= hi");
    if (!(cfg.saturation_range.first > 0.0) ||
        !(cfg.saturation_range.second >= cfg.saturation_range.first))
        throw ConfigError("saturation_range must satisfy 0 < lo <= hi");
}

/// Fixed draw indices: each random quantity has its own counter slot, so
/// skipping a no-op draw never shifts the others.
enum DrawIndex : std::uint64_t {
    kCropX = 0,
    kCropY = 1,
    kHFlip = 2,
    kVFlip = 3,
    kBrightness = 4,
    kContrast = 5,
    kSaturation = 6,
    kHue = 7,
};

/// Saturation scale and hue shift via the hexagonal hue model: the chroma
/// C = max-min is scaled keeping the max fixed, the hue angle is shifted
/// modulo the wheel. No intermediate clamping; callers clamp at the end.
inline void adjust_sat_hue(double& r, double& g, double& b, double sat_factor,
                           double hue_shift_h6) {
    const double M = std::max(r, std::max(g, b));
    const double m = std::min(r, std::min(g, b));
    const double C = M - m;
    if (C <= 0.0) return; // gray pixel: saturation and hue are no-ops

    double h6;
    if (r == M)
        h6 = (g - b) / C;
    else if (g == M)
        h6 = (b - r) / C + 2.0;
    else
        h6 = (r - g) / C + 4.0;
    h6 = std::fmod(h6 + hue_shift_h6, 6.0);
    if (h6 < 0.0) h6 += 6.0;
    if (h6 >= 6.0) h6 = 0.0;

    const double c2 = C * sat_factor;
    const double x = c2 * (1.0 - std::abs(std::fmod(h6, 2.0) - 1.0));
    double r1, g1, b1;
    switch (static_cast<int>(h6)) {
    case 0: r1 = c2; g1 = x;  b1 = 0;  break;
    case 1: r1 = x;  g1 = c2; b1 = 0;  break;
    case 2: r1 = 0;  g1 = c2; b1 = x;  break;
    case 3: r1 = 0;  g1 = x;  b1 = c2; break;
    case 4: r1 = x;  g1 = 0;  b1 = c2; break;
    default: r1 = c2; g1 = 0; b1 = x;  break;
    }
    const double base = M - c2;
    r = r1 + base;
    g = g1 + base;
    b = b1 + base;
}

inline std::uint8_t clamp_round(double v) {
    v = std::clamp(v, 0.0, 255.0);
    return static_cast<std::uint8_t>(std::floor(v + 0.5)); // half-up
}

/// Brightness and contrast touch every channel; saturation/hue operate on
/// the first three (R,G,B). Identity parameters short-circuit so that an
/// identity configuration is byte-exact.
inline void apply_photometric(Raster& img, double brightness, double contrast,
                              double sat_factor, double hue_shift) {
    const bool do_b = brightness != 0.0;
    const bool do_c = contrast != 1.0;
    const bool do_sh = (sat_factor != 1.0 || hue_shift != 0.0) && img.channels() >= 3;
    if (!do_b && !do_c && !do_sh) return;

    const int ch = img.channels();
    const double hue_h6 = hue_shift / 30.0; // [0,180) wheel -> 6 sextants
    std::vector<std::uint8_t>& s = img.samples();
    std::vector<double> v(ch);
    for (std::size_t i = 0; i < s.size(); i += ch) {
        for (int c = 0; c < ch; ++c) {
            v[c] = s[i + c];
            if (do_b) v[c] += brightness;
            if (do_c) v[c] *= contrast;
        }
        if (do_sh) adjust_sat_hue(v[0], v[1], v[2], sat_factor, hue_h6);
        for (int c = 0; c < ch; ++c)
            s[i + c] = clamp_round(v[c]);
    }
}

} // namespace detail

/// Apply the augmentation recipe. Every random draw is a pure function of
/// (cfg.seed, sample_index, draw slot): crop origin, horizontal flip,
/// vertical flip, brightness, contrast, saturation, hue, in that order.
/// Geometric operations hit image and mask alike; photometric operations
/// never touch the mask.
inline Sample augment(const Sample& s, const AugmentationConfig& cfg,
                      std::uint64_t sample_index) {
    detail::validate(cfg);
    if (s.image.width() != s.mask.width() || s.image.height() != s.mask.height())
        throw DimensionError("sample image and mask dimensions differ");
    if (cfg.crop_size > s.image.width() || cfg.crop_size > s.image.height())
        throw DimensionError("crop_size exceeds sample dimensions");

    const std::uint64_t seed = cfg.seed;
    const int max_x = s.image.width() - cfg.crop_size;
    const int max_y = s.image.height() - cfg.crop_size;
    const int cx = static_cast<int>(
        rng::below(seed, sample_index, detail::kCropX, static_cast<std::uint64_t>(max_x) + 1));
    const int cy = static_cast<int>(
        rng::below(seed, sample_index, detail::kCropY, static_cast<std::uint64_t>(max_y) + 1));

    const PixelRect rect{cx, cy, cfg.crop_size, cfg.crop_size};
    Sample out{crop(s.image, rect), crop(s.mask, rect), s.source_id};

    if (rng::chance(seed, sample_index, detail::kHFlip, cfg.hflip_prob)) {
        out.image = hflip(out.image);
        out.mask = hflip(out.mask);
    }
    if (rng::chance(seed, sample_index, detail::kVFlip, cfg.vflip_prob)) {
        out.image = vflip(out.image);
        out.mask = vflip(out.mask);
    }

    const double brightness = rng::uniform(seed, sample_index, detail::kBrightness,
                                           -cfg.brightness_delta, cfg.brightness_delta);
    const double contrast = rng::uniform(seed, sample_index, detail::kContrast,
                                         cfg.contrast_range.first, cfg.contrast_range.second);
    const double saturation =
        rng::uniform(seed, sample_index, detail::kSaturation, cfg.saturation_range.first,
                     cfg.saturation_range.second);
    const double hue = rng::uniform(seed, sample_index, detail::kHue, -cfg.hue_delta,
                                    cfg.hue_delta);
    detail::apply_photometric(out.image, brightness, contrast, saturation, hue);
    return out;
}

/// Read a configuration from JSON, overriding only the keys present.
/// Ranges are [lo, hi] arrays.
inline AugmentationConfig augment_config_from_json(const nlohmann::json& j,
                                                   AugmentationConfig base = {}) {
    try {
        if (j.contains("crop_size")) base.crop_size = j.at("crop_size").get<int>();
        if (j.contains("hflip_prob")) base.hflip_prob = j.at("hflip_prob").get<double>();
        if (j.contains("vflip_prob")) base.vflip_prob = j.at("vflip_prob").get<double>();
        if (j.contains("brightness_delta"))
            base.brightness_delta = j.at("brightness_delta").get<double>();
        if (j.contains("contrast_range")) {
            base.contrast_range = {j.at("contrast_range").at(0).get<double>(),
                                   j.at("contrast_range").at(1).get<double>()};
        }
        if (j.contains("saturation_range")) {
            base.saturation_range = {j.at("saturation_range").at(0).get<double>(),
                                     j.at("saturation_range").at(1).get<double>()};
        }
        if (j.contains("hue_delta")) base.hue_delta = j.at("hue_delta").get<double>();
        if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("augmentation config JSON: ") + e.what());
    }
    detail::validate(base);
    return base;
}

inline nlohmann::ordered_json augment_config_to_json(const AugmentationConfig& cfg) {
    nlohmann::ordered_json j;
    j["crop_size"] = cfg.crop_size;
    j["hflip_prob"] = cfg.hflip_prob;
    j["vflip_prob"] = cfg.vflip_prob;
    j["brightness_delta"] = cfg.brightness_delta;
    j["contrast_range"] = {cfg.contrast_range.first, cfg.contrast_range.second};
    j["saturation_range"] = {cfg.saturation_range.first, cfg.saturation_range.second};
    j["hue_delta"] = cfg.hue_delta;
    j["seed"] = cfg.seed;
    return j;
}

} // namespace buildseg
