#pragma once

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <vector>

#include <png.h>

#include "buildseg/error.hpp"
#include "buildseg/raster.hpp"

namespace buildseg {

namespace detail {

struct PngErrorContext {
    char message[240];
};

inline void png_error_handler(png_structp png, png_const_charp msg) {
    auto* ctx = static_cast<PngErrorContext*>(png_get_error_ptr(png));
    if (ctx) {
        std::strncpy(ctx->message, msg, sizeof(ctx->message) - 1);
        ctx->message[sizeof(ctx->message) - 1] = '\0';
    }
    png_longjmp(png, 1);
}

inline void png_warning_handler(png_structp, png_const_charp) {
    // Warnings (gamma chunks etc.) are irrelevant to the pixel data we read.
}

struct FileHandle {
    std::FILE* fp = nullptr;
    explicit FileHandle(const std::filesystem::path& path, const char* mode) {
        fp = std::fopen(path.string().c_str(), mode);
    }
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    explicit PngReader(PngErrorContext* ctx) {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, ctx, png_error_handler,
                                     png_warning_handler);
        if (png) info = png_create_info_struct(png);
    }
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
    PngReader(const PngReader&) = delete;
    PngReader& operator=(const PngReader&) = delete;
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    explicit PngWriter(PngErrorContext* ctx) {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, ctx, png_error_handler,
                                      png_warning_handler);
        if (png) info = png_create_info_struct(png);
    }
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
    PngWriter(const PngWriter&) = delete;
    PngWriter& operator=(const PngWriter&) = delete;
};

struct DecodedPng {
    int width = 0;
    int height = 0;
    int channels = 0; // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
    std::vector<std::uint8_t> data;
};

/// Decode an 8-bit PNG. Palette images are expanded to RGB; alpha is kept.
/// Bit depths other than 8 are rejected.
inline DecodedPng decode_png(const std::filesystem::path& path) {
    FileHandle file(path, "rb");
    if (!file.fp)
        throw IoError("cannot open file: " + path.string());

    PngErrorContext ctx{};
    PngReader reader(&ctx);
    if (!reader.png || !reader.info)
        throw IoError("libpng initialization failed");

    DecodedPng out;
    std::vector<png_bytep> rows;

    if (setjmp(png_jmpbuf(reader.png)))
        throw ParseError("corrupt PNG " + path.string() + ": " + ctx.message);

    png_init_io(reader.png, file.fp);
    png_read_info(reader.png, reader.info);

    png_uint_32 width = 0, height = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(reader.png, reader.info, &width, &height, &bit_depth, &color_type, nullptr,
                 nullptr, nullptr);
    if (bit_depth != 8)
        throw FormatError("unsupported bit depth " + std::to_string(bit_depth) + " in " +
                          path.string() + " (only 8-bit PNG is supported)");

    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(reader.png);
    if (png_get_valid(reader.png, reader.info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(reader.png);
    png_set_interlace_handling(reader.png);
    png_read_update_info(reader.png, reader.info);

    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.channels = png_get_channels(reader.png, reader.info);
    if (out.channels < 1 || out.channels > 4)
        throw FormatError("unsupported channel count in " + path.string());

    const std::size_t rowbytes = png_get_rowbytes(reader.png, reader.info);
    out.data.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = out.data.data() + static_cast<std::size_t>(y) * rowbytes;

    png_read_image(reader.png, rows.data());
    png_read_end(reader.png, nullptr);
    return out;
}

inline void encode_png(const std::filesystem::path& path, int width, int height, int channels,
                       const std::uint8_t* data) {
    FileHandle file(path, "wb");
    if (!file.fp)
        throw IoError("cannot open file for writing: " + path.string());

    PngErrorContext ctx{};
    PngWriter writer(&ctx);
    if (!writer.png || !writer.info)
        throw IoError("libpng initialization failed");

    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(data) + static_cast<std::size_t>(y) * width * channels;

    if (setjmp(png_jmpbuf(writer.png)))
        throw IoError("PNG write failed for " + path.string() + ": " + ctx.message);

    int color_type = PNG_COLOR_TYPE_GRAY;
    if (channels == 3) color_type = PNG_COLOR_TYPE_RGB;
    if (channels == 4) color_type = PNG_COLOR_TYPE_RGB_ALPHA;

    png_init_io(writer.png, file.fp);
    png_set_IHDR(writer.png, writer.info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(writer.png, writer.info);
    png_write_image(writer.png, rows.data());
    png_write_end(writer.png, writer.info);
}

/// Integer rec.601 luma; bit-exact across platforms.
inline std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b) / 1000);
}

} // namespace detail

/// Load a label PNG as a binary mask. A pixel is foreground iff its 8-bit
/// value is >= 128; RGB inputs are converted by integer rec.601 luma first.
/// Alpha channels, when present, are ignored.
inline BinaryMask load_mask(const std::filesystem::path& path) {
    detail::DecodedPng png = detail::decode_png(path);
    BinaryMask mask(png.width, png.height);
    const int ch = png.channels;
    const std::uint8_t* p = png.data.data();
    for (int y = 0; y < png.height; ++y) {
        for (int x = 0; x < png.width; ++x, p += ch) {
            std::uint8_t v = (ch >= 3) ? detail::luma(p[0], p[1], p[2]) : p[0];
            mask.set(x, y, v >= 128);
        }
    }
    return mask;
}

/// Write a mask as an 8-bit grayscale non-interlaced PNG, true -> 255.
inline void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(mask.pixels().size());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = mask.pixels()[i] ? 255 : 0;
    detail::encode_png(path, mask.width(), mask.height(), 1, bytes.data());
}

/// Load an 8-bit PNG as a raster without any color transformation.
/// Gray, RGB and RGBA layouts are accepted; gray+alpha is not, because a
/// 2-channel raster is not representable.
inline Raster load_image(const std::filesystem::path& path) {
    detail::DecodedPng png = detail::decode_png(path);
    if (png.channels == 2)
        throw FormatError("unsupported channel layout (gray+alpha) in " + path.string());
    Raster raster(png.width, png.height, png.channels);
    raster.samples() = std::move(png.data);
    return raster;
}

/// Write a raster as an 8-bit non-interlaced PNG (gray, RGB or RGBA).
inline void save_image(const Raster& raster, const std::filesystem::path& path) {
    detail::encode_png(path, raster.width(), raster.height(), raster.channels(),
                       raster.samples().data());
}

} // namespace buildseg
