#pragma once

// Shared utilities for the test suite: mask construction from ASCII art,
// random mask generation, temp directories, and spawning the CLI binary.

#include <buildseg/raster.hpp>
#include <buildseg/rng.hpp>

#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

namespace helpers {

// Builds a mask from rows of '.'/'#' characters. All rows must share a width.
inline buildseg::BinaryMask make_mask(std::initializer_list<std::string> rows) {
    const int h = static_cast<int>(rows.size());
    const int w = h > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    buildseg::BinaryMask m(w, h);
    int y = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != w) {
            throw std::logic_error("make_mask: ragged rows");
        }
        for (int x = 0; x < w; ++x) {
            m.set(x, y, row[static_cast<std::size_t>(x)] == '#');
        }
        ++y;
    }
    return m;
}

inline std::string mask_to_string(const buildseg::BinaryMask& m) {
    std::string out;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            out += m.at(x, y) ? '#' : '.';
        }
        out += '\n';
    }
    return out;
}

// Deterministic random mask: each pixel independently foreground with the
// given per-mille probability.
inline buildseg::BinaryMask random_mask(std::uint64_t seed, int w, int h,
                                        int permille = 500) {
    buildseg::BinaryMask m(w, h);
    std::uint64_t idx = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            m.set(x, y, buildseg::rng::below(seed, 0, idx++, 1000) <
                            static_cast<std::uint64_t>(permille));
        }
    }
    return m;
}

inline buildseg::Raster random_raster(std::uint64_t seed, int w, int h, int channels) {
    buildseg::Raster r(w, h, channels);
    std::uint64_t idx = 0;
    for (auto& s : r.samples()) {
        s = static_cast<std::uint8_t>(buildseg::rng::below(seed, 1, idx++, 256));
    }
    return r;
}

// Rasterizes a rotated rectangle by pixel-center inclusion (centers on an
// edge count as inside), clipped to the canvas. Independent of the library's
// rectangle code; used to generate ground-truth shapes.
inline buildseg::BinaryMask rasterize_rect(int canvas_w, int canvas_h, double cx, double cy,
                                           double w, double h, double angle_deg) {
    constexpr double kPi = 3.14159265358979323846;
    const double theta = angle_deg * kPi / 180.0;
    // Exact axes at right angles, so boundary ties land symmetrically there
    // instead of being split by the ~1e-16 residue of cos(pi/2).
    double ux = std::cos(theta), uy = std::sin(theta);
    if (std::fmod(angle_deg, 180.0) == 0.0) {
        ux = 1.0;
        uy = 0.0;
    } else if (std::fmod(angle_deg, 180.0) == 90.0) {
        ux = 0.0;
        uy = 1.0;
    }
    buildseg::BinaryMask m(canvas_w, canvas_h);
    for (int y = 0; y < canvas_h; ++y) {
        for (int x = 0; x < canvas_w; ++x) {
            const double px = x + 0.5 - cx;
            const double py = y + 0.5 - cy;
            const double u = px * ux + py * uy;
            const double v = -px * uy + py * ux;
            if (std::abs(u) <= w / 2.0 && std::abs(v) <= h / 2.0) m.set(x, y, true);
        }
    }
    return m;
}

// RAII temporary directory under the system temp root.
class TempDir {
  public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "buildseg_test_XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (mkdtemp(buf.data()) == nullptr) {
            throw std::runtime_error("mkdtemp failed");
        }
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("write_file failed: " + p.string());
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("read_file failed: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // combined stdout + stderr
};

// Runs the CLI binary with the given arguments, capturing combined output.
inline CliResult run_cli(const std::vector<std::string>& args) {
    std::string cmd = "'" BUILDSEG_CLI_PATH "'";
    for (const auto& a : args) {
        cmd += " '";
        for (char c : a) {
            if (c == '\'') cmd += "'\\''";
            else cmd += c;
        }
        cmd += "'";
    }
    cmd += " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed");
    CliResult res;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) {
        res.output.append(buf, n);
    }
    int status = pclose(pipe);
    if (WIFEXITED(status)) {
        res.exit_code = WEXITSTATUS(status);
    }
    return res;
}

} // namespace helpers
