#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "buildseg/error.hpp"
#include "buildseg/raster.hpp"

namespace buildseg {

namespace detail {

inline bool parse_double_token(const std::string& token, double& out) {
    if (token.empty()) return false;
    const char* begin = token.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + token.size();
}

inline std::string lower_ascii(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace detail

/// Parse an ESRI ASCII grid from a stream. The header is a sequence of
/// "key value" pairs (ncols, nrows, xllcorner, yllcorner, cellsize required;
/// nodata_value optional, defaulting to -9999); the body is
/// ncols*nrows whitespace-separated values, row-major from the top row.
/// `name` is used in error messages only.
inline HeightGrid read_height_grid(std::istream& in, const std::string& name) {
    auto fail = [&name](const std::string& what) -> ParseError {
        return ParseError(name + ": " + what);
    };

    std::map<std::string, double> header;
    std::string token;
    double first_value = 0.0;
    bool have_first_value = false;

    // Header pairs end at the first token that does not start with a letter.
    while (in >> token) {
        if (!std::isalpha(static_cast<unsigned char>(token[0]))) {
            if (!detail::parse_double_token(token, first_value))
                throw fail("non-numeric token '" + token + "'");
            have_first_value = true;
            break;
        }
        std::string key = detail::lower_ascii(token);
        std::string value;
        if (!(in >> value))
            throw fail("header key '" + key + "' has no value");
        double parsed = 0.0;
        if (!detail::parse_double_token(value, parsed))
            throw fail("header key '" + key + "' has non-numeric value '" + value + "'");
        header[key] = parsed;
    }

    for (const char* key : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"})
        if (!header.count(key))
            throw fail(std::string("missing header key '") + key + "'");

    auto dimension = [&](const char* key) -> int {
        double v = header.at(key);
        if (!(v >= 1) || v != std::floor(v) || v > 1e9)
            throw fail(std::string("header key '") + key + "' must be a positive integer");
        return static_cast<int>(v);
    };
    const int ncols = dimension("ncols");
    const int nrows = dimension("nrows");
    if (header.at("cellsize") <= 0)
        throw fail("cellsize must be positive");
    const double nodata = header.count("nodata_value") ? header.at("nodata_value") : -9999.0;

    const std::size_t expected = static_cast<std::size_t>(ncols) * nrows;
    std::vector<double> values;
    values.reserve(expected);

    auto push = [&](double v, const std::string& tok) {
        if (!std::isfinite(v))
            throw fail("non-finite value '" + tok + "'");
        values.push_back(v);
    };
    if (have_first_value)
        push(first_value, token);
    while (values.size() < expected && in >> token) {
        double v = 0.0;
        if (!detail::parse_double_token(token, v))
            throw fail("non-numeric token '" + token + "'");
        push(v, token);
    }
    if (values.size() != expected)
        throw fail("expected " + std::to_string(expected) + " values, found " +
                   std::to_string(values.size()));
    if (in >> token)
        throw fail("unexpected trailing content '" + token + "'");

    return HeightGrid(ncols, nrows, std::move(values), nodata);
}

/// Load an ESRI ASCII grid file; see read_height_grid for the format.
inline HeightGrid load_height_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open file: " + path.string());
    return read_height_grid(in, path.string());
}

} // namespace buildseg
