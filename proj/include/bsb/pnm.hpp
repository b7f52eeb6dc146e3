#pragma once

// Plain (ASCII) netpbm images: P2 graymaps and P3 pixmaps with maxval 255.
// '#' comments run to end of line and may appear wherever whitespace may.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "bsb/codec.hpp"
#include "bsb/error.hpp"

namespace bsb {

enum class PnmErrorKind {
    bad_magic,           // not a netpbm file at all
    unsupported_format,  // netpbm, but not P2/P3 (e.g. binary P5/P6)
    bad_header,          // malformed or zero width/height
    bad_maxval,          // maxval other than 255
    dimension_overflow,  // width*height beyond kMaxPnmPixels
    truncated,           // input ended before all samples were read
    bad_sample,          // non-numeric sample or sample > maxval
    trailing_data,       // non-comment content after the last sample
};

const char* to_string(PnmErrorKind kind) noexcept;

class PnmError : public Error {
public:
    PnmError(PnmErrorKind kind, std::size_t offset, const std::string& detail);

    PnmErrorKind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    PnmErrorKind kind_;
    std::size_t offset_;
};

inline constexpr std::size_t kMaxPnmPixels = std::size_t{1} << 24;

RgbImage parse_pnm(std::string_view bytes);

// Reads a file and parses it; IoError if it cannot be opened.
RgbImage read_image(const std::filesystem::path& path);

// Canonical plain output: magic, "width height", "255", then one image row per
// line. write_pgm requires every pixel to be gray (r == g == b).
std::string write_ppm(const RgbImage& img);
std::string write_pgm(const RgbImage& img);

}  // namespace bsb
