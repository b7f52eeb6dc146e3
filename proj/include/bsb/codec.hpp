#pragma once

// Conversions between passwords, raster images and saturated bipolar vectors.
// Binary 0 maps to -1 and 1 maps to +1 throughout.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bsb/core.hpp"

namespace bsb {

class BinaryMatrix {
public:
    // Throws PreconditionError on zero dimensions, a size mismatch or an entry
    // other than 0/1.
    BinaryMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> bits);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
    std::uint8_t at(std::size_t r, std::size_t c) const noexcept { return bits_[r * cols_ + c]; }

    friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::uint8_t> bits_;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

class RgbImage {
public:
    RgbImage(std::size_t width, std::size_t height, std::vector<Rgb> pixels);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    const std::vector<Rgb>& pixels() const noexcept { return pixels_; }
    const Rgb& at(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<Rgb> pixels_;
};

inline constexpr std::size_t kBitsPerChar = 8;

// Each character becomes its 8-bit code, most significant bit first; the bit
// string is zero-padded to `width` and mapped to bipolar. Accepted characters
// are bytes 0x01..0x7F (7-bit ASCII without NUL, so padding can never be
// confused with a character). Throws EncodingError.
BipolarVector text_to_bipolar(std::string_view password, std::size_t width);

BipolarVector binary_to_bipolar(const BinaryMatrix& m);

// Inverse of binary_to_bipolar for a saturated vector laid out as rows x cols.
BinaryMatrix bipolar_to_binary(const BipolarVector& v, std::size_t rows, std::size_t cols);

// Rounded Rec.601 luminance, computed in integers: (299r + 587g + 114b + 500) / 1000.
int luminance(const Rgb& px) noexcept;

// bit = 1 iff luminance >= threshold. Output is height x width.
BinaryMatrix image_to_binary(const RgbImage& img, int threshold);

// Sign saturation; exact zero maps to +1.
BipolarVector saturate_by_sign(const BipolarVector& v);

std::size_t hamming_distance(const BipolarVector& a, const BipolarVector& b);

// Whitespace-separated "+1"/"-1"/"1" tokens.
std::string format_bipolar(const BipolarVector& v);
BipolarVector parse_bipolar(std::string_view text);

// One pattern per non-blank line; '#' starts a comment line.
std::vector<BipolarVector> parse_pattern_lines(std::string_view text);

}  // namespace bsb
