#include "bsb/codec.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "bsb/error.hpp"

namespace bsb {

BinaryMatrix::BinaryMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> bits)
    : rows_(rows), cols_(cols), bits_(std::move(bits)) {
    if (rows_ == 0 || cols_ == 0) {
        throw PreconditionError("binary matrix dimensions must be positive");
    }
    if (rows_ > std::numeric_limits<std::size_t>::max() / cols_ || bits_.size() != rows_ * cols_) {
        throw PreconditionError("binary matrix expects rows*cols bits");
    }
    if (!std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b <= 1; })) {
        throw PreconditionError("binary matrix entries must be 0 or 1");
    }
}

RgbImage::RgbImage(std::size_t width, std::size_t height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width_ == 0 || height_ == 0) {
        throw PreconditionError("image dimensions must be positive");
    }
    if (width_ > std::numeric_limits<std::size_t>::max() / height_ ||
        pixels_.size() != width_ * height_) {
        throw PreconditionError("image expects width*height pixels");
    }
}

BipolarVector text_to_bipolar(std::string_view password, std::size_t width) {
    if (password.empty()) {
        throw EncodingError("password is empty");
    }
    if (width / kBitsPerChar < password.size()) {
        throw EncodingError("width " + std::to_string(width) + " cannot hold " +
                            std::to_string(password.size()) + " characters (" +
                            std::to_string(kBitsPerChar) + " bits each)");
    }
    std::vector<double> values(width, -1.0);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < password.size(); ++k) {
        const auto code = static_cast<unsigned char>(password[k]);
        if (code == 0 || code > 0x7F) {
            throw EncodingError("character at position " + std::to_string(k) +
                                " is outside the 7-bit ASCII range 0x01-0x7F");
        }
        for (int bit = static_cast<int>(kBitsPerChar) - 1; bit >= 0; --bit) {
            values[pos++] = ((code >> bit) & 1U) ? 1.0 : -1.0;
        }
    }
    return BipolarVector(std::move(values));
}

BipolarVector binary_to_bipolar(const BinaryMatrix& m) {
    std::vector<double> values(m.bits().size());
    std::transform(m.bits().begin(), m.bits().end(), values.begin(),
                   [](std::uint8_t b) { return b ? 1.0 : -1.0; });
    return BipolarVector(std::move(values));
}

BinaryMatrix bipolar_to_binary(const BipolarVector& v, std::size_t rows, std::size_t cols) {
    if (!v.saturated()) {
        throw EncodingError("only saturated vectors map back to binary");
    }
    if (rows == 0 || cols == 0 || v.size() / rows != cols || v.size() % rows != 0) {
        throw DimensionError("vector of dimension " + std::to_string(v.size()) +
                             " cannot be laid out as " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    std::vector<std::uint8_t> bits(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) bits[i] = v[i] > 0.0 ? 1 : 0;
    return BinaryMatrix(rows, cols, std::move(bits));
}

int luminance(const Rgb& px) noexcept {
    return (299 * px.r + 587 * px.g + 114 * px.b + 500) / 1000;
}

BinaryMatrix image_to_binary(const RgbImage& img, int threshold) {
    if (threshold < 0 || threshold > 255) {
        throw PreconditionError("threshold must lie in [0, 255], got " + std::to_string(threshold));
    }
    std::vector<std::uint8_t> bits(img.pixels().size());
    std::transform(img.pixels().begin(), img.pixels().end(), bits.begin(),
                   [threshold](const Rgb& px) { return luminance(px) >= threshold ? 1 : 0; });
    return BinaryMatrix(img.height(), img.width(), std::move(bits));
}

BipolarVector saturate_by_sign(const BipolarVector& v) {
    std::vector<double> values(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) values[i] = v[i] >= 0.0 ? 1.0 : -1.0;
    return BipolarVector(std::move(values));
}

std::size_t hamming_distance(const BipolarVector& a, const BipolarVector& b) {
    if (a.size() != b.size()) {
        throw DimensionError("hamming distance needs equal dimensions");
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) count += a[i] != b[i];
    return count;
}

std::string format_bipolar(const BipolarVector& v) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ' ';
        if (v[i] == 1.0) {
            out << "+1";
        } else if (v[i] == -1.0) {
            out << "-1";
        } else {
            out << v[i];
        }
    }
    return out.str();
}

BipolarVector parse_bipolar(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        if (token == "+1" || token == "1") {
            values.push_back(1.0);
        } else if (token == "-1") {
            values.push_back(-1.0);
        } else {
            throw EncodingError("expected +1 or -1, got '" + token + "'");
        }
    }
    if (values.empty()) {
        throw EncodingError("pattern has no entries");
    }
    return BipolarVector(std::move(values));
}

std::vector<BipolarVector> parse_pattern_lines(std::string_view text) {
    std::vector<BipolarVector> patterns;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            patterns.push_back(parse_bipolar(line));
        } catch (const EncodingError& e) {
            throw EncodingError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return patterns;
}

}  // namespace bsb
