#include "bsb/pnm.hpp"

#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

namespace bsb {

const char* to_string(PnmErrorKind kind) noexcept {
    switch (kind) {
        case PnmErrorKind::bad_magic: return "bad magic";
        case PnmErrorKind::unsupported_format: return "unsupported format";
        case PnmErrorKind::bad_header: return "bad header";
        case PnmErrorKind::bad_maxval: return "bad maxval";
        case PnmErrorKind::dimension_overflow: return "dimension overflow";
        case PnmErrorKind::truncated: return "truncated data";
        case PnmErrorKind::bad_sample: return "bad sample";
        case PnmErrorKind::trailing_data: return "trailing data";
    }
    return "unknown";
}

PnmError::PnmError(PnmErrorKind kind, std::size_t offset, const std::string& detail)
    : Error(std::string(to_string(kind)) + " at byte " + std::to_string(offset) + ": " + detail),
      kind_(kind),
      offset_(offset) {}

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

struct Token {
    std::string_view text;
    std::size_t offset;
};

class Scanner {
public:
    explicit Scanner(std::string_view bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }

    std::optional<Token> next() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size()) return std::nullopt;
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') ++pos_;
        return Token{bytes_.substr(start, pos_ - start), start};
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

// Unsigned decimal; nullopt on a non-digit. Saturates at `cap + 1` so callers
// can detect overflow without wrapping.
std::optional<std::size_t> parse_decimal(std::string_view text, std::size_t cap) {
    if (text.empty()) return std::nullopt;
    std::size_t value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') return std::nullopt;
        if (value <= cap) value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    return value > cap ? cap + 1 : value;
}

Token require_token(Scanner& scan, const char* what) {
    auto tok = scan.next();
    if (!tok) {
        throw PnmError(PnmErrorKind::truncated, scan.offset(), std::string("missing ") + what);
    }
    return *tok;
}

std::size_t read_dimension(Scanner& scan, const char* what) {
    const Token tok = require_token(scan, what);
    const auto value = parse_decimal(tok.text, kMaxPnmPixels);
    if (!value) {
        throw PnmError(PnmErrorKind::bad_header, tok.offset,
                       std::string(what) + " is not a decimal integer");
    }
    if (*value == 0) {
        throw PnmError(PnmErrorKind::bad_header, tok.offset, std::string(what) + " must be positive");
    }
    if (*value > kMaxPnmPixels) {
        throw PnmError(PnmErrorKind::dimension_overflow, tok.offset,
                       std::string(what) + " exceeds " + std::to_string(kMaxPnmPixels));
    }
    return *value;
}

}  // namespace

RgbImage parse_pnm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] < '1' || bytes[1] > '7') {
        throw PnmError(PnmErrorKind::bad_magic, 0, "expected a netpbm magic number (P2 or P3)");
    }
    if (bytes.size() > 2 && !is_space(bytes[2]) && bytes[2] != '#') {
        throw PnmError(PnmErrorKind::bad_magic, 2, "magic number must be followed by whitespace");
    }
    const char kind = bytes[1];
    if (kind != '2' && kind != '3') {
        throw PnmError(PnmErrorKind::unsupported_format, 0,
                       std::string("P") + kind + " is not supported; only plain P2/P3");
    }
    const std::size_t channels = kind == '3' ? 3 : 1;

    Scanner scan(bytes);
    scan.advance(2);
    const std::size_t width = read_dimension(scan, "width");
    const std::size_t height = read_dimension(scan, "height");
    if (width > kMaxPnmPixels / height) {
        throw PnmError(PnmErrorKind::dimension_overflow, scan.offset(),
                       std::to_string(width) + "x" + std::to_string(height) + " exceeds " +
                           std::to_string(kMaxPnmPixels) + " pixels");
    }

    const Token maxval_tok = require_token(scan, "maxval");
    const auto maxval = parse_decimal(maxval_tok.text, 65535);
    if (!maxval) {
        throw PnmError(PnmErrorKind::bad_header, maxval_tok.offset, "maxval is not a decimal integer");
    }
    if (*maxval != 255) {
        throw PnmError(PnmErrorKind::bad_maxval, maxval_tok.offset,
                       "maxval must be 255, got " + std::string(maxval_tok.text));
    }

    std::vector<Rgb> pixels(width * height);
    std::uint8_t sample[3] = {0, 0, 0};
    for (auto& px : pixels) {
        for (std::size_t c = 0; c < channels; ++c) {
            const Token tok = require_token(scan, "sample");
            const auto value = parse_decimal(tok.text, 255);
            if (!value || *value > 255) {
                throw PnmError(PnmErrorKind::bad_sample, tok.offset,
                               "sample '" + std::string(tok.text) + "' is not in [0, 255]");
            }
            sample[c] = static_cast<std::uint8_t>(*value);
        }
        px = channels == 3 ? Rgb{sample[0], sample[1], sample[2]}
                           : Rgb{sample[0], sample[0], sample[0]};
    }
    if (auto extra = scan.next()) {
        throw PnmError(PnmErrorKind::trailing_data, extra->offset, "content after the last sample");
    }
    return RgbImage(width, height, std::move(pixels));
}

RgbImage read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open image '" + path.string() + "'");
    }
    std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) {
        throw IoError("error reading image '" + path.string() + "'");
    }
    return parse_pnm(bytes);
}

namespace {

template <typename EmitPixel>
std::string write_plain(char kind, const RgbImage& img, EmitPixel emit) {
    std::ostringstream out;
    out << 'P' << kind << '\n' << img.width() << ' ' << img.height() << "\n255\n";
    for (std::size_t y = 0; y < img.height(); ++y) {
        for (std::size_t x = 0; x < img.width(); ++x) {
            if (x) out << ' ';
            emit(out, img.at(x, y));
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace

std::string write_ppm(const RgbImage& img) {
    return write_plain('3', img, [](std::ostream& out, const Rgb& px) {
        out << int{px.r} << ' ' << int{px.g} << ' ' << int{px.b};
    });
}

std::string write_pgm(const RgbImage& img) {
    for (const auto& px : img.pixels()) {
        if (px.r != px.g || px.g != px.b) {
            throw EncodingError("write_pgm needs a gray image (r == g == b)");
        }
    }
    return write_plain('2', img, [](std::ostream& out, const Rgb& px) { out << int{px.r}; });
}

}  // namespace bsb
