#include "bsb/digest.hpp"

#include <openssl/evp.h>

#include <vector>

#include "bsb/error.hpp"

namespace bsb {

Digest sha256(std::span<const std::uint8_t> bytes) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw Error("SHA-256 computation failed");
    }
    return out;
}

Digest pattern_digest(const BipolarVector& pattern) {
    if (!pattern.saturated()) {
        throw PreconditionError("only saturated patterns have a digest");
    }
    std::vector<std::uint8_t> canonical(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) canonical[i] = pattern[i] > 0 ? '+' : '-';
    return sha256(canonical);
}

std::string to_hex(const Digest& digest) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(digest.size() * 2);
    for (auto byte : digest) {
        out.push_back(kHex[byte >> 4]);
        out.push_back(kHex[byte & 0x0F]);
    }
    return out;
}

}  // namespace bsb
