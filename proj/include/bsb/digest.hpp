#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "bsb/core.hpp"

namespace bsb {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);

// SHA-256 over the canonical pattern bytes: one ASCII '+' or '-' per element.
// The vector must be saturated (PreconditionError otherwise).
Digest pattern_digest(const BipolarVector& pattern);

std::string to_hex(const Digest& digest);

}  // namespace bsb
