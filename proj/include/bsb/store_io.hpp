#pragma once

// Binary persistence for credential stores and trained networks.
//
// Container (all integers unsigned little-endian, floats IEEE-754 binary64
// little-endian):
//
//   offset  size  field
//   0       4     magic "BSB1"
//   4       4     format version (kStoreFormatVersion)
//   8       4     content: 1 = credential store, 2 = trained network
//   12      8     payload length N
//   20      N     payload
//   20+N    32    SHA-256 of bytes [0, 20+N)
//
// Network payload:
//   u32 d
//   f64 gamma, f64 eta, f64 theta, u64 max_iters, f64 convergence_tol
//   f64 lr, u8 zero_diagonal, f64 connectivity, u64 mask_seed, u8 symmetric_mask
//   u32 digest count, then 32 bytes per digest
//   f64 x d*d   W, row-major
//   f64 x d     b
//
// Store payload:
//   u32 record count, then per record in ascending username order:
//   u32 username length, username bytes
//   u8 kind (0 text, 1 image), u32 width, i32 threshold
//   32 bytes enrolled digest
//   network payload
//
// Files are written to a sibling temporary and renamed into place, so a
// crash never leaves a half-written file under the target name.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bsb/auth.hpp"

namespace bsb {

inline constexpr char kStoreMagic[4] = {'B', 'S', 'B', '1'};
inline constexpr std::uint32_t kStoreFormatVersion = 1;

enum class StoreErrorKind {
    bad_magic,
    version_mismatch,
    wrong_content,      // e.g. a network file opened as a store
    truncated,          // shorter than the header declares (partial write)
    checksum_mismatch,  // bytes altered
    malformed,          // checksum fine but payload inconsistent
};

const char* to_string(StoreErrorKind kind) noexcept;

class StoreError : public Error {
public:
    StoreError(StoreErrorKind kind, const std::string& detail);
    StoreErrorKind kind() const noexcept { return kind_; }
    // truncated, checksum_mismatch and malformed all mean damaged content.
    bool is_corruption() const noexcept;

private:
    StoreErrorKind kind_;
};

std::vector<std::uint8_t> serialize_store(const CredentialStore& store);
CredentialStore deserialize_store(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> serialize_network(const TrainedNetwork& network);
TrainedNetwork deserialize_network(const std::vector<std::uint8_t>& bytes);

// I/O failures throw IoError; content problems throw StoreError.
void save_store(const CredentialStore& store, const std::filesystem::path& path);
CredentialStore load_store(const std::filesystem::path& path);
void save_network(const TrainedNetwork& network, const std::filesystem::path& path);
TrainedNetwork load_network(const std::filesystem::path& path);

}  // namespace bsb
