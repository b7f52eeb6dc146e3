#pragma once

// Password enrollment and verification on per-user BSB networks.
//
// Each user gets an independent network trained on the single encoded secret.
// Verification recalls the encoded candidate, sign-saturates the result
// (0 -> +1) and accepts iff the SHA-256 of that state equals the enrolled
// digest and the candidate was within `tolerance` bits of it. With the default
// tolerance of 0 only the exact secret is accepted; a positive tolerance lets
// the network's error correction admit near misses.
//
// The store never holds the encoded secret itself, but W = lr * x x' of a
// single pattern determines x up to sign. Treat the store as sensitive.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bsb/codec.hpp"
#include "bsb/core.hpp"
#include "bsb/digest.hpp"
#include "bsb/error.hpp"
#include "bsb/training.hpp"

namespace bsb {

inline constexpr std::size_t kDefaultTextWidth = 128;
inline constexpr int kDefaultImageThreshold = 128;
inline constexpr std::size_t kMaxUsernameBytes = 255;

enum class SecretKind : std::uint8_t { text = 0, image = 1 };

struct TextSecret {
    std::string password;
};
struct ImageSecret {
    RgbImage image;
};
using Secret = std::variant<TextSecret, ImageSecret>;

struct EncodingMeta {
    SecretKind kind = SecretKind::text;
    std::uint32_t width = 0;  // encoded dimension
    std::int32_t threshold = kDefaultImageThreshold;  // image binarization only

    friend bool operator==(const EncodingMeta&, const EncodingMeta&) = default;
};

struct TrainedNetwork {
    WeightMatrix net;
    BsbParams params;
    TrainingConfig training;
    std::vector<Digest> pattern_digests;

    friend bool operator==(const TrainedNetwork&, const TrainedNetwork&) = default;
};

struct UserRecord {
    std::string username;
    TrainedNetwork network;
    Digest enrolled_digest{};
    EncodingMeta encoding;

    friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

class DuplicateUserError : public Error {
public:
    using Error::Error;
};

class CredentialStore {
public:
    bool contains(const std::string& username) const { return records_.contains(username); }
    const UserRecord* find(const std::string& username) const;
    // Throws DuplicateUserError if the username is taken.
    const UserRecord& insert(UserRecord record);
    std::size_t size() const noexcept { return records_.size(); }
    const std::map<std::string, UserRecord>& records() const noexcept { return records_; }

    friend bool operator==(const CredentialStore&, const CredentialStore&) = default;

private:
    std::map<std::string, UserRecord> records_;
};

struct EnrollConfig {
    std::size_t text_width = kDefaultTextWidth;
    int threshold = kDefaultImageThreshold;
    TrainingConfig training;
    BsbParams params;
    // When set, b = eps * x; otherwise b = 0.
    std::optional<double> bias_eps;
};

// Encodes a secret per the given meta's width/threshold (kind taken from the
// secret). Throws EncodingError.
BipolarVector encode_secret(const Secret& secret, std::size_t text_width, int threshold);

// Throws DuplicateUserError, EncodingError or PreconditionError (bad username
// or config).
const UserRecord& enroll(CredentialStore& store, const std::string& username, const Secret& secret,
                         const EnrollConfig& config = {});

enum class Decision { accept, reject };

enum class RejectReason {
    none,
    unknown_user,
    encoding_failed,   // candidate cannot be encoded like the enrolled secret
    not_converged,
    digest_mismatch,
    hamming_exceeded,
};

const char* to_string(RejectReason reason) noexcept;

struct VerifyOptions {
    std::size_t tolerance = 0;
};

struct VerifyResult {
    Decision decision = Decision::reject;
    RejectReason reason = RejectReason::none;
    std::size_t hamming = 0;  // candidate vs. saturated recall result
    bool converged = false;
    std::size_t iterations = 0;

    bool accepted() const noexcept { return decision == Decision::accept; }
    friend bool operator==(const VerifyResult&, const VerifyResult&) = default;
};

VerifyResult verify(const CredentialStore& store, const std::string& username,
                    const Secret& candidate, const VerifyOptions& options = {});

}  // namespace bsb
