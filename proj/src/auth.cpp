#include "bsb/auth.hpp"

#include <limits>

namespace bsb {

const UserRecord* CredentialStore::find(const std::string& username) const {
    auto it = records_.find(username);
    return it == records_.end() ? nullptr : &it->second;
}

const UserRecord& CredentialStore::insert(UserRecord record) {
    std::string key = record.username;
    auto [it, inserted] = records_.emplace(std::move(key), std::move(record));
    if (!inserted) {
        throw DuplicateUserError("user '" + it->first + "' is already enrolled");
    }
    return it->second;
}

BipolarVector encode_secret(const Secret& secret, std::size_t text_width, int threshold) {
    if (const auto* text = std::get_if<TextSecret>(&secret)) {
        return text_to_bipolar(text->password, text_width);
    }
    const auto& image = std::get<ImageSecret>(secret).image;
    return binary_to_bipolar(image_to_binary(image, threshold));
}

namespace {

SecretKind kind_of(const Secret& secret) {
    return std::holds_alternative<TextSecret>(secret) ? SecretKind::text : SecretKind::image;
}

void validate_username(const std::string& username) {
    if (username.empty() || username.size() > kMaxUsernameBytes) {
        throw PreconditionError("username must be 1-" + std::to_string(kMaxUsernameBytes) +
                                " bytes");
    }
}

}  // namespace

const UserRecord& enroll(CredentialStore& store, const std::string& username, const Secret& secret,
                         const EnrollConfig& config) {
    validate_username(username);
    if (store.contains(username)) {
        throw DuplicateUserError("user '" + username + "' is already enrolled");
    }
    config.params.validate();
    config.training.validate();

    const BipolarVector pattern = encode_secret(secret, config.text_width, config.threshold);
    if (pattern.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw EncodingError("encoded secret is too large");
    }
    const PatternSet set({pattern});
    WeightMatrix net = train(set, config.training);
    if (config.bias_eps) net = set_bias(net, pattern_sum_bias(set, *config.bias_eps));

    const Digest digest = pattern_digest(pattern);
    UserRecord record{
        username,
        TrainedNetwork{std::move(net), config.params, config.training, {digest}},
        digest,
        EncodingMeta{kind_of(secret), static_cast<std::uint32_t>(pattern.size()),
                     static_cast<std::int32_t>(config.threshold)},
    };
    return store.insert(std::move(record));
}

const char* to_string(RejectReason reason) noexcept {
    switch (reason) {
        case RejectReason::none: return "none";
        case RejectReason::unknown_user: return "unknown user";
        case RejectReason::encoding_failed: return "candidate encoding failed";
        case RejectReason::not_converged: return "recall did not converge";
        case RejectReason::digest_mismatch: return "recalled pattern does not match";
        case RejectReason::hamming_exceeded: return "candidate too far from recalled pattern";
    }
    return "unknown";
}

VerifyResult verify(const CredentialStore& store, const std::string& username,
                    const Secret& candidate, const VerifyOptions& options) {
    VerifyResult result;
    const UserRecord* record = store.find(username);
    if (!record) {
        result.reason = RejectReason::unknown_user;
        return result;
    }

    std::optional<BipolarVector> probe;
    if (kind_of(candidate) == record->encoding.kind) {
        try {
            probe = encode_secret(candidate, record->encoding.width, record->encoding.threshold);
        } catch (const Error&) {
            // reported as encoding_failed below
        }
    }
    if (!probe || probe->size() != record->network.net.dimension()) {
        result.reason = RejectReason::encoding_failed;
        return result;
    }

    const RecallTrace trace = recall(*probe, record->network.net, record->network.params);
    const BipolarVector recalled = saturate_by_sign(trace.final_state);
    result.converged = trace.converged;
    result.iterations = trace.iterations_used;
    result.hamming = hamming_distance(*probe, recalled);

    if (!trace.converged) {
        result.reason = RejectReason::not_converged;
    } else if (pattern_digest(recalled) != record->enrolled_digest) {
        result.reason = RejectReason::digest_mismatch;
    } else if (result.hamming > options.tolerance) {
        result.reason = RejectReason::hamming_exceeded;
    } else {
        result.decision = Decision::accept;
    }
    return result;
}

}  // namespace bsb
