#include "bsb/store_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace bsb {

const char* to_string(StoreErrorKind kind) noexcept {
    switch (kind) {
        case StoreErrorKind::bad_magic: return "bad magic";
        case StoreErrorKind::version_mismatch: return "version mismatch";
        case StoreErrorKind::wrong_content: return "wrong content type";
        case StoreErrorKind::truncated: return "truncated file";
        case StoreErrorKind::checksum_mismatch: return "checksum mismatch";
        case StoreErrorKind::malformed: return "malformed payload";
    }
    return "unknown";
}

StoreError::StoreError(StoreErrorKind kind, const std::string& detail)
    : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

bool StoreError::is_corruption() const noexcept {
    return kind_ == StoreErrorKind::truncated || kind_ == StoreErrorKind::checksum_mismatch ||
           kind_ == StoreErrorKind::malformed;
}

namespace {

enum class Content : std::uint32_t { store = 1, network = 2 };
constexpr std::size_t kHeaderSize = 20;
constexpr std::size_t kChecksumSize = 32;

class Writer {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v) { put_le(v, 4); }
    void u64(std::uint64_t v) { put_le(v, 8); }
    void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }
    void raw(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        bytes_.insert(bytes_.end(), p, p + n);
    }
    std::vector<std::uint8_t>& bytes() { return bytes_; }

private:
    void put_le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
    std::uint64_t u64() { return get_le(8); }
    double f64() { return std::bit_cast<double>(get_le(8)); }
    void raw(void* out, std::size_t n) {
        need(n);
        std::memcpy(out, data_ + pos_, n);
        pos_ += n;
    }
    std::size_t remaining() const { return size_ - pos_; }
    // Guards allocations sized from untrusted counts.
    void need(std::size_t n) const {
        if (n > remaining()) {
            throw StoreError(StoreErrorKind::malformed, "field runs past the end of the payload");
        }
    }

private:
    std::uint64_t get_le(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

void write_network(Writer& out, const TrainedNetwork& network) {
    const std::size_t d = network.net.dimension();
    out.u32(static_cast<std::uint32_t>(d));
    const auto& p = network.params;
    out.f64(p.gamma);
    out.f64(p.eta);
    out.f64(p.theta);
    out.u64(p.max_iters);
    out.f64(p.convergence_tol);
    const auto& t = network.training;
    out.f64(t.lr);
    out.u8(t.zero_diagonal ? 1 : 0);
    out.f64(t.connectivity);
    out.u64(t.mask_seed);
    out.u8(t.symmetric_mask ? 1 : 0);
    out.u32(static_cast<std::uint32_t>(network.pattern_digests.size()));
    for (const auto& digest : network.pattern_digests) out.raw(digest.data(), digest.size());
    for (double w : network.net.weights()) out.f64(w);
    for (double b : network.net.bias()) out.f64(b);
}

bool read_flag(Reader& in) {
    const auto v = in.u8();
    if (v > 1) throw StoreError(StoreErrorKind::malformed, "boolean field is not 0 or 1");
    return v == 1;
}

TrainedNetwork read_network(Reader& in) {
    const std::size_t d = in.u32();
    if (d == 0) throw StoreError(StoreErrorKind::malformed, "network dimension is zero");

    BsbParams params;
    params.gamma = in.f64();
    params.eta = in.f64();
    params.theta = in.f64();
    params.max_iters = in.u64();
    params.convergence_tol = in.f64();
    TrainingConfig training;
    training.lr = in.f64();
    training.zero_diagonal = read_flag(in);
    training.connectivity = in.f64();
    training.mask_seed = in.u64();
    training.symmetric_mask = read_flag(in);

    const std::size_t digest_count = in.u32();
    in.need(digest_count * kChecksumSize);
    std::vector<Digest> digests(digest_count);
    for (auto& digest : digests) in.raw(digest.data(), digest.size());

    if (d > in.remaining() / 8 / (d + 1)) {
        throw StoreError(StoreErrorKind::malformed, "weight block runs past the end of the payload");
    }
    std::vector<double> w(d * d);
    for (double& v : w) v = in.f64();
    std::vector<double> b(d);
    for (double& v : b) v = in.f64();

    try {
        params.validate();
        training.validate();
        return TrainedNetwork{WeightMatrix(d, std::move(w), std::move(b)), params, training,
                              std::move(digests)};
    } catch (const StoreError&) {
        throw;
    } catch (const Error& e) {
        throw StoreError(StoreErrorKind::malformed, e.what());
    }
}

std::vector<std::uint8_t> wrap(Content content, std::vector<std::uint8_t> payload) {
    Writer out;
    out.raw(kStoreMagic, sizeof kStoreMagic);
    out.u32(kStoreFormatVersion);
    out.u32(static_cast<std::uint32_t>(content));
    out.u64(payload.size());
    out.raw(payload.data(), payload.size());
    const Digest checksum = sha256(out.bytes());
    out.raw(checksum.data(), checksum.size());
    return std::move(out.bytes());
}

// Validates the container and returns a reader over the payload.
Reader unwrap(Content expected, const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < sizeof kStoreMagic ||
        std::memcmp(bytes.data(), kStoreMagic, sizeof kStoreMagic) != 0) {
        throw StoreError(StoreErrorKind::bad_magic, "expected magic \"BSB1\"");
    }
    if (bytes.size() < kHeaderSize) {
        throw StoreError(StoreErrorKind::truncated, "file ends inside the header");
    }
    Reader header(bytes.data() + 4, kHeaderSize - 4);
    const std::uint32_t version = header.u32();
    if (version != kStoreFormatVersion) {
        throw StoreError(StoreErrorKind::version_mismatch,
                         "file has format version " + std::to_string(version) + ", expected " +
                             std::to_string(kStoreFormatVersion));
    }
    const std::uint32_t content = header.u32();
    if (content != static_cast<std::uint32_t>(expected)) {
        throw StoreError(StoreErrorKind::wrong_content,
                         expected == Content::store ? "file is not a credential store"
                                                    : "file is not a trained network");
    }
    const std::uint64_t payload_size = header.u64();
    const std::size_t available = bytes.size() - kHeaderSize;
    if (available < kChecksumSize || payload_size > available - kChecksumSize) {
        throw StoreError(StoreErrorKind::truncated,
                         "header declares " + std::to_string(payload_size) +
                             " payload bytes but the file is too short");
    }
    if (payload_size != available - kChecksumSize) {
        throw StoreError(StoreErrorKind::malformed, "unexpected bytes after the checksum");
    }
    const std::size_t body = kHeaderSize + payload_size;
    const Digest actual = sha256(std::span<const std::uint8_t>(bytes.data(), body));
    if (std::memcmp(actual.data(), bytes.data() + body, kChecksumSize) != 0) {
        throw StoreError(StoreErrorKind::checksum_mismatch, "content does not match its SHA-256");
    }
    return Reader(bytes.data() + kHeaderSize, payload_size);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>()};
    if (in.bad()) throw IoError("error reading '" + path.string() + "'");
    return bytes;
}

void write_file_atomically(const std::vector<std::uint8_t>& bytes,
                           const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create '" + tmp.string() + "'");
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoError("error writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot replace '" + path.string() + "'");
    }
}

}  // namespace

std::vector<std::uint8_t> serialize_network(const TrainedNetwork& network) {
    Writer out;
    write_network(out, network);
    return wrap(Content::network, std::move(out.bytes()));
}

TrainedNetwork deserialize_network(const std::vector<std::uint8_t>& bytes) {
    Reader in = unwrap(Content::network, bytes);
    TrainedNetwork network = read_network(in);
    if (in.remaining() != 0) {
        throw StoreError(StoreErrorKind::malformed, "unexpected bytes after the network");
    }
    return network;
}

std::vector<std::uint8_t> serialize_store(const CredentialStore& store) {
    Writer out;
    out.u32(static_cast<std::uint32_t>(store.size()));
    for (const auto& [name, record] : store.records()) {
        out.u32(static_cast<std::uint32_t>(name.size()));
        out.raw(name.data(), name.size());
        out.u8(static_cast<std::uint8_t>(record.encoding.kind));
        out.u32(record.encoding.width);
        out.u32(static_cast<std::uint32_t>(record.encoding.threshold));
        out.raw(record.enrolled_digest.data(), record.enrolled_digest.size());
        write_network(out, record.network);
    }
    return wrap(Content::store, std::move(out.bytes()));
}

CredentialStore deserialize_store(const std::vector<std::uint8_t>& bytes) {
    Reader in = unwrap(Content::store, bytes);
    CredentialStore store;
    const std::uint32_t count = in.u32();
    for (std::uint32_t k = 0; k < count; ++k) {
        const std::size_t name_len = in.u32();
        if (name_len == 0 || name_len > kMaxUsernameBytes) {
            throw StoreError(StoreErrorKind::malformed, "bad username length");
        }
        std::string username(name_len, '\0');
        in.raw(username.data(), name_len);
        const auto kind = in.u8();
        if (kind > 1) throw StoreError(StoreErrorKind::malformed, "unknown secret kind");
        EncodingMeta encoding{static_cast<SecretKind>(kind), in.u32(), 0};
        encoding.threshold = static_cast<std::int32_t>(in.u32());
        Digest digest{};
        in.raw(digest.data(), digest.size());
        TrainedNetwork network = read_network(in);
        if (encoding.width != network.net.dimension()) {
            throw StoreError(StoreErrorKind::malformed, "encoding width disagrees with network");
        }
        UserRecord record{std::move(username), std::move(network), digest, encoding};
        try {
            store.insert(std::move(record));
        } catch (const DuplicateUserError& e) {
            throw StoreError(StoreErrorKind::malformed, e.what());
        }
    }
    if (in.remaining() != 0) {
        throw StoreError(StoreErrorKind::malformed, "unexpected bytes after the last record");
    }
    return store;
}

void save_store(const CredentialStore& store, const std::filesystem::path& path) {
    write_file_atomically(serialize_store(store), path);
}

CredentialStore load_store(const std::filesystem::path& path) {
    return deserialize_store(read_file(path));
}

void save_network(const TrainedNetwork& network, const std::filesystem::path& path) {
    write_file_atomically(serialize_network(network), path);
}

TrainedNetwork load_network(const std::filesystem::path& path) {
    return deserialize_network(read_file(path));
}

}  // namespace bsb
