#include "doctest.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <openssl/evp.h>

#include "bsb/store_io.hpp"

using namespace bsb;
namespace fs = std::filesystem;

namespace {

std::uint64_t read_le(const std::vector<std::uint8_t>& b, std::size_t at, std::size_t n) {
    std::uint64_t v = 0;
    for (std::size_t k = 0; k < n; ++k) v |= std::uint64_t{b[at + k]} << (8 * k);
    return v;
}

double read_f64(const std::vector<std::uint8_t>& b, std::size_t at) {
    return std::bit_cast<double>(read_le(b, at, 8));
}

// Fix up the trailer after editing header bytes.
void reseal(std::vector<std::uint8_t>& b) {
    const std::size_t body = b.size() - 32;
    unsigned int len = 0;
    EVP_Digest(b.data(), body, b.data() + body, &len, EVP_sha256(), nullptr);
}

StoreErrorKind store_error(const std::vector<std::uint8_t>& bytes) {
    try {
        deserialize_store(bytes);
    } catch (const StoreError& e) {
        return e.kind();
    }
    FAIL("expected a StoreError");
    return StoreErrorKind::bad_magic;
}

CredentialStore sample_store() {
    CredentialStore store;
    enroll(store, "alice", TextSecret{"secret12"});
    EnrollConfig config;
    config.text_width = 64;
    config.bias_eps = 0.25;
    config.params.eta = 0.05;
    config.training.lr = 0.5;
    enroll(store, "bob", TextSecret{"hunter2"}, config);
    config.threshold = 90;
    enroll(store, "pic", ImageSecret{RgbImage(2, 2, {Rgb{1, 2, 3}, Rgb{200, 200, 200}, Rgb{99, 0, 1}, Rgb{0, 0, 0}})},
           config);
    return store;
}

struct TempDir {
    fs::path path = fs::temp_directory_path() / ("bsb-store-test-" + std::to_string(std::random_device{}()));
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("network container layout") {
    std::mt19937_64 rng(4);
    std::vector<double> w(9), b(3);
    for (auto& v : w) v = std::uniform_real_distribution<double>(-3, 3)(rng);
    for (auto& v : b) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    TrainedNetwork tn{WeightMatrix(3, w, b), BsbParams{}, TrainingConfig{}, {}};
    const auto bytes = serialize_network(tn);

    CHECK(std::memcmp(bytes.data(), "BSB1", 4) == 0);
    CHECK(read_le(bytes, 4, 4) == 1);
    CHECK(read_le(bytes, 8, 4) == 2);
    const std::size_t n = read_le(bytes, 12, 8);
    CHECK(bytes.size() == 20 + n + 32);
    CHECK(read_le(bytes, 20, 4) == 3);

    // W then b close the payload.
    const std::size_t w_at = 20 + n - 8 * 12;
    for (std::size_t k = 0; k < 9; ++k) CHECK(read_f64(bytes, w_at + 8 * k) == w[k]);
    for (std::size_t k = 0; k < 3; ++k) CHECK(read_f64(bytes, w_at + 72 + 8 * k) == b[k]);

    std::vector<std::uint8_t> expected(32);
    unsigned int len = 0;
    EVP_Digest(bytes.data(), 20 + n, expected.data(), &len, EVP_sha256(), nullptr);
    CHECK(std::vector<std::uint8_t>(bytes.end() - 32, bytes.end()) == expected);

    CHECK(deserialize_network(bytes) == tn);
}

TEST_CASE("store round trip is bitwise") {
    const auto store = sample_store();
    const auto bytes = serialize_store(store);
    const auto back = deserialize_store(bytes);
    CHECK(back == store);
    CHECK(serialize_store(back) == bytes);

    TempDir dir;
    const auto path = dir.path / "s.bsb";
    save_store(store, path);
    CHECK(load_store(path) == store);
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
    for (const auto& [name, rec] : store.records()) {
        const auto p = dir.path / (name + ".net");
        save_network(rec.network, p);
        CHECK(load_network(p) == rec.network);
    }
}

TEST_CASE("verification is unchanged by a save/load round trip") {
    const auto store = sample_store();
    const auto back = deserialize_store(serialize_store(store));
    for (const std::string pw : {"secret12", "secret13", "hunter2", "hunter3", "x"}) {
        for (const std::string user : {"alice", "bob", "nobody"}) {
            CHECK(verify(back, user, TextSecret{pw}, VerifyOptions{4}) ==
                  verify(store, user, TextSecret{pw}, VerifyOptions{4}));
        }
    }
}

TEST_CASE("the store holds no plaintext password") {
    const auto bytes = serialize_store(sample_store());
    const std::string raw(bytes.begin(), bytes.end());
    CHECK(raw.find("secret12") == std::string::npos);
    CHECK(raw.find("hunter2") == std::string::npos);
    CHECK(raw.find("alice") != std::string::npos);
}

TEST_CASE("damaged files give distinct errors") {
    const auto good = serialize_store(sample_store());

    SUBCASE("wrong magic names the expected one") {
        auto b = good;
        std::memcpy(b.data(), "XXXX", 4);
        CHECK(store_error(b) == StoreErrorKind::bad_magic);
        CHECK_THROWS_WITH(deserialize_store(b), doctest::Contains("BSB1"));
    }
    SUBCASE("future version") {
        auto b = good;
        b[4] = 2;
        reseal(b);
        CHECK(store_error(b) == StoreErrorKind::version_mismatch);
    }
    SUBCASE("network file opened as a store") {
        const auto net = serialize_network(sample_store().find("alice")->network);
        CHECK(store_error(net) == StoreErrorKind::wrong_content);
    }
    SUBCASE("every truncation is reported, never a crash") {
        for (std::size_t len = 0; len < good.size(); len += 7) {
            const std::vector<std::uint8_t> cut(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(len));
            try {
                deserialize_store(cut);
                FAIL("truncated store loaded");
            } catch (const StoreError& e) {
                if (len >= 4) REQUIRE(e.kind() == StoreErrorKind::truncated);
                if (len >= 20) REQUIRE(e.is_corruption());
            }
        }
    }
    SUBCASE("flipped payload byte") {
        for (std::size_t at : {std::size_t{30}, good.size() / 2, good.size() - 40}) {
            auto b = good;
            b[at] ^= 0x10;
            REQUIRE(store_error(b) == StoreErrorKind::checksum_mismatch);
        }
    }
    SUBCASE("trailing garbage") {
        auto b = good;
        b.push_back(0);
        CHECK(store_error(b) == StoreErrorKind::malformed);
    }
    SUBCASE("sealed but inconsistent payload") {
        auto b = good;
        b[20] = 99;  // record count
        reseal(b);
        const auto kind = store_error(b);
        CHECK(kind == StoreErrorKind::malformed);
    }
}

TEST_CASE("file errors") {
    TempDir dir;
    CHECK_THROWS_AS(load_store(dir.path / "missing.bsb"), IoError);
    CHECK_THROWS_AS(save_store(CredentialStore{}, dir.path / "no" / "such" / "dir.bsb"), IoError);
    const auto path = dir.path / "junk.bsb";
    std::ofstream(path) << "XXXX";
    CHECK_THROWS_AS(load_store(path), StoreError);
}
