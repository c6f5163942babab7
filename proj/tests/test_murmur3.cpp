#include <gtest/gtest.h>

#include "json.hpp"
#include "pwlab/murmur3.hpp"
#include "io.hpp"
#include "support.hpp"

using namespace pwlab;

namespace {

std::vector<std::uint8_t> from_hex(const std::string& hex) {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i + 1 < hex.size(); i += 2) out.push_back(static_cast<std::uint8_t>(std::stoul(hex.substr(i, 2), nullptr, 16)));
    return out;
}

nlohmann::json vectors() {
    return nlohmann::json::parse(io::read_file(pwtest::source_dir() / "tests/golden/murmur3_vectors.json"));
}

void check_all(const nlohmann::json& list) {
    for (const auto& v : list) {
        const auto data = from_hex(v["data_hex"].get<std::string>());
        const auto h = murmur3_x64_128(data, v["seed"].get<std::uint64_t>());
        ASSERT_EQ(h.hex(), v["hash"].get<std::string>()) << "data=" << v["data_hex"] << " seed=" << v["seed"];
    }
}

}  // namespace

TEST(Murmur3, EmptyInputSeedZeroIsZero) {
    const auto h = murmur3_x64_128(std::string_view{}, 0);
    EXPECT_EQ(h.high, 0u);
    EXPECT_EQ(h.low, 0u);
    EXPECT_EQ(h.hex(), std::string(32, '0'));
}

TEST(Murmur3, SingleByteMatchesReference) {
    EXPECT_EQ(murmur3_x64_128("a", 0).hex(), "85555565f6597889e6b53a48510e895a");
}

TEST(Murmur3, SeventeenBytesExercisesBlockAndTail) {
    const auto v = vectors()["fixed"][2];
    ASSERT_EQ(from_hex(v["data_hex"]).size(), 17u);
    EXPECT_EQ(murmur3_x64_128("abcdefghijklmnopq", 0x9747b28c).hex(), v["hash"].get<std::string>());
}

TEST(Murmur3, FixedVectorsCoverEveryTailLength) {
    const auto list = vectors()["fixed"];
    ASSERT_GE(list.size(), 20u);
    std::set<std::size_t> tails;
    for (const auto& v : list) tails.insert(from_hex(v["data_hex"]).size() % 16);
    EXPECT_EQ(tails.size(), 16u);
    check_all(list);
}

TEST(Murmur3, ThousandRandomPairs) {
    const auto list = vectors()["random"];
    ASSERT_EQ(list.size(), 1000u);
    check_all(list);
}

TEST(Murmur3, StringAndByteOverloadsAgree) {
    const std::string s = "fingerprint raw";
    const std::vector<std::uint8_t> b(s.begin(), s.end());
    EXPECT_EQ(murmur3_x64_128(s, 7), murmur3_x64_128(b, 7));
}
