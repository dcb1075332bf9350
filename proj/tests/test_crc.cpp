#include "doctest.h"
#include "oracles.hpp"

#include "tascl/polar_code.hpp"

#include <cmath>
#include <stdexcept>

using namespace tascl;

namespace {

// Full generator, leading coefficient first.
std::vector<std::uint8_t> full_generator(const CrcSpec& crc)
{
    std::vector<std::uint8_t> g{1};
    const Bits tail = crc.polynomial_bits();
    g.insert(g.end(), tail.begin(), tail.end());
    return g;
}

// Checksum by long division of (message * x^r + init * x^len(message)).
std::vector<std::uint8_t> reference_checksum(const CrcSpec& crc, const Bits& message)
{
    std::vector<std::uint8_t> dividend(message.begin(), message.end());
    dividend.resize(message.size() + static_cast<std::size_t>(crc.width()), 0);
    for (int i = 0; i < crc.width(); ++i)
        dividend[static_cast<std::size_t>(i)] ^= static_cast<std::uint8_t>((crc.initial_register() >> (crc.width() - 1 - i)) & 1U);
    return oracle::gf2_long_division(dividend, full_generator(crc));
}

}  // namespace

TEST_CASE("all-zero message has an all-zero checksum")
{
    const auto crc = CrcSpec::standard(24);
    const Bits word = crc.append(Bits(40, 0));
    CHECK(word == Bits(64, 0));
}

TEST_CASE("checksum matches long division for random messages")
{
    std::mt19937_64 rng(5);
    for (const CrcSpec& crc : {CrcSpec(8, 0x9B), CrcSpec(8, 0x07, 0xA5), CrcSpec(24, 0x864CFB),
                               CrcSpec(16, 0x1021, 0xFFFF), CrcSpec(6, 0x21)}) {
        for (int trial = 0; trial < 200; ++trial) {
            const Bits msg = oracle::random_bits(40, rng);
            const Bits word = crc.append(msg);
            REQUIRE(word.size() == msg.size() + static_cast<std::size_t>(crc.width()));
            CHECK(Bits(word.begin() + 40, word.end()) == reference_checksum(crc, msg));
        }
    }
}

TEST_CASE("appended words always check")
{
    std::mt19937_64 rng(6);
    const auto crc = CrcSpec::standard(24);
    for (int trial = 0; trial < 1000; ++trial)
        REQUIRE(crc.check(crc.append(oracle::random_bits(1 + rng() % 100, rng))));
}

TEST_CASE("every single-bit flip is detected")
{
    std::mt19937_64 rng(7);
    const auto crc = CrcSpec::standard(8);
    const Bits word = crc.append(oracle::random_bits(56, rng));
    for (std::size_t i = 0; i < word.size(); ++i) {
        Bits bad = word;
        bad[i] ^= 1;
        CHECK_FALSE(crc.check(bad));
    }
}

TEST_CASE("all burst errors of length <= r are detected")
{
    std::mt19937_64 rng(8);
    for (const CrcSpec& crc : {CrcSpec::standard(6), CrcSpec::standard(8)}) {
        const int r = crc.width();
        const Bits word = crc.append(oracle::random_bits(16, rng));
        for (int len = 1; len <= r; ++len) {
            // Burst pattern: first and last bit set, anything in between.
            const int inner = std::max(0, len - 2);
            for (int pattern = 0; pattern < (1 << inner); ++pattern)
                for (std::size_t start = 0; start + static_cast<std::size_t>(len) <= word.size(); ++start) {
                    Bits bad = word;
                    bad[start] ^= 1;
                    if (len > 1)
                        bad[start + static_cast<std::size_t>(len) - 1] ^= 1;
                    for (int b = 0; b < inner; ++b)
                        bad[start + 1 + static_cast<std::size_t>(b)] ^= static_cast<std::uint8_t>((pattern >> b) & 1);
                    REQUIRE_FALSE(crc.check(bad));
                }
        }
    }
}

TEST_CASE("random words are rejected at rate 1 - 2^-r")
{
    std::mt19937_64 rng(9);
    const auto crc = CrcSpec::standard(8);
    const int trials = 100000;
    int rejected = 0;
    for (int t = 0; t < trials; ++t)
        rejected += crc.check(oracle::random_bits(64, rng)) ? 0 : 1;
    const double p = 1.0 - std::ldexp(1.0, -8);
    const double sigma = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(static_cast<double>(rejected) / trials - p) < 4 * sigma);
}

TEST_CASE("crc argument validation")
{
    CHECK_THROWS_AS(CrcSpec(8, 0x1FF), std::invalid_argument);
    CHECK_THROWS_AS(CrcSpec::standard(13), std::invalid_argument);
    CHECK_THROWS_AS(CrcSpec::standard(8).check(Bits(4, 0)), std::invalid_argument);
    CHECK(CrcSpec().check(Bits{}));
}
