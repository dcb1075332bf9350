#include "tascl/polar_code.hpp"

#include <stdexcept>
#include <string>

namespace tascl {

CrcSpec::CrcSpec(int width, std::uint64_t polynomial, std::uint64_t initial_register)
    : width_(width), polynomial_(polynomial), initial_(initial_register)
{
    if (width < 0 || width > 63)
        throw std::invalid_argument("crc width must be in [0, 63]");
    const std::uint64_t mask = width == 0 ? 0 : (std::uint64_t{1} << width) - 1;
    if ((polynomial & ~mask) != 0 || (initial_register & ~mask) != 0)
        throw std::invalid_argument("crc polynomial or initial register wider than crc width");
}

CrcSpec CrcSpec::standard(int width)
{
    switch (width) {
    case 0: return CrcSpec(0, 0);
    case 6: return CrcSpec(6, 0x21);        // x^6 + x^5 + 1
    case 8: return CrcSpec(8, 0x9B);        // LTE gCRC8
    case 11: return CrcSpec(11, 0x621);     // NR gCRC11
    case 16: return CrcSpec(16, 0x1021);    // LTE gCRC16
    case 24: return CrcSpec(24, 0x864CFB);  // LTE gCRC24A
    default:
        throw std::invalid_argument("no standard crc polynomial for width " + std::to_string(width) +
                                    "; pass one explicitly");
    }
}

Bits CrcSpec::polynomial_bits() const
{
    Bits bits(static_cast<std::size_t>(width_));
    for (int i = 0; i < width_; ++i)
        bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((polynomial_ >> (width_ - 1 - i)) & 1U);
    return bits;
}

std::uint64_t CrcSpec::remainder(std::span<const std::uint8_t> bits) const
{
    if (width_ == 0)
        return 0;
    const std::uint64_t mask = (std::uint64_t{1} << width_) - 1;
    std::uint64_t reg = initial_;
    for (std::uint8_t bit : bits) {
        const std::uint64_t feedback = ((reg >> (width_ - 1)) ^ bit) & 1U;
        reg = (reg << 1) & mask;
        if (feedback)
            reg ^= polynomial_;
    }
    return reg;
}

Bits CrcSpec::append(std::span<const std::uint8_t> message) const
{
    Bits word(message.begin(), message.end());
    const std::uint64_t reg = remainder(message);
    for (int i = width_ - 1; i >= 0; --i)
        word.push_back(static_cast<std::uint8_t>((reg >> i) & 1U));
    return word;
}

bool CrcSpec::check(std::span<const std::uint8_t> word) const
{
    if (static_cast<int>(word.size()) < width_)
        throw std::invalid_argument("crc check: word shorter than checksum");
    return remainder(word) == 0;
}

}  // namespace tascl
