#include "tascl/polar_code.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tascl {

namespace {

int checked_log2(int length)
{
    if (length < 1 || !std::has_single_bit(static_cast<unsigned>(length)))
        throw std::invalid_argument("code length must be a power of two, got " + std::to_string(length));
    return std::countr_zero(static_cast<unsigned>(length));
}

}  // namespace

PolarCode::PolarCode(Bits frozen_mask, CrcSpec crc, double design_snr_db)
    : n_(checked_log2(static_cast<int>(frozen_mask.size()))),
      length_(static_cast<int>(frozen_mask.size())),
      frozen_(std::move(frozen_mask)),
      crc_(crc),
      design_snr_db_(design_snr_db)
{
    for (int i = 0; i < length_; ++i) {
        const auto b = frozen_[static_cast<std::size_t>(i)];
        if (b > 1)
            throw std::invalid_argument("frozen mask entries must be 0 or 1");
        if (b == 0)
            info_positions_.push_back(i);
    }
    info_length_ = static_cast<int>(info_positions_.size());
    if (crc_.width() > 0 && crc_.width() >= info_length_)
        throw std::invalid_argument("crc width must be smaller than the information length");
}

Bits PolarCode::source_word(std::span<const std::uint8_t> info_bits) const
{
    if (static_cast<int>(info_bits.size()) != info_length_)
        throw std::invalid_argument("source_word: expected K information bits");
    Bits u(static_cast<std::size_t>(length_), 0);
    for (std::size_t j = 0; j < info_positions_.size(); ++j)
        u[static_cast<std::size_t>(info_positions_[j])] = info_bits[j];
    return u;
}

Bits PolarCode::info_bits(std::span<const std::uint8_t> source_word) const
{
    if (static_cast<int>(source_word.size()) != length_)
        throw std::invalid_argument("info_bits: expected N source bits");
    Bits out(info_positions_.size());
    for (std::size_t j = 0; j < info_positions_.size(); ++j)
        out[j] = source_word[static_cast<std::size_t>(info_positions_[j])];
    return out;
}

std::vector<double> bhattacharyya_parameters(int length, double design_snr_db)
{
    const int n = checked_log2(length);
    // Index bits are consumed MSB first: a 0 selects the degraded channel
    // (2z - z^2), a 1 the upgraded one (z^2).
    std::vector<double> z{std::exp(-std::pow(10.0, design_snr_db / 10.0))};
    for (int stage = 0; stage < n; ++stage) {
        std::vector<double> next(z.size() * 2);
        for (std::size_t j = 0; j < z.size(); ++j) {
            next[2 * j] = 2.0 * z[j] - z[j] * z[j];
            next[2 * j + 1] = z[j] * z[j];
        }
        z = std::move(next);
    }
    return z;
}

PolarCode construct_code(int length, int info_length, int crc_width, double design_snr_db)
{
    if (crc_width < 0 || crc_width >= info_length)
        throw std::invalid_argument("crc width must satisfy 0 <= r < K");
    return construct_code(length, info_length, CrcSpec::standard(crc_width), design_snr_db);
}

PolarCode construct_code(int length, int info_length, const CrcSpec& crc, double design_snr_db)
{
    checked_log2(length);
    if (info_length <= 0 || info_length > length)
        throw std::invalid_argument("information length must satisfy 0 < K <= N");
    if (crc.width() >= info_length)
        throw std::invalid_argument("crc width must satisfy 0 <= r < K");

    const auto z = bhattacharyya_parameters(length, design_snr_db);
    std::vector<int> order(static_cast<std::size_t>(length));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return z[static_cast<std::size_t>(a)] > z[static_cast<std::size_t>(b)];
    });

    Bits frozen(static_cast<std::size_t>(length), 0);
    for (int i = 0; i < length - info_length; ++i)
        frozen[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    return PolarCode(std::move(frozen), crc, design_snr_db);
}

void encode_in_place(std::span<std::uint8_t> word)
{
    const std::size_t length = word.size();
    if (length == 0 || !std::has_single_bit(length))
        throw std::invalid_argument("encode: length must be a power of two");
    for (std::size_t half = 1; half < length; half *= 2)
        for (std::size_t block = 0; block < length; block += 2 * half)
            for (std::size_t j = block; j < block + half; ++j)
                word[j] ^= word[j + half];
}

Bits encode(const PolarCode& code, std::span<const std::uint8_t> source_word)
{
    if (static_cast<int>(source_word.size()) != code.length())
        throw std::invalid_argument("encode: expected N source bits");
    Bits x(source_word.begin(), source_word.end());
    encode_in_place(x);
    return x;
}

Bits encode_message(const PolarCode& code, std::span<const std::uint8_t> message)
{
    if (static_cast<int>(message.size()) != code.message_length())
        throw std::invalid_argument("encode_message: expected K - r message bits");
    Bits u = code.source_word(code.crc().append(message));
    encode_in_place(u);
    return u;
}

}  // namespace tascl
