// Polar code description, frozen-set construction, encoding and CRC.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tascl {

/// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

/// Systematic CRC: the checksum is the remainder of message(x) * x^width
/// modulo the generator, computed MSB first with no reflection.
class CrcSpec {
public:
    CrcSpec() = default;

    /// `polynomial` holds the generator without its leading x^width term;
    /// bit (width-1) is the coefficient of x^(width-1).
    CrcSpec(int width, std::uint64_t polynomial, std::uint64_t initial_register = 0);

    /// Generator used when only a width is given: CRC-24A (0x864CFB) for
    /// 24, and the LTE/NR polynomials for 6, 8, 11 and 16 bits.
    static CrcSpec standard(int width);

    int width() const { return width_; }
    std::uint64_t polynomial() const { return polynomial_; }
    std::uint64_t initial_register() const { return initial_; }

    /// Polynomial as a bit sequence of length width, highest power first.
    Bits polynomial_bits() const;

    /// message followed by width checksum bits.
    Bits append(std::span<const std::uint8_t> message) const;

    /// True iff the register is zero after shifting in the whole word.
    bool check(std::span<const std::uint8_t> word) const;

    /// Register contents after shifting in `bits` from the initial state.
    std::uint64_t remainder(std::span<const std::uint8_t> bits) const;

    friend bool operator==(const CrcSpec&, const CrcSpec&) = default;

private:
    int width_ = 0;
    std::uint64_t polynomial_ = 0;
    std::uint64_t initial_ = 0;
};

/// Immutable polar code: length N = 2^n, K unfrozen positions of which the
/// last r (in ascending position order) carry the CRC checksum.
class PolarCode {
public:
    /// Wraps an explicit frozen mask (1 = frozen). K may be zero here so that
    /// fully-frozen test codes can be described; construct_code never does that.
    PolarCode(Bits frozen_mask, CrcSpec crc, double design_snr_db);

    int n() const { return n_; }
    int length() const { return length_; }
    int info_length() const { return info_length_; }
    int crc_width() const { return crc_.width(); }
    int message_length() const { return info_length_ - crc_.width(); }
    double design_snr_db() const { return design_snr_db_; }
    const CrcSpec& crc() const { return crc_; }
    const Bits& frozen_mask() const { return frozen_; }
    bool is_frozen(int i) const { return frozen_[static_cast<std::size_t>(i)] != 0; }

    /// Unfrozen positions, ascending.
    const std::vector<int>& info_positions() const { return info_positions_; }

    /// Scatter K information bits into a length-N source word.
    Bits source_word(std::span<const std::uint8_t> info_bits) const;

    /// Gather the K information bits from a length-N source word.
    Bits info_bits(std::span<const std::uint8_t> source_word) const;

    friend bool operator==(const PolarCode&, const PolarCode&) = default;

private:
    int n_ = 0;
    int length_ = 0;
    int info_length_ = 0;
    Bits frozen_;
    CrcSpec crc_;
    double design_snr_db_ = 0.0;
    std::vector<int> info_positions_;
};

/// Bhattacharyya parameters of the N synthesized bit channels, natural
/// index order, starting from exp(-10^(design_snr_db/10)).
std::vector<double> bhattacharyya_parameters(int length, double design_snr_db);

/// Freezes the N-K channels with the largest Bhattacharyya parameter.
/// Ties go to the lower index being frozen first.
PolarCode construct_code(int length, int info_length, int crc_width, double design_snr_db);
PolarCode construct_code(int length, int info_length, const CrcSpec& crc, double design_snr_db);

/// x = u F^{(x)n} over GF(2), natural order, in place.
void encode_in_place(std::span<std::uint8_t> word);
Bits encode(const PolarCode& code, std::span<const std::uint8_t> source_word);

/// message -> CRC append -> placement into unfrozen positions -> encode.
Bits encode_message(const PolarCode& code, std::span<const std::uint8_t> message);

// Plain-text key = value serialization.
void write_code(std::ostream& out, const PolarCode& code);
PolarCode read_code(std::istream& in);
void save_code(const std::string& path, const PolarCode& code);
PolarCode load_code(const std::string& path);

}  // namespace tascl
