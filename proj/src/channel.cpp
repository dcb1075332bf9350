#include "tascl/csv.hpp"
#include "tascl/harness.hpp"

#include <cmath>
#include <stdexcept>

namespace tascl {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

ChannelSpec ChannelSpec::for_code(const PolarCode& code, double snr_db, SnrMode mode)
{
    return {snr_db, static_cast<double>(code.info_length()) / code.length(), mode};
}

double ChannelSpec::noise_sigma() const
{
    const double linear = std::pow(10.0, snr_db / 10.0);
    const double variance = mode == SnrMode::EbN0 ? 1.0 / (2.0 * rate * linear) : 1.0 / (2.0 * linear);
    const double sigma = std::sqrt(variance);
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("channel noise sigma must be positive and finite");
    return sigma;
}

std::mt19937_64 frame_rng(std::uint64_t seed, std::uint64_t index)
{
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ index));
}

LlrFrame transmit(const PolarCode& code, std::span<const std::uint8_t> message, const ChannelSpec& channel,
                  std::mt19937_64& rng)
{
    const Bits codeword = encode_message(code, message);
    const double sigma = channel.noise_sigma();
    const double scale = 2.0 / (sigma * sigma);
    std::normal_distribution<double> noise(0.0, sigma);
    LlrFrame llr(codeword.size());
    for (std::size_t i = 0; i < codeword.size(); ++i) {
        const double y = (codeword[i] ? -1.0 : 1.0) + noise(rng);
        llr[i] = scale * y;
    }
    return llr;
}

TrialFrame make_trial(const PolarCode& code, const ChannelSpec& channel, std::uint64_t seed, std::uint64_t index)
{
    auto rng = frame_rng(seed, index);
    TrialFrame trial;
    trial.message.resize(static_cast<std::size_t>(code.message_length()));
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < trial.message.size(); ++i) {
        if (i % 64 == 0)
            word = rng();
        trial.message[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
    }
    trial.llr = transmit(code, trial.message, channel, rng);
    return trial;
}

bool is_block_error(std::span<const std::uint8_t> message, std::span<const std::uint8_t> info_bits)
{
    if (info_bits.size() < message.size())
        return true;
    for (std::size_t i = 0; i < message.size(); ++i)
        if (message[i] != info_bits[i])
            return true;
    return false;
}

BinomialInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z)
{
    if (trials <= 0)
        return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, std::min(centre - half, p)), std::min(1.0, std::max(centre + half, p))};
}

const char* bler_csv_header()
{
    return "ebn0_db,frames,errors,bler,ci_lo,ci_hi,eps_s,eps_l,overflow_emp,overflow_model,loss_pct";
}

std::vector<std::string> bler_csv_fields(const BlerPoint& p)
{
    return {format_number(p.snr_db),      format_number(p.frames),       format_number(p.block_errors),
            format_number(p.bler),        format_number(p.ci95.lo),      format_number(p.ci95.hi),
            format_number(p.eps_s),       format_number(p.eps_l),        format_number(p.overflow_emp),
            format_number(p.overflow_model), format_number(p.loss_pct)};
}

}  // namespace tascl
