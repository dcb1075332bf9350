// AWGN/BPSK Monte Carlo harness for SC, SCL, A-SCL and the two-stage decoder.
#pragma once

#include "tascl/adaptive.hpp"
#include "tascl/markov.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace tascl {

enum class SnrMode {
    EbN0,  ///< sigma^2 = 1 / (2 R 10^(snr/10)), R = K/N
    EsN0,  ///< sigma^2 = 1 / (2 10^(snr/10))
};

struct ChannelSpec {
    double snr_db = 0.0;
    double rate = 0.5;
    SnrMode mode = SnrMode::EbN0;

    static ChannelSpec for_code(const PolarCode& code, double snr_db, SnrMode mode = SnrMode::EbN0);
    double noise_sigma() const;
    /// LLR = llr_scale() * y, i.e. 2 / sigma^2.
    double llr_scale() const { return 2.0 / (noise_sigma() * noise_sigma()); }
};

/// Engine for frame `index` of a run seeded with `seed`. Streams depend only
/// on (seed, index), so frames can be generated in any order or in parallel.
std::mt19937_64 frame_rng(std::uint64_t seed, std::uint64_t index);

/// CRC append, placement, encoding, BPSK (0 -> +1), AWGN, LLR = 2y/sigma^2.
LlrFrame transmit(const PolarCode& code, std::span<const std::uint8_t> message, const ChannelSpec& channel,
                  std::mt19937_64& rng);

struct TrialFrame {
    Bits message;
    LlrFrame llr;
};

/// Random message plus its channel output, drawn from frame_rng(seed, index).
TrialFrame make_trial(const PolarCode& code, const ChannelSpec& channel, std::uint64_t seed, std::uint64_t index);

/// True if the first K - r bits of `info_bits` differ from `message`.
bool is_block_error(std::span<const std::uint8_t> message, std::span<const std::uint8_t> info_bits);

enum class DecoderKind { SC, SCL, ASCL, TASCL };

struct DecoderSpec {
    DecoderKind kind = DecoderKind::SC;
    int list_size = 1;   ///< SCL
    int l_max = 32;      ///< A-SCL
    TaSclConfig tascl;   ///< TA-SCL
    NodeFunction node = NodeFunction::MinSum;
};

std::string describe(const DecoderSpec& spec);

struct RunSpec {
    DecoderSpec decoder;
    std::int64_t max_frames = 10000;
    std::int64_t min_errors = 100;  ///< 0 runs all max_frames
    std::uint64_t seed = 1;
    int workers = 1;
    std::int64_t batch = 256;       ///< stopping rule is checked between batches
    std::int64_t warmup_slots = 0;  ///< TA-SCL: slots before the overflow window opens

    void validate() const;
};

struct BinomialInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval, z = 1.96 for 95%.
BinomialInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.96);

struct BlerPoint {
    double snr_db = 0.0;
    std::int64_t frames = 0;
    std::int64_t block_errors = 0;
    double bler = 0.0;
    BinomialInterval ci95;
    // A-SCL
    double avg_list_size = std::numeric_limits<double>::quiet_NaN();
    double avg_attempts = std::numeric_limits<double>::quiet_NaN();
    // TA-SCL
    double eps_s = std::numeric_limits<double>::quiet_NaN();
    double eps_l = std::numeric_limits<double>::quiet_NaN();
    double overflow_emp = std::numeric_limits<double>::quiet_NaN();
    double overflow_model = std::numeric_limits<double>::quiet_NaN();
    double loss_pct = std::numeric_limits<double>::quiet_NaN();
};

BlerPoint run_bler(const PolarCode& code, const RunSpec& spec, const ChannelSpec& channel);

struct TaSclReport {
    BlerPoint point;  ///< end-to-end BLER of the two-stage decoder
    PipelineStats pipeline;
    OverflowReport model;  ///< Markov model evaluated at the measured eps_s

    std::int64_t frames = 0;
    std::int64_t ds_failures = 0;       ///< D_s frames without a CRC-passing candidate
    std::int64_t reference_errors = 0;  ///< SCL(l_large) run standalone on every frame
    std::int64_t pipeline_errors = 0;
    std::int64_t pipeline_only_errors = 0;   ///< wrong in the pipeline, right standalone
    std::int64_t reference_only_errors = 0;  ///< right in the pipeline, wrong standalone
    std::int64_t fast_undetected_errors = 0; ///< D_s passed the CRC with a wrong word

    double eps_s = 0.0;
    double eps_l = 0.0;              ///< standalone SCL(l_large) BLER on the same frames
    double eps_l_routed = 0.0;       ///< D_l failure rate over the frames routed to it
    double eps_dta = 0.0;
    double overflow_emp = 0.0;
    double overflow_model = 0.0;
    double loss_sim_pct = 0.0;       ///< (eps_dta - eps_l) / eps_l * 100
    double loss_model_pct = 0.0;     ///< overflow_model / eps_l * 100
    double loss_sigma_pct = 0.0;     ///< std. error of loss_sim_pct - loss_model_pct
    double difference_sigma = 0.0;   ///< std. error of eps_dta - eps_l (paired)
    double overflow_sigma = 0.0;     ///< binomial std. error of overflow_emp
    bool wide_ci = false;            ///< fewer than 10 reference errors

    /// |loss_sim - loss_model| <= k * loss_sigma
    bool loss_agrees(double k = 3.0) const;
    /// eps_l - k*sigma <= eps_dta <= eps_l + overflow_model + k*sigma
    bool sandwich_holds(double k = 3.0) const;
};

/// Runs max_frames slots through the pipeline with real decoders, in slot
/// order, and measures every quantity of the overflow model on the same
/// frames.
TaSclReport run_tascl_end_to_end(const PolarCode& code, const RunSpec& spec, const ChannelSpec& channel,
                                 std::ostream* trace = nullptr);

/// ebn0_db,frames,errors,bler,ci_lo,ci_hi,eps_s,eps_l,overflow_emp,overflow_model,loss_pct
const char* bler_csv_header();
std::vector<std::string> bler_csv_fields(const BlerPoint& point);

}  // namespace tascl
