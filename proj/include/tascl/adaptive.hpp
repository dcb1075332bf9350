// Adaptive SCL and the two-stage (fast D_s / slow D_l) pipeline simulator.
#pragma once

#include "tascl/list_decoder.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace tascl {

// ---------------------------------------------------------------------------
// Adaptive SCL: retry with doubled list size until the CRC passes.

struct AsclConfig {
    int l_max = 32;  ///< power of two
};

struct AsclResult {
    DecodeOutcome outcome;
    std::vector<int> attempts;  ///< list sizes tried: 1, 2, 4, ...
    bool success = false;
};

/// Holds one ListDecoder per list size so repeated calls reuse storage.
class AsclDecoder {
public:
    AsclDecoder(const PolarCode& code, AsclConfig cfg, NodeFunction node = NodeFunction::MinSum);
    AsclResult decode(std::span<const double> llr);

private:
    std::vector<ListDecoder> stages_;
};

AsclResult ascl_decode(const PolarCode& code, std::span<const double> llr, AsclConfig cfg);

// ---------------------------------------------------------------------------
// Two-stage pipeline. Time is counted in D_s slots: D_s takes one slot per
// frame, D_l takes beta slots.

enum class OverflowPolicy {
    DropInProgress,  ///< abandon the frame inside D_l
    DropNewest,      ///< discard the frame that found the buffer full
};

const char* to_string(OverflowPolicy policy);
OverflowPolicy parse_overflow_policy(std::string_view text);

struct TaSclConfig {
    int beta = 3;     ///< t_l / t_s
    int zeta = 1;     ///< LLR buffer capacity in codewords
    int l_small = 1;
    int l_large = 32;
    OverflowPolicy overflow_policy = OverflowPolicy::DropInProgress;

    void validate() const;
    /// beta * zeta + beta + 1
    int state_count() const { return beta * zeta + beta + 1; }
};

/// Composite state x = beta * i_zeta + i_beta: slots of D_l work left.
struct PipelineState {
    int i_zeta = 0;
    int i_beta = 0;
    int x = 0;

    /// Canonical split with i_beta in [1, beta] whenever x > 0.
    static PipelineState from_x(int x, int beta);
    bool hazard(int beta, int zeta) const { return x > beta * zeta + 1; }
};

/// One-slot state transition. `overflow`, when given, reports whether the
/// transition dropped a frame.
int next_state(int x, bool ds_failed, const TaSclConfig& cfg, bool* overflow = nullptr);

enum class FrameRoute : std::uint8_t {
    Pending,
    FastDecoder,  ///< D_s passed CRC
    SlowDecoder,  ///< D_l finished
    Dropped,      ///< lost to a buffer overflow
};

/// What happened during one slot.
struct SlotReport {
    std::int64_t slot = 0;
    bool has_input = false;
    bool ds_failed = false;
    bool overflow = false;
    PipelineState state;                       ///< after the slot
    std::optional<std::int64_t> dl_started;    ///< frame loaded into D_l
    std::optional<std::int64_t> dl_finished;   ///< frame whose D_l decode completed
    std::optional<std::int64_t> dropped;       ///< frame lost to overflow
    std::int64_t released_begin = 0;           ///< frames [begin, end) left the reorder buffer
    std::int64_t released_end = 0;
};

struct PipelineStats {
    std::int64_t frames_in = 0;
    std::int64_t frames_out = 0;
    std::int64_t slots = 0;           ///< input slots (excludes draining)
    std::int64_t drain_slots = 0;
    std::int64_t ds_failures = 0;
    std::int64_t dl_decodes = 0;      ///< frames that completed D_l
    std::int64_t dl_failures = 0;     ///< D_l decodes without a CRC-passing candidate
    std::int64_t overflow_count = 0;
    std::int64_t frame_errors = 0;
    // Measurement window: input slots after the warm-up.
    std::int64_t window_slots = 0;
    std::int64_t window_overflows = 0;
    std::int64_t window_ds_failures = 0;
    std::vector<std::int64_t> state_histogram;    ///< post-transition states, window only
    std::vector<std::int64_t> latency_histogram;  ///< index = slots from arrival to release
    std::int64_t max_output_buffer_depth = 0;

    double overflow_rate() const;  ///< window_overflows / window_slots
    std::vector<double> state_distribution() const;
};

/// Slot-accurate model of the pipeline's buffers. It tracks frame indices
/// only; callers attach decoding to the reported events.
class TaSclPipeline {
public:
    explicit TaSclPipeline(TaSclConfig cfg, std::int64_t warmup_slots = 0);

    /// Advance one slot with a new frame whose D_s outcome is `ds_failed`.
    const SlotReport& step(bool ds_failed);

    /// Advance one slot with no input. Returns false once nothing is in flight.
    bool drain_step();

    bool idle() const;
    const PipelineState& state() const { return state_; }
    const PipelineStats& stats() const { return stats_; }
    PipelineStats& stats() { return stats_; }
    const TaSclConfig& config() const { return cfg_; }
    FrameRoute route(std::int64_t frame) const;
    const SlotReport& last_report() const { return report_; }

private:
    void advance(bool has_input, bool ds_failed);
    void release(std::int64_t now);

    TaSclConfig cfg_;
    std::int64_t warmup_;
    std::int64_t now_ = 0;
    std::int64_t next_frame_ = 0;

    std::optional<std::int64_t> in_dl_;
    int dl_remaining_ = 0;
    std::deque<std::int64_t> llr_buffer_;

    // Reorder buffer over frames [next_release_, next_frame_).
    std::int64_t next_release_ = 0;
    std::deque<FrameRoute> routes_;
    std::int64_t done_waiting_ = 0;

    PipelineState state_;
    PipelineStats stats_;
    SlotReport report_;
};

/// Per-slot CSV trace: slot,state_x,i_zeta,i_beta,ds_fail,overflow,frame_out_index.
/// Drain slots carry ds_fail = -1; frame_out_index is the last frame released
/// in the slot, or -1.
class TraceWriter {
public:
    explicit TraceWriter(std::ostream& out);
    void write(const SlotReport& report);
    static const char* header();

private:
    std::ostream* out_;
};

/// A frame as produced by the channel.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    /// Next frame, or nullopt when exhausted.
    virtual std::optional<LlrFrame> next() = 0;
};

struct DecodedFrame {
    std::int64_t index = 0;
    FrameRoute route = FrameRoute::Pending;
    bool crc_pass = false;
    Bits info_bits;  ///< K bits; empty for dropped frames
};

struct PipelineRunOptions {
    std::int64_t warmup_slots = 0;
    std::ostream* trace = nullptr;
    NodeFunction node = NodeFunction::MinSum;
};

/// Drives the pipeline with real decoders: D_s = SCL(l_small) on every
/// frame, D_l = SCL(l_large) on frames that failed D_s. Decoded frames reach
/// `sink` in input order. Stops early if the source runs dry, then drains.
PipelineStats pipeline_run(const PolarCode& code, const TaSclConfig& cfg, FrameSource& source,
                           std::int64_t slots, const std::function<void(const DecodedFrame&)>& sink,
                           const PipelineRunOptions& options = {});

/// Same mechanics with Bernoulli(eps_s) D_s failures and Bernoulli(eps_l)
/// D_l failures. Frame errors count D_l failures and dropped frames.
PipelineStats pipeline_run_synthetic(const TaSclConfig& cfg, double eps_s, double eps_l, std::int64_t slots,
                                     std::uint64_t seed, std::int64_t warmup_slots = 0,
                                     std::ostream* trace = nullptr);

}  // namespace tascl
