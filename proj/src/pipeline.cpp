#include "tascl/adaptive.hpp"
#include "tascl/csv.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace tascl {

const char* to_string(OverflowPolicy policy)
{
    return policy == OverflowPolicy::DropInProgress ? "drop-in-progress" : "drop-newest";
}

OverflowPolicy parse_overflow_policy(std::string_view text)
{
    if (text == "drop-in-progress")
        return OverflowPolicy::DropInProgress;
    if (text == "drop-newest")
        return OverflowPolicy::DropNewest;
    throw std::invalid_argument("unknown overflow policy '" + std::string(text) +
                                "' (expected drop-in-progress or drop-newest)");
}

void TaSclConfig::validate() const
{
    if (beta < 1)
        throw std::invalid_argument("beta must be a positive integer");
    if (zeta < 0)
        throw std::invalid_argument("zeta must be non-negative");
    if (l_small < 1 || l_large < 1)
        throw std::invalid_argument("list sizes must be at least 1");
    if (l_small > l_large)
        throw std::invalid_argument("l_small must not exceed l_large");
}

PipelineState PipelineState::from_x(int x, int beta)
{
    if (x <= 0)
        return {0, 0, 0};
    const int i_zeta = (x - 1) / beta;
    return {i_zeta, x - beta * i_zeta, x};
}

int next_state(int x, bool ds_failed, const TaSclConfig& cfg, bool* overflow)
{
    cfg.validate();
    const int top = cfg.beta * (cfg.zeta + 1);
    if (x < 0 || x > top)
        throw std::out_of_range("pipeline state " + std::to_string(x) + " outside [0, " + std::to_string(top) + "]");
    const int drained = std::max(x - 1, 0);
    const bool dropped = ds_failed && x > cfg.beta * cfg.zeta + 1;
    if (overflow)
        *overflow = dropped;
    if (!ds_failed)
        return drained;
    if (dropped && cfg.overflow_policy == OverflowPolicy::DropNewest)
        return drained;
    return std::min(drained + cfg.beta, top);
}

double PipelineStats::overflow_rate() const
{
    return window_slots == 0 ? 0.0 : static_cast<double>(window_overflows) / static_cast<double>(window_slots);
}

std::vector<double> PipelineStats::state_distribution() const
{
    std::vector<double> dist(state_histogram.size(), 0.0);
    if (window_slots == 0)
        return dist;
    for (std::size_t i = 0; i < dist.size(); ++i)
        dist[i] = static_cast<double>(state_histogram[i]) / static_cast<double>(window_slots);
    return dist;
}

TaSclPipeline::TaSclPipeline(TaSclConfig cfg, std::int64_t warmup_slots) : cfg_(cfg), warmup_(warmup_slots)
{
    cfg_.validate();
    if (warmup_slots < 0)
        throw std::invalid_argument("warm-up must be non-negative");
    stats_.state_histogram.assign(static_cast<std::size_t>(cfg_.state_count()), 0);
}

bool TaSclPipeline::idle() const
{
    return !in_dl_ && llr_buffer_.empty() && routes_.empty();
}

FrameRoute TaSclPipeline::route(std::int64_t frame) const
{
    if (frame < next_release_)
        throw std::out_of_range("frame already released");
    if (frame >= next_frame_)
        throw std::out_of_range("frame not yet arrived");
    return routes_[static_cast<std::size_t>(frame - next_release_)];
}

const SlotReport& TaSclPipeline::step(bool ds_failed)
{
    advance(true, ds_failed);
    return report_;
}

bool TaSclPipeline::drain_step()
{
    if (idle())
        return false;
    advance(false, false);
    return true;
}

void TaSclPipeline::advance(bool has_input, bool ds_failed)
{
    report_ = SlotReport{};
    report_.slot = now_;
    report_.has_input = has_input;
    report_.ds_failed = has_input && ds_failed;

    auto set_route = [this](std::int64_t frame, FrameRoute r) {
        routes_[static_cast<std::size_t>(frame - next_release_)] = r;
        ++done_waiting_;
    };
    auto load_dl = [this](std::int64_t frame) {
        in_dl_ = frame;
        dl_remaining_ = cfg_.beta;
        report_.dl_started = frame;
    };

    // D_l spends this slot on its current frame.
    if (in_dl_ && --dl_remaining_ == 0) {
        report_.dl_finished = *in_dl_;
        set_route(*in_dl_, FrameRoute::SlowDecoder);
        ++stats_.dl_decodes;
        in_dl_.reset();
    }
    if (!in_dl_ && !llr_buffer_.empty()) {
        load_dl(llr_buffer_.front());
        llr_buffer_.pop_front();
    }

    if (has_input) {
        const std::int64_t frame = next_frame_++;
        routes_.push_back(FrameRoute::Pending);
        ++stats_.frames_in;
        ++stats_.slots;
        if (!ds_failed) {
            set_route(frame, FrameRoute::FastDecoder);
        } else {
            ++stats_.ds_failures;
            if (!in_dl_) {
                load_dl(frame);
            } else if (static_cast<int>(llr_buffer_.size()) < cfg_.zeta) {
                llr_buffer_.push_back(frame);
            } else {
                report_.overflow = true;
                ++stats_.overflow_count;
                if (cfg_.overflow_policy == OverflowPolicy::DropInProgress) {
                    report_.dropped = *in_dl_;
                    set_route(*in_dl_, FrameRoute::Dropped);
                    if (llr_buffer_.empty()) {
                        load_dl(frame);
                    } else {
                        load_dl(llr_buffer_.front());
                        llr_buffer_.pop_front();
                        llr_buffer_.push_back(frame);
                    }
                } else {
                    report_.dropped = frame;
                    set_route(frame, FrameRoute::Dropped);
                }
            }
        }
    } else {
        ++stats_.drain_slots;
    }

    const int i_zeta = static_cast<int>(llr_buffer_.size());
    const int i_beta = in_dl_ ? dl_remaining_ : 0;
    state_ = {i_zeta, i_beta, cfg_.beta * i_zeta + i_beta};
    report_.state = state_;

    if (has_input && now_ >= warmup_) {
        ++stats_.window_slots;
        ++stats_.state_histogram[static_cast<std::size_t>(state_.x)];
        stats_.window_overflows += report_.overflow ? 1 : 0;
        stats_.window_ds_failures += report_.ds_failed ? 1 : 0;
    }

    release(now_);
    ++now_;
}

void TaSclPipeline::release(std::int64_t now)
{
    report_.released_begin = next_release_;
    while (!routes_.empty() && routes_.front() != FrameRoute::Pending) {
        // Frame k arrives in slot k, so its latency is (now - k + 1) slots.
        const auto latency = static_cast<std::size_t>(now - next_release_ + 1);
        if (stats_.latency_histogram.size() <= latency)
            stats_.latency_histogram.resize(latency + 1, 0);
        ++stats_.latency_histogram[latency];
        routes_.pop_front();
        ++next_release_;
        ++stats_.frames_out;
        --done_waiting_;
    }
    report_.released_end = next_release_;
    stats_.max_output_buffer_depth = std::max(stats_.max_output_buffer_depth, done_waiting_);
}

TraceWriter::TraceWriter(std::ostream& out) : out_(&out)
{
    *out_ << header() << '\n';
}

const char* TraceWriter::header()
{
    return "slot,state_x,i_zeta,i_beta,ds_fail,overflow,frame_out_index";
}

void TraceWriter::write(const SlotReport& r)
{
    const std::int64_t out_index = r.released_end > r.released_begin ? r.released_end - 1 : -1;
    *out_ << r.slot << ',' << r.state.x << ',' << r.state.i_zeta << ',' << r.state.i_beta << ','
          << (r.has_input ? (r.ds_failed ? 1 : 0) : -1) << ',' << (r.overflow ? 1 : 0) << ',' << out_index << '\n';
}

PipelineStats pipeline_run(const PolarCode& code, const TaSclConfig& cfg, FrameSource& source, std::int64_t slots,
                           const std::function<void(const DecodedFrame&)>& sink, const PipelineRunOptions& options)
{
    cfg.validate();
    if (slots < 0)
        throw std::invalid_argument("slot count must be non-negative");
    TaSclPipeline pipe(cfg, options.warmup_slots);
    ListDecoder fast(code, cfg.l_small, options.node);
    ListDecoder slow(code, cfg.l_large, options.node);
    std::optional<TraceWriter> trace;
    if (options.trace)
        trace.emplace(*options.trace);

    std::unordered_map<std::int64_t, LlrFrame> llr_store;  // frames waiting for or inside D_l
    std::deque<DecodedFrame> reorder;                      // frames from the next release on
    std::int64_t base = 0;
    std::int64_t detected_errors = 0;

    auto handle = [&](const SlotReport& r) {
        if (r.dl_finished) {
            const std::int64_t f = *r.dl_finished;
            auto node = llr_store.extract(f);
            DecodeOutcome res = slow.decode(node.mapped());
            if (!res.crc_pass)
                ++pipe.stats().dl_failures;
            reorder[static_cast<std::size_t>(f - base)] = {f, FrameRoute::SlowDecoder, res.crc_pass,
                                                            std::move(res.selected)};
        }
        if (r.dropped) {
            const std::int64_t f = *r.dropped;
            llr_store.erase(f);
            reorder[static_cast<std::size_t>(f - base)] = {f, FrameRoute::Dropped, false, {}};
        }
        for (std::int64_t f = r.released_begin; f < r.released_end; ++f) {
            if (!reorder.front().crc_pass)
                ++detected_errors;
            if (sink)
                sink(reorder.front());
            reorder.pop_front();
            ++base;
        }
        if (trace)
            trace->write(r);
    };

    for (std::int64_t slot = 0; slot < slots; ++slot) {
        auto frame = source.next();
        if (!frame)
            break;
        const std::int64_t index = base + static_cast<std::int64_t>(reorder.size());
        DecodeOutcome first = fast.decode(*frame);
        const bool failed = !first.crc_pass;
        reorder.push_back({index, failed ? FrameRoute::Pending : FrameRoute::FastDecoder, first.crc_pass,
                           failed ? Bits{} : std::move(first.selected)});
        if (failed)
            llr_store.emplace(index, std::move(*frame));
        handle(pipe.step(failed));
    }
    while (pipe.drain_step())
        handle(pipe.last_report());

    PipelineStats stats = pipe.stats();
    stats.frame_errors = detected_errors;
    return stats;
}

PipelineStats pipeline_run_synthetic(const TaSclConfig& cfg, double eps_s, double eps_l, std::int64_t slots,
                                     std::uint64_t seed, std::int64_t warmup_slots, std::ostream* trace)
{
    if (!(eps_s >= 0.0 && eps_s <= 1.0) || !(eps_l >= 0.0 && eps_l <= 1.0))
        throw std::invalid_argument("failure probabilities must lie in [0, 1]");
    if (slots < 0)
        throw std::invalid_argument("slot count must be non-negative");
    TaSclPipeline pipe(cfg, warmup_slots);
    std::optional<TraceWriter> writer;
    if (trace)
        writer.emplace(*trace);

    // Separate streams keep the D_s failure pattern independent of eps_l.
    std::seed_seq ds_seq{seed, std::uint64_t{0x5d5}};
    std::seed_seq dl_seq{seed, std::uint64_t{0xd1}};
    std::mt19937_64 ds_rng(ds_seq);
    std::mt19937_64 dl_rng(dl_seq);
    std::bernoulli_distribution ds_fail(eps_s);
    std::bernoulli_distribution dl_fail(eps_l);

    std::int64_t errors = 0;
    std::int64_t dl_failures = 0;
    auto handle = [&](const SlotReport& r) {
        if (r.dl_finished && dl_fail(dl_rng)) {
            ++errors;
            ++dl_failures;
        }
        if (r.dropped)
            ++errors;
        if (writer)
            writer->write(r);
    };
    for (std::int64_t slot = 0; slot < slots; ++slot)
        handle(pipe.step(ds_fail(ds_rng)));
    while (pipe.drain_step())
        handle(pipe.last_report());

    PipelineStats stats = pipe.stats();
    stats.frame_errors = errors;
    stats.dl_failures = dl_failures;
    return stats;
}

}  // namespace tascl
