#include "tascl/harness.hpp"

#include <optional>
#include <stdexcept>
#include <thread>

namespace tascl {

std::string describe(const DecoderSpec& spec)
{
    switch (spec.kind) {
    case DecoderKind::SC: return "SC";
    case DecoderKind::SCL: return "SCL(" + std::to_string(spec.list_size) + ")";
    case DecoderKind::ASCL: return "A-SCL(" + std::to_string(spec.l_max) + ")";
    case DecoderKind::TASCL:
        return "TA-SCL(beta=" + std::to_string(spec.tascl.beta) + ",zeta=" + std::to_string(spec.tascl.zeta) +
               ",Ls=" + std::to_string(spec.tascl.l_small) + ",Ll=" + std::to_string(spec.tascl.l_large) + ")";
    }
    return "?";
}

void RunSpec::validate() const
{
    if (max_frames < 0)
        throw std::invalid_argument("max_frames must be non-negative");
    if (min_errors < 0)
        throw std::invalid_argument("min_errors must be non-negative");
    if (workers < 1)
        throw std::invalid_argument("workers must be at least 1");
    if (batch < 1)
        throw std::invalid_argument("batch must be at least 1");
    if (decoder.kind == DecoderKind::SCL && decoder.list_size < 1)
        throw std::invalid_argument("list size must be at least 1");
    if (decoder.kind == DecoderKind::TASCL)
        decoder.tascl.validate();
}

namespace {

struct FrameResult {
    bool error = false;
    int attempts = 0;
    int final_list = 0;
};

// Decoders owned by one worker.
class TrialDecoder {
public:
    TrialDecoder(const PolarCode& code, const DecoderSpec& spec) : kind_(spec.kind)
    {
        if (kind_ == DecoderKind::ASCL)
            ascl_.emplace(code, AsclConfig{spec.l_max}, spec.node);
        else  // SC runs as a one-path list decoder; results are identical to sc_decode
            list_.emplace(code, kind_ == DecoderKind::SC ? 1 : spec.list_size, spec.node);
    }

    FrameResult run(const TrialFrame& trial)
    {
        FrameResult r;
        if (ascl_) {
            const AsclResult res = ascl_->decode(trial.llr);
            r.error = is_block_error(trial.message, res.outcome.selected);
            r.attempts = static_cast<int>(res.attempts.size());
            r.final_list = res.attempts.back();
        } else {
            const DecodeOutcome res = list_->decode(trial.llr);
            r.error = is_block_error(trial.message, res.selected);
            r.attempts = 1;
            r.final_list = list_->list_size();
        }
        return r;
    }

private:
    DecoderKind kind_;
    std::optional<ListDecoder> list_;
    std::optional<AsclDecoder> ascl_;
};

}  // namespace

BlerPoint run_bler(const PolarCode& code, const RunSpec& spec, const ChannelSpec& channel)
{
    spec.validate();
    if (spec.decoder.kind == DecoderKind::TASCL)
        return run_tascl_end_to_end(code, spec, channel).point;

    std::vector<TrialDecoder> decoders;
    for (int w = 0; w < spec.workers; ++w)
        decoders.emplace_back(code, spec.decoder);

    BlerPoint point;
    point.snr_db = channel.snr_db;
    std::int64_t attempts = 0;
    std::int64_t list_total = 0;
    std::vector<FrameResult> results;

    while (point.frames < spec.max_frames && (spec.min_errors == 0 || point.block_errors < spec.min_errors)) {
        const std::int64_t first = point.frames;
        const std::int64_t count = std::min(spec.batch, spec.max_frames - first);
        results.assign(static_cast<std::size_t>(count), {});
        auto work = [&](int w) {
            for (std::int64_t i = w; i < count; i += spec.workers) {
                const TrialFrame trial = make_trial(code, channel, spec.seed, static_cast<std::uint64_t>(first + i));
                results[static_cast<std::size_t>(i)] = decoders[static_cast<std::size_t>(w)].run(trial);
            }
        };
        if (spec.workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            for (int w = 0; w < spec.workers; ++w)
                pool.emplace_back(work, w);
        }
        for (const auto& r : results) {
            point.block_errors += r.error ? 1 : 0;
            attempts += r.attempts;
            list_total += r.final_list;
        }
        point.frames += count;
    }

    if (point.frames > 0) {
        point.bler = static_cast<double>(point.block_errors) / static_cast<double>(point.frames);
        if (spec.decoder.kind == DecoderKind::ASCL) {
            point.avg_attempts = static_cast<double>(attempts) / static_cast<double>(point.frames);
            point.avg_list_size = static_cast<double>(list_total) / static_cast<double>(point.frames);
        }
    }
    point.ci95 = wilson_interval(point.block_errors, point.frames);
    return point;
}

}  // namespace tascl
