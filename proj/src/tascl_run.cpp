#include "tascl/harness.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace tascl {

namespace {

struct InFlight {
    Bits message;
    bool reference_error = false;
};

// Channel frames for the pipeline. Every frame is also decoded standalone by
// SCL(l_large) so the reference BLER is measured on exactly the same frames.
class ChannelSource final : public FrameSource {
public:
    ChannelSource(const PolarCode& code, const RunSpec& spec, const ChannelSpec& channel,
                  const std::int64_t& pipeline_errors)
        : code_(code), spec_(spec), channel_(channel), reference_(code, spec.decoder.tascl.l_large, spec.decoder.node),
          pipeline_errors_(pipeline_errors)
    {
    }

    std::optional<LlrFrame> next() override
    {
        if (next_ >= spec_.max_frames || (spec_.min_errors > 0 && pipeline_errors_ >= spec_.min_errors))
            return std::nullopt;
        TrialFrame trial = make_trial(code_, channel_, spec_.seed, static_cast<std::uint64_t>(next_++));
        const bool ref_error = is_block_error(trial.message, reference_.decode(trial.llr).selected);
        inflight.push_back({std::move(trial.message), ref_error});
        return std::move(trial.llr);
    }

    std::deque<InFlight> inflight;

private:
    const PolarCode& code_;
    const RunSpec& spec_;
    const ChannelSpec& channel_;
    ListDecoder reference_;
    const std::int64_t& pipeline_errors_;
    std::int64_t next_ = 0;
};

double model_overflow(const TaSclConfig& cfg, double eps_s)
{
    const auto model = build_matrix(cfg.beta, cfg.zeta, eps_s, cfg.overflow_policy);
    return overflow_probability(model, steady_state(model));
}

}  // namespace

bool TaSclReport::loss_agrees(double k) const
{
    if (!std::isfinite(loss_sim_pct) || !std::isfinite(loss_model_pct))
        return false;
    return std::abs(loss_sim_pct - loss_model_pct) <= k * loss_sigma_pct;
}

bool TaSclReport::sandwich_holds(double k) const
{
    const double model_sigma = eps_l > 0 ? loss_sigma_pct * eps_l / 100.0 : difference_sigma;
    return eps_dta >= eps_l - k * difference_sigma && eps_dta <= eps_l + overflow_model + k * model_sigma;
}

TaSclReport run_tascl_end_to_end(const PolarCode& code, const RunSpec& spec, const ChannelSpec& channel,
                                 std::ostream* trace)
{
    spec.validate();
    const TaSclConfig& cfg = spec.decoder.tascl;

    TaSclReport rep;
    std::int64_t pipeline_errors = 0;
    ChannelSource source(code, spec, channel, pipeline_errors);

    auto sink = [&](const DecodedFrame& f) {
        const InFlight& sent = source.inflight.front();
        const bool error = f.route == FrameRoute::Dropped || is_block_error(sent.message, f.info_bits);
        pipeline_errors += error ? 1 : 0;
        rep.reference_errors += sent.reference_error ? 1 : 0;
        rep.pipeline_only_errors += (error && !sent.reference_error) ? 1 : 0;
        rep.reference_only_errors += (!error && sent.reference_error) ? 1 : 0;
        rep.fast_undetected_errors += (error && f.route == FrameRoute::FastDecoder) ? 1 : 0;
        source.inflight.pop_front();
    };

    PipelineRunOptions options;
    options.warmup_slots = spec.warmup_slots;
    options.trace = trace;
    options.node = spec.decoder.node;
    rep.pipeline = pipeline_run(code, cfg, source, spec.max_frames, sink, options);
    rep.pipeline.frame_errors = pipeline_errors;
    rep.pipeline_errors = pipeline_errors;
    rep.frames = rep.pipeline.frames_in;
    rep.ds_failures = rep.pipeline.ds_failures;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    BlerPoint& p = rep.point;
    p.snr_db = channel.snr_db;
    p.frames = rep.frames;
    p.block_errors = pipeline_errors;
    p.ci95 = wilson_interval(p.block_errors, p.frames);
    if (rep.frames == 0) {
        rep.eps_s = rep.eps_l = rep.eps_dta = rep.overflow_emp = rep.overflow_model = nan;
        rep.loss_sim_pct = rep.loss_model_pct = rep.loss_sigma_pct = nan;
        rep.wide_ci = true;
        return rep;
    }

    const double n = static_cast<double>(rep.frames);
    rep.eps_s = static_cast<double>(rep.ds_failures) / n;
    rep.eps_l = static_cast<double>(rep.reference_errors) / n;
    rep.eps_dta = static_cast<double>(pipeline_errors) / n;
    rep.eps_l_routed = rep.pipeline.dl_decodes > 0 ? static_cast<double>(rep.pipeline.dl_failures) /
                                                         static_cast<double>(rep.pipeline.dl_decodes)
                                                   : nan;
    rep.overflow_emp = rep.pipeline.overflow_rate();
    rep.overflow_model = model_overflow(cfg, rep.eps_s);
    rep.model = bler_bounds(rep.overflow_model, rep.eps_l);

    const double window = static_cast<double>(std::max<std::int64_t>(rep.pipeline.window_slots, 1));
    rep.overflow_sigma = std::sqrt(rep.overflow_model * (1.0 - rep.overflow_model) / window);
    rep.difference_sigma =
        std::sqrt(static_cast<double>(rep.pipeline_only_errors + rep.reference_only_errors)) / n;

    // Propagate the sampling error of eps_s through the model.
    const double h = std::min({1e-4, rep.eps_s, 1.0 - rep.eps_s});
    double slope = 0.0;
    if (h > 0)
        slope = (model_overflow(cfg, rep.eps_s + h) - model_overflow(cfg, rep.eps_s - h)) / (2 * h);
    const double model_sigma = std::abs(slope) * std::sqrt(rep.eps_s * (1.0 - rep.eps_s) / n);

    rep.wide_ci = rep.reference_errors < 10;
    if (rep.eps_l > 0) {
        rep.loss_sim_pct = (rep.eps_dta - rep.eps_l) / rep.eps_l * 100.0;
        rep.loss_model_pct = rep.overflow_model / rep.eps_l * 100.0;
        rep.loss_sigma_pct =
            std::sqrt(rep.difference_sigma * rep.difference_sigma + model_sigma * model_sigma) / rep.eps_l * 100.0;
    } else {
        rep.loss_sim_pct = rep.loss_model_pct = rep.loss_sigma_pct = nan;
    }

    p.bler = rep.eps_dta;
    p.eps_s = rep.eps_s;
    p.eps_l = rep.eps_l;
    p.overflow_emp = rep.overflow_emp;
    p.overflow_model = rep.overflow_model;
    p.loss_pct = rep.loss_sim_pct;
    return rep;
}

}  // namespace tascl
