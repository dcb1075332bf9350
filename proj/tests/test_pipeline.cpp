#include "doctest.h"
#include "oracles.hpp"

#include "tascl/adaptive.hpp"
#include "tascl/harness.hpp"

#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace tascl;

namespace {

TaSclConfig config(int beta, int zeta, OverflowPolicy policy = OverflowPolicy::DropInProgress)
{
    TaSclConfig cfg;
    cfg.beta = beta;
    cfg.zeta = zeta;
    cfg.overflow_policy = policy;
    return cfg;
}

struct Run {
    std::vector<int> states;
    std::vector<bool> overflows;
    std::vector<std::int64_t> released;  // frame indices in release order
    std::vector<std::int64_t> release_slot;
    std::vector<std::int64_t> dropped;
    int drain_slots = 0;
    PipelineStats stats;
};

Run run_pattern(const TaSclConfig& cfg, const std::vector<bool>& fails)
{
    TaSclPipeline pipe(cfg);
    Run run;
    auto record = [&](const SlotReport& r) {
        for (auto f = r.released_begin; f < r.released_end; ++f) {
            run.released.push_back(f);
            run.release_slot.push_back(r.slot);
        }
        if (r.dropped)
            run.dropped.push_back(*r.dropped);
    };
    for (bool f : fails) {
        const auto& r = pipe.step(f);
        run.states.push_back(r.state.x);
        run.overflows.push_back(r.overflow);
        record(r);
    }
    while (pipe.drain_step()) {
        ++run.drain_slots;
        record(pipe.last_report());
    }
    run.stats = pipe.stats();
    return run;
}

std::vector<bool> pattern(int slots, std::initializer_list<int> failing)
{
    std::vector<bool> v(static_cast<std::size_t>(slots), false);
    for (int s : failing)
        v[static_cast<std::size_t>(s)] = true;
    return v;
}

class VectorSource final : public FrameSource {
public:
    explicit VectorSource(std::vector<LlrFrame> frames) : frames_(std::move(frames)) {}
    std::optional<LlrFrame> next() override
    {
        if (pos_ >= frames_.size())
            return std::nullopt;
        return frames_[pos_++];
    }

private:
    std::vector<LlrFrame> frames_;
    std::size_t pos_ = 0;
};

}  // namespace

TEST_CASE("no D_s failures keeps the pipeline empty")
{
    const auto run = run_pattern(config(3, 1), std::vector<bool>(50, false));
    CHECK(std::all_of(run.states.begin(), run.states.end(), [](int x) { return x == 0; }));
    CHECK(run.stats.overflow_count == 0);
    CHECK(run.drain_slots == 0);
    CHECK(run.stats.frames_out == 50);
    REQUIRE(run.stats.latency_histogram.size() == 2);
    CHECK(run.stats.latency_histogram[1] == 50);
}

TEST_CASE("failures on frames 1, 3, 4 fill the buffer without overflowing")
{
    const auto run = run_pattern(config(3, 1), pattern(12, {1, 3, 4}));
    CHECK(run.states == std::vector<int>{0, 3, 2, 4, 6, 5, 4, 3, 2, 1, 0, 0});
    CHECK(run.stats.overflow_count == 0);
    CHECK(run.dropped.empty());
}

TEST_CASE("failures on frames 1, 3, 4, 6 overflow once at slot 6")
{
    const auto run = run_pattern(config(3, 1), pattern(12, {1, 3, 4, 6}));
    CHECK(run.states == std::vector<int>{0, 3, 2, 4, 6, 5, 6, 5, 4, 3, 2, 1});
    CHECK(run.stats.overflow_count == 1);
    CHECK(run.overflows[6]);
    CHECK(run.dropped == std::vector<std::int64_t>{3});
    CHECK(run.drain_slots == 1);

    std::vector<std::int64_t> expected(12);
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(run.released == expected);
    CHECK(run.release_slot == std::vector<std::int64_t>{0, 4, 4, 6, 9, 9, 12, 12, 12, 12, 12, 12});
}

TEST_CASE("same pattern under drop-newest discards frame 6")
{
    const auto run = run_pattern(config(3, 1, OverflowPolicy::DropNewest), pattern(12, {1, 3, 4, 6}));
    CHECK(run.dropped == std::vector<std::int64_t>{6});
    CHECK(run.states[6] == 4);
    CHECK(run.stats.overflow_count == 1);
}

TEST_CASE("random failure patterns follow next_state exactly")
{
    std::mt19937_64 rng(21);
    for (int beta = 1; beta <= 4; ++beta)
        for (int zeta : {0, 1, 2, 6})
            for (auto policy : {OverflowPolicy::DropInProgress, OverflowPolicy::DropNewest}) {
                const auto cfg = config(beta, zeta, policy);
                std::bernoulli_distribution fail(0.35);
                std::vector<bool> fails(2000);
                for (auto&& f : fails)
                    f = fail(rng);
                const auto run = run_pattern(cfg, fails);

                int x = 0;
                for (std::size_t t = 0; t < fails.size(); ++t) {
                    bool overflow = false;
                    const int next = next_state(x, fails[t], cfg, &overflow);
                    REQUIRE(run.states[t] == next);
                    REQUIRE(run.overflows[t] == overflow);
                    REQUIRE(overflow == (fails[t] && x > beta * zeta + 1));
                    x = next;
                }
                if (beta == 1)
                    CHECK(run.stats.overflow_count == 0);

                // Constant input rate and in-order output.
                CHECK(run.stats.frames_in == static_cast<std::int64_t>(fails.size()));
                CHECK(run.stats.slots == static_cast<std::int64_t>(fails.size()));
                REQUIRE(run.released.size() == fails.size());
                for (std::size_t i = 0; i < run.released.size(); ++i)
                    REQUIRE(run.released[i] == static_cast<std::int64_t>(i));
                CHECK(std::is_sorted(run.release_slot.begin(), run.release_slot.end()));
                const auto latencies = std::accumulate(run.stats.latency_histogram.begin(),
                                                       run.stats.latency_histogram.end(), std::int64_t{0});
                CHECK(latencies == run.stats.frames_out);
                CHECK(std::accumulate(run.stats.state_histogram.begin(), run.stats.state_histogram.end(),
                                      std::int64_t{0}) == run.stats.slots);
                CHECK(run.stats.dl_decodes + static_cast<std::int64_t>(run.dropped.size()) ==
                      run.stats.ds_failures);
            }
}

TEST_CASE("synthetic pipeline with no failures")
{
    const auto stats = pipeline_run_synthetic(config(3, 1), 0.0, 0.0, 1000, 1);
    CHECK(stats.overflow_count == 0);
    CHECK(stats.frame_errors == 0);
    CHECK(stats.state_histogram[0] == 1000);
}

TEST_CASE("synthetic pipeline with every D_s failing and no buffer")
{
    SUBCASE("drop-newest keeps every beta-th frame")
    {
        std::ostringstream trace;
        const auto stats =
            pipeline_run_synthetic(config(3, 0, OverflowPolicy::DropNewest), 1.0, 0.0, 9, 5, 0, &trace);
        CHECK(stats.dl_decodes == 3);
        CHECK(stats.overflow_count == 6);
        CHECK(stats.frame_errors == 6);
    }
    SUBCASE("drop-in-progress keeps only the last frame")
    {
        const auto stats = pipeline_run_synthetic(config(3, 0), 1.0, 0.0, 10, 5);
        CHECK(stats.overflow_count == 9);
        CHECK(stats.dl_decodes == 1);
        CHECK(stats.frame_errors == 9);
        CHECK(stats.drain_slots == 3);
    }
}

TEST_CASE("synthetic runs are reproducible and the trace is well formed")
{
    std::ostringstream a, b, c;
    const auto s1 = pipeline_run_synthetic(config(2, 1), 0.3, 0.1, 5000, 42, 0, &a);
    const auto s2 = pipeline_run_synthetic(config(2, 1), 0.3, 0.1, 5000, 42, 0, &b);
    pipeline_run_synthetic(config(2, 1), 0.3, 0.1, 5000, 43, 0, &c);
    CHECK(a.str() == b.str());
    CHECK(a.str() != c.str());
    CHECK(s1.frame_errors == s2.frame_errors);

    std::istringstream lines(a.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == TraceWriter::header());
    std::int64_t rows = 0;
    while (std::getline(lines, line))
        ++rows;
    CHECK(rows == s1.slots + s1.drain_slots);
}

TEST_CASE("eps_l does not change the overflow pattern")
{
    const auto a = pipeline_run_synthetic(config(3, 1), 0.2, 0.0, 20000, 9);
    const auto b = pipeline_run_synthetic(config(3, 1), 0.2, 0.5, 20000, 9);
    CHECK(a.overflow_count == b.overflow_count);
    CHECK(a.state_histogram == b.state_histogram);
    CHECK(b.frame_errors > a.frame_errors);
}

TEST_CASE("warm-up slots are excluded from the window")
{
    const auto stats = pipeline_run_synthetic(config(3, 1), 0.3, 0.0, 3000, 4, 1000);
    CHECK(stats.window_slots == 2000);
    CHECK(std::accumulate(stats.state_histogram.begin(), stats.state_histogram.end(), std::int64_t{0}) == 2000);
    CHECK(stats.window_overflows <= stats.overflow_count);
}

TEST_CASE("pipeline invariants hold with real decoders")
{
    const auto code = construct_code(64, 32, 8, 1.0);
    const auto channel = ChannelSpec::for_code(code, 1.0);
    std::vector<LlrFrame> frames;
    std::vector<Bits> messages;
    for (std::uint64_t f = 0; f < 600; ++f) {
        auto trial = make_trial(code, channel, 77, f);
        frames.push_back(std::move(trial.llr));
        messages.push_back(std::move(trial.message));
    }
    TaSclConfig cfg = config(3, 1);
    cfg.l_large = 4;
    VectorSource source(frames);
    std::vector<DecodedFrame> out;
    std::ostringstream trace;
    PipelineRunOptions options;
    options.trace = &trace;
    const auto stats = pipeline_run(code, cfg, source, 1000, [&](const DecodedFrame& f) { out.push_back(f); }, options);

    CHECK(stats.frames_in == 600);
    REQUIRE(out.size() == 600);
    std::int64_t undetected = 0;
    std::set<FrameRoute> routes;
    for (std::size_t i = 0; i < out.size(); ++i) {
        REQUIRE(out[i].index == static_cast<std::int64_t>(i));
        routes.insert(out[i].route);
        if (out[i].route == FrameRoute::Dropped)
            CHECK(out[i].info_bits.empty());
        else
            CHECK(out[i].info_bits.size() == 32);
        if (out[i].route == FrameRoute::SlowDecoder) {
            const auto direct = scl_decode(code, frames[i], 4);
            CHECK(direct.selected == out[i].info_bits);
        }
        if (out[i].crc_pass && is_block_error(messages[i], out[i].info_bits))
            ++undetected;
    }
    CHECK(routes.count(FrameRoute::FastDecoder) == 1);
    CHECK(routes.count(FrameRoute::SlowDecoder) == 1);
    CHECK(stats.ds_failures > 0);
    CHECK(stats.frame_errors ==
          std::count_if(out.begin(), out.end(), [](const DecodedFrame& f) { return !f.crc_pass; }));
    CHECK(undetected <= 5);
    const std::string text = trace.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + stats.slots + stats.drain_slots);
}

TEST_CASE("pipeline argument validation")
{
    CHECK_THROWS_AS(TaSclPipeline(config(0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(TaSclPipeline(config(2, 1), -1), std::invalid_argument);
    CHECK_THROWS_AS(pipeline_run_synthetic(config(2, 1), 1.5, 0.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(pipeline_run_synthetic(config(2, 1), 0.1, 0.0, -1, 1), std::invalid_argument);
}
