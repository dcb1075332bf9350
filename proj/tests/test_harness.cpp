#include "doctest.h"

#include "tascl/csv.hpp"
#include "tascl/harness.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace tascl;

TEST_CASE("noise variance follows the Eb/N0 convention")
{
    const auto code = construct_code(128, 64, 8, 0.0);
    const auto ch = ChannelSpec::for_code(code, 2.0);
    CHECK(ch.rate == 0.5);
    CHECK(ch.noise_sigma() == doctest::Approx(std::sqrt(1.0 / std::pow(10.0, 0.2))));
    const ChannelSpec es{2.0, 0.5, SnrMode::EsN0};
    CHECK(es.noise_sigma() == doctest::Approx(std::sqrt(1.0 / (2.0 * std::pow(10.0, 0.2)))));
    CHECK(ch.llr_scale() == doctest::Approx(2.0 / (ch.noise_sigma() * ch.noise_sigma())));
}

TEST_CASE("empirical noise variance matches sigma^2")
{
    const auto code = construct_code(256, 128, 0, 0.0);
    const auto ch = ChannelSpec::for_code(code, 1.0);
    const double s2 = ch.noise_sigma() * ch.noise_sigma();
    // All-zero message -> all-zero codeword -> y = 1 + n.
    const Bits zero(128, 0);
    double sum = 0, sumsq = 0;
    std::int64_t count = 0;
    for (std::uint64_t f = 0; f < 400; ++f) {
        auto rng = frame_rng(5, f);
        for (double l : transmit(code, zero, ch, rng)) {
            const double n = l / ch.llr_scale() - 1.0;
            sum += n;
            sumsq += n * n;
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    const double var = sumsq / static_cast<double>(count) - mean * mean;
    CHECK(std::abs(mean) < 4 * std::sqrt(s2 / static_cast<double>(count)));
    CHECK(std::abs(var / s2 - 1.0) < 4 * std::sqrt(2.0 / static_cast<double>(count)));
}

TEST_CASE("frames depend only on seed and index")
{
    const auto code = construct_code(64, 32, 8, 0.0);
    const auto ch = ChannelSpec::for_code(code, 1.0);
    const auto a = make_trial(code, ch, 9, 17);
    const auto b = make_trial(code, ch, 9, 17);
    const auto c = make_trial(code, ch, 9, 18);
    const auto d = make_trial(code, ch, 10, 17);
    CHECK(a.message == b.message);
    CHECK(a.llr == b.llr);
    CHECK(a.llr != c.llr);
    CHECK(a.llr != d.llr);
    CHECK(a.message.size() == 24);
}

TEST_CASE("block error compares the message part only")
{
    const Bits msg{1, 0, 1};
    CHECK_FALSE(is_block_error(msg, Bits{1, 0, 1, 0, 0}));
    CHECK_FALSE(is_block_error(msg, Bits{1, 0, 1, 1, 1}));
    CHECK(is_block_error(msg, Bits{1, 1, 1, 0, 0}));
    CHECK(is_block_error(msg, Bits{}));
}

TEST_CASE("Wilson interval")
{
    const auto zero = wilson_interval(0, 100);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi == doctest::Approx(0.0370).epsilon(0.01));
    const auto half = wilson_interval(50, 100);
    CHECK(half.lo == doctest::Approx(0.4038).epsilon(0.001));
    CHECK(half.hi == doctest::Approx(0.5962).epsilon(0.001));
    const auto none = wilson_interval(0, 0);
    CHECK(none.lo == 0.0);
    CHECK(none.hi == 1.0);
}

TEST_CASE("BLER runs do not depend on the worker count")
{
    const auto code = construct_code(64, 32, 8, 0.0);
    const auto ch = ChannelSpec::for_code(code, 1.5);
    RunSpec spec;
    spec.decoder.kind = DecoderKind::SCL;
    spec.decoder.list_size = 4;
    spec.max_frames = 2000;
    spec.min_errors = 0;
    spec.seed = 12;
    const auto one = run_bler(code, spec, ch);
    spec.workers = 3;
    const auto three = run_bler(code, spec, ch);
    CHECK(one.frames == 2000);
    CHECK(one.block_errors == three.block_errors);
    CHECK(one.block_errors > 0);
    CHECK(one.ci95.lo <= one.bler);
    CHECK(one.bler <= one.ci95.hi);
}

TEST_CASE("stopping rule halts at a batch boundary once enough errors are seen")
{
    const auto code = construct_code(64, 32, 8, 0.0);
    const auto ch = ChannelSpec::for_code(code, 0.0);
    RunSpec spec;
    spec.max_frames = 100000;
    spec.min_errors = 20;
    spec.batch = 64;
    const auto p = run_bler(code, spec, ch);
    CHECK(p.block_errors >= 20);
    CHECK(p.frames % 64 == 0);
    CHECK(p.frames < 100000);
}

TEST_CASE("list decoding helps and SC equals SCL(1)")
{
    const auto code = construct_code(128, 64, 8, 0.0);
    const auto ch = ChannelSpec::for_code(code, 1.5);
    RunSpec spec;
    spec.max_frames = 3000;
    spec.min_errors = 0;
    spec.decoder.kind = DecoderKind::SC;
    const auto sc = run_bler(code, spec, ch);
    spec.decoder.kind = DecoderKind::SCL;
    spec.decoder.list_size = 1;
    const auto scl1 = run_bler(code, spec, ch);
    spec.decoder.list_size = 8;
    const auto scl8 = run_bler(code, spec, ch);
    CHECK(sc.block_errors == scl1.block_errors);
    CHECK(scl8.bler < sc.bler);
}

TEST_CASE("A-SCL reports attempts and list sizes")
{
    const auto code = construct_code(128, 64, 8, 0.0);
    const auto ch = ChannelSpec::for_code(code, 2.0);
    RunSpec spec;
    spec.max_frames = 1000;
    spec.min_errors = 0;
    spec.decoder.kind = DecoderKind::ASCL;
    spec.decoder.l_max = 8;
    const auto p = run_bler(code, spec, ch);
    CHECK(p.avg_attempts >= 1.0);
    CHECK(p.avg_attempts <= 4.0);
    CHECK(p.avg_list_size >= 1.0);
    CHECK(p.avg_list_size <= 8.0);
    CHECK(std::isnan(p.eps_s));
}

TEST_CASE("two-stage end-to-end run")
{
    const auto code = construct_code(128, 64, 8, 0.0);
    const auto ch = ChannelSpec::for_code(code, 1.5);
    RunSpec spec;
    spec.decoder.kind = DecoderKind::TASCL;
    spec.decoder.tascl.beta = 3;
    spec.decoder.tascl.zeta = 1;
    spec.decoder.tascl.l_large = 8;
    spec.max_frames = 3000;
    spec.min_errors = 0;
    std::ostringstream trace;
    const auto rep = run_tascl_end_to_end(code, spec, ch, &trace);
    CHECK(rep.frames == 3000);
    CHECK(rep.eps_s > 0.0);
    CHECK(rep.eps_dta >= rep.eps_l - 3 * rep.difference_sigma);
    CHECK(rep.pipeline.frames_out == 3000);
    CHECK(rep.overflow_model > 0.0);
    CHECK(rep.sandwich_holds());
    CHECK(rep.point.bler == rep.eps_dta);
    CHECK(trace.str().rfind(TraceWriter::header(), 0) == 0);

    // run_bler on the same spec gives the same point.
    const auto p = run_bler(code, spec, ch);
    CHECK(p.block_errors == rep.pipeline_errors);

    // The reference figure is the standalone SCL(8) BLER on the same frames.
    RunSpec ref = spec;
    ref.decoder.kind = DecoderKind::SCL;
    ref.decoder.list_size = 8;
    CHECK(run_bler(code, ref, ch).block_errors == rep.reference_errors);
}

TEST_CASE("without overflows the only extra errors come from D_s false CRC passes")
{
    const auto code = construct_code(128, 64, 8, 0.0);
    const auto ch = ChannelSpec::for_code(code, 1.0);
    RunSpec spec;
    spec.decoder.kind = DecoderKind::TASCL;
    spec.decoder.tascl.beta = 2;
    spec.decoder.tascl.zeta = 1000;
    spec.decoder.tascl.l_large = 8;
    spec.max_frames = 3000;
    spec.min_errors = 0;
    const auto rep = run_tascl_end_to_end(code, spec, ch);
    REQUIRE(rep.pipeline.overflow_count == 0);
    CHECK(rep.pipeline_only_errors <= rep.fast_undetected_errors);
    CHECK(rep.pipeline_errors == rep.reference_errors + rep.pipeline_only_errors - rep.reference_only_errors);
}

TEST_CASE("CSV formatting")
{
    CHECK(std::string(bler_csv_header()) ==
          "ebn0_db,frames,errors,bler,ci_lo,ci_hi,eps_s,eps_l,overflow_emp,overflow_model,loss_pct");
    BlerPoint p;
    p.snr_db = 1.5;
    p.frames = 10;
    p.block_errors = 1;
    p.bler = 0.1;
    const auto fields = bler_csv_fields(p);
    REQUIRE(fields.size() == 11);
    CHECK(fields[0] == "1.5");
    CHECK(fields[1] == "10");
    CHECK(fields[3] == "0.1");
    CHECK(fields[6] == "nan");
    CHECK(format_number(0.1) == "0.1");
    CHECK(parse_double("0.25") == 0.25);
    CHECK(parse_double_list("1,2.5,3") == std::vector<double>{1, 2.5, 3});
    CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double_list(""), std::invalid_argument);
}

TEST_CASE("run spec validation")
{
    const auto code = construct_code(16, 8, 0, 0.0);
    const auto ch = ChannelSpec::for_code(code, 1.0);
    RunSpec spec;
    spec.workers = 0;
    CHECK_THROWS_AS(run_bler(code, spec, ch), std::invalid_argument);
    spec.workers = 1;
    spec.max_frames = -1;
    CHECK_THROWS_AS(run_bler(code, spec, ch), std::invalid_argument);
    spec.max_frames = 0;
    const auto empty = run_bler(code, spec, ch);
    CHECK(empty.frames == 0);
}
