#include "cli.hpp"

#include "tascl/csv.hpp"
#include "tascl/harness.hpp"
#include "tascl/markov.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

namespace tascl {

namespace {

struct CodeOptions {
    std::string code_file;
    int n = 0;
    int k = 0;
    int r = 0;
    std::string design_snr = "0";
    std::string crc_poly;
};

struct TaOptions {
    int beta = 3;
    int zeta = 1;
    int l_small = 1;
    int l_large = 32;
    std::string policy = "drop-in-progress";
};

struct SimOptions {
    std::string snr;
    std::int64_t max_frames = 10000;
    std::int64_t min_errors = 100;
    std::uint64_t seed = 1;
    int workers = 1;
    std::int64_t warmup_slots = 0;
    std::string decoder = "scl";
    int list_size = 8;
    int l_max = 32;
    std::string trace;
};

struct Options {
    CodeOptions code;
    TaOptions ta;
    SimOptions sim;
    std::string out;
    // model / validate
    std::string eps_s;
    std::string eps_l = "0";
    std::int64_t slots = 10'000'000;
    std::int64_t validate_warmup = 1000;
};

void add_code_flags(CLI::App& sub, CodeOptions& c, bool allow_file)
{
    auto* n = sub.add_option("--n", c.n, "code length (power of two)");
    auto* k = sub.add_option("--k", c.k, "information bits including CRC");
    sub.add_option("--r", c.r, "CRC width")->capture_default_str();
    sub.add_option("--design-snr", c.design_snr, "construction SNR in dB")->capture_default_str();
    sub.add_option("--crc-poly", c.crc_poly, "CRC generator without the leading term, e.g. 0x9B");
    if (allow_file) {
        auto* file = sub.add_option("--code", c.code_file, "code file written by construct");
        file->excludes(n)->excludes(k);
    } else {
        n->required();
        k->required();
    }
}

void add_ta_flags(CLI::App& sub, TaOptions& t)
{
    sub.add_option("--beta", t.beta, "speed gain t_l / t_s")->capture_default_str();
    sub.add_option("--zeta", t.zeta, "LLR buffer size in codewords")->capture_default_str();
    sub.add_option("--overflow-policy", t.policy, "drop-in-progress or drop-newest")->capture_default_str();
}

void add_sim_flags(CLI::App& sub, SimOptions& s)
{
    sub.add_option("--snr", s.snr, "comma separated Eb/N0 points in dB")->required();
    sub.add_option("--max-frames", s.max_frames, "frames per point")->capture_default_str();
    sub.add_option("--min-errors", s.min_errors, "stop a point after this many errors (0: never)")
        ->capture_default_str();
    sub.add_option("--seed", s.seed, "base seed; frame i uses a stream derived from (seed, i)")->capture_default_str();
    sub.add_option("--workers", s.workers, "parallel trial workers")->capture_default_str();
}

PolarCode make_code(const CodeOptions& c)
{
    if (!c.code_file.empty())
        return load_code(c.code_file);
    if (c.n == 0 && c.k == 0)
        throw std::invalid_argument("give either --code or --n and --k");
    const double snr = parse_double(c.design_snr);
    if (c.crc_poly.empty())
        return construct_code(c.n, c.k, c.r, snr);
    const std::uint64_t poly = std::stoull(c.crc_poly, nullptr, 0);
    return construct_code(c.n, c.k, CrcSpec(c.r, poly), snr);
}

TaSclConfig make_config(const TaOptions& t)
{
    TaSclConfig cfg;
    cfg.beta = t.beta;
    cfg.zeta = t.zeta;
    cfg.l_small = t.l_small;
    cfg.l_large = t.l_large;
    cfg.overflow_policy = parse_overflow_policy(t.policy);
    cfg.validate();
    return cfg;
}

DecoderKind parse_decoder(const std::string& name)
{
    if (name == "sc")
        return DecoderKind::SC;
    if (name == "scl")
        return DecoderKind::SCL;
    if (name == "ascl")
        return DecoderKind::ASCL;
    if (name == "tascl")
        return DecoderKind::TASCL;
    throw std::invalid_argument("unknown decoder '" + name + "' (expected sc, scl, ascl or tascl)");
}

// Output stream: --out, else $TASCL_OUT_DIR/<default_name>, else `fallback`.
class Output {
public:
    Output(const std::string& path, const char* default_name, std::ostream& fallback) : stream_(&fallback)
    {
        std::filesystem::path target = path;
        if (target.empty()) {
            if (const char* dir = std::getenv("TASCL_OUT_DIR"); dir && *dir)
                target = std::filesystem::path(dir) / default_name;
        }
        if (!target.empty()) {
            if (target.has_parent_path())
                std::filesystem::create_directories(target.parent_path());
            file_ = std::make_unique<std::ofstream>(target);
            if (!*file_)
                throw std::runtime_error("cannot open " + target.string() + " for writing");
            stream_ = file_.get();
            path_ = target.string();
        }
    }
    std::ostream& stream() { return *stream_; }
    const std::string& path() const { return path_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
    std::string path_;
};

int cmd_construct(const Options& o, std::ostream& out, std::ostream& err)
{
    const PolarCode code = make_code(o.code);
    Output dest(o.out, "code.txt", out);
    write_code(dest.stream(), code);
    if (!dest.path().empty())
        err << "wrote {" << code.length() << ", " << code.info_length() << ", " << code.crc_width() << "} code to "
            << dest.path() << '\n';
    return 0;
}

int cmd_simulate(const Options& o, DecoderKind kind, std::ostream& out, std::ostream& err)
{
    const std::vector<double> snrs = parse_double_list(o.sim.snr);
    const PolarCode code = make_code(o.code);

    RunSpec spec;
    spec.decoder.kind = kind;
    spec.decoder.list_size = o.sim.list_size;
    spec.decoder.l_max = o.sim.l_max;
    if (kind == DecoderKind::TASCL)
        spec.decoder.tascl = make_config(o.ta);
    spec.max_frames = o.sim.max_frames;
    spec.min_errors = o.sim.min_errors;
    spec.seed = o.sim.seed;
    spec.workers = o.sim.workers;
    spec.warmup_slots = o.sim.warmup_slots;
    spec.validate();

    if (!o.sim.trace.empty() && snrs.size() != 1)
        throw std::invalid_argument("--trace needs a single --snr point");
    std::ofstream trace;
    if (!o.sim.trace.empty()) {
        trace.open(o.sim.trace);
        if (!trace)
            throw std::runtime_error("cannot open " + o.sim.trace + " for writing");
    }

    Output dest(o.out, kind == DecoderKind::TASCL ? "tascl.csv" : "bler.csv", out);
    dest.stream() << bler_csv_header() << '\n';
    if (spec.max_frames == 0)
        return 0;

    for (double snr : snrs) {
        const auto channel = ChannelSpec::for_code(code, snr);
        BlerPoint p;
        if (kind == DecoderKind::TASCL) {
            const auto rep = run_tascl_end_to_end(code, spec, channel, trace.is_open() ? &trace : nullptr);
            p = rep.point;
            err << describe(spec.decoder) << " snr=" << format_number(snr) << " frames=" << p.frames
                << " bler=" << format_number(p.bler) << " eps_s=" << format_number(rep.eps_s)
                << " eps_l=" << format_number(rep.eps_l) << " overflow=" << format_number(rep.overflow_emp)
                << " model=" << format_number(rep.overflow_model) << (rep.wide_ci ? " (wide CI)" : "") << '\n';
        } else {
            p = run_bler(code, spec, channel);
            err << describe(spec.decoder) << " snr=" << format_number(snr) << " frames=" << p.frames
                << " errors=" << p.block_errors << " bler=" << format_number(p.bler) << '\n';
        }
        write_csv_row(dest.stream(), bler_csv_fields(p));
    }
    return 0;
}

int cmd_model(const Options& o, std::ostream& out)
{
    const std::vector<double> grid = parse_double_list(o.eps_s);
    const double eps_l = parse_double(o.eps_l);
    const TaSclConfig cfg = make_config(o.ta);
    Output dest(o.out, "model.csv", out);
    dest.stream() << "beta,zeta,eps_s,p_overflow,bler_lower,bler_upper\n";
    for (double e : grid) {
        const auto model = build_matrix(cfg.beta, cfg.zeta, e, cfg.overflow_policy);
        const double p = overflow_probability(model, steady_state(model));
        const auto bounds = bler_bounds(p, eps_l);
        write_csv_row(dest.stream(), {format_number(std::int64_t{cfg.beta}), format_number(std::int64_t{cfg.zeta}),
                                      format_number(e), format_number(p), format_number(bounds.bler_lower),
                                      format_number(bounds.bler_upper)});
    }
    return 0;
}

int cmd_validate(const Options& o, std::ostream& out)
{
    const double eps = parse_double(o.eps_s);
    const TaSclConfig cfg = make_config(o.ta);
    if (o.slots <= o.validate_warmup)
        throw std::invalid_argument("--slots must exceed --warmup-slots");

    const auto model = build_matrix(cfg.beta, cfg.zeta, eps, cfg.overflow_policy);
    const double p = overflow_probability(model, steady_state(model));
    const auto stats = pipeline_run_synthetic(cfg, eps, 0.0, o.slots, o.sim.seed, o.validate_warmup);
    const double emp = stats.overflow_rate();
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(stats.window_slots));
    const double distance = emp == p ? 0.0 : std::abs(emp - p) / sigma;

    out << "beta=" << cfg.beta << " zeta=" << cfg.zeta << " eps_s=" << format_number(eps) << " slots=" << o.slots
        << " seed=" << o.sim.seed << '\n';
    out << "model     p_overflow=" << format_number(p) << '\n';
    out << "simulated p_overflow=" << format_number(emp) << " (" << stats.window_overflows << '/'
        << stats.window_slots << ")\n";
    out << "distance  " << format_number(distance) << " sigma\n";
    out << (distance <= 3.0 ? "PASS" : "FAIL") << '\n';
    return 0;
}


// Reads "key = value" lines into flags placed ahead of the command line, so
// explicit flags win. Keys are flag names without the leading dashes.
std::vector<std::string> expand_config(const CLI::App& app, const std::vector<std::string>& args)
{
    if (args.empty())
        return args;
    std::string path;
    std::vector<std::string> rest;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[++i];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
        else
            rest.push_back(args[i]);
    }
    if (path.empty())
        return args;
    const CLI::App* sub = app.get_subcommand_no_throw(args[0]);
    if (!sub)
        return args;

    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read config file " + path);
    std::vector<std::string> out{args[0]};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(number) + ": expected key = value");
        auto trim = [](std::string t) {
            const auto b = t.find_first_not_of(" \t\r");
            const auto e = t.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        if (key == "config" || !sub->get_option_no_throw(flag))
            throw std::invalid_argument(path + ":" + std::to_string(number) + ": unknown key '" + key + "'");
        if (std::any_of(rest.begin(), rest.end(),
                        [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; }))
            continue;
        out.push_back(flag);
        out.push_back(trim(line.substr(eq + 1)));
    }
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Polar-code list decoding, adaptive two-stage pipeline and buffer-overflow model", "tascl"};
    app.require_subcommand(1);

    auto* construct = app.add_subcommand("construct", "build a CRC-aided polar code and write its code file");
    add_code_flags(*construct, o.code, false);
    construct->add_option("--out", o.out, "code file path");

    auto* bler = app.add_subcommand("bler", "Monte Carlo BLER of SC, SCL, A-SCL or TA-SCL");
    add_code_flags(*bler, o.code, true);
    add_sim_flags(*bler, o.sim);
    add_ta_flags(*bler, o.ta);
    bler->add_option("--decoder", o.sim.decoder, "sc, scl, ascl or tascl")->capture_default_str();
    bler->add_option("--list-size", o.sim.list_size, "SCL list size")->capture_default_str();
    bler->add_option("--l-max", o.sim.l_max, "A-SCL largest list size")->capture_default_str();
    bler->add_option("--l-small", o.ta.l_small, "TA-SCL fast decoder list size")->capture_default_str();
    bler->add_option("--l-large", o.ta.l_large, "TA-SCL slow decoder list size")->capture_default_str();
    bler->add_option("--out", o.out, "CSV path");

    auto* tascl = app.add_subcommand("tascl", "end-to-end two-stage decoder with model comparison");
    add_code_flags(*tascl, o.code, true);
    add_sim_flags(*tascl, o.sim);
    add_ta_flags(*tascl, o.ta);
    tascl->add_option("--l-small", o.ta.l_small, "fast decoder list size")->capture_default_str();
    tascl->add_option("--l-large", o.ta.l_large, "slow decoder list size")->capture_default_str();
    tascl->add_option("--warmup-slots", o.sim.warmup_slots, "slots before the overflow window opens")
        ->capture_default_str();
    tascl->add_option("--trace", o.sim.trace, "per-slot schedule CSV");
    tascl->add_option("--out", o.out, "CSV path");

    auto* model = app.add_subcommand("model", "overflow probability and BLER bounds from the Markov model");
    add_ta_flags(*model, o.ta);
    model->add_option("--eps-s", o.eps_s, "comma separated D_s failure rates")->required();
    model->add_option("--eps-l", o.eps_l, "D_l BLER for the bounds")->capture_default_str();
    model->add_option("--out", o.out, "CSV path");

    auto* validate = app.add_subcommand("validate", "compare the model with a synthetic pipeline run");
    add_ta_flags(*validate, o.ta);
    validate->add_option("--eps-s", o.eps_s, "D_s failure rate")->required();
    validate->add_option("--slots", o.slots, "input slots to simulate")->capture_default_str();
    validate->add_option("--seed", o.sim.seed, "failure pattern seed")->capture_default_str();
    validate->add_option("--warmup-slots", o.validate_warmup, "slots before the overflow window opens")->capture_default_str();

    std::string config_file;
    for (auto* sub : {construct, bler, tascl, model, validate})
        sub->add_option("--config", config_file, "flat key = value file with flag defaults");

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(app, args);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (construct->parsed())
            return cmd_construct(o, out, err);
        if (bler->parsed())
            return cmd_simulate(o, parse_decoder(o.sim.decoder), out, err);
        if (tascl->parsed())
            return cmd_simulate(o, DecoderKind::TASCL, out, err);
        if (model->parsed())
            return cmd_model(o, out);
        return cmd_validate(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace tascl
