// Command-line front end: code construction, Monte-Carlo BER/FER sweeps,
// weight-schedule search, schedule validation, and code inspection.
//
// Exit codes: 0 success, 1 validation/domain failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spms/manifest.hpp"
#include "spms/montecarlo.hpp"
#include "spms/optimizer.hpp"
#include "spms/peg.hpp"
#include "spms/tanner_graph.hpp"
#include "spms/version.hpp"
#include "spms/weights.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double default_alpha(int q) { return q == 2 ? 0.75 : q == 3 ? 0.95 : 1.15; }

spms::TannerGraph load_code(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open code file '" + path + "'");
    return spms::load_alist(in);
}

std::map<std::int32_t, std::int32_t> parse_degree_spec(const std::string& spec) {
    std::map<std::int32_t, std::int32_t> counts;
    std::istringstream is(spec);
    std::string item;
    while (std::getline(is, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw UsageError("--degree-spec items must look like DEG:COUNT, got '" + item + "'");
        try {
            const int deg = std::stoi(item.substr(0, colon));
            const int count = std::stoi(item.substr(colon + 1));
            if (counts.count(deg)) throw UsageError("--degree-spec repeats degree " + item);
            counts[deg] = count;
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError("bad --degree-spec item '" + item + "'");
        }
    }
    if (counts.empty()) throw UsageError("--degree-spec is empty");
    return counts;
}

/// "a:step:b" (inclusive) or a comma-separated list.
std::vector<double> parse_snr_points(const std::string& spec) {
    std::vector<double> points;
    if (spec.find(':') != std::string::npos) {
        double a = 0, step = 0, b = 0;
        char c1 = 0, c2 = 0;
        std::istringstream is(spec);
        if (!(is >> a >> c1 >> step >> c2 >> b) || c1 != ':' || c2 != ':' || !(is >> std::ws).eof())
            throw UsageError("--snr range must be start:step:stop, got '" + spec + "'");
        if (!(step > 0)) throw UsageError("--snr step must be positive");
        if (b < a) throw UsageError("--snr stop must be >= start");
        const int n = static_cast<int>(std::floor((b - a) / step + 0.5)) + 1;
        for (int i = 0; i < n; ++i) points.push_back(a + i * step);
    } else {
        std::istringstream is(spec);
        std::string item;
        while (std::getline(is, item, ',')) {
            try {
                std::size_t pos = 0;
                points.push_back(std::stod(item, &pos));
                while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos])))
                    ++pos;
                if (pos != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw UsageError("bad --snr value '" + item + "'");
            }
        }
        if (points.empty()) throw UsageError("--snr list is empty");
    }
    return points;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void print_violations(const std::vector<spms::ScheduleViolation>& violations) {
    for (const auto& v : violations) {
        if (v.iteration >= 0)
            std::cerr << "violation at iteration " << v.iteration << ": " << v.message << "\n";
        else
            std::cerr << "violation: " << v.message << "\n";
    }
}

// --------------------------------------------------------------------------
// construct
// --------------------------------------------------------------------------

struct ConstructArgs {
    int n = 0;
    std::string degree_spec;
    int checks = 0;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_construct(const ConstructArgs& a) {
    const auto counts = parse_degree_spec(a.degree_spec);
    const auto graph = spms::construct_peg(a.n, counts, a.checks, a.seed);
    write_text_file(a.out, spms::write_alist(graph));

    spms::RunManifest mf;
    mf.subcommand = "construct";
    mf.config = {{"n", a.n},       {"degree_spec", a.degree_spec}, {"checks", a.checks},
                 {"seed", a.seed}, {"out", a.out}};
    mf.master_seed = a.seed;
    mf.input_digests[a.out] = spms::file_digest(a.out);
    mf.write(a.out + ".manifest.json");

    const auto d = spms::degree_report(graph);
    std::cout << "wrote " << a.out << ": n_vars=" << graph.n_vars()
              << " n_checks=" << graph.n_checks() << " edges=" << graph.n_edges()
              << " rate=" << d.rate << "\n";
    return kExitOk;
}

// --------------------------------------------------------------------------
// simulate
// --------------------------------------------------------------------------

struct SimulateArgs {
    std::string code;
    std::string decoder;  // "bp" | "sp-ms"
    int q = 0;            // 0 = not given
    double alpha = 0.0;   // 0 = default by q
    std::string weights = "none";
    std::string snr;
    int max_iters = 12;
    long long min_frames = 500;
    long long min_frame_errors = 30;
    long long max_frames = 100'000'000;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_prefix;
    std::string snr_kind = "ebn0";
    bool trace = false;
};

/// Decodes frame 0 of a point with the iteration hook attached and prints the
/// per-iteration syndrome weight and v2c magnitude histogram.
void emit_decoder_trace(const spms::TannerGraph& graph, const spms::DecoderConfig& dec,
                        const spms::ChannelConfig& point_channel,
                        const spms::QuantizerConfig& qc) {
    spms::ChannelConfig cc = point_channel;
    cc.seed = spms::mix_seed(point_channel.seed, 0);
    const auto y = spms::transmit_all_zero(cc, graph.n_vars());
    double sigma2 = spms::noise_variance(cc);
    if (sigma2 <= 0.0) sigma2 = std::numeric_limits<double>::min();
    const auto llrs = spms::compute_llrs(y, sigma2);

    if (dec.family == spms::DecoderFamily::bp_float) {
        const auto out = spms::decode_bp(graph, llrs, dec);
        for (std::size_t i = 0; i < out.syndrome_trace.size(); ++i)
            std::printf("# trace snr=%g frame=0 iter=%zu syndrome_weight=%d\n",
                        point_channel.snr_db, i, out.syndrome_trace[i]);
        return;
    }
    const auto obs = spms::quantize_llrs(llrs, qc);
    spms::SpmsDecoder tracer(graph, dec);
    const int cap = (1 << (dec.q - 1)) - 1;
    tracer.on_iteration = [&](int iter, const spms::EdgeState& s,
                              const std::vector<std::uint8_t>&) {
        std::vector<long long> hist(static_cast<std::size_t>(cap) + 1, 0);
        for (const auto& m : s.v2c) ++hist[static_cast<std::size_t>(m.mag)];
        std::ostringstream h;
        for (std::size_t i = 0; i < hist.size(); ++i) h << (i ? "," : "") << hist[i];
        std::printf("# trace snr=%g frame=0 iter=%d v2c_mag_hist=%s\n", point_channel.snr_db,
                    iter + 1, h.str().c_str());
    };
    const auto out = tracer.decode(obs.quantized);
    for (std::size_t i = 0; i < out.syndrome_trace.size(); ++i)
        std::printf("# trace snr=%g frame=0 iter=%zu syndrome_weight=%d\n", point_channel.snr_db,
                    i, out.syndrome_trace[i]);
}

int cmd_simulate(const SimulateArgs& a) {
    const bool is_bp = a.decoder == "bp";
    if (is_bp && a.q != 0)
        throw UsageError("--q applies to the sp-ms decoder only; the bp reference is unquantized");
    if (is_bp && a.weights != "none")
        throw UsageError("--weights applies to the sp-ms decoder only");
    if (!is_bp && a.q == 0) throw UsageError("--q is required for --decoder sp-ms");

    const auto graph = load_code(a.code);
    const auto snr_points = parse_snr_points(a.snr);

    spms::DecoderConfig dec;
    dec.family = is_bp ? spms::DecoderFamily::bp_float : spms::DecoderFamily::sp_ms;
    dec.q = is_bp ? 4 : a.q;
    dec.max_iters = a.max_iters;

    const std::string weights_source = a.weights;
    if (!is_bp && a.weights != "none") {
        spms::WeightSchedule schedule;
        if (a.weights == "table1") {
            if (a.q != 2 && a.q != 3)
                throw UsageError("--weights table1 is defined for --q 2 and --q 3 only");
            schedule = spms::table1_schedule(a.q);
        } else {
            std::ifstream in(a.weights);
            if (!in) throw std::runtime_error("cannot open weights file '" + a.weights + "'");
            std::ostringstream buf;
            buf << in.rdbuf();
            schedule = spms::schedule_from_string(buf.str());
        }
        const auto violations = spms::validate(schedule);
        if (!violations.empty()) {
            print_violations(violations);
            throw std::runtime_error("weight schedule failed validation");
        }
        if (schedule.q != a.q)
            throw std::runtime_error("weight schedule is for q=" + std::to_string(schedule.q) +
                                     " but --q is " + std::to_string(a.q));
        if (schedule.max_iters() != a.max_iters)
            throw std::runtime_error(
                "weight schedule has " + std::to_string(schedule.max_iters()) +
                " iterations but --max-iters is " + std::to_string(a.max_iters));
        dec.weight_schedule = std::move(schedule);
    }

    const double alpha = a.alpha > 0.0 ? a.alpha : default_alpha(dec.q);
    spms::QuantizerConfig qc;
    qc.alpha = alpha;
    spms::ChannelConfig channel;
    channel.rate = spms::degree_report(graph).rate;
    channel.snr_kind = a.snr_kind == "esn0" ? spms::SnrKind::esn0 : spms::SnrKind::ebn0;
    const spms::StoppingRule rule{a.min_frames, a.min_frame_errors, a.max_frames};

    nlohmann::json config{{"code", a.code},
                          {"decoder", a.decoder},
                          {"alpha", is_bp ? nlohmann::json() : nlohmann::json(alpha)},
                          {"q", is_bp ? nlohmann::json() : nlohmann::json(dec.q)},
                          {"weights", is_bp ? "none" : weights_source},
                          {"snr_points", snr_points},
                          {"snr_kind", a.snr_kind},
                          {"max_iters", a.max_iters},
                          {"min_frames", a.min_frames},
                          {"min_frame_errors", a.min_frame_errors},
                          {"max_frames", a.max_frames},
                          {"seed", a.seed},
                          {"threads", a.threads},
                          {"rate", channel.rate},
                          {"trace", a.trace},
                          {"out_prefix", a.out_prefix}};

    spms::RunManifest mf;
    mf.subcommand = "simulate";
    mf.config = config;
    mf.master_seed = a.seed;
    mf.input_digests[a.code] = spms::file_digest(a.code);
    if (!is_bp && a.weights != "none" && a.weights != "table1")
        mf.input_digests[a.weights] = spms::file_digest(a.weights);
    mf.write(a.out_prefix + ".manifest.json");

    std::ofstream jsonl(a.out_prefix + ".jsonl");
    std::ofstream csv(a.out_prefix + ".csv");
    if (!jsonl || !csv) throw std::runtime_error("cannot open output files at " + a.out_prefix);
    jsonl << spms::jsonl_header(config) << "\n" << std::flush;
    csv << spms::csv_header() << "\n" << std::flush;

    std::size_t point_index = 0;
    auto on_point = [&](const spms::PointResult& p) {
        jsonl << spms::point_to_json(p).dump() << "\n" << std::flush;
        csv << spms::csv_row(p) << "\n" << std::flush;
        if (!jsonl || !csv) throw std::runtime_error("output write failed");
        std::printf("snr %6.3f  fer %.6g  ber %.6g  frames %lld  errors %lld  mean_iters %.3f%s\n",
                    p.snr_db, p.fer, p.ber, p.frames_sent, p.frame_errors, p.mean_iterations,
                    p.censored ? "  [censored]" : "");
        std::fflush(stdout);
        if (a.trace) {
            spms::ChannelConfig cc = channel;
            cc.snr_db = p.snr_db;
            cc.seed = spms::mix_seed(a.seed, point_index);  // the point's own seed
            emit_decoder_trace(graph, dec, cc, qc);
        }
        ++point_index;
    };
    spms::run_sweep(graph, dec, channel, qc, rule, snr_points, a.seed, a.threads, on_point);
    std::cout << "wrote " << a.out_prefix << ".jsonl, " << a.out_prefix << ".csv, "
              << a.out_prefix << ".manifest.json\n";
    return kExitOk;
}

// --------------------------------------------------------------------------
// optimize
// --------------------------------------------------------------------------

struct OptimizeArgs {
    std::string code;
    int q = 0;
    double snr = 0.0;
    double alpha = 0.0;
    int candidates = 100;
    long long frames_per_candidate = 1000;
    std::string objective = "fer";
    int max_iters = 12;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
};

int cmd_optimize(const OptimizeArgs& a) {
    const auto graph = load_code(a.code);

    spms::DecoderConfig dec;
    dec.q = a.q;
    dec.max_iters = a.max_iters;
    spms::QuantizerConfig qc;
    qc.alpha = a.alpha > 0.0 ? a.alpha : default_alpha(a.q);
    spms::ChannelConfig channel;
    channel.rate = spms::degree_report(graph).rate;

    spms::OptimizerConfig oc;
    oc.n_candidates = a.candidates;
    oc.frames_per_candidate = a.frames_per_candidate;
    oc.snr_db = a.snr;
    oc.objective = a.objective == "ber" ? spms::Objective::ber : spms::Objective::fer;
    oc.seed = a.seed;
    oc.threads = a.threads;

    const auto result = spms::optimize(graph, dec, channel, qc, oc);

    write_text_file(a.out, spms::schedule_to_string(result.best));
    std::ostringstream scores;
    scores << "candidate,score,frame_errors,bit_errors,mean_iterations,schedule\n";
    for (std::size_t i = 0; i < result.all_scores.size(); ++i) {
        const auto& c = result.all_scores[i];
        scores << i << "," << spms::detail::format_double(c.score) << "," << c.frame_errors << ","
               << c.bit_errors << "," << spms::detail::format_double(c.mean_iterations) << ",";
        for (std::size_t l = 0; l < c.schedule.weights.size(); ++l)
            scores << (l ? " " : "") << spms::to_decimal_string(c.schedule.weights[l]);
        scores << "\n";
    }
    write_text_file(a.out + ".scores.csv", scores.str());

    spms::RunManifest mf;
    mf.subcommand = "optimize";
    mf.config = {{"code", a.code},
                 {"q", a.q},
                 {"snr", a.snr},
                 {"alpha", qc.alpha},
                 {"candidates", a.candidates},
                 {"frames_per_candidate", a.frames_per_candidate},
                 {"objective", a.objective},
                 {"max_iters", a.max_iters},
                 {"seed", a.seed},
                 {"out", a.out}};
    mf.master_seed = a.seed;
    mf.input_digests[a.code] = spms::file_digest(a.code);
    mf.write(a.out + ".manifest.json");

    std::cout << "best candidate " << result.best_index << " " << a.objective << " "
              << result.best_score << "; schedule:";
    for (const auto& w : result.best.weights) std::cout << " " << spms::to_decimal_string(w);
    std::cout << "\nwrote " << a.out << ", " << a.out << ".scores.csv\n";
    return kExitOk;
}

// --------------------------------------------------------------------------
// validate-weights / info
// --------------------------------------------------------------------------

int cmd_validate_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open weights file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto schedule = spms::schedule_from_string(buf.str());
    const auto violations = spms::validate(schedule);
    if (!violations.empty()) {
        print_violations(violations);
        return kExitDomain;
    }
    std::cout << path << ": valid (q=" << schedule.q << ", " << schedule.max_iters()
              << " iterations, target degrees";
    for (const auto d : schedule.target_degrees) std::cout << " " << d;
    std::cout << ")\n";
    return kExitOk;
}

int cmd_info(const std::string& path, bool with_girth, bool with_rank) {
    const auto graph = load_code(path);
    const auto d = spms::degree_report(graph);
    std::cout << "n_vars " << graph.n_vars() << "\n"
              << "n_checks " << graph.n_checks() << "\n"
              << "edges " << graph.n_edges() << "\n"
              << "rate " << d.rate << "\n";
    std::cout << "vn_degrees";
    for (const auto& [deg, count] : d.vn_degrees) std::cout << " " << deg << ":" << count;
    std::cout << "\ncn_degrees";
    for (const auto& [deg, count] : d.cn_degrees) std::cout << " " << deg << ":" << count;
    std::cout << "\n";
    for (const auto& [deg, count] : d.vn_degrees) {
        std::printf("degree-%d fraction %.4f\n", deg,
                    static_cast<double>(count) / graph.n_vars());
    }
    if (with_girth) std::cout << "girth " << spms::girth(graph) << "\n";
    if (with_rank) {
        const auto rank = spms::gf2_rank(graph);
        std::cout << "gf2_rank " << rank << (rank == graph.n_checks() ? " (full)" : "") << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantized sign-preserving min-sum LDPC decoding and simulation"};
    app.set_version_flag("--version", spms::kVersion);
    app.require_subcommand(1);

    ConstructArgs ca;
    auto* construct = app.add_subcommand("construct", "build a PEG code and write it as alist");
    construct->add_option("--n", ca.n, "number of variable nodes")->required();
    construct->add_option("--degree-spec", ca.degree_spec, "DEG:COUNT[,DEG:COUNT...]")->required();
    construct->add_option("--checks", ca.checks, "number of check nodes")->required();
    construct->add_option("--seed", ca.seed, "construction seed");
    construct->add_option("--out", ca.out, "output alist path")->required();

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo BER/FER sweep");
    simulate->add_option("--code", sa.code, "alist file")->required();
    simulate->add_option("--decoder", sa.decoder, "bp | sp-ms")
        ->required()
        ->check(CLI::IsMember({"bp", "sp-ms"}));
    simulate->add_option("--q", sa.q, "message precision bits (sp-ms)")
        ->check(CLI::IsMember({2, 3, 4}));
    simulate->add_option("--alpha", sa.alpha, "llr scaling (default 0.75/0.95/1.15 for q=2/3/4)");
    simulate->add_option("--weights", sa.weights, "FILE | table1 | none");
    simulate->add_option("--snr", sa.snr, "start:step:stop or comma list (dB)")->required();
    simulate->add_option("--max-iters", sa.max_iters, "decoding iteration cap");
    simulate->add_option("--min-frames", sa.min_frames, "stopping rule: minimum frames");
    simulate->add_option("--min-frame-errors", sa.min_frame_errors,
                         "stopping rule: minimum frame errors");
    simulate->add_option("--max-frames", sa.max_frames, "stopping rule: frame cap");
    simulate->add_option("--seed", sa.seed, "master seed");
    simulate->add_option("--threads", sa.threads, "worker threads (0 = hardware)");
    simulate->add_option("--out-prefix", sa.out_prefix, "output path prefix")->required();
    simulate->add_option("--snr-kind", sa.snr_kind, "ebn0 | esn0")
        ->check(CLI::IsMember({"ebn0", "esn0"}));
    simulate->add_flag("--trace", sa.trace,
                       "emit per-iteration decoder trace lines for frame 0 of each point");

    OptimizeArgs oa;
    auto* optimize = app.add_subcommand("optimize", "random-search weight schedules");
    optimize->add_option("--code", oa.code, "alist file")->required();
    optimize->add_option("--q", oa.q, "message precision bits")
        ->required()
        ->check(CLI::IsMember({2, 3, 4}));
    optimize->add_option("--snr", oa.snr, "single optimization SNR point (dB)")->required();
    optimize->add_option("--alpha", oa.alpha, "llr scaling (default by q)");
    optimize->add_option("--candidates", oa.candidates, "number of random candidates");
    optimize->add_option("--frames-per-candidate", oa.frames_per_candidate,
                         "Monte-Carlo budget per candidate");
    optimize->add_option("--objective", oa.objective, "ber | fer")
        ->check(CLI::IsMember({"ber", "fer"}));
    optimize->add_option("--max-iters", oa.max_iters, "decoding iteration cap");
    optimize->add_option("--seed", oa.seed, "search seed");
    optimize->add_option("--threads", oa.threads, "worker threads (0 = hardware)");
    optimize->add_option("--out", oa.out, "output schedule json path")->required();

    std::string vw_path;
    auto* validate_weights =
        app.add_subcommand("validate-weights", "check a schedule against the weight constraints");
    validate_weights->add_option("file", vw_path, "schedule json")->required();

    std::string info_path;
    bool info_girth = false, info_rank = false;
    auto* info = app.add_subcommand("info", "degree distribution and code statistics");
    info->add_option("--code", info_path, "alist file")->required();
    info->add_flag("--girth", info_girth, "also compute the girth (BFS, desk scale)");
    info->add_flag("--rank", info_rank, "also compute the GF(2) rank (desk scale)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (construct->parsed()) return cmd_construct(ca);
        if (simulate->parsed()) return cmd_simulate(sa);
        if (optimize->parsed()) return cmd_optimize(oa);
        if (validate_weights->parsed()) return cmd_validate_weights(vw_path);
        if (info->parsed()) return cmd_info(info_path, info_girth, info_rank);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitOk;
}
