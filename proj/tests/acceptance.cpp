// Acceptance suite: one test case per criterion, each ending in a single
// "[criterion N] PASS/FAIL" line. Trend criteria pin their SNR operating
// points and budgets here; all seeds are fixed, so reruns are bit-identical.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "spms/montecarlo.hpp"
#include "spms/optimizer.hpp"
#include "spms/peg.hpp"
#include "spms/rng.hpp"
#include "spms/tanner_graph.hpp"
#include "spms/weights.hpp"

using namespace spms;

namespace {

void report(int criterion, bool ok, const std::string& what) {
    std::printf("[criterion %2d] %s  %s\n", criterion, ok ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(ok, "criterion ", criterion, ": ", what);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const TannerGraph& code512_eq3() {
    static const TannerGraph g =
        construct_peg(512, {{3, 371}, {6, 126}, {11, 7}, {12, 8}}, 89, 7);
    return g;
}

const TannerGraph& code512_even() {
    // (2,16)-biregular PEG output; every check degree even, so the all-ones
    // word is a codeword and global sign flips preserve syndromes.
    static const TannerGraph g = construct_peg(512, {{2, 512}}, 64, 9);
    return g;
}

const TannerGraph& code2048() {
    static const TannerGraph g =
        construct_peg(2048, {{3, 1484}, {6, 504}, {11, 30}, {12, 30}}, 356, 2);
    return g;
}

std::vector<SignMag> noisy_obs(const TannerGraph& g, double snr_db, double alpha,
                               std::uint64_t seed, std::vector<double>* llrs_out = nullptr) {
    ChannelConfig cc;
    cc.snr_db = snr_db;
    cc.rate = static_cast<double>(g.n_vars() - g.n_checks()) / g.n_vars();
    cc.seed = seed;
    QuantizerConfig qc;
    qc.alpha = alpha;
    const auto y = transmit_all_zero(cc, g.n_vars());
    const auto llrs = compute_llrs(y, noise_variance(cc));
    if (llrs_out) *llrs_out = llrs;
    return quantize_llrs(llrs, qc).quantized;
}

PointResult measure(const TannerGraph& g, const DecoderConfig& dc, double snr_db, double alpha,
                    const StoppingRule& rule, std::uint64_t seed) {
    ChannelConfig cc;
    cc.snr_db = snr_db;
    cc.rate = static_cast<double>(g.n_vars() - g.n_checks()) / g.n_vars();
    cc.seed = seed;
    QuantizerConfig qc;
    qc.alpha = alpha;
    return run_point(g, dc, cc, qc, rule, 1);
}

bool ci_disjoint_below(const PointResult& lo, const PointResult& hi) {
    const auto a = binomial_ci(lo.frame_errors, lo.frames_sent, 0.95);
    const auto b = binomial_ci(hi.frame_errors, hi.frames_sent, 0.95);
    return a.second < b.first;
}

}  // namespace

TEST_CASE("criterion 1: update-rule oracle equivalence") {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    long long cases = 0;

    // q=2 degree-3 VN: all extrinsic pairs x I_n values x mu x Table 1 weights
    const auto table1 = schedule_eighths(table1_schedule(2));
    auto msg = [](int code) {
        return QMessage{static_cast<std::int8_t>(code & 1 ? -1 : 1),
                        static_cast<std::int8_t>(code >> 1)};
    };
    for (const int w8 : table1)
        for (int value = -7; value <= 7; ++value) {
            const SignMag in{static_cast<std::int8_t>(value < 0 ? -1 : 1),
                             static_cast<std::int8_t>(value < 0 ? -value : value)};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    for (const int mu : {-1, +1}) {
                        const std::vector<QMessage> inc{msg(a), msg(b)};
                        ok = ok && vn_update_spms(in, inc, mu, w8, 2) ==
                                       oracle::ref_vn_update(in, inc, mu, w8 / 8.0, 2);
                        ++cases;
                    }
        }

    // q=2 degree-6 CN: all 4^5 extrinsic tuples
    for (int t = 0; t < 4 * 4 * 4 * 4 * 4; ++t) {
        std::vector<QMessage> inc;
        for (int k = 0; k < 5; ++k) inc.push_back(msg((t >> (2 * k)) & 3));
        ok = ok && cn_update_minsum(inc) == oracle::ref_cn_update(inc);
        ++cases;
    }

    const double dt = seconds_since(t0);
    report(1, ok && dt < 1.0,
           "vn/cn rules match brute force over " + std::to_string(cases) + " cases in " +
               std::to_string(dt) + " s");
}

TEST_CASE("criterion 2: psi contract on a dense grid") {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    const std::map<int, int> sample_offsets{{3, 1}, {7, 2}};
    for (int q = 2; q <= 4; ++q) {
        const int cap = (1 << (q - 1)) - 1;
        int prev_mag = 0;
        for (int i = -320; i <= 320; ++i) {
            const double m = i / 8.0;
            const auto zero_off = psi(m, q);
            ok = ok && zero_off.mag >= 0 && zero_off.mag <= cap;
            if (m > 0) ok = ok && zero_off.sign == +1;
            if (m < 0) ok = ok && zero_off.sign == -1;
            if (i >= 0) {  // monotone in |m| at fixed (zero) offsets
                ok = ok && zero_off.mag >= prev_mag;
                prev_mag = zero_off.mag;
            }
            const auto with_off = psi(m, q, sample_offsets);
            ok = ok && with_off.mag >= 0 && with_off.mag <= cap;
            ok = ok && with_off.sign == zero_off.sign;
        }
    }
    const double dt = seconds_since(t0);
    report(2, ok && dt < 1.0,
           "magnitude within [0, 2^(q-1)-1], sign preserved, monotone; " + std::to_string(dt) +
               " s");
}

TEST_CASE("criterion 3: sign-flip equivariance over 1000 random frames") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& g = code512_even();
    bool even = true;
    for (std::int32_t c = 0; c < g.n_checks(); ++c) even = even && g.cn_degree(c) % 2 == 0;
    REQUIRE(even);  // premise: the all-ones word is a codeword of this PEG code

    bool ok = true;
    for (const int q : {2, 3}) {
        DecoderConfig cfg;
        cfg.q = q;
        SpmsDecoder dec(g, cfg);
        const double alpha = q == 2 ? 0.75 : 0.95;
        for (int f = 0; f < 1000; ++f) {
            auto obs = noisy_obs(g, 3.0, alpha, mix_seed(1000 + q, f));
            auto neg = obs;
            for (auto& s : neg) s.sign = static_cast<std::int8_t>(-s.sign);
            const auto a = dec.decode(obs);
            const auto b = dec.decode(neg);
            ok = ok && a.syndrome_trace == b.syndrome_trace &&
                 a.iterations_used == b.iterations_used;
            for (std::size_t v = 0; ok && v < a.bits.size(); ++v)
                ok = a.bits[v] == 1 - b.bits[v];
            if (!ok) break;
        }
    }

    // General form on the irregular code: twisting by any codeword shifts the
    // decisions by it and preserves the trace.
    const auto& gi = code512_eq3();
    Rng cw_rng(77);
    for (const int q : {2, 3}) {
        DecoderConfig cfg;
        cfg.q = q;
        SpmsDecoder dec(gi, cfg);
        const double alpha = q == 2 ? 0.75 : 0.95;
        for (int f = 0; f < 250; ++f) {
            const auto x = oracle::random_codeword(gi, cw_rng);
            auto obs = noisy_obs(gi, 3.0, alpha, mix_seed(2000 + q, f));
            auto twisted = obs;
            for (std::size_t v = 0; v < twisted.size(); ++v)
                if (x[v]) twisted[v].sign = static_cast<std::int8_t>(-twisted[v].sign);
            const auto a = dec.decode(obs);
            const auto b = dec.decode(twisted);
            ok = ok && a.syndrome_trace == b.syndrome_trace &&
                 a.iterations_used == b.iterations_used;
            for (std::size_t v = 0; ok && v < a.bits.size(); ++v)
                ok = (a.bits[v] ^ x[v]) == b.bits[v];
            if (!ok) break;
        }
    }

    const double dt = seconds_since(t0);
    report(3, ok && dt < 30.0,
           "decisions flip and syndrome traces persist under negation (plus codeword-twist "
           "form); " + std::to_string(dt) + " s");
}

TEST_CASE("criterion 4 & 11: unit-weight equivalence and the first-four-iterations property") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& g = code512_eq3();
    DecoderConfig plain;
    plain.q = 2;
    DecoderConfig ones = plain;
    ones.weight_schedule = all_ones_schedule(2, plain.max_iters);
    DecoderConfig weighted = plain;
    weighted.weight_schedule = table1_schedule(2);

    SpmsDecoder d_plain(g, plain), d_ones(g, ones), d_table1(g, weighted);
    bool ok4 = true, ok11 = true;
    long long early_frames = 0;
    for (int f = 0; f < 10'000; ++f) {
        const auto obs = noisy_obs(g, 3.4, 0.75, mix_seed(411, f));
        const auto a = d_plain.decode(obs);
        const auto b = d_ones.decode(obs);
        ok4 = ok4 && a.bits == b.bits && a.iterations_used == b.iterations_used &&
              a.converged == b.converged && a.syndrome_trace == b.syndrome_trace;

        const auto c = d_table1.decode(obs);
        const bool plain_early = a.iterations_used <= 4;
        const bool weighted_early = c.iterations_used <= 4;
        ok11 = ok11 && plain_early == weighted_early;
        if (plain_early) {
            ++early_frames;
            ok11 = ok11 && a.bits == c.bits && a.iterations_used == c.iterations_used;
        }
        if (!ok4 || !ok11) break;
    }
    const double dt = seconds_since(t0);
    report(4, ok4 && dt < 120.0,
           "all-ones schedule bit-identical to the weight-free path over 10^4 frames; " +
               std::to_string(dt) + " s");
    report(11, ok11 && early_frames > 100,
           "table1 trajectories identical to unweighted for every frame finishing within 4 "
           "iterations (" + std::to_string(early_frames) + " such frames)");
}

TEST_CASE("criterion 5: table 1 schedules validate and apply exactly") {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    for (const int q : {2, 3}) {
        const auto sched = table1_schedule(q);
        ok = ok && validate(sched).empty();
        ok = ok && sched.max_iters() == 12;
        for (const auto& w : sched.weights) {
            const auto p2 = p2_encode(static_cast<int>(w.eighths()));
            ok = ok && p2.terms.size() <= 3;
            for (const auto& t : p2.terms) ok = ok && t.sign == +1;  // three plain binary digits
        }
        // exact products over the full reachable degree-3 operand range:
        // t2 = mu + 2*sum with |sum| <= 2*(2^(q-1)-1), so t2 is odd
        const int cap = (1 << (q - 1)) - 1;
        for (const auto& w : sched.weights) {
            const auto p2 = p2_encode(static_cast<int>(w.eighths()));
            for (int t2 = -(1 + 4 * cap); t2 <= 1 + 4 * cap; t2 += 2) {
                const double expect = p2.value() * (t2 / 2.0) * 16.0;
                ok = ok && static_cast<double>(apply_weight(p2, t2)) == expect;
            }
        }
    }
    const double dt = seconds_since(t0);
    report(5, ok && dt < 1.0,
           "monotone, <=3 non-negative power-of-two terms, shift-add products exact; " +
               std::to_string(dt) + " s");
}

TEST_CASE("criterion 6: full-size degree accounting") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = construct_peg(17664, {{3, 12800}, {6, 4352}, {11, 256}, {12, 256}}, 3072, 1);
    const double dt = seconds_since(t0);
    const auto d = degree_report(g);
    const double frac = static_cast<double>(d.vn_degrees.at(3)) / g.n_vars();
    const bool counts_ok = d.vn_degrees.at(3) == 12800 && d.vn_degrees.at(6) == 4352 &&
                           d.vn_degrees.at(11) == 256 && d.vn_degrees.at(12) == 256;
    const bool ok = counts_ok && std::fabs(frac - 0.7246) <= 1e-4 && dt < 60.0;
    report(6, ok,
           "peg(17664) degrees 12800/4352/256/256, degree-3 fraction " + std::to_string(frac) +
               ", " + std::to_string(dt) + " s");
}

TEST_CASE("criterion 7: sweep statistics are byte-identical across --threads") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "spms_acceptance";
    fs::create_directories(dir);
    const std::string code = (dir / "c7.alist").string();
    {
        std::ofstream out(code);
        write_alist(code512_eq3(), out);
    }
    auto run = [&](int threads, const std::string& prefix) {
        const std::string cmd = std::string(SPMS_CLI_PATH) + " simulate --code " + code +
                                " --decoder sp-ms --q 2 --snr 3.0:0.4:3.8 --min-frames 200" +
                                " --min-frame-errors 20 --max-frames 3000 --seed 99 --threads " +
                                std::to_string(threads) + " --out-prefix " +
                                (dir / prefix).string() + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    auto body = [&](const std::string& prefix) {
        std::ifstream in(dir / (prefix + ".jsonl"));
        std::string line, out;
        while (std::getline(in, line)) {
            auto j = nlohmann::json::parse(line);
            if (j.contains("type") && j["type"] == "header") continue;  // records --threads
            j.erase("wall_time_seconds");
            out += j.dump() + "\n";
        }
        return out;
    };
    const bool ran = run(1, "t1") && run(4, "t4");
    const std::string b1 = body("t1"), b4 = body("t4");
    const bool ok = ran && !b1.empty() && b1 == b4;
    report(7, ok, "jsonl bodies identical for --threads 1 vs 4 (wall-time excluded)");
}

TEST_CASE("criterion 8: q=2 floor exists where bp keeps falling") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& g = code2048();
    REQUIRE(girth(g) >= 6);  // construction invariant at trend scale
    // Sweep 3.2 / 3.8 / 4.4 dB. Over the whole sweep bp's ber must collapse
    // (>= 30x); over the final 0.6 dB the unweighted q2 ber must stay nearly
    // flat (< 3x): that flat tail against a plunging reference is the floor.
    DecoderConfig q2;
    q2.q = 2;
    DecoderConfig bp;
    bp.family = DecoderFamily::bp_float;
    const StoppingRule spms_rule{200, 30, 20'000};
    const StoppingRule bp_rule{200, 30, 150'000};

    const auto q2_mid = measure(g, q2, 3.8, 0.75, spms_rule, mix_seed(8, 38));
    const auto q2_top = measure(g, q2, 4.4, 0.75, spms_rule, mix_seed(8, 44));
    const auto bp_lo = measure(g, bp, 3.2, 1.0, bp_rule, mix_seed(8, 32));
    const auto bp_top = measure(g, bp, 4.4, 1.0, bp_rule, mix_seed(8, 44));

    const double q2_drop = q2_mid.ber / q2_top.ber;
    const double bp_drop = bp_top.bit_errors > 0 ? bp_lo.ber / bp_top.ber
                                                 : std::numeric_limits<double>::infinity();
    const bool ok = q2_drop < 3.0 && bp_drop >= 30.0;
    const double dt = seconds_since(t0);
    report(8, ok,
           "q2 ber drop over the final 0.6 dB (3.8->4.4): " + std::to_string(q2_drop) +
               "x (plateau); bp ber drop over the sweep (3.2->4.4): " +
               (std::isinf(bp_drop) ? std::string("inf") : std::to_string(bp_drop)) + "x; " +
               std::to_string(dt) + " s");
}

TEST_CASE("criterion 9: degree-3 weighting cuts the floor by >= 10x") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& g = code2048();
    DecoderConfig plain;
    plain.q = 2;
    DecoderConfig weighted = plain;
    weighted.weight_schedule = table1_schedule(2);  // the built-in optimized schedule

    // common sweep {4.4, 5.0, 5.6}; the claim is checked at the top point
    const StoppingRule rule{3000, 30, 20'000};
    PointResult u_top, w_top;
    for (const double snr : {4.4, 5.0, 5.6}) {
        const auto u = measure(g, plain, snr, 0.75, rule, mix_seed(9, (std::uint64_t)(snr * 10)));
        const auto w =
            measure(g, weighted, snr, 0.75, rule, mix_seed(9, (std::uint64_t)(snr * 10)));
        if (snr == 5.6) {
            u_top = u;
            w_top = w;
        }
    }
    const double ratio = u_top.fer / w_top.fer;
    const bool disjoint = ci_disjoint_below(w_top, u_top);
    const bool ok = ratio >= 10.0 && disjoint;
    const double dt = seconds_since(t0);
    report(9, ok,
           "at 5.6 dB: unweighted fer " + std::to_string(u_top.fer) + " vs table1 fer " +
               std::to_string(w_top.fer) + " (" + std::to_string(ratio) +
               "x, 95% CIs disjoint: " + (disjoint ? "yes" : "no") + "); " + std::to_string(dt) +
               " s");
}

TEST_CASE("criterion 10: quantization ordering at mid-waterfall") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& g = code2048();
    const double snr = 3.6;
    const std::uint64_t seed = mix_seed(10, 36);

    struct Arm {
        const char* name;
        DecoderConfig cfg;
        double alpha;
        PointResult pr;
    };
    std::vector<Arm> arms;
    {
        DecoderConfig bp;
        bp.family = DecoderFamily::bp_float;
        arms.push_back({"bp", bp, 1.0, {}});
        DecoderConfig q4;
        q4.q = 4;
        arms.push_back({"q4", q4, 1.15, {}});
        DecoderConfig q3;
        q3.q = 3;
        arms.push_back({"q3", q3, 0.95, {}});
        DecoderConfig q2;
        q2.q = 2;
        arms.push_back({"q2", q2, 0.75, {}});
    }
    const StoppingRule base{500, 100, 30'000};
    const StoppingRule boosted{500, 400, 120'000};
    for (auto& arm : arms) arm.pr = measure(g, arm.cfg, snr, arm.alpha, base, seed);

    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i + 1 < arms.size(); ++i) {
        auto& lo = arms[i];
        auto& hi = arms[i + 1];
        bool disjoint = ci_disjoint_below(lo.pr, hi.pr);
        if (!disjoint) {
            // overlapping intervals: flagged, re-run the pair at 4x budget
            lo.pr = measure(g, lo.cfg, snr, lo.alpha, boosted, seed);
            hi.pr = measure(g, hi.cfg, snr, hi.alpha, boosted, seed);
            disjoint = ci_disjoint_below(lo.pr, hi.pr);
            detail += std::string(lo.name) + "<=" + hi.name + " re-run at 4x budget; ";
        }
        ok = ok && lo.pr.fer <= hi.pr.fer;
    }
    for (std::size_t i = 0; i < arms.size(); ++i)
        detail += std::string(i ? " <= " : "") + arms[i].name + " " + std::to_string(arms[i].pr.fer);
    const double dt = seconds_since(t0);
    report(10, ok, "fer ordering at 3.6 dB: " + detail + "; " + std::to_string(dt) + " s");
}
