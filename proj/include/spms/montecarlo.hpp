#pragma once

// Frame-level Monte-Carlo engine: all-zero-codeword frames through channel
// and decoder, per-SNR-point statistics under the min-frames/min-errors
// stopping rule, and JSONL/CSV persistence.
//
// Statistics are invariant to the worker count: frames carry seeds derived
// from (point seed, frame index), workers deposit finished frames into a
// reorder buffer, and the stopping rule is evaluated in frame order, so the
// committed prefix is exactly what a serial run would produce.

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spms/channel.hpp"
#include "spms/decoder.hpp"
#include "spms/manifest.hpp"
#include "spms/tanner_graph.hpp"
#include "spms/version.hpp"

namespace spms {

struct StoppingRule {
    long long min_frames = 500;
    long long min_frame_errors = 30;
    long long max_frames = 100'000'000;  // cap; hitting it flags the point as censored
};

struct PointResult {
    double snr_db = 0.0;
    long long frames_sent = 0;
    long long bit_errors = 0;
    long long frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    double mean_iterations = 0.0;
    double mean_iterations_on_success = 0.0;
    double wall_time_seconds = 0.0;
    std::uint64_t master_seed = 0;
    bool censored = false;
    // Diagnostics: frames that converged to a wrong codeword, and frames
    // whose syndrome reached zero.
    long long undetected_errors = 0;
    long long converged_frames = 0;
};

struct SweepResult {
    std::vector<PointResult> points;
};

struct FrameStat {
    bool error = false;
    bool converged = false;
    std::int32_t bit_errors = 0;
    std::int32_t iterations = 0;
};

namespace detail {

/// Shortest round-trip decimal rendering, for CSV/JSON exactness.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

struct PointAggregate {
    long long frames = 0, bit_errors = 0, frame_errors = 0;
    long long undetected = 0, converged = 0, successes = 0;
    long long iter_sum = 0, iter_sum_success = 0;

    void add(const FrameStat& f) {
        ++frames;
        bit_errors += f.bit_errors;
        frame_errors += f.error ? 1 : 0;
        undetected += (f.error && f.converged) ? 1 : 0;
        converged += f.converged ? 1 : 0;
        iter_sum += f.iterations;
        if (!f.error) {
            ++successes;
            iter_sum_success += f.iterations;
        }
    }
};

}  // namespace detail

/// Core frame loop: `make_worker()` is invoked once per thread and must
/// return a callable mapping a frame index to its FrameStat. Exposed so
/// tests can drive the stopping rule with stub decoders.
template <class WorkerFactory>
PointResult run_point_impl(const StoppingRule& rule, int threads, std::int32_t n_vars,
                           WorkerFactory&& make_worker) {
    if (rule.min_frames < 1 || rule.min_frame_errors < 1 || rule.max_frames < rule.min_frames)
        throw std::invalid_argument("stopping rule: need min_frames >= 1, min_frame_errors >= 1, "
                                    "max_frames >= min_frames");
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    const auto t0 = std::chrono::steady_clock::now();
    detail::PointAggregate agg;

    auto satisfied = [&rule](const detail::PointAggregate& a) {
        return (a.frames >= rule.min_frames && a.frame_errors >= rule.min_frame_errors) ||
               a.frames >= rule.max_frames;
    };

    if (threads == 1) {
        auto worker = make_worker();
        for (long long idx = 0; !satisfied(agg); ++idx) agg.add(worker(idx));
    } else {
        std::mutex m;
        std::map<long long, FrameStat> pending;
        long long next_commit = 0;
        std::atomic<long long> next_claim{0};
        std::atomic<bool> done{false};

        auto thread_body = [&]() {
            auto worker = make_worker();
            while (!done.load(std::memory_order_relaxed)) {
                const long long idx = next_claim.fetch_add(1, std::memory_order_relaxed);
                if (idx >= rule.max_frames) break;
                const FrameStat st = worker(idx);
                std::lock_guard<std::mutex> lk(m);
                if (done.load(std::memory_order_relaxed)) break;
                pending.emplace(idx, st);
                // Commit in frame order; results past the stopping point are
                // discarded so the statistics match a serial run exactly.
                for (auto it = pending.find(next_commit); it != pending.end();
                     it = pending.find(next_commit)) {
                    agg.add(it->second);
                    pending.erase(it);
                    ++next_commit;
                    if (satisfied(agg)) {
                        done.store(true, std::memory_order_relaxed);
                        break;
                    }
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(thread_body);
        for (auto& th : pool) th.join();
    }

    PointResult r;
    r.frames_sent = agg.frames;
    r.bit_errors = agg.bit_errors;
    r.frame_errors = agg.frame_errors;
    r.ber = static_cast<double>(agg.bit_errors) /
            (static_cast<double>(agg.frames) * static_cast<double>(n_vars));
    r.fer = static_cast<double>(agg.frame_errors) / static_cast<double>(agg.frames);
    r.mean_iterations = static_cast<double>(agg.iter_sum) / static_cast<double>(agg.frames);
    r.mean_iterations_on_success =
        agg.successes > 0
            ? static_cast<double>(agg.iter_sum_success) / static_cast<double>(agg.successes)
            : 0.0;
    r.undetected_errors = agg.undetected;
    r.converged_frames = agg.converged;
    r.censored = agg.frame_errors < rule.min_frame_errors;
    r.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// Simulates one frame: all-zero codeword through AWGN, quantization (SP-MS
/// only), decode, compare against all-zero.
template <class Decoder>
FrameStat simulate_frame(Decoder& dec, const TannerGraph& g, const ChannelConfig& point_channel,
                         const QuantizerConfig& qc, long long frame_index) {
    ChannelConfig cc = point_channel;
    cc.seed = mix_seed(point_channel.seed, static_cast<std::uint64_t>(frame_index));
    const std::vector<double> y = transmit_all_zero(cc, g.n_vars());
    double sigma2 = noise_variance(cc);
    if (sigma2 <= 0.0) sigma2 = std::numeric_limits<double>::min();  // infinite-SNR sentinel
    const std::vector<double> llrs = compute_llrs(y, sigma2);

    DecodeOutcome out;
    if constexpr (std::is_same_v<Decoder, BpDecoder>) {
        (void)qc;
        out = dec.decode(llrs);
    } else {
        const ChannelObservation obs = quantize_llrs(llrs, qc);
        out = dec.decode(obs.quantized);
    }
    FrameStat st;
    st.converged = out.converged;
    st.iterations = out.iterations_used;
    for (const auto b : out.bits) st.bit_errors += b;
    st.error = st.bit_errors != 0;
    return st;
}

/// One SNR point. `channel.seed` is the per-point seed; frame seeds derive
/// from it so results do not depend on the thread count.
inline PointResult run_point(const TannerGraph& g, const DecoderConfig& dec_cfg,
                             const ChannelConfig& channel, const QuantizerConfig& qc,
                             const StoppingRule& rule, int threads = 1) {
    // Surface config problems on the calling thread, not inside workers.
    noise_variance(channel);
    if (dec_cfg.family == DecoderFamily::bp_float) {
        BpDecoder probe(g, dec_cfg);
        (void)probe;
    } else {
        SpmsDecoder probe(g, dec_cfg);
        (void)probe;
        if (!(qc.alpha > 0.0)) throw std::invalid_argument("quantizer: alpha must be positive");
    }

    PointResult r;
    if (dec_cfg.family == DecoderFamily::bp_float) {
        r = run_point_impl(rule, threads, g.n_vars(), [&]() {
            return [&g, &channel, &qc, dec = BpDecoder(g, dec_cfg)](long long idx) mutable {
                return simulate_frame(dec, g, channel, qc, idx);
            };
        });
    } else {
        r = run_point_impl(rule, threads, g.n_vars(), [&]() {
            return [&g, &channel, &qc, dec = SpmsDecoder(g, dec_cfg)](long long idx) mutable {
                return simulate_frame(dec, g, channel, qc, idx);
            };
        });
    }
    r.snr_db = channel.snr_db;
    r.master_seed = channel.seed;
    return r;
}

/// Maps run_point over the SNR list. The per-point seed is derived from
/// (master_seed, point index). `on_point` fires after each completed point,
/// so interrupted sweeps keep their finished prefix; its exceptions
/// propagate.
inline SweepResult run_sweep(const TannerGraph& g, const DecoderConfig& dec_cfg,
                             const ChannelConfig& channel_base, const QuantizerConfig& qc,
                             const StoppingRule& rule, const std::vector<double>& snr_points,
                             std::uint64_t master_seed, int threads = 1,
                             const std::function<void(const PointResult&)>& on_point = {}) {
    SweepResult sweep;
    for (std::size_t i = 0; i < snr_points.size(); ++i) {
        ChannelConfig cc = channel_base;
        cc.snr_db = snr_points[i];
        cc.seed = mix_seed(master_seed, i);
        PointResult pr = run_point(g, dec_cfg, cc, qc, rule, threads);
        pr.master_seed = master_seed;
        sweep.points.push_back(pr);
        if (on_point) on_point(sweep.points.back());
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// Clopper-Pearson exact binomial confidence interval
// ---------------------------------------------------------------------------

namespace detail {

inline double betacf(double a, double b, double x) {
    // Continued fraction for the incomplete beta function (modified Lentz).
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3.0e-16, kTiny = 1.0e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

inline double beta_inv(double p, double a, double b) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (reg_inc_beta(a, b, mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Exact (Clopper-Pearson) two-sided binomial confidence interval for
/// `errors` successes in `trials` trials.
inline std::pair<double, double> binomial_ci(long long errors, long long trials,
                                             double confidence) {
    if (trials < 1 || errors < 0 || errors > trials)
        throw std::invalid_argument("binomial_ci: need 0 <= errors <= trials, trials >= 1");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("binomial_ci: confidence must be in (0,1)");
    const double alpha = 1.0 - confidence;
    const double k = static_cast<double>(errors), n = static_cast<double>(trials);
    const double low = errors == 0 ? 0.0 : detail::beta_inv(alpha / 2.0, k, n - k + 1.0);
    const double high = errors == trials ? 1.0 : detail::beta_inv(1.0 - alpha / 2.0, k + 1.0, n - k);
    return {low, high};
}

// ---------------------------------------------------------------------------
// Persistence: JSON-lines (header + one object per point) and a plot-ready
// CSV. Numbers are shortest-round-trip decimals.
// ---------------------------------------------------------------------------

inline nlohmann::json point_to_json(const PointResult& p) {
    nlohmann::json j;
    j["snr_db"] = p.snr_db;
    j["frames_sent"] = p.frames_sent;
    j["bit_errors"] = p.bit_errors;
    j["frame_errors"] = p.frame_errors;
    j["ber"] = p.ber;
    j["fer"] = p.fer;
    j["mean_iterations"] = p.mean_iterations;
    j["mean_iterations_on_success"] = p.mean_iterations_on_success;
    j["wall_time_seconds"] = p.wall_time_seconds;
    j["master_seed"] = p.master_seed;
    j["censored"] = p.censored;
    j["undetected_errors"] = p.undetected_errors;
    j["converged_frames"] = p.converged_frames;
    return j;
}

inline std::string jsonl_header(const nlohmann::json& config) {
    nlohmann::json j;
    j["type"] = "header";
    j["version"] = kVersion;
    j["config"] = config;
    j["config_hash"] = fnv1a_hex(config.dump());
    return j.dump();
}

inline std::string csv_header() { return "snr_db,ber,fer,frames,mean_iters"; }

inline std::string csv_row(const PointResult& p) {
    using detail::format_double;
    return format_double(p.snr_db) + "," + format_double(p.ber) + "," + format_double(p.fer) +
           "," + std::to_string(p.frames_sent) + "," + format_double(p.mean_iterations);
}

}  // namespace spms
