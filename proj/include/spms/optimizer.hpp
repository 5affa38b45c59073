#pragma once

// Random-search weight optimization: draw monotone non-decreasing candidate
// schedules over a value set of shift-and-add-friendly weights, score each by
// Monte-Carlo at a single SNR point, keep the best. Candidate 0 is always the
// all-ones schedule, so the plain decoder's score is part of every report.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "spms/channel.hpp"
#include "spms/decoder.hpp"
#include "spms/montecarlo.hpp"
#include "spms/rng.hpp"
#include "spms/tanner_graph.hpp"
#include "spms/weights.hpp"

namespace spms {

enum class Objective { ber, fer };

/// All positive values with at most three significant binary digits between
/// 1 and 3.5; spans every built-in schedule entry.
inline std::vector<P2Weight> default_weight_value_set() {
    std::vector<P2Weight> set;
    for (const int eighths : {8, 10, 12, 14, 16, 20, 24, 28}) set.push_back(p2_encode(eighths));
    return set;
}

struct OptimizerConfig {
    int n_candidates = 100;
    long long frames_per_candidate = 1000;
    double snr_db = 3.1;
    Objective objective = Objective::fer;
    std::vector<P2Weight> weight_value_set = default_weight_value_set();
    std::uint64_t seed = 0;
    bool common_random_numbers = true;
    std::vector<std::int32_t> target_degrees = {3};
    int threads = 1;
};

struct CandidateScore {
    WeightSchedule schedule;
    double score = 0.0;  // fer or ber per the objective
    long long frame_errors = 0;
    long long bit_errors = 0;
    long long iter_sum = 0;
    double mean_iterations = 0.0;
};

struct OptimizeResult {
    WeightSchedule best;
    double best_score = 0.0;
    int best_index = 0;
    std::vector<CandidateScore> all_scores;
};

/// Per-point channel seed used to evaluate a candidate. With common random
/// numbers every candidate shares one seed (identical noise), which is what
/// makes 30-error-scale rankings comparable.
inline std::uint64_t optimize_eval_seed(const OptimizerConfig& oc, int candidate_index) {
    const std::uint64_t base = mix_seed(oc.seed, 2);
    return oc.common_random_numbers ? base
                                    : mix_seed(base, static_cast<std::uint64_t>(candidate_index));
}

namespace detail {

inline std::vector<int> draw_monotone_eighths(Rng& rng, const std::vector<P2Weight>& values,
                                              int length) {
    std::vector<int> eighths(static_cast<std::size_t>(length));
    for (auto& e : eighths) e = values[rng.next_below(values.size())].eighths;
    // Sorting i.i.d. draws enforces the non-decreasing constraint without
    // changing the marginal value distribution.
    std::sort(eighths.begin(), eighths.end());
    return eighths;
}

}  // namespace detail

inline OptimizeResult optimize(const TannerGraph& g, const DecoderConfig& base_config,
                               const ChannelConfig& channel, const QuantizerConfig& qc,
                               const OptimizerConfig& oc) {
    if (oc.n_candidates < 1 || oc.frames_per_candidate < 1)
        throw std::invalid_argument("optimize: candidate and frame budgets must be >= 1");
    if (oc.weight_value_set.empty())
        throw std::invalid_argument("optimize: weight value set is empty");
    if (base_config.family != DecoderFamily::sp_ms)
        throw std::invalid_argument("optimize: weights apply to the sp_ms decoder");

    const int iters = base_config.max_iters;
    std::vector<WeightSchedule> candidates;
    candidates.reserve(static_cast<std::size_t>(oc.n_candidates));
    candidates.push_back(make_schedule(base_config.q, oc.target_degrees,
                                       std::vector<int>(static_cast<std::size_t>(iters), 8)));
    Rng draw_rng(mix_seed(oc.seed, 1));
    for (int i = 1; i < oc.n_candidates; ++i)
        candidates.push_back(
            make_schedule(base_config.q, oc.target_degrees,
                          detail::draw_monotone_eighths(draw_rng, oc.weight_value_set, iters)));

    std::vector<CandidateScore> scores(candidates.size());
    const StoppingRule exact_budget{oc.frames_per_candidate, 1, oc.frames_per_candidate};

    {
        // Validate the whole evaluation pipeline before any pool thread runs.
        DecoderConfig probe_cfg = base_config;
        probe_cfg.weight_schedule = candidates.front();
        SpmsDecoder probe(g, probe_cfg);
        (void)probe;
        ChannelConfig cc = channel;
        cc.snr_db = oc.snr_db;
        noise_variance(cc);
        if (!(qc.alpha > 0.0))
            throw std::invalid_argument("quantizer: alpha must be positive");
    }

    auto evaluate = [&](int idx) {
        DecoderConfig cfg = base_config;
        cfg.weight_schedule = candidates[static_cast<std::size_t>(idx)];
        ChannelConfig cc = channel;
        cc.snr_db = oc.snr_db;
        cc.seed = optimize_eval_seed(oc, idx);
        const PointResult pr = run_point(g, cfg, cc, qc, exact_budget, 1);
        CandidateScore& s = scores[static_cast<std::size_t>(idx)];
        s.schedule = candidates[static_cast<std::size_t>(idx)];
        s.frame_errors = pr.frame_errors;
        s.bit_errors = pr.bit_errors;
        s.iter_sum = static_cast<long long>(
            pr.mean_iterations * static_cast<double>(pr.frames_sent) + 0.5);
        s.mean_iterations = pr.mean_iterations;
        s.score = oc.objective == Objective::fer ? pr.fer : pr.ber;
    };

    int threads = oc.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || candidates.size() == 1) {
        for (int i = 0; i < static_cast<int>(candidates.size()); ++i) evaluate(i);
    } else {
        std::atomic<int> next{0};
        auto body = [&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= static_cast<int>(candidates.size())) break;
                evaluate(i);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }

    auto error_count = [&](const CandidateScore& s) {
        return oc.objective == Objective::fer ? s.frame_errors : s.bit_errors;
    };
    auto eighths_of = [](const WeightSchedule& s) {
        std::vector<long long> v;
        for (const auto& w : s.weights) v.push_back(w.eighths());
        return v;
    };
    int best = 0;
    for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
        const auto &a = scores[static_cast<std::size_t>(i)], &b = scores[static_cast<std::size_t>(best)];
        if (error_count(a) != error_count(b)) {
            if (error_count(a) < error_count(b)) best = i;
        } else if (a.iter_sum != b.iter_sum) {
            if (a.iter_sum < b.iter_sum) best = i;
        } else if (eighths_of(a.schedule) < eighths_of(b.schedule)) {
            best = i;
        }
    }

    OptimizeResult result;
    result.best = scores[static_cast<std::size_t>(best)].schedule;
    result.best_score = scores[static_cast<std::size_t>(best)].score;
    result.best_index = best;
    result.all_scores = std::move(scores);
    return result;
}

}  // namespace spms
