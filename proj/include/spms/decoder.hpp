#pragma once

// Message-passing decoders on a Tanner graph:
//
//   * decode_bp:   floating-point sum-product reference (tanh check rule).
//   * decode_spms: quantized sign-preserving min-sum with optional
//                  iteration-dependent weights on selected VN degrees.
//
// The SP-MS path is pure integer arithmetic. Channel LLRs are integers,
// the sign-preserving term mu/2 is a half-integer, and weights are multiples
// of 1/8, so every VN sum is an exact multiple of 1/16; it is carried as an
// int64 scaled by 16 and all comparisons are exact. Messages are
// sign-magnitude with magnitude <= 2^(q-1)-1 and always carry a sign
// (signed zero instead of an erasure).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spms/channel.hpp"
#include "spms/tanner_graph.hpp"
#include "spms/weights.hpp"

namespace spms {

enum class DecoderFamily { bp_float, sp_ms };

/// Exchanged q-bit message. Sign is always defined; magnitude 0 with either
/// sign is legal ("signed zero").
struct QMessage {
    std::int8_t sign = +1;
    std::int8_t mag = 0;

    int value() const { return sign * mag; }
    bool operator==(const QMessage&) const = default;
};

struct DecoderConfig {
    DecoderFamily family = DecoderFamily::sp_ms;
    int q = 2;          // exchanged-message precision bits, in {2,3,4}
    int max_iters = 12;
    // Offset phi as a function of the pre-saturation magnitude floor(|m_s|);
    // unlisted magnitudes get 0. Default empty = pure saturation.
    std::map<int, int> offset_table;
    // Weights for the schedule's target degrees; absent = the plain SP-MS
    // decoder (every node at weight 1 through a weight-free code path).
    std::optional<WeightSchedule> weight_schedule;
};

struct DecodeOutcome {
    std::vector<std::uint8_t> bits;  // hard decisions, length N
    bool converged = false;          // zero syndrome
    int iterations_used = 0;
    // syndrome_trace[0] is the pre-iteration check on the channel hard
    // decisions; one entry per executed iteration follows.
    std::vector<std::int32_t> syndrome_trace;
};

/// Per-edge decoder state, exposed to the per-iteration debug hook.
struct EdgeState {
    std::vector<QMessage> v2c;
    std::vector<QMessage> c2v;
    std::vector<std::int8_t> mu;  // sign-preserving factor, always +1 or -1
};

/// H * bits over GF(2): number of unsatisfied checks and whether all are
/// satisfied.
inline std::pair<std::int32_t, bool> syndrome(const TannerGraph& g,
                                              const std::vector<std::uint8_t>& bits) {
    if (static_cast<std::int32_t>(bits.size()) != g.n_vars())
        throw std::invalid_argument("syndrome: bits length does not match graph");
    std::int32_t weight = 0;
    for (std::int32_t c = 0; c < g.n_checks(); ++c) {
        unsigned parity = 0;
        const std::int32_t* nb = g.cn_neighbors(c);
        for (std::int32_t k = 0; k < g.cn_degree(c); ++k) parity ^= bits[nb[k]];
        weight += static_cast<std::int32_t>(parity & 1u);
    }
    return {weight, weight == 0};
}

namespace detail {

inline int message_cap(int q) { return (1 << (q - 1)) - 1; }

/// Extrinsic update rules need degree >= 2 everywhere.
inline void require_min_degree_2(const TannerGraph& g) {
    for (std::int32_t v = 0; v < g.n_vars(); ++v)
        if (g.vn_degree(v) < 2)
            throw std::invalid_argument("decoder: variable node of degree < 2");
    for (std::int32_t c = 0; c < g.n_checks(); ++c)
        if (g.cn_degree(c) < 2)
            throw std::invalid_argument("decoder: check node of degree < 2");
}

inline int offset_for(const std::map<int, int>& table, long long floor_mag) {
    if (floor_mag > std::numeric_limits<int>::max()) return 0;
    const auto it = table.find(static_cast<int>(floor_mag));
    return it == table.end() ? 0 : it->second;
}

/// Psi on a VN sum carried in sixteenths. The sign of an exactly-zero sum is
/// the caller's tie policy.
inline QMessage psi_s16(long long s16, int q, const std::map<int, int>& offset_table,
                        std::int8_t zero_sign) {
    QMessage m;
    const long long abs16 = s16 < 0 ? -s16 : s16;
    const long long floor_mag = abs16 / 16;
    long long mag = floor_mag - offset_for(offset_table, floor_mag);
    if (mag < 0) mag = 0;
    const int cap = message_cap(q);
    if (mag > cap) mag = cap;
    m.sign = s16 > 0 ? std::int8_t{+1} : s16 < 0 ? std::int8_t{-1} : zero_sign;
    m.mag = static_cast<std::int8_t>(mag);
    return m;
}

/// Tie sign for an exactly-zero VN sum: the channel sign when the channel
/// magnitude is nonzero, else the sign-preserving factor.
inline std::int8_t zero_tie_sign(SignMag i_n, std::int8_t mu) { return i_n.mag > 0 ? i_n.sign : mu; }

}  // namespace detail

/// Saturation function Psi: sign(m_s) paired with the offset-and-clipped
/// magnitude min(max(floor(|m_s|) - phi, 0), 2^(q-1)-1). A zero input gets
/// sign +1; inside the SP-MS update a zero sum never reaches Psi because the
/// caller resolves the tie first.
inline QMessage psi(double m_s, int q, const std::map<int, int>& offset_table = {}) {
    if (!std::isfinite(m_s)) throw std::invalid_argument("psi: input must be finite");
    if (q < 2 || q > 4) throw std::invalid_argument("psi: q must be 2, 3, or 4");
    QMessage m;
    const double floor_abs = std::floor(std::fabs(m_s));
    const long long floor_mag =
        floor_abs > 9.0e18 ? std::numeric_limits<long long>::max() : static_cast<long long>(floor_abs);
    long long mag = floor_mag - detail::offset_for(offset_table, floor_mag);
    if (mag < 0) mag = 0;
    const int cap = detail::message_cap(q);
    if (mag > cap) mag = cap;
    m.sign = m_s > 0.0 ? std::int8_t{+1} : m_s < 0.0 ? std::int8_t{-1} : std::int8_t{+1};
    m.mag = static_cast<std::int8_t>(mag);
    return m;
}

/// Weighted SP-MS variable-node rule: Psi(I_n + w (mu/2 + sum of extrinsic
/// c2v messages)). `weight_eighths` is the exact weight times 8.
inline QMessage vn_update_spms(SignMag i_n, const std::vector<QMessage>& incoming, int mu,
                               int weight_eighths, int q,
                               const std::map<int, int>& offset_table = {}) {
    if (incoming.empty())
        throw std::invalid_argument("vn_update_spms: extrinsic set must be nonempty");
    if (weight_eighths <= 0) throw std::invalid_argument("vn_update_spms: weight must be positive");
    long long sum = 0;
    for (const auto& m : incoming) sum += m.value();
    // s = I + w (mu/2 + sum) = I + (w8/8)(t2/2), so 16 s = 16 I + w8 t2.
    const long long t_halves = mu + 2 * sum;
    const long long s16 = 16LL * i_n.value() + static_cast<long long>(weight_eighths) * t_halves;
    return detail::psi_s16(s16, q, offset_table,
                           detail::zero_tie_sign(i_n, static_cast<std::int8_t>(mu)));
}

/// Min-sum check-node rule over the extrinsic set: product of signs, minimum
/// of magnitudes. Signed zeros participate like any other magnitude.
inline QMessage cn_update_minsum(const std::vector<QMessage>& incoming) {
    if (incoming.empty()) throw std::invalid_argument("cn_update_minsum: empty extrinsic set");
    int sign = +1;
    int mag = detail::message_cap(4) + 1;
    for (const auto& m : incoming) {
        sign *= m.sign;
        mag = std::min(mag, static_cast<int>(m.mag));
    }
    return {static_cast<std::int8_t>(sign), static_cast<std::int8_t>(mag)};
}

/// Weighted a-posteriori decision: bit 0 iff I_n + w (mu_n/2 + sum of all
/// incoming c2v) > 0; an exact zero resolves to the channel sign, then mu_n.
inline std::uint8_t tentative_decision(SignMag i_n, const std::vector<QMessage>& all_incoming,
                                       int mu_n, int weight_eighths) {
    long long sum = 0;
    for (const auto& m : all_incoming) sum += m.value();
    const long long t_halves = mu_n + 2 * sum;
    const long long g16 = 16LL * i_n.value() + static_cast<long long>(weight_eighths) * t_halves;
    if (g16 > 0) return 0;
    if (g16 < 0) return 1;
    return detail::zero_tie_sign(i_n, static_cast<std::int8_t>(mu_n)) < 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// SP-MS decoder
// ---------------------------------------------------------------------------

/// One decoder instance owns its edge state and serves one frame at a time;
/// run one instance per worker thread against the shared immutable graph.
class SpmsDecoder {
  public:
    SpmsDecoder(const TannerGraph& graph, DecoderConfig config)
        : g_(graph), cfg_(std::move(config)) {
        if (cfg_.family != DecoderFamily::sp_ms)
            throw std::invalid_argument("SpmsDecoder: config.family must be sp_ms");
        if (cfg_.q < 2 || cfg_.q > 4) throw std::invalid_argument("q must be 2, 3, or 4");
        if (cfg_.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
        detail::require_min_degree_2(g_);
        const std::size_t e = static_cast<std::size_t>(g_.n_edges());
        state_.v2c.resize(e);
        state_.c2v.resize(e);
        state_.mu.resize(e);
        if (cfg_.weight_schedule) {
            const WeightSchedule& s = *cfg_.weight_schedule;
            if (s.max_iters() != cfg_.max_iters)
                throw std::invalid_argument("weight schedule length does not match max_iters");
            weight_eighths_ = schedule_eighths(s);
            weighted_.assign(static_cast<std::size_t>(g_.n_vars()), 0);
            for (std::int32_t v = 0; v < g_.n_vars(); ++v)
                for (const auto d : s.target_degrees)
                    if (g_.vn_degree(v) == d) weighted_[static_cast<std::size_t>(v)] = 1;
        }
        mu_tent_.resize(static_cast<std::size_t>(g_.n_vars()));
    }

    const DecoderConfig& config() const { return cfg_; }

    /// Debug hook, called after each iteration's VN phase with the full edge
    /// state and current decisions.
    std::function<void(int iter, const EdgeState&, const std::vector<std::uint8_t>&)> on_iteration;

    DecodeOutcome decode(const std::vector<SignMag>& channel) {
        if (static_cast<std::int32_t>(channel.size()) != g_.n_vars())
            throw std::invalid_argument("decode: observation length does not match graph");
        const int cap = detail::message_cap(cfg_.q);

        DecodeOutcome out;
        out.bits.resize(channel.size());
        for (std::size_t v = 0; v < channel.size(); ++v) out.bits[v] = channel[v].sign < 0;
        {
            const auto [w, zero] = syndrome(g_, out.bits);
            out.syndrome_trace.push_back(w);
            if (zero) {
                out.converged = true;
                return out;
            }
        }

        // First messages: the channel LLR saturated to the q-bit alphabet,
        // sign taken from the channel so signed zeros keep their sign.
        for (std::int32_t v = 0; v < g_.n_vars(); ++v) {
            const SignMag in = channel[static_cast<std::size_t>(v)];
            const QMessage first{in.sign, static_cast<std::int8_t>(std::min<int>(in.mag, cap))};
            for (std::int32_t k = g_.vn_offset(v); k < g_.vn_offset(v + 1); ++k) {
                state_.v2c[static_cast<std::size_t>(k)] = first;
                state_.mu[static_cast<std::size_t>(k)] = in.sign;
            }
            mu_tent_[static_cast<std::size_t>(v)] = in.sign;
        }

        for (int iter = 0; iter < cfg_.max_iters; ++iter) {
            run_cn_phase();
            run_vn_phase(channel, iter, out.bits);
            if (on_iteration) on_iteration(iter, state_, out.bits);
            const auto [w, zero] = syndrome(g_, out.bits);
            out.syndrome_trace.push_back(w);
            out.iterations_used = iter + 1;
            if (zero) {
                out.converged = true;
                break;
            }
        }
        return out;
    }

  private:
    void run_cn_phase() {
        // Plain extrinsic min over each check's other edges.
        for (std::int32_t c = 0; c < g_.n_checks(); ++c) {
            const std::int32_t* eids = g_.cn_edge_ids(c);
            const std::int32_t deg = g_.cn_degree(c);
            for (std::int32_t i = 0; i < deg; ++i) {
                int sign = +1;
                int mag = std::numeric_limits<int>::max();
                for (std::int32_t j = 0; j < deg; ++j) {
                    if (j == i) continue;
                    const QMessage m = state_.v2c[static_cast<std::size_t>(eids[j])];
                    sign *= m.sign;
                    mag = std::min(mag, static_cast<int>(m.mag));
                }
                state_.c2v[static_cast<std::size_t>(eids[i])] = {static_cast<std::int8_t>(sign),
                                                                 static_cast<std::int8_t>(mag)};
            }
        }
    }

    void run_vn_phase(const std::vector<SignMag>& channel, int iter,
                      std::vector<std::uint8_t>& bits) {
        for (std::int32_t v = 0; v < g_.n_vars(); ++v) {
            const SignMag in = channel[static_cast<std::size_t>(v)];
            const std::int32_t begin = g_.vn_offset(v), end = g_.vn_offset(v + 1);
            long long total = 0;
            for (std::int32_t k = begin; k < end; ++k)
                total += state_.c2v[static_cast<std::size_t>(k)].value();

            const bool weighted = !weighted_.empty() && weighted_[static_cast<std::size_t>(v)];
            const long long in16 = 16LL * in.value();
            for (std::int32_t k = begin; k < end; ++k) {
                const std::size_t e = static_cast<std::size_t>(k);
                const std::int8_t mu = state_.mu[e];
                const long long t_halves = mu + 2 * (total - state_.c2v[e].value());
                // Weight-free path for the plain decoder; exact fixed point
                // either way (16 s = 16 I + w8 t2, and w8 = 8 at weight 1).
                const long long s16 =
                    weighted ? in16 + static_cast<long long>(
                                          weight_eighths_[static_cast<std::size_t>(iter)]) *
                                          t_halves
                             : in16 + 8LL * t_halves;
                state_.v2c[e] =
                    detail::psi_s16(s16, cfg_.q, cfg_.offset_table, detail::zero_tie_sign(in, mu));
                state_.mu[e] = state_.v2c[e].sign;
            }

            const std::int8_t mu_n = mu_tent_[static_cast<std::size_t>(v)];
            const long long t_halves = mu_n + 2 * total;
            const long long g16 =
                weighted ? in16 + static_cast<long long>(
                                      weight_eighths_[static_cast<std::size_t>(iter)]) *
                                      t_halves
                         : in16 + 8LL * t_halves;
            std::int8_t decision_sign;
            if (g16 > 0)
                decision_sign = +1;
            else if (g16 < 0)
                decision_sign = -1;
            else
                decision_sign = detail::zero_tie_sign(in, mu_n);
            bits[static_cast<std::size_t>(v)] = decision_sign < 0;
            mu_tent_[static_cast<std::size_t>(v)] = decision_sign;
        }
    }

    const TannerGraph& g_;
    DecoderConfig cfg_;
    EdgeState state_;
    std::vector<std::int8_t> mu_tent_;       // node-level mu for the tentative rule
    std::vector<std::uint8_t> weighted_;     // per-vn: schedule applies
    std::vector<int> weight_eighths_;        // per-iteration weight * 8
};

inline DecodeOutcome decode_spms(const TannerGraph& g, const ChannelObservation& obs,
                                 const DecoderConfig& cfg) {
    SpmsDecoder dec(g, cfg);
    return dec.decode(obs.quantized);
}

// ---------------------------------------------------------------------------
// Floating-point BP reference
// ---------------------------------------------------------------------------

/// Check-node magnitudes are clamped here to keep atanh finite; tanh(x/2)
/// rounds to 1.0 in double precision near this point anyway.
inline constexpr double kBpMessageClamp = 19.07;

class BpDecoder {
  public:
    BpDecoder(const TannerGraph& graph, DecoderConfig config)
        : g_(graph), cfg_(std::move(config)) {
        if (cfg_.family != DecoderFamily::bp_float)
            throw std::invalid_argument("BpDecoder: config.family must be bp_float");
        if (cfg_.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
        detail::require_min_degree_2(g_);
        const std::size_t e = static_cast<std::size_t>(g_.n_edges());
        v2c_.resize(e);
        c2v_.resize(e);
        tanh_half_.resize(e);
    }

    DecodeOutcome decode(const std::vector<double>& llrs) {
        if (static_cast<std::int32_t>(llrs.size()) != g_.n_vars())
            throw std::invalid_argument("decode: llr length does not match graph");

        DecodeOutcome out;
        out.bits.resize(llrs.size());
        for (std::size_t v = 0; v < llrs.size(); ++v) out.bits[v] = llrs[v] < 0.0;
        {
            const auto [w, zero] = syndrome(g_, out.bits);
            out.syndrome_trace.push_back(w);
            if (zero) {
                out.converged = true;
                return out;
            }
        }

        for (std::int32_t v = 0; v < g_.n_vars(); ++v)
            for (std::int32_t k = g_.vn_offset(v); k < g_.vn_offset(v + 1); ++k)
                v2c_[static_cast<std::size_t>(k)] = llrs[static_cast<std::size_t>(v)];

        for (int iter = 0; iter < cfg_.max_iters; ++iter) {
            for (std::size_t e = 0; e < v2c_.size(); ++e) tanh_half_[e] = std::tanh(0.5 * v2c_[e]);
            for (std::int32_t c = 0; c < g_.n_checks(); ++c) {
                const std::int32_t* eids = g_.cn_edge_ids(c);
                const std::int32_t deg = g_.cn_degree(c);
                for (std::int32_t i = 0; i < deg; ++i) {
                    double prod = 1.0;
                    for (std::int32_t j = 0; j < deg; ++j)
                        if (j != i) prod *= tanh_half_[static_cast<std::size_t>(eids[j])];
                    double m = 2.0 * std::atanh(prod);
                    if (m > kBpMessageClamp) m = kBpMessageClamp;
                    if (m < -kBpMessageClamp) m = -kBpMessageClamp;
                    c2v_[static_cast<std::size_t>(eids[i])] = m;
                }
            }
            for (std::int32_t v = 0; v < g_.n_vars(); ++v) {
                const double l = llrs[static_cast<std::size_t>(v)];
                double total = l;
                for (std::int32_t k = g_.vn_offset(v); k < g_.vn_offset(v + 1); ++k)
                    total += c2v_[static_cast<std::size_t>(k)];
                for (std::int32_t k = g_.vn_offset(v); k < g_.vn_offset(v + 1); ++k) {
                    const std::size_t e = static_cast<std::size_t>(k);
                    v2c_[e] = total - c2v_[e];
                }
                out.bits[static_cast<std::size_t>(v)] =
                    total < 0.0 ? 1 : (total > 0.0 ? 0 : (l < 0.0));
            }
            const auto [w, zero] = syndrome(g_, out.bits);
            out.syndrome_trace.push_back(w);
            out.iterations_used = iter + 1;
            if (zero) {
                out.converged = true;
                break;
            }
        }
        return out;
    }

  private:
    const TannerGraph& g_;
    DecoderConfig cfg_;
    std::vector<double> v2c_, c2v_, tanh_half_;
};

inline DecodeOutcome decode_bp(const TannerGraph& g, const std::vector<double>& llrs,
                               const DecoderConfig& cfg) {
    BpDecoder dec(g, cfg);
    return dec.decode(llrs);
}

}  // namespace spms
