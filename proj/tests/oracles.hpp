#pragma once

// Brute-force reference implementations used as oracles. These mirror the
// decoder rules in plain double / dense arithmetic and stay independent of
// the integer fixed-point production path they check.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "spms/channel.hpp"
#include "spms/decoder.hpp"
#include "spms/rng.hpp"
#include "spms/tanner_graph.hpp"

namespace oracle {

inline spms::QMessage ref_psi(double m_s, int q, const std::map<int, int>& offsets,
                              int zero_sign = +1) {
    const int cap = (1 << (q - 1)) - 1;
    const long long fl = static_cast<long long>(std::floor(std::fabs(m_s)));
    const auto it = offsets.find(static_cast<int>(fl));
    long long mag = fl - (it == offsets.end() ? 0 : it->second);
    if (mag < 0) mag = 0;
    if (mag > cap) mag = cap;
    const int sign = m_s > 0 ? +1 : m_s < 0 ? -1 : zero_sign;
    return {static_cast<std::int8_t>(sign), static_cast<std::int8_t>(mag)};
}

inline spms::QMessage ref_vn_update(spms::SignMag i_n, const std::vector<spms::QMessage>& inc,
                                    int mu, double weight, int q,
                                    const std::map<int, int>& offsets = {}) {
    double sum = 0.0;
    for (const auto& m : inc) sum += m.value();
    const double s = i_n.value() + weight * (mu / 2.0 + sum);
    const int zero_sign = i_n.mag > 0 ? i_n.sign : mu;
    return ref_psi(s, q, offsets, zero_sign);
}

inline spms::QMessage ref_cn_update(const std::vector<spms::QMessage>& inc) {
    int sign = +1;
    int mag = 1 << 20;
    for (const auto& m : inc) {
        sign *= m.sign;
        if (m.mag < mag) mag = m.mag;
    }
    return {static_cast<std::int8_t>(sign), static_cast<std::int8_t>(mag)};
}

inline std::uint8_t ref_tentative(spms::SignMag i_n, const std::vector<spms::QMessage>& all,
                                  int mu_n, double weight) {
    double sum = 0.0;
    for (const auto& m : all) sum += m.value();
    const double g = i_n.value() + weight * (mu_n / 2.0 + sum);
    if (g > 0) return 0;
    if (g < 0) return 1;
    return (i_n.mag > 0 ? i_n.sign : mu_n) < 0 ? 1 : 0;
}

/// Dense GF(2) product H * bits, from an explicit row list.
inline std::int32_t dense_syndrome_weight(const std::vector<std::vector<int>>& rows,
                                          const std::vector<std::uint8_t>& bits) {
    std::int32_t w = 0;
    for (const auto& row : rows) {
        unsigned parity = 0;
        for (const int v : row) parity ^= bits[static_cast<std::size_t>(v)];
        w += static_cast<std::int32_t>(parity & 1u);
    }
    return w;
}

/// All codewords of a small code by exhaustive enumeration over 2^N vectors.
inline std::vector<std::vector<std::uint8_t>> enumerate_codewords(const spms::TannerGraph& g) {
    std::vector<std::vector<std::uint8_t>> words;
    const int n = g.n_vars();
    for (std::uint32_t v = 0; v < (1u << n); ++v) {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) bits[static_cast<std::size_t>(i)] = (v >> i) & 1u;
        if (spms::syndrome(g, bits).second) words.push_back(std::move(bits));
    }
    return words;
}

/// Maximum-likelihood decoding by exhaustive correlation over the codebook.
inline std::vector<std::uint8_t> ml_decode(const std::vector<std::vector<std::uint8_t>>& codebook,
                                           const std::vector<double>& llrs) {
    double best = -1e300;
    std::vector<std::uint8_t> best_word;
    for (const auto& word : codebook) {
        double corr = 0.0;
        for (std::size_t i = 0; i < word.size(); ++i) corr += (1.0 - 2.0 * word[i]) * llrs[i];
        if (corr > best) {
            best = corr;
            best_word = word;
        }
    }
    return best_word;
}

/// Uniform-ish random codeword of H by dense GF(2) elimination: solve for the
/// pivot variables after assigning the free variables at random.
inline std::vector<std::uint8_t> random_codeword(const spms::TannerGraph& g, spms::Rng& rng) {
    const int n = g.n_vars(), m = g.n_checks();
    std::vector<std::vector<std::uint8_t>> rows(
        static_cast<std::size_t>(m), std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0));
    for (std::int32_t c = 0; c < m; ++c)
        for (std::int32_t k = 0; k < g.cn_degree(c); ++k)
            rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(g.cn_neighbors(c)[k])] = 1;

    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int pr = -1;
        for (int r = rank; r < m; ++r)
            if (rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(rows[static_cast<std::size_t>(rank)], rows[static_cast<std::size_t>(pr)]);
        for (int r = 0; r < m; ++r)
            if (r != rank && rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)])
                for (int j = 0; j < n; ++j)
                    rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] ^=
                        rows[static_cast<std::size_t>(rank)][static_cast<std::size_t>(j)];
        pivot_col.push_back(col);
        ++rank;
    }

    std::vector<std::uint8_t> x(static_cast<std::size_t>(n), 0);
    std::vector<std::uint8_t> is_pivot(static_cast<std::size_t>(n), 0);
    for (const int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = 1;
    for (int col = 0; col < n; ++col)
        if (!is_pivot[static_cast<std::size_t>(col)])
            x[static_cast<std::size_t>(col)] = static_cast<std::uint8_t>(rng.next_below(2));
    for (int r = rank - 1; r >= 0; --r) {
        unsigned acc = 0;
        for (int j = 0; j < n; ++j)
            if (j != pivot_col[static_cast<std::size_t>(r)])
                acc ^= static_cast<unsigned>(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] &
                                             x[static_cast<std::size_t>(j)]);
        x[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(r)])] =
            static_cast<std::uint8_t>(acc & 1u);
    }
    return x;
}

/// True iff some pair of check nodes shares two variable nodes (a 4-cycle).
/// Independent of the BFS girth computation.
inline bool has_four_cycle(const spms::TannerGraph& g) {
    std::map<std::pair<std::int32_t, std::int32_t>, int> seen;
    for (std::int32_t v = 0; v < g.n_vars(); ++v) {
        const auto* nb = g.vn_neighbors(v);
        const auto deg = g.vn_degree(v);
        for (std::int32_t i = 0; i < deg; ++i)
            for (std::int32_t j = i + 1; j < deg; ++j)
                if (++seen[{nb[i], nb[j]}] > 1) return true;
    }
    return false;
}

}  // namespace oracle
