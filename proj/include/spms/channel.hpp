#pragma once

// BPSK over AWGN for all-zero-codeword simulation, LLR computation, and the
// 4-bit sign-magnitude channel quantizer with scaling factor alpha.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spms/rng.hpp"

namespace spms {

enum class SnrKind { ebn0, esn0 };

struct ChannelConfig {
    double snr_db = 0.0;
    double rate = 0.5;  // code rate entering the Eb/N0 -> sigma^2 mapping
    std::uint64_t seed = 0;
    SnrKind snr_kind = SnrKind::ebn0;
};

/// Noise variance for BPSK: 1 / (2 R 10^(snr/10)) under Eb/N0,
/// 1 / (2 10^(snr/10)) under Es/N0. An infinite SNR maps to 0.
inline double noise_variance(const ChannelConfig& cc) {
    if (!(cc.rate > 0.0 && cc.rate < 1.0)) throw std::invalid_argument("rate must be in (0,1)");
    const double r = cc.snr_kind == SnrKind::ebn0 ? cc.rate : 1.0;
    return 1.0 / (2.0 * r * std::pow(10.0, cc.snr_db / 10.0));
}

/// BPSK symbols of the all-zero codeword (bit 0 -> +1) plus white Gaussian
/// noise. sigma^2 = 0 produces exact +1 entries.
inline std::vector<double> transmit_all_zero(const ChannelConfig& cc, std::int32_t n) {
    if (n < 1) throw std::invalid_argument("transmit: n must be >= 1");
    const double sigma2 = noise_variance(cc);
    std::vector<double> y(static_cast<std::size_t>(n), 1.0);
    if (sigma2 == 0.0) return y;
    const double sigma = std::sqrt(sigma2);
    Rng rng(cc.seed);
    for (auto& s : y) s = 1.0 + sigma * rng.next_gaussian();
    return y;
}

/// L_n = 2 y_n / sigma^2 under BPSK/AWGN with bit 0 mapped to +1.
inline std::vector<double> compute_llrs(const std::vector<double>& y, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("compute_llrs: sigma2 must be positive");
    std::vector<double> llrs(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) llrs[i] = 2.0 * y[i] / sigma2;
    return llrs;
}

enum class QuantizerRounding {
    half_up,  // floor(x + 0.5), the default
    floor,    // floor(x), for hardware-matching studies
};

struct QuantizerConfig {
    double alpha = 1.0;
    int llr_bits = 4;  // channel LLR precision; this artifact runs 4-bit only
    QuantizerRounding rounding = QuantizerRounding::half_up;
};

/// Sign-magnitude channel LLR I_n: sign in {-1,+1}, magnitude 0..7 at 4 bits.
struct SignMag {
    std::int8_t sign = +1;
    std::int8_t mag = 0;

    int value() const { return sign * mag; }
    bool operator==(const SignMag&) const = default;
};

struct ChannelObservation {
    std::vector<double> llrs;
    std::vector<SignMag> quantized;
};

/// I_n = (sign(L_n), min(round(alpha |L_n|), 2^(bits-1)-1)); an exact zero
/// LLR quantizes with sign +1 so runs stay reproducible.
inline ChannelObservation quantize_llrs(const std::vector<double>& llrs,
                                        const QuantizerConfig& qc) {
    if (!(qc.alpha > 0.0)) throw std::invalid_argument("quantizer: alpha must be positive");
    if (qc.llr_bits != 4) throw std::invalid_argument("quantizer: llr_bits is fixed at 4");
    const int cap = (1 << (qc.llr_bits - 1)) - 1;
    ChannelObservation obs;
    obs.llrs = llrs;
    obs.quantized.resize(llrs.size());
    for (std::size_t i = 0; i < llrs.size(); ++i) {
        const double l = llrs[i];
        const double scaled = qc.alpha * std::fabs(l);
        const double m = qc.rounding == QuantizerRounding::half_up ? std::floor(scaled + 0.5)
                                                                   : std::floor(scaled);
        obs.quantized[i].sign = (l < 0.0) ? -1 : +1;
        obs.quantized[i].mag = static_cast<std::int8_t>(m >= cap ? cap : static_cast<int>(m));
    }
    return obs;
}

}  // namespace spms
