#pragma once

// Iteration-dependent, degree-selective message weights in hardware-friendly
// sum-of-powers-of-two form. Weight values are exact dyadic rationals, kept
// as integer multiples of 1/8 so decoder arithmetic never touches floating
// point. Schedules serialize to JSON with exact decimal strings.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace spms {

// ---------------------------------------------------------------------------
// Exact decimal values
// ---------------------------------------------------------------------------

/// Reduced fraction; the exact value of a decimal string like "1.75".
struct Rational {
    long long num = 0;
    long long den = 1;

    void reduce() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool less_than(const Rational& o) const { return num * o.den < o.num * den; }
    bool positive() const { return num > 0; }

    /// value * 8 if this is an exact multiple of 1/8, else -1.
    long long eighths() const { return (8 * num) % den == 0 ? (8 * num) / den : -1; }
};

/// Parses a plain decimal ("3", "-0.125", "1.75") exactly. Throws on
/// anything else, including scientific notation and binary-float spellings.
inline Rational parse_exact_decimal(const std::string& text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
    std::string digits;
    long long den = 1;
    bool seen_point = false, seen_digit = false;
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == '.') {
            if (seen_point) throw std::invalid_argument("bad decimal '" + text + "'");
            seen_point = true;
        } else if (ch >= '0' && ch <= '9') {
            seen_digit = true;
            digits.push_back(ch);
            if (seen_point) den *= 10;
        } else {
            throw std::invalid_argument("bad decimal '" + text + "'");
        }
        if (digits.size() > 15) throw std::invalid_argument("decimal too long: '" + text + "'");
    }
    if (!seen_digit) throw std::invalid_argument("bad decimal '" + text + "'");
    long long num = 0;
    for (const char ch : digits) num = num * 10 + (ch - '0');
    Rational r{negative ? -num : num, den};
    r.reduce();
    return r;
}

/// Exact decimal rendering of a dyadic rational, always with a fractional
/// part ("3.0", "1.75", "0.125").
inline std::string to_decimal_string(Rational r) {
    r.reduce();
    long long den = r.den;
    long long scale = 1;
    int frac_digits = 0;
    while (den % 2 == 0) {
        den /= 2;
        scale *= 5;
        ++frac_digits;
    }
    while (den % 5 == 0) {
        den /= 5;
        scale *= 2;
        ++frac_digits;
    }
    if (den != 1) throw std::invalid_argument("value has no finite decimal form");
    long long units = r.num * scale;  // value * 10^frac_digits
    const bool negative = units < 0;
    if (negative) units = -units;
    std::string digits = std::to_string(units);
    if (static_cast<int>(digits.size()) <= frac_digits)
        digits.insert(0, static_cast<std::size_t>(frac_digits) - digits.size() + 1, '0');
    std::string whole = digits.substr(0, digits.size() - static_cast<std::size_t>(frac_digits));
    std::string frac = digits.substr(digits.size() - static_cast<std::size_t>(frac_digits));
    while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
    if (frac.empty()) frac = "0";
    return (negative ? "-" : "") + whole + "." + frac;
}

// ---------------------------------------------------------------------------
// Sum-of-powers-of-two weights
// ---------------------------------------------------------------------------

inline constexpr int kP2MinExponent = -3;
inline constexpr int kP2MaxExponent = +2;
inline constexpr int kP2MaxTerms = 3;
inline constexpr int kMaxWeightEighths = 63;  // 7.875, the top of the exponent range

struct P2Term {
    std::int8_t sign;      // -1 or +1
    std::int8_t exponent;  // term value is sign * 2^exponent

    bool operator==(const P2Term&) const = default;
};

/// A positive weight expressed as at most three signed powers of two, so
/// applying it needs only shifts and adds. Terms are canonical: distinct
/// exponents, descending.
struct P2Weight {
    std::vector<P2Term> terms;
    int eighths = 8;  // exact value * 8

    double value() const { return static_cast<double>(eighths) / 8.0; }
    Rational rational() const {
        Rational r{eighths, 8};
        r.reduce();
        return r;
    }
    bool operator==(const P2Weight&) const = default;
};

namespace detail {

inline int term_eighths(const P2Term& t) {
    return t.sign * (1 << (t.exponent - kP2MinExponent));
}

}  // namespace detail

/// Decomposes value*8 = `eighths` into <= 3 signed powers of two with
/// exponents in [-3, 2]. The plain binary expansion wins when it fits;
/// otherwise an exhaustive signed search runs, preferring fewer terms, then
/// less total term magnitude. Throws when no decomposition exists.
inline P2Weight p2_encode(int eighths) {
    if (eighths <= 0 || eighths > kMaxWeightEighths)
        throw std::invalid_argument("p2_encode: value out of (0, 7.875]");
    P2Weight w;
    w.eighths = eighths;
    if (std::popcount(static_cast<unsigned>(eighths)) <= kP2MaxTerms) {
        for (int bit = 5; bit >= 0; --bit)
            if (eighths & (1 << bit))
                w.terms.push_back({+1, static_cast<std::int8_t>(bit + kP2MinExponent)});
        return w;
    }
    // Signed fallback: try all 1..3-term subsets of the exponent range.
    std::vector<P2Term> best;
    long long best_mag = 0;
    auto consider = [&](const std::vector<P2Term>& cand) {
        int sum = 0;
        long long mag = 0;
        for (const auto& t : cand) {
            sum += detail::term_eighths(t);
            mag += 1 << (t.exponent - kP2MinExponent);
        }
        if (sum != eighths) return;
        if (!best.empty() && best.size() < cand.size()) return;
        if (!best.empty() && best.size() == cand.size() && best_mag <= mag) return;
        best = cand;
        best_mag = mag;
    };
    for (int e1 = kP2MaxExponent; e1 >= kP2MinExponent; --e1)
        for (int s1 : {+1, -1}) {
            const P2Term t1{static_cast<std::int8_t>(s1), static_cast<std::int8_t>(e1)};
            consider({t1});
            for (int e2 = e1 - 1; e2 >= kP2MinExponent; --e2)
                for (int s2 : {+1, -1}) {
                    const P2Term t2{static_cast<std::int8_t>(s2), static_cast<std::int8_t>(e2)};
                    consider({t1, t2});
                    for (int e3 = e2 - 1; e3 >= kP2MinExponent; --e3)
                        for (int s3 : {+1, -1})
                            consider({t1, t2,
                                      {static_cast<std::int8_t>(s3), static_cast<std::int8_t>(e3)}});
                }
        }
    if (best.empty())
        throw std::invalid_argument("p2_encode: " + to_decimal_string(Rational{eighths, 8}) +
                                    " is not a sum of up to 3 powers of two");
    w.terms = std::move(best);
    return w;
}

/// Shift-and-add product of a weight with a half-integer operand. The result
/// is in sixteenths and equals value(w) * x exactly.
inline long long apply_weight(const P2Weight& w, long long x_halves) {
    long long sixteenths = 0;
    for (const auto& t : w.terms) {
        const long long shifted = x_halves << (t.exponent - kP2MinExponent);
        sixteenths += t.sign > 0 ? shifted : -shifted;
    }
    return sixteenths;
}

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

/// Per-iteration weights for a set of target variable-node degrees; every
/// other degree implicitly runs at weight 1. Values are raw rationals so an
/// invalid file can be loaded, validated, and reported rather than rejected
/// at parse time.
struct WeightSchedule {
    int q = 0;                                 // message precision the schedule was built for
    std::vector<std::int32_t> target_degrees;  // ascending
    std::vector<Rational> weights;             // index = iteration

    int max_iters() const { return static_cast<int>(weights.size()); }

    bool is_all_ones() const {
        return std::all_of(weights.begin(), weights.end(),
                           [](const Rational& r) { return r == Rational{1, 1}; });
    }
};

struct ScheduleViolation {
    int iteration;  // -1 for schedule-level problems
    std::string message;
};

/// Checks positivity, the monotone non-decreasing constraint, and
/// sum-of-powers-of-two representability. Violations are data, not errors.
inline std::vector<ScheduleViolation> validate(const WeightSchedule& s) {
    std::vector<ScheduleViolation> out;
    if (s.weights.empty()) out.push_back({-1, "schedule has no iterations"});
    if (s.q < 2 || s.q > 4) out.push_back({-1, "q must be 2, 3, or 4"});
    if (s.target_degrees.empty()) out.push_back({-1, "no target degrees"});
    for (const auto d : s.target_degrees)
        if (d < 2) out.push_back({-1, "target degree below 2"});
    for (int i = 0; i < static_cast<int>(s.weights.size()); ++i) {
        const Rational& w = s.weights[static_cast<std::size_t>(i)];
        if (!w.positive()) {
            out.push_back({i, "weight must be positive"});
            continue;
        }
        const long long e = w.eighths();
        if (e < 0) {
            out.push_back({i, "weight " + to_decimal_string(w) + " is not a multiple of 1/8"});
        } else if (e > kMaxWeightEighths) {
            out.push_back({i, "weight exceeds 7.875"});
        } else {
            try {
                p2_encode(static_cast<int>(e));
            } catch (const std::invalid_argument& err) {
                out.push_back({i, err.what()});
            }
        }
        if (i > 0) {
            const Rational& prev = s.weights[static_cast<std::size_t>(i) - 1];
            if (w.less_than(prev))
                out.push_back({i, "weights must be non-decreasing: " + to_decimal_string(w) +
                                      " < " + to_decimal_string(prev)});
        }
    }
    return out;
}

/// Compiled per-iteration values in eighths, for the decoder. Requires a
/// schedule that validates cleanly.
inline std::vector<int> schedule_eighths(const WeightSchedule& s) {
    std::vector<int> out;
    out.reserve(s.weights.size());
    for (const auto& w : s.weights) {
        const long long e = w.eighths();
        if (e <= 0 || e > kMaxWeightEighths)
            throw std::invalid_argument("schedule contains a non-dyadic or out-of-range weight");
        p2_encode(static_cast<int>(e));  // representability gate
        out.push_back(static_cast<int>(e));
    }
    return out;
}

inline WeightSchedule make_schedule(int q, std::vector<std::int32_t> target_degrees,
                                    const std::vector<int>& eighths) {
    WeightSchedule s;
    s.q = q;
    std::sort(target_degrees.begin(), target_degrees.end());
    s.target_degrees = std::move(target_degrees);
    s.weights.reserve(eighths.size());
    for (const int e : eighths) s.weights.push_back(Rational{e, 8});
    for (auto& w : s.weights) w.reduce();
    return s;
}

inline WeightSchedule all_ones_schedule(int q, int max_iters) {
    return make_schedule(q, {3}, std::vector<int>(static_cast<std::size_t>(max_iters), 8));
}

/// The built-in optimized degree-3 schedules selectable as `table1` on the
/// command line. Defined for q = 2 and q = 3, 12 iterations each.
inline WeightSchedule table1_schedule(int q) {
    if (q == 2) return make_schedule(2, {3}, {8, 8, 8, 8, 12, 14, 14, 14, 14, 20, 24, 24});
    if (q == 3) return make_schedule(3, {3}, {8, 8, 8, 8, 10, 10, 10, 10, 12, 12, 12, 12});
    throw std::invalid_argument("table1 schedules exist for q = 2 and q = 3 only");
}

// ---------------------------------------------------------------------------
// JSON serialization: {"q": 2, "target_degrees": [3], "weights": ["1.0", ...]}
// Weights are exact decimal strings, never binary floats.
// ---------------------------------------------------------------------------

inline nlohmann::json schedule_to_json(const WeightSchedule& s) {
    nlohmann::json j;
    j["q"] = s.q;
    j["target_degrees"] = s.target_degrees;
    auto arr = nlohmann::json::array();
    for (const auto& w : s.weights) arr.push_back(to_decimal_string(w));
    j["weights"] = std::move(arr);
    return j;
}

inline WeightSchedule schedule_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("q") || !j.contains("target_degrees") ||
        !j.contains("weights"))
        throw std::invalid_argument(
            "weight schedule must have fields q, target_degrees, weights");
    WeightSchedule s;
    if (!j["q"].is_number_integer()) throw std::invalid_argument("schedule field q must be an integer");
    s.q = j["q"].get<int>();
    if (!j["target_degrees"].is_array())
        throw std::invalid_argument("target_degrees must be an array");
    for (const auto& d : j["target_degrees"]) {
        if (!d.is_number_integer()) throw std::invalid_argument("target degrees must be integers");
        s.target_degrees.push_back(d.get<std::int32_t>());
    }
    std::sort(s.target_degrees.begin(), s.target_degrees.end());
    if (!j["weights"].is_array()) throw std::invalid_argument("weights must be an array");
    for (const auto& w : j["weights"]) {
        if (!w.is_string())
            throw std::invalid_argument("weights must be exact decimal strings");
        s.weights.push_back(parse_exact_decimal(w.get<std::string>()));
    }
    return s;
}

inline std::string schedule_to_string(const WeightSchedule& s) {
    return schedule_to_json(s).dump(2) + "\n";
}

inline WeightSchedule schedule_from_string(const std::string& text) {
    return schedule_from_json(nlohmann::json::parse(text));
}

}  // namespace spms
