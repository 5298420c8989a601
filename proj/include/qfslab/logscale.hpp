#pragma once

// Log-scale arithmetic helpers. Group orders reach n! for n in the hundreds, far
// beyond double range, so every order is carried as a natural logarithm and only
// converted to a linear value when it fits.

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfslab {

inline constexpr double kLn10 = 2.302585092994045684017991454684;

inline double log_factorial(int n) {
    if (n < 0) throw std::invalid_argument("log_factorial: negative n");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double log10_factorial(int n) { return log_factorial(n) / kLn10; }

// Order of a finite group, stored as ln|G|.
class GroupOrder {
  public:
    static GroupOrder from_count(double count) {
        if (!(count >= 1.0) || !std::isfinite(count))
            throw std::invalid_argument("GroupOrder: count must be finite and >= 1");
        return GroupOrder(std::log(count));
    }
    static GroupOrder factorial(int n) { return GroupOrder(log_factorial(n)); }
    static GroupOrder from_log(double ln_value) {
        if (!std::isfinite(ln_value) || ln_value < 0.0)
            throw std::invalid_argument("GroupOrder: ln|G| must be finite and >= 0");
        return GroupOrder(ln_value);
    }

    double log_value() const { return ln_; }
    double log10_value() const { return ln_ / kLn10; }
    // Linear value; +inf when it exceeds double range.
    double value() const { return std::exp(ln_); }

  private:
    explicit GroupOrder(double ln_value) : ln_(ln_value) {}
    double ln_;
};

// log10(10^a + 10^b), stable for widely separated magnitudes.
inline double log10_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log10(1.0 + std::pow(10.0, b - a));
}

// log10 of a sum of terms given as log10 values.
inline double log10_sum(const std::vector<double>& log10_terms) {
    if (log10_terms.empty()) throw std::invalid_argument("log10_sum: empty term list");
    if (log10_terms.size() == 1) return log10_terms[0];
    double m = log10_terms[0];
    for (double t : log10_terms)
        if (t > m) m = t;
    double acc = 0.0;
    for (double t : log10_terms) acc += std::pow(10.0, t - m);
    return m + std::log10(acc);
}

// Render 10^log10_value as "m.mmmmm e+XXX" even when it overflows double.
inline std::string format_pow10(double log10_value) {
    if (!std::isfinite(log10_value)) return log10_value > 0 ? "inf" : "0";
    double e = std::floor(log10_value);
    double mant = std::pow(10.0, log10_value - e);
    // Guard against mantissa rounding to 10.
    if (mant >= 10.0) {
        mant /= 10.0;
        e += 1.0;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6ge%+03d", mant, static_cast<int>(e));
    return buf;
}

}  // namespace qfslab
