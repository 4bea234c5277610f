#pragma once
// Log-space probability helpers.

#include <cmath>
#include <limits>
#include <span>

namespace gal {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Floor applied to log-probabilities before they enter softmax-style
// renormalizations; just above the double-precision underflow point.
inline constexpr double kLogFloor = -745.0;

inline double floor_log(double lp) { return lp < kLogFloor ? kLogFloor : lp; }

// log(sum_i exp(x_i)); returns -inf for an empty or all-(-inf) input.
inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs)
        if (x > m) m = x;
    if (!(m > kNegInf)) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = a > b ? a : b;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Streaming log-sum-exp accumulator with a fixed, caller-defined visit order.
class LogSumAccumulator {
public:
    void add(double x) {
        if (x == kNegInf) return;
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
    }
    double value() const {
        if (!(max_ > kNegInf)) return kNegInf;
        return max_ + std::log(sum_);
    }

private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

}  // namespace gal
