#ifndef TRANSOBS_NUMERICS_HPP
#define TRANSOBS_NUMERICS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>

namespace transobs {

/// Neumaier-compensated accumulator. Additions are order-sensitive by
/// design: callers must feed terms in a fixed order to get reproducible
/// sums (parallel map, sequential reduce).
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

/// A real number carried as sign * exp(log_mag). Used when exponential
/// weights push integrals outside double range.
struct SignedLog {
    double log_mag = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static SignedLog zero() { return {}; }
    static SignedLog from_value(double v) {
        SignedLog r;
        if (v == 0.0 || !std::isfinite(v)) {
            if (std::isinf(v)) {
                r.log_mag = std::numeric_limits<double>::infinity();
                r.sign = v > 0 ? 1 : -1;
            }
            return r;
        }
        r.sign = v > 0 ? 1 : -1;
        r.log_mag = std::log(std::abs(v));
        return r;
    }
    static SignedLog from_log(double lm, int sg) { return {lm, sg}; }

    bool is_zero() const { return sign == 0; }
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_mag); }

    friend SignedLog operator-(SignedLog a) {
        a.sign = -a.sign;
        return a;
    }
    friend SignedLog operator*(const SignedLog& a, const SignedLog& b) {
        if (a.sign == 0 || b.sign == 0) return {};
        return {a.log_mag + b.log_mag, a.sign * b.sign};
    }
    SignedLog scaled(double factor_log) const {
        if (sign == 0) return {};
        return {log_mag + factor_log, sign};
    }
};

inline SignedLog signed_log_add(const SignedLog& a, const SignedLog& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const SignedLog& hi = (a.log_mag >= b.log_mag) ? a : b;
    const SignedLog& lo = (a.log_mag >= b.log_mag) ? b : a;
    double d = lo.log_mag - hi.log_mag;  // <= 0
    if (hi.sign == lo.sign) return {hi.log_mag + std::log1p(std::exp(d)), hi.sign};
    double m = std::exp(d);
    if (m >= 1.0) return {};  // exact cancellation (log_mag equal)
    return {hi.log_mag + std::log1p(-m), hi.sign};
}

inline SignedLog signed_log_sub(const SignedLog& a, const SignedLog& b) { return signed_log_add(a, -b); }

/// Online log-sum-exp of nonnegative terms given by their logs.
/// Deterministic for a fixed feed order; mergeable in fixed order.
struct LogAccumulator {
    double max_log = -std::numeric_limits<double>::infinity();
    double scaled_sum = 0.0;  // sum of exp(l - max_log)

    void add_log(double l) {
        if (l == -std::numeric_limits<double>::infinity()) return;
        if (scaled_sum == 0.0) {
            max_log = l;
            scaled_sum = 1.0;
            return;
        }
        if (l <= max_log) {
            scaled_sum += std::exp(l - max_log);
        } else {
            scaled_sum = scaled_sum * std::exp(max_log - l) + 1.0;
            max_log = l;
        }
    }
    void merge(const LogAccumulator& o) {
        if (o.scaled_sum == 0.0) return;
        if (scaled_sum == 0.0) {
            *this = o;
            return;
        }
        if (o.max_log <= max_log) {
            scaled_sum += o.scaled_sum * std::exp(o.max_log - max_log);
        } else {
            scaled_sum = scaled_sum * std::exp(max_log - o.max_log) + o.scaled_sum;
            max_log = o.max_log;
        }
    }
    double log_value() const {
        if (scaled_sum == 0.0) return -std::numeric_limits<double>::infinity();
        return max_log + std::log(scaled_sum);
    }
};

/// Signed log-domain accumulator: positive and negative parts tracked
/// separately, combined only at the end.
struct SignedLogAccumulator {
    LogAccumulator pos, neg;

    void add(double log_mag, int sign) {
        if (sign > 0)
            pos.add_log(log_mag);
        else if (sign < 0)
            neg.add_log(log_mag);
    }
    void add_term(double log_weight, double factor) {
        if (factor == 0.0) return;
        add(log_weight + std::log(std::abs(factor)), factor > 0 ? 1 : -1);
    }
    void merge(const SignedLogAccumulator& o) {
        pos.merge(o.pos);
        neg.merge(o.neg);
    }
    SignedLog value() const {
        return signed_log_sub(SignedLog::from_log(pos.log_value(), pos.scaled_sum > 0 ? 1 : 0),
                              SignedLog::from_log(neg.log_value(), neg.scaled_sum > 0 ? 1 : 0));
    }
};

/// Bisection for f with a sign change on [lo, hi]; |result error| <= tol.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw std::invalid_argument("bisect: no sign change in bracket");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section minimization on [lo, hi] down to interval width tol.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

}  // namespace transobs

#endif
