#ifndef SNTAIL_LOG_VALUE_HPP
#define SNTAIL_LOG_VALUE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sntail {

// A real number carried as sign * exp(log_abs).  Probabilities in the deep
// tail (log levels around -1e6) never get materialized on the linear scale.
struct log_value {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;

    log_value() = default;
    log_value(double la, int s) : log_abs(la), sign(la == -std::numeric_limits<double>::infinity() ? 0 : s) {}

    static log_value from_log(double la) { return log_value(la, 1); }
    static log_value zero() { return log_value(); }

    bool is_zero() const { return sign == 0; }

    // Only safe when log_abs is moderate; asserts against silent underflow.
    double to_double() const {
        if (sign == 0) return 0.0;
        if (log_abs < -700.0)
            throw std::domain_error("log_value::to_double: magnitude underflows double");
        return sign * std::exp(log_abs);
    }
};

inline log_value operator*(const log_value& a, const log_value& b) {
    if (a.sign == 0 || b.sign == 0) return log_value::zero();
    return log_value(a.log_abs + b.log_abs, a.sign * b.sign);
}

inline log_value operator/(const log_value& a, const log_value& b) {
    if (b.sign == 0) throw std::domain_error("log_value: division by zero");
    if (a.sign == 0) return log_value::zero();
    return log_value(a.log_abs - b.log_abs, a.sign * b.sign);
}

inline log_value operator+(const log_value& a, const log_value& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const log_value& big = a.log_abs >= b.log_abs ? a : b;
    const log_value& small = a.log_abs >= b.log_abs ? b : a;
    double d = small.log_abs - big.log_abs;  // <= 0
    if (big.sign == small.sign)
        return log_value(big.log_abs + std::log1p(std::exp(d)), big.sign);
    double r = std::expm1(d);  // in (-1, 0]
    if (r == -1.0) return log_value::zero();
    return log_value(big.log_abs + std::log(-r), big.sign);
}

inline log_value operator-(const log_value& a, const log_value& b) {
    return a + log_value(b.log_abs, -b.sign);
}

// log(exp(a) + exp(b)) for plain log-scale doubles
inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log(exp(a) - exp(b)); requires a >= b
inline double log_sub(double a, double b) {
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (a < b) throw std::domain_error("log_sub: negative result");
    if (a == b) return -std::numeric_limits<double>::infinity();
    return a + std::log1p(-std::exp(b - a));
}

}  // namespace sntail

#endif
