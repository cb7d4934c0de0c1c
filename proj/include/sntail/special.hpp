#ifndef SNTAIL_SPECIAL_HPP
#define SNTAIL_SPECIAL_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "quadrature.hpp"

namespace sntail {

inline constexpr double log_2pi = 1.8378770664093454836;   // log(2*pi)
inline constexpr double log_sqrt_2pi = 0.9189385332046727418;
inline constexpr double sqrt_2 = 1.4142135623730950488;

// Shape parameters within this distance of 0 are classified as exactly 0.
inline constexpr double sign_eps = 1e-12;

inline int sign_class(double x, double eps = sign_eps) {
    if (x > eps) return 1;
    if (x < -eps) return -1;
    return 0;
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::domain_error(std::string("non-finite input: ") + what);
}

inline double log_norm_pdf(double x) {
    require_finite(x, "log_norm_pdf");
    return -0.5 * x * x - log_sqrt_2pi;
}

// log Phi(x), valid on the whole line.  For x >= -8 the erfc kernel is
// accurate; below that erfc loses relative accuracy long before it
// underflows, so we switch to the asymptotic expansion
//   Phi(x) = phi(x)/|x| * sum_{n>=0} (-1)^n (2n-1)!! / x^{2n},
// summed adaptively (stop once terms stop shrinking or drop below 1e-18).
inline double log_norm_cdf(double x) {
    require_finite(x, "log_norm_cdf");
    if (x >= 8.0) {
        double tail = 0.5 * std::erfc(x / sqrt_2);
        return std::log1p(-tail);
    }
    if (x >= -8.0)
        return std::log(0.5 * std::erfc(-x / sqrt_2));
    double inv_x2 = 1.0 / (x * x);
    double mag = 1.0, sum = 1.0;
    for (int n = 1; n <= 40; ++n) {
        double next = mag * (2.0 * n - 1.0) * inv_x2;
        if (next >= mag) break;  // past the optimal truncation point
        mag = next;
        sum += (n % 2 ? -mag : mag);
        if (mag < 1e-18 * sum) break;
    }
    return log_norm_pdf(x) - std::log(-x) + std::log(sum);
}

// Owen's T function.  Symmetries reduce to h >= 0, 0 <= a <= 1; the
// remaining integral has a smooth bounded integrand on [0, a].
inline double owen_t(double h, double a) {
    require_finite(h, "owen_t h");
    require_finite(a, "owen_t a");
    if (a == 0.0) return 0.0;
    if (a < 0.0) return -owen_t(h, -a);
    h = std::fabs(h);
    if (h == 0.0) return std::atan(a) / (2.0 * M_PI);
    if (a > 1.0) {
        // T(h,a) = 1/2 [Phi(h) + Phi(ah)] - Phi(h) Phi(ah) - T(ah, 1/a)
        double ph = std::exp(log_norm_cdf(h)), pah = std::exp(log_norm_cdf(a * h));
        return 0.5 * (ph + pah) - ph * pah - owen_t(a * h, 1.0 / a);
    }
    // Adaptive Simpson on the scaled integrand g(t) = exp(-h^2 t^2 / 2) / (1+t^2),
    // with the constant factor exp(-h^2/2) applied at the end.  Keeping g of
    // order one avoids denormal arithmetic for large h, where the error
    // estimate would otherwise be dominated by rounding noise and force the
    // recursion to its depth cap everywhere.
    auto f = [h](double t) { return std::exp(-0.5 * h * h * t * t) / (1.0 + t * t); };
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps,
            int depth) -> double {
        double m = 0.5 * (lo + hi);
        double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
        double flm = f(lm), frm = f(rm);
        double left = (m - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        double right = (hi - m) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (depth > 28 || std::fabs(left + right - whole) < eps)
            return left + right + (left + right - whole) / 15.0;
        return rec(lo, m, flo, flm, fmid, left, 0.5 * eps, depth + 1) +
               rec(m, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1);
    };
    double flo = f(0.0), fhi = f(a), fmid = f(0.5 * a);
    double whole = a / 6.0 * (flo + 4.0 * fmid + fhi);
    double eps0 = 1e-15 * std::fabs(whole) + 1e-30;
    double integral = rec(0.0, a, flo, fmid, fhi, whole, eps0, 0);
    return integral * std::exp(-0.5 * h * h) / (2.0 * M_PI);
}

// log of the skew-normal density 2 phi(x) Phi(lambda x)
inline double sn_log_pdf(double x, double lambda) {
    return M_LN2 + log_norm_pdf(x) + log_norm_cdf(lambda * x);
}

// log F(x; lambda) for the skew-normal CDF F(x) = Phi(x) - 2 T(x, lambda).
// The closed form is used whenever it cannot cancel catastrophically
// (x >= 0, or lambda <= 0 with x >= -8); otherwise the density is
// integrated in the log domain.
inline double sn_log_cdf(double x, double lambda) {
    require_finite(x, "sn_log_cdf");
    require_finite(lambda, "sn_log_cdf lambda");
    if (lambda == 0.0) return log_norm_cdf(x);
    if (x >= 0.0) {
        double v = std::exp(log_norm_cdf(x)) - 2.0 * owen_t(x, lambda);
        if (v > 1e-280) return std::log(v);
        // fall through: value too small for the subtractive form
    }
    auto log_f = [lambda](double t) { return sn_log_pdf(t, lambda); };
    return quad::log_integrate_left_tail(log_f, x, 1e-13);
}

// Coefficients of the lower-tail quantile expansion
//   F^{-1}(u) = K1 * (-sqrt(-2 log u)) * (1 + K2 log(-log u)/log u + K3/log u + ...)
struct quantile_coeffs {
    double k1, k2, k3;
};

inline quantile_coeffs quantile_expansion_coeffs(double lambda) {
    switch (sign_class(lambda)) {
        case 1:
            return {1.0 / std::sqrt(1.0 + lambda * lambda), 0.5, 0.5 * std::log(2.0 * M_PI * lambda)};
        case -1:
            return {1.0, 0.25, 0.25 * std::log(M_PI)};
        default:
            return {1.0, 0.25, 0.25 * std::log(4.0 * M_PI)};
    }
}

// Three-term tail expansion of the skew-normal quantile at log-level log_u.
// Only meaningful in the tail; requires log_u < -1.
inline double sn_quantile_expansion(double log_u, double lambda) {
    require_finite(log_u, "sn_quantile_expansion");
    if (log_u >= -1.0)
        throw std::domain_error("sn_quantile_expansion: log_u must be < -1");
    quantile_coeffs k = quantile_expansion_coeffs(lambda);
    double L = -log_u;
    double factor = 1.0 + k.k2 * std::log(L) / log_u + k.k3 / log_u;
    return k.k1 * (-std::sqrt(2.0 * L)) * factor;
}

// Skew-normal quantile at log-level log_u (log_u < 0), via a bracketed
// safeguarded Newton iteration on g(x) = log F(x) - log_u.
inline double sn_quantile(double log_u, double lambda) {
    require_finite(log_u, "sn_quantile");
    require_finite(lambda, "sn_quantile lambda");
    if (log_u >= 0.0)
        throw std::domain_error("sn_quantile: log_u must be negative");
    auto g = [log_u, lambda](double x) { return sn_log_cdf(x, lambda) - log_u; };

    double lo, hi;
    if (log_u < -10.0) {
        double x0 = sn_quantile_expansion(log_u, lambda);
        lo = x0 - 2.0;
        hi = x0 + 2.0;
    } else {
        lo = -9.0;
        hi = 10.0;
    }
    double glo = g(lo), ghi = g(hi);
    for (int it = 0; glo > 0.0 && it < 200; ++it) { lo -= std::max(1.0, 0.1 * std::fabs(lo)); glo = g(lo); }
    for (int it = 0; ghi < 0.0 && it < 200; ++it) { hi += std::max(1.0, 0.1 * std::fabs(hi)); ghi = g(hi); }
    if (!(glo <= 0.0 && ghi >= 0.0))
        throw std::runtime_error("sn_quantile: failed to bracket the root");

    // shrink the bracket a bit by bisection, then polish by Newton with the
    // bisection safeguard; g' = exp(log f - log F) is well-scaled in the tail
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 60 && hi - lo > 1e-2; ++it) {
        double gx = g(x);
        (gx < 0.0 ? lo : hi) = x;
        x = 0.5 * (lo + hi);
    }
    for (int it = 0; it < 200; ++it) {
        double logF = sn_log_cdf(x, lambda);
        double gx = logF - log_u;
        (gx < 0.0 ? lo : hi) = x;
        double deriv = std::exp(sn_log_pdf(x, lambda) - logF);
        double step = gx / deriv;
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        double dx = std::fabs(xn - x);
        x = xn;
        if (dx < 1e-13 * std::max(1.0, std::fabs(x))) break;
    }
    return x;
}

}  // namespace sntail

#endif
