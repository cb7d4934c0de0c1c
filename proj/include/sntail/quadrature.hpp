#ifndef SNTAIL_QUADRATURE_HPP
#define SNTAIL_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "log_value.hpp"

namespace sntail {
namespace quad {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

// Gauss-Kronrod 7-15 nodes/weights on [-1,1].  Even indices are the
// Kronrod-only nodes; odd indices carry the embedded Gauss-7 rule.
inline constexpr double gk_nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double gk_wk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double gk_wg[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct segment_result {
    double log_val;   // log of the segment integral
    double rel_err;   // |K15 - G7| / K15 on the linear scale of the segment
};

// One GK15 panel of exp(log_f) over [lo, hi], evaluated with a max-shift so
// the panel never under/overflows regardless of the overall scale.
template <class F>
segment_result gk15_log(F&& log_f, double lo, double hi) {
    double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double lf[15];
    double m = neg_inf;
    for (int i = 0; i < 15; ++i) {
        lf[i] = log_f(c + h * gk_nodes[i]);
        if (lf[i] > m) m = lf[i];
    }
    if (m == neg_inf) return {neg_inf, 0.0};
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        double e = std::exp(lf[i] - m);
        k += gk_wk[i] * e;
        if (i % 2 == 1) g += gk_wg[i / 2] * e;
    }
    double err = k > 0.0 ? std::fabs(k - g) / k : 0.0;
    return {m + std::log(k * h), err};
}

// Adaptive log-domain quadrature of a positive integrand given by its log.
// Returns log of the integral.  rel_tol is relative on the linear scale.
template <class F>
double log_integrate(F&& log_f, double lo, double hi, double rel_tol = 1e-12,
                     int max_segments = 200000) {
    if (!(lo < hi)) {
        if (lo == hi) return neg_inf;
        throw std::invalid_argument("log_integrate: lo > hi");
    }
    struct seg { double lo, hi; int depth; };
    std::vector<seg> stack{{lo, hi, 0}};
    double acc = neg_inf;  // log-sum-exp accumulator over accepted segments
    int used = 0;
    while (!stack.empty()) {
        seg s = stack.back();
        stack.pop_back();
        segment_result r = gk15_log(log_f, s.lo, s.hi);
        if (r.rel_err <= rel_tol || s.depth >= 55 || ++used >= max_segments) {
            acc = log_add(acc, r.log_val);
            continue;
        }
        double mid = 0.5 * (s.lo + s.hi);
        stack.push_back({s.lo, mid, s.depth + 1});
        stack.push_back({mid, s.hi, s.depth + 1});
    }
    return acc;
}

// Maximize a concave function starting from x0 with initial step h0.
// Returns the argmax (to modest precision; callers only need the integration
// window centered well, not the exact mode).
namespace detail {
template <class F>
double golden_max(F&& g, double a, double b) {
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int i = 0; i < 300 && (b - a) > 1e-10 * (1.0 + std::fabs(a) + std::fabs(b)); ++i) {
        if (f1 < f2) { a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = g(x2); }
        else { b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = g(x1); }
    }
    return 0.5 * (a + b);
}
}  // namespace detail

template <class F>
double argmax_concave(F&& g, double x0, double h0) {
    double gx = g(x0);
    double gp = g(x0 + h0), gm = g(x0 - h0);
    if (gp <= gx && gm <= gx)
        return detail::golden_max(g, x0 - h0, x0 + h0);
    double dir = gp > gm ? 1.0 : -1.0;
    // expand downhill-to-uphill bracket: x_prev < x_cur < x_next (in dir)
    double h = h0;
    double x_prev = x0;
    double x_cur = x0 + dir * h, g_cur = (dir > 0 ? gp : gm);
    for (int it = 0; it < 400; ++it) {
        h *= 2.0;
        double x_next = x_cur + dir * h;
        double g_next = g(x_next);
        if (g_next < g_cur)
            return detail::golden_max(g, std::min(x_prev, x_next), std::max(x_prev, x_next));
        x_prev = x_cur;
        x_cur = x_next;
        g_cur = g_next;
    }
    return x_cur;
}

// Walk away from `from` in direction `dir` (+1/-1) until log_f has dropped
// `drop` nats below `peak_val`; returns that point.
template <class F>
double find_drop(F&& log_f, double from, double dir, double peak_val,
                 double drop, double h0) {
    double h = h0;
    double x = from + dir * h;
    int it = 0;
    while (log_f(x) > peak_val - drop && it++ < 400) {
        h *= 2.0;
        x += dir * h;
    }
    return x;
}

// log of the integral of exp(log_f) over (-inf, hi], with hi possibly +inf.
// Requires log_f unimodal (log-concave integrands throughout this library).
template <class F>
double log_integrate_left_tail(F&& log_f, double hi, double rel_tol = 1e-12) {
    double x0 = std::isfinite(hi) ? hi : 0.0;
    double h0 = 1.0 / (1.0 + std::fabs(x0));
    double mode;
    if (std::isfinite(hi) && log_f(hi - h0) <= log_f(hi)) {
        mode = hi;  // integrand still rising at the cut: peak sits at the edge
    } else {
        mode = argmax_concave(log_f, x0, h0);
        if (std::isfinite(hi) && mode > hi) mode = hi;
    }
    double peak = log_f(mode);
    if (peak == neg_inf)
        throw std::runtime_error("log_integrate_left_tail: integrand vanishes at its mode");
    double lo = find_drop(log_f, mode, -1.0, peak, 60.0, 1.0 / (1.0 + std::fabs(mode)));
    double top = hi;
    if (!std::isfinite(hi))
        top = find_drop(log_f, mode, +1.0, peak, 60.0, 1.0 / (1.0 + std::fabs(mode)));
    return log_integrate(log_f, lo, top, rel_tol);
}

}  // namespace quad
}  // namespace sntail

#endif
