#ifndef SNTAIL_INTEGRAL_ASYM_HPP
#define SNTAIL_INTEGRAL_ASYM_HPP

#include <cmath>
#include <stdexcept>

#include "classify.hpp"
#include "log_value.hpp"
#include "special.hpp"

namespace sntail {

// Asymptotics of I(u) = int_{-inf}^{a} Phi(x) phi(c x + b) dx as a -> -inf,
// with b = k a.  Everything is controlled by
//   v = (a (1 + c^2) + c b) / sqrt(1 + c^2).
enum class drift { to_neg_inf, to_zero, to_pos_inf };

struct asym_integral_input {
    double a, b, c, k;
    drift regime;
};

inline double drift_point(double a, double b, double c) {
    return (a * (1.0 + c * c) + c * b) / std::sqrt(1.0 + c * c);
}

// log of the leading-order asymptote of I(u); the regime is the caller's
// statement about where v drifts, cross-checked against the actual v.
inline double asym_integral(const asym_integral_input& in) {
    double a = in.a, b = in.b, c = in.c;
    if (!(a < 0.0)) throw std::domain_error("asym_integral: requires a < 0");
    double q = 1.0 + c * c;
    double v = drift_point(a, b, c);
    double base = -b * b / (2.0 * q);
    switch (in.regime) {
        case drift::to_neg_inf:
            if (!(v < 0.0))
                throw std::domain_error("asym_integral: regime says v -> -inf but v >= 0");
            return base - 0.5 * v * v - std::log(2.0 * M_PI * std::sqrt(q) * std::fabs(a) * std::fabs(v));
        case drift::to_zero:
            return base + 0.5 * std::log(q) -
                   std::log(2.0 * std::sqrt(2.0 * M_PI) * std::fabs(a) * std::fabs(c * in.k));
        case drift::to_pos_inf:
            if (q + c * in.k > 1e-9)
                throw std::domain_error("asym_integral: v -> +inf requires 1 + c^2 + c k <= 0");
            return base + 0.5 * std::log(q) -
                   std::log(std::sqrt(2.0 * M_PI) * std::fabs(a) * std::fabs(c * in.k));
    }
    throw std::logic_error("asym_integral: bad regime");
}

// log of I = int_{-inf}^{a} Phi(x) phi(c x + b) dx by log-domain quadrature;
// a may be +inf.
inline double exact_integral(double a, double b, double c, double rel_tol = 1e-12) {
    require_finite(b, "exact_integral b");
    require_finite(c, "exact_integral c");
    auto log_f = [b, c](double x) { return log_norm_cdf(x) + log_norm_pdf(c * x + b); };
    return quad::log_integrate_left_tail(log_f, a, rel_tol);
}

// Two-sided envelope for I valid for a < 0 (tightens as a -> -inf):
//   prefactor * e^{dv + d^2/2} Phi(v + d) / (1 + 1/a^2)  <=  I  <=  prefactor * Phi(v),
// d = 1/(a sqrt(1+c^2)) < 0.  The lower bound combines Mills' inequality
// Phi(x) >= phi(x)(-x)/(1+x^2) with 1/(-x) >= e^{(x-a)/|a|}/|a| on x <= a.
struct integral_envelope {
    double log_lower, log_upper;
};

inline integral_envelope exact_integral_envelope(double a, double b, double c) {
    if (!(a < 0.0)) throw std::domain_error("exact_integral_envelope: requires a < 0");
    double q = 1.0 + c * c;
    double v = drift_point(a, b, c);
    double d = 1.0 / (a * std::sqrt(q));
    double common = -b * b / (2.0 * q) - std::log(std::sqrt(2.0 * M_PI * q) * std::fabs(a));
    return {common + d * v + 0.5 * d * d + log_norm_cdf(v + d) - std::log1p(1.0 / (a * a)),
            common + log_norm_cdf(v)};
}

// ---------------------------------------------------------------------------
// Conditional-probability asymptotics assembled from the split
//   P(Z1 <= F1 | Z2 = F2) = Phi(A1/s) Phi(B) / Phi(l2 F2)
//                           - alpha1 s / Phi(l2 F2) * int_{-inf}^{A1/s} Phi(x) phi(c x + b) dx,
// s = sqrt(1-rho^2).  Route 2 trades the roles of the two factors and is
// only available when alpha1 > 0 and B -> -inf.

struct split_terms {
    log_value boundary;  // Phi(A1/s) Phi(B) / Phi(l2 F2) asymptote
    log_value integral;  // signed alpha1-weighted integral asymptote
};

namespace detail {
struct frame {
    derived_quantities d;
    double f1, f2, a1, bb, log_phi2;  // quantiles, A1(u), B(u), log Phi(l2 F2)
};

inline frame make_frame(double u_log, const parameters& p, const boundary_flags& flags) {
    frame fr;
    fr.d = derive(p, flags);
    fr.f1 = sn_quantile(u_log, fr.d.lambda1);
    fr.f2 = sn_quantile(u_log, fr.d.lambda2);
    fr.a1 = fr.f1 - p.rho * fr.f2;
    fr.bb = p.alpha1 * fr.f1 + p.alpha2 * fr.f2;
    fr.log_phi2 = log_norm_cdf(fr.d.lambda2 * fr.f2);
    return fr;
}
}  // namespace detail

// Route-1 asymptotes of the two split terms at log-level u_log.
inline split_terms route1_terms(double u_log, const parameters& p,
                                const boundary_flags& flags = {}) {
    detail::frame fr = detail::make_frame(u_log, p, flags);
    const derived_quantities& d = fr.d;
    double om = 1.0 - p.rho * p.rho;
    double s = std::sqrt(om);
    if (d.a1_class.tag != limit_tag::to_neg_infinity)
        throw std::domain_error("route1_terms: requires A_1(u) -> -inf");

    split_terms out;
    // boundary factor: Phi(A1/s) ~ s e^{-A1^2/(2 om)} / (sqrt(2 pi) |A1|),
    // Phi(B) by its own limit class
    double log_phi_a = 0.5 * std::log(om) - fr.a1 * fr.a1 / (2.0 * om) -
                       log_sqrt_2pi - std::log(std::fabs(fr.a1));
    double log_phi_b;
    switch (d.b_class.tag) {
        case limit_tag::to_neg_infinity:
            log_phi_b = -0.5 * fr.bb * fr.bb - log_sqrt_2pi - std::log(std::fabs(fr.bb));
            break;
        case limit_tag::to_zero:
            log_phi_b = -M_LN2;
            break;
        default:
            log_phi_b = 0.0;
            break;
    }
    out.boundary = log_value::from_log(log_phi_a + log_phi_b - fr.log_phi2);

    // integral factor, by the sign of beta1
    if (sign_class(p.alpha1) == 0) {
        out.integral = log_value::zero();
        return out;
    }
    int sb = flags.beta1 ? 0 : sign_class(d.beta1);
    double aa = std::fabs(p.alpha1);
    double l2f2 = d.lambda2 * fr.f2;
    double log_mag;
    if (sb > 0) {
        log_mag = std::log(aa * s) - fr.a1 * fr.a1 / (2.0 * om) - 0.5 * fr.bb * fr.bb -
                  std::log(2.0 * M_PI) - std::log(std::fabs(fr.f2)) -
                  std::log(std::fabs(fr.a1)) - std::log(d.beta1);
    } else if (sb == 0) {
        log_mag = std::log(aa * om) - 0.5 * l2f2 * l2f2 -
                  std::log(2.0 * std::sqrt(2.0 * M_PI)) - std::log(std::fabs(fr.a1)) -
                  0.5 * std::log(1.0 + p.alpha1 * p.alpha1 * om);
    } else {
        // beta1 < 0 forces lambda2 < 0; the  phi-tail of the kernel dominates
        log_mag = -0.5 * l2f2 * l2f2 - log_sqrt_2pi - std::log(std::fabs(l2f2));
    }
    out.integral = log_value(log_mag - fr.log_phi2, p.alpha1 > 0.0 ? 1 : -1);
    return out;
}

// Route-2 asymptote of the whole conditional probability (single term).
inline double route2_term(double u_log, const parameters& p,
                          const boundary_flags& flags = {}) {
    detail::frame fr = detail::make_frame(u_log, p, flags);
    const derived_quantities& d = fr.d;
    if (!(p.alpha1 > 0.0))
        throw std::domain_error("route2_term: requires alpha1 > 0");
    if (d.b_class.tag != limit_tag::to_neg_infinity)
        throw std::domain_error("route2_term: requires B(u) -> -inf");
    if (!(d.beta1 > 0.0) || flags.beta1)
        throw std::domain_error("route2_term: requires beta1 > 0");
    double om = 1.0 - p.rho * p.rho;
    double b1u = beta_u(u_log, 1, d);
    return -fr.a1 * fr.a1 / (2.0 * om) - 0.5 * fr.bb * fr.bb -
           std::log(2.0 * M_PI * std::sqrt(om)) - fr.log_phi2 -
           std::log(std::fabs(fr.bb)) - std::log(std::fabs(fr.f2)) - std::log(b1u);
}

}  // namespace sntail

#endif
