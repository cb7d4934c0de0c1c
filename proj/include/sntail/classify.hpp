#ifndef SNTAIL_CLASSIFY_HPP
#define SNTAIL_CLASSIFY_HPP

#include <cmath>
#include <stdexcept>

#include "special.hpp"

namespace sntail {

struct parameters {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double rho = 0.0;
};

// Force a quantity that sits numerically near a classification boundary to
// be treated as exactly on it (the sign test alone uses a 1e-12 band).
struct boundary_flags {
    bool lambda1 = false;
    bool lambda2 = false;
    bool beta1 = false;
    bool discriminant = false;
};

inline void validate(const parameters& p) {
    require_finite(p.alpha1, "alpha1");
    require_finite(p.alpha2, "alpha2");
    require_finite(p.rho, "rho");
    if (!(std::fabs(p.rho) < 1.0))
        throw std::domain_error("rho must lie in (-1, 1)");
}

inline parameters swapped(const parameters& p) { return {p.alpha2, p.alpha1, p.rho}; }

enum class limit_tag { to_neg_infinity, to_zero, to_pos_infinity };

// Limit behaviour of a linear combination that scales with the (negative)
// quantile: rate > 0 means the combination diverges to -infinity.
struct limit_class {
    limit_tag tag;
    double rate;
};

inline limit_class classify_rate(double rate, bool force_zero = false) {
    int s = force_zero ? 0 : sign_class(rate);
    limit_tag t = s > 0 ? limit_tag::to_neg_infinity
                : s < 0 ? limit_tag::to_pos_infinity
                        : limit_tag::to_zero;
    return {t, rate};
}

// Slowly-varying coefficients of the quantile ratio
//   F1^{-1}(u)/F2^{-1}(u) = gamma1 (1 + c11 log(-log u)/log u + c12/log u + ...)
struct ratio_coeffs {
    double gamma, c1, c2;
};

inline ratio_coeffs quantile_ratio_coeffs(int s1, int s2, double lambda1, double lambda2) {
    double q1 = 1.0 + lambda1 * lambda1, q2 = 1.0 + lambda2 * lambda2;
    if (s1 > 0 && s2 > 0) return {std::sqrt(q2 / q1), 0.0, 0.5 * std::log(lambda1 / lambda2)};
    if (s1 < 0 && s2 > 0) return {std::sqrt(q2), -0.25, -0.5 * std::log(2.0 * lambda2 * std::sqrt(M_PI))};
    if (s1 > 0 && s2 < 0) return {1.0 / std::sqrt(q1), 0.25, 0.5 * std::log(2.0 * lambda1 * std::sqrt(M_PI))};
    if (s1 == 0 && s2 > 0) return {std::sqrt(q2), -0.25, -0.5 * std::log(lambda2 * std::sqrt(M_PI))};
    if (s1 > 0 && s2 == 0) return {1.0 / std::sqrt(q1), 0.25, 0.5 * std::log(lambda1 * std::sqrt(M_PI))};
    if (s1 < 0 && s2 < 0) return {1.0, 0.0, 0.0};
    if (s1 < 0 && s2 == 0) return {1.0, 0.0, -0.5 * std::log(2.0)};
    if (s1 == 0 && s2 < 0) return {1.0, 0.0, 0.5 * std::log(2.0)};
    return {1.0, 0.0, 0.0};  // both marginals standard normal
}

struct derived_quantities {
    parameters p;
    boundary_flags flags;
    double lambda1 = 0.0, lambda2 = 0.0;
    int s1 = 0, s2 = 0;          // sign classes of lambda1, lambda2
    double gamma1 = 1.0, gamma2 = 1.0;
    double c11 = 0.0, c12 = 0.0; // ratio F1/F2 correction coefficients
    double c21 = 0.0, c22 = 0.0; // ratio F2/F1
    double beta1 = 0.0, beta2 = 0.0;
    limit_class a1_class{limit_tag::to_zero, 0.0};  // A_1(u) = F1^{-1} - rho F2^{-1}
    limit_class b_class{limit_tag::to_zero, 0.0};   // B(u) = alpha1 F1^{-1} + alpha2 F2^{-1}
};

inline double marginal_slant(double alpha_own, double alpha_other, double rho) {
    return (alpha_own + rho * alpha_other) /
           std::sqrt(1.0 + alpha_other * alpha_other * (1.0 - rho * rho));
}

inline derived_quantities derive(const parameters& p, const boundary_flags& flags = {}) {
    validate(p);
    derived_quantities d;
    d.p = p;
    d.flags = flags;
    d.lambda1 = marginal_slant(p.alpha1, p.alpha2, p.rho);
    d.lambda2 = marginal_slant(p.alpha2, p.alpha1, p.rho);
    d.s1 = flags.lambda1 ? 0 : sign_class(d.lambda1);
    d.s2 = flags.lambda2 ? 0 : sign_class(d.lambda2);
    ratio_coeffs r1 = quantile_ratio_coeffs(d.s1, d.s2, d.lambda1, d.lambda2);
    ratio_coeffs r2 = quantile_ratio_coeffs(d.s2, d.s1, d.lambda2, d.lambda1);
    d.gamma1 = r1.gamma; d.c11 = r1.c1; d.c12 = r1.c2;
    d.gamma2 = r2.gamma; d.c21 = r2.c1; d.c22 = r2.c2;
    double om = 1.0 - p.rho * p.rho;
    d.beta1 = d.gamma1 * (p.alpha1 * p.alpha1 + 1.0 / om) + p.alpha1 * p.alpha2 - p.rho / om;
    d.beta2 = d.gamma2 * (p.alpha2 * p.alpha2 + 1.0 / om) + p.alpha1 * p.alpha2 - p.rho / om;
    d.a1_class = classify_rate(d.gamma1 - p.rho);
    d.b_class = classify_rate(p.alpha1 * d.gamma1 + p.alpha2);
    // at least one of A_1(u), B(u) must diverge to -infinity, and when A_1
    // does not, the B direction has to take over with alpha1 > 0
    if (d.a1_class.tag != limit_tag::to_neg_infinity) {
        if (!(p.alpha1 > 0.0 && d.b_class.tag == limit_tag::to_neg_infinity))
            throw std::logic_error("derive: limit classification violates the divergence dichotomy");
    }
    return d;
}

// Finite-u analogue of beta_i: the ratio gamma_i replaced by the actual
// quantile ratio at log-level u_log.
inline double beta_u(double u_log, int i, const derived_quantities& d) {
    if (i != 1 && i != 2) throw std::invalid_argument("beta_u: i must be 1 or 2");
    double f1 = sn_quantile(u_log, d.lambda1);
    double f2 = sn_quantile(u_log, d.lambda2);
    double om = 1.0 - d.p.rho * d.p.rho;
    double ratio = (i == 1) ? f1 / f2 : f2 / f1;
    double a_own = (i == 1) ? d.p.alpha1 : d.p.alpha2;
    return ratio * (a_own * a_own + 1.0 / om) + d.p.alpha1 * d.p.alpha2 - d.p.rho / om;
}

enum class regime {
    both_negative,        // lambda1 < 0,  lambda2 < 0
    first_zero_neg,       // lambda1 = 0,  lambda2 < 0
    mixed_pos,            // lambda1 < 0 < lambda2, split on the mixing sign
    mixed_pos_balanced,   //   ... mixing sign = 0
    mixed_pos_negative,   //   ... mixing sign < 0
    zero_pos,             // lambda1 = 0 < lambda2, split on the mixing sign
    zero_pos_balanced,
    zero_pos_negative,
    both_positive         // lambda1 > 0,  lambda2 > 0
};

struct case_tag {
    regime r;
    bool swapped = false;       // parameters were interchanged to reach a covered sign pattern
    bool extrapolated = false;  // alpha1 = alpha2 = 0: both margins normal, continuity limit
    double discriminant = 0.0;  // alpha1 + alpha2/sqrt(1+lambda2^2) in the oriented frame
};

inline case_tag classify_regime(const parameters& p_in, const boundary_flags& flags = {}) {
    derived_quantities d = derive(p_in, flags);
    case_tag tag;
    if (d.s1 == 0 && d.s2 == 0) {
        tag.r = regime::both_negative;
        tag.extrapolated = true;
        return tag;
    }
    parameters p = p_in;
    int s1 = d.s1, s2 = d.s2;
    double l2 = d.lambda2;
    // orient so the sign pattern matches a covered regime
    if ((s1 < 0 && s2 == 0) || (s1 > 0 && s2 <= 0)) {
        tag.swapped = true;
        p = swapped(p_in);
        std::swap(s1, s2);
        l2 = d.lambda1;
    }
    if (s1 < 0 && s2 < 0) { tag.r = regime::both_negative; return tag; }
    if (s1 == 0 && s2 < 0) { tag.r = regime::first_zero_neg; return tag; }
    if (s1 > 0 && s2 > 0) { tag.r = regime::both_positive; return tag; }
    // s2 > 0, s1 <= 0: mixing sign decides the sub-regime
    double disc = p.alpha1 + p.alpha2 / std::sqrt(1.0 + l2 * l2);
    tag.discriminant = disc;
    int sd = flags.discriminant ? 0 : sign_class(disc);
    if (s1 < 0)
        tag.r = sd > 0 ? regime::mixed_pos : sd == 0 ? regime::mixed_pos_balanced : regime::mixed_pos_negative;
    else
        tag.r = sd > 0 ? regime::zero_pos : sd == 0 ? regime::zero_pos_balanced : regime::zero_pos_negative;
    return tag;
}

inline const char* regime_name(regime r) {
    switch (r) {
        case regime::both_negative: return "both_negative";
        case regime::first_zero_neg: return "first_zero_neg";
        case regime::mixed_pos: return "mixed_pos";
        case regime::mixed_pos_balanced: return "mixed_pos_balanced";
        case regime::mixed_pos_negative: return "mixed_pos_negative";
        case regime::zero_pos: return "zero_pos";
        case regime::zero_pos_balanced: return "zero_pos_balanced";
        case regime::zero_pos_negative: return "zero_pos_negative";
        case regime::both_positive: return "both_positive";
    }
    return "?";
}

}  // namespace sntail

#endif
