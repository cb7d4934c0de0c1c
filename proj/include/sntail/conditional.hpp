#ifndef SNTAIL_CONDITIONAL_HPP
#define SNTAIL_CONDITIONAL_HPP

#include <cmath>
#include <stdexcept>

#include "integral_asym.hpp"

namespace sntail {

// P(Z_i <= F_i^{-1}(u) | Z_{3-i} = F_{3-i}^{-1}(u)) for the bivariate skew
// normal, exact in the log domain.  which = 1 conditions on the second
// coordinate; which = 2 interchanges the roles.
struct cond_query {
    double u_log;
    int which = 1;
    parameters p;
};

namespace detail {
inline parameters oriented(const cond_query& q) {
    if (q.which == 1) return q.p;
    if (q.which == 2) return swapped(q.p);
    throw std::invalid_argument("cond query: which must be 1 or 2");
}
}  // namespace detail

inline double cond_prob_exact(const cond_query& q, double rel_tol = 1e-12) {
    parameters p = detail::oriented(q);
    derived_quantities d = derive(p);
    double f1 = sn_quantile(q.u_log, d.lambda1);
    double f2 = sn_quantile(q.u_log, d.lambda2);
    double om = 1.0 - p.rho * p.rho;
    double s = std::sqrt(om);
    double upper = (f1 - p.rho * f2) / s;
    if (p.alpha1 == 0.0)
        return log_norm_cdf(upper);  // conditional is exactly Gaussian
    double c = p.alpha1 * s;
    double b = (p.alpha2 + p.rho * p.alpha1) * f2;
    auto log_f = [c, b](double x) { return log_norm_pdf(x) + log_norm_cdf(c * x + b); };
    return quad::log_integrate_left_tail(log_f, upper, rel_tol) -
           log_norm_cdf(d.lambda2 * f2);
}

// Same quantity through the interchanged integral representation; only
// defined for alpha1 > 0 (after orientation).  Used to cross-check the
// primary representation.
inline double cond_prob_exact_alt(const cond_query& q, double rel_tol = 1e-12) {
    parameters p = detail::oriented(q);
    derived_quantities d = derive(p);
    if (!(p.alpha1 > 0.0))
        throw std::domain_error("cond_prob_exact_alt: requires alpha1 > 0");
    double f1 = sn_quantile(q.u_log, d.lambda1);
    double f2 = sn_quantile(q.u_log, d.lambda2);
    double s = std::sqrt(1.0 - p.rho * p.rho);
    double cs = p.alpha1 * s;
    double upper = p.alpha1 * f1 + p.alpha2 * f2;  // B(u)
    double b2 = -(p.alpha2 + p.rho * p.alpha1) * f2 / cs;
    auto log_f = [cs, b2](double x) {
        return log_norm_cdf(x) + log_norm_pdf(x / cs + b2) - std::log(cs);
    };
    return quad::log_integrate_left_tail(log_f, upper, rel_tol) -
           log_norm_cdf(d.lambda2 * f2);
}

// Leading-order asymptote of the conditional probability, branch chosen by
// the limit class of B(u).
inline double cond_prob_asym(const cond_query& q, const boundary_flags& flags = {}) {
    parameters p = detail::oriented(q);
    derived_quantities d = derive(p, flags);
    double f1 = sn_quantile(q.u_log, d.lambda1);
    double f2 = sn_quantile(q.u_log, d.lambda2);
    double om = 1.0 - p.rho * p.rho;
    double a1 = f1 - p.rho * f2;
    double bb = p.alpha1 * f1 + p.alpha2 * f2;
    double log_phi2 = log_norm_cdf(d.lambda2 * f2);
    switch (d.b_class.tag) {
        case limit_tag::to_neg_infinity: {
            double b1 = flags.beta1 ? 0.0 : d.beta1;
            if (!(b1 > 0.0))
                throw std::domain_error("cond_prob_asym: B -> -inf branch requires beta1 > 0");
            return -a1 * a1 / (2.0 * om) - 0.5 * bb * bb -
                   std::log(2.0 * M_PI * std::sqrt(om) * b1) -
                   std::log(std::fabs(f2)) - std::log(std::fabs(bb)) - log_phi2;
        }
        case limit_tag::to_zero:
            return 0.5 * std::log(om) - a1 * a1 / (2.0 * om) -
                   std::log(2.0 * std::sqrt(2.0 * M_PI) * std::fabs(a1)) - log_phi2;
        case limit_tag::to_pos_infinity:
            return 0.5 * std::log(om) - a1 * a1 / (2.0 * om) -
                   std::log(std::sqrt(2.0 * M_PI) * std::fabs(a1)) - log_phi2;
    }
    throw std::logic_error("cond_prob_asym: bad limit class");
}

}  // namespace sntail

#endif
