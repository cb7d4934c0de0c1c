// Command-line front end: analyze a parameter set, verify the asymptote
// against exact quadrature on a grid, fit exponents empirically, or run the
// built-in self test.  Exit codes: 0 success, 1 verification/computation
// failure, 2 usage error.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sntail/tail_order.hpp"

using nlohmann::json;
using namespace sntail;

namespace {

struct common_opts {
    double alpha1 = 0.0, alpha2 = 0.0, rho = 0.0;
    std::string format = "text";
    double tolerance = 0.05;
    std::vector<std::string> boundary;
    std::optional<double> u;
    std::optional<double> u_log;
    std::string u_log_grid;
};

boundary_flags make_flags(const std::vector<std::string>& names) {
    boundary_flags f;
    for (const auto& n : names) {
        if (n == "lambda1") f.lambda1 = true;
        else if (n == "lambda2") f.lambda2 = true;
        else if (n == "beta1") f.beta1 = true;
        else if (n == "discriminant") f.discriminant = true;
        else throw CLI::ValidationError("--boundary", "unknown boundary name: " + n);
    }
    return f;
}

std::vector<double> parse_grid(const common_opts& o) {
    std::vector<double> grid;
    if (!o.u_log_grid.empty()) {
        double a, b, step;
        char c1, c2;
        std::istringstream is(o.u_log_grid);
        if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step == 0.0)
            throw std::invalid_argument("--u-log-grid expects \"start:end:step\" with step != 0");
        if ((b - a) * step < 0.0)
            throw std::invalid_argument("--u-log-grid step points away from end");
        for (double v = a; (step > 0 ? v <= b + 1e-9 : v >= b - 1e-9); v += step) {
            grid.push_back(v);
            if (grid.size() > 10000) throw std::invalid_argument("--u-log-grid too many points");
        }
    }
    if (o.u_log) grid.push_back(*o.u_log);
    if (o.u) {
        if (!(*o.u > 0.0 && *o.u < 1.0)) throw std::invalid_argument("--u must be in (0,1)");
        grid.push_back(std::log(*o.u));
    }
    return grid;
}

void add_common(CLI::App* cmd, common_opts& o, bool need_params = true) {
    auto* a1 = cmd->add_option("--alpha1", o.alpha1, "first slant parameter");
    auto* a2 = cmd->add_option("--alpha2", o.alpha2, "second slant parameter");
    auto* rr = cmd->add_option("--rho", o.rho, "latent correlation, in (-1,1)");
    if (need_params) { a1->required(); a2->required(); rr->required(); }
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    cmd->add_option("--tolerance", o.tolerance, "relative tolerance for pass/fail checks");
    cmd->add_option("--boundary", o.boundary,
                    "treat a near-boundary quantity as exactly on the boundary")
        ->check(CLI::IsMember({"lambda1", "lambda2", "beta1", "discriminant"}));
    cmd->add_option("--u", o.u, "quantile level as a decimal in (0,1)");
    cmd->add_option("--u-log", o.u_log, "quantile level as log(u)");
    cmd->add_option("--u-log-grid", o.u_log_grid, "grid of log(u) values, \"start:end:step\"");
}

json rv_to_json(const rv_form& f) {
    return {{"theta", f.theta}, {"log_tau1", f.log_tau1}, {"tau2", f.tau2}};
}

// ---------------------------------------------------------------- analyze --

int run_analyze(const common_opts& o) {
    parameters p{o.alpha1, o.alpha2, o.rho};
    boundary_flags flags = make_flags(o.boundary);
    derived_quantities d = derive(p, flags);
    case_tag tag = classify_regime(p, flags);
    tail_asymptotics t = tail_dependence_asym(p, flags);
    printed_form printed = printed_regime_form(p, flags);

    std::vector<std::string> warnings;
    auto near = [](double x) { return x != 0.0 && std::fabs(x) < 10.0 * sign_eps; };
    if (near(d.lambda1)) warnings.push_back("lambda1 is within the tolerance band of 0");
    if (near(d.lambda2)) warnings.push_back("lambda2 is within the tolerance band of 0");
    if (near(d.beta1)) warnings.push_back("beta1 is within the tolerance band of 0");
    if (near(tag.discriminant)) warnings.push_back("regime discriminant is within the tolerance band of 0");
    if (tag.extrapolated)
        warnings.push_back("alpha1 = alpha2 = 0: both margins are standard normal; "
                           "result is the continuity limit of the both-negative regime");
    if (p.alpha1 == 0.0 || p.alpha2 == 0.0)
        warnings.push_back("a zero slant parameter makes one conditional exactly Gaussian "
                           "(closed-form path)");

    char formula[256];
    std::snprintf(formula, sizeof formula,
                  "lambda_L(u) ~ %.12g * u^%.12g * (-log u)^%.12g",
                  std::exp(t.lambda_lower.log_tau1), t.lambda_lower.theta,
                  t.lambda_lower.tau2);

    if (o.format == "json") {
        json out{{"params", {{"alpha1", p.alpha1}, {"alpha2", p.alpha2}, {"rho", p.rho}}},
                 {"case", {{"regime", regime_name(tag.r)},
                           {"swapped", tag.swapped},
                           {"extrapolated", tag.extrapolated}}},
                 {"lambda1", d.lambda1},
                 {"lambda2", d.lambda2},
                 {"gamma1", d.gamma1},
                 {"beta1", d.beta1},
                 {"beta2", d.beta2},
                 {"theta", t.dcdu.theta},
                 {"kappa", t.kappa},
                 {"tau2", t.dcdu.tau2},
                 {"log_tau1", t.dcdu.log_tau1},
                 {"lambda_lower", rv_to_json(t.lambda_lower)},
                 {"formula", formula},
                 {"warnings", warnings}};
        if (printed.form) {
            out["printed_total"] = rv_to_json(*printed.form);
            out["printed_delta"] = {{"theta", t.dcdu.theta - printed.form->theta},
                                    {"log_tau1", t.dcdu.log_tau1 - printed.form->log_tau1},
                                    {"tau2", t.dcdu.tau2 - printed.form->tau2}};
        } else {
            out["printed_total"] = nullptr;
            out["printed_note"] = printed.note;
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::ostream& os = std::cout;
    const char* sep = o.format == "csv" ? "," : " = ";
    auto row = [&](const char* k, double v) { os << k << sep << std::setprecision(17) << v << "\n"; };
    if (o.format == "csv") os << "key,value\n";
    os << "regime" << sep << regime_name(tag.r) << (tag.swapped ? " (indices interchanged)" : "") << "\n";
    row("lambda1", d.lambda1); row("lambda2", d.lambda2);
    row("gamma1", d.gamma1); row("beta1", d.beta1); row("beta2", d.beta2);
    row("theta", t.dcdu.theta); row("kappa", t.kappa);
    row("tau2", t.dcdu.tau2); row("log_tau1", t.dcdu.log_tau1);
    if (printed.form) {
        row("printed_theta_delta", t.dcdu.theta - printed.form->theta);
        row("printed_log_tau1_delta", t.dcdu.log_tau1 - printed.form->log_tau1);
        row("printed_tau2_delta", t.dcdu.tau2 - printed.form->tau2);
    } else if (o.format == "text") {
        os << "printed_total" << sep << "unavailable: " << printed.note << "\n";
    }
    if (o.format == "text") {
        os << "formula" << sep << formula << "\n";
        for (const auto& w : warnings) os << "warning" << sep << w << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------- verify --

struct verify_row {
    double u_log = 0.0;
    double log_exact = 0.0, log_asym = 0.0;
    double s1_log = 0.0, s2_log = 0.0;
    bool failed = false;
    std::string error;
};

int run_verify(const common_opts& o) {
    parameters p{o.alpha1, o.alpha2, o.rho};
    boundary_flags flags = make_flags(o.boundary);
    std::vector<double> grid = parse_grid(o);
    if (grid.empty()) throw std::invalid_argument("verify: empty grid (use --u-log-grid/--u-log/--u)");
    for (double ul : grid)
        if (!(ul >= -1e6 && ul <= -20.0))
            throw std::invalid_argument("verify: grid values must lie in [-1e6, -20]");

    rv_form asym = dcopula_rv(p, flags);
    printed_form printed = printed_regime_form(p, flags);

    std::vector<std::future<verify_row>> jobs;
    for (double ul : grid)
        jobs.push_back(std::async(std::launch::async, [ul, p, asym]() {
            verify_row r;
            r.u_log = ul;
            try {
                r.s1_log = cond_prob_exact({ul, 1, p});
                r.s2_log = cond_prob_exact({ul, 2, p});
                r.log_exact = log_add(r.s1_log, r.s2_log);
                r.log_asym = asym.eval_log(ul);
            } catch (const std::exception& e) {
                r.failed = true;
                r.error = e.what();
            }
            return r;
        }));
    std::vector<verify_row> rows;
    bool any_failed = false;
    for (auto& j : jobs) {
        rows.push_back(j.get());
        any_failed = any_failed || rows.back().failed;
    }
    // trend: is |log ratio| non-increasing from the first to the last row?
    bool trend = true;
    const verify_row* prev = nullptr;
    for (const auto& r : rows) {
        if (r.failed) continue;
        if (prev && std::fabs(r.log_asym - r.log_exact) >
                        std::fabs(prev->log_asym - prev->log_exact) + 1e-12)
            trend = false;
        prev = &r;
    }

    if (o.format == "csv") {
        std::cout << "u_log,log_exact,log_asym,ratio,summand1_log,summand2_log\n";
        for (const auto& r : rows) {
            if (r.failed) { std::cout << std::setprecision(17) << r.u_log << ",failed,,,,\n"; continue; }
            std::cout << std::setprecision(17) << r.u_log << "," << r.log_exact << ","
                      << r.log_asym << "," << std::exp(r.log_asym - r.log_exact) << ","
                      << r.s1_log << "," << r.s2_log << "\n";
        }
        std::cout << "# trend_abs_log_ratio_decreasing=" << (trend ? "true" : "false") << "\n";
    } else if (o.format == "json") {
        json jrows = json::array();
        for (const auto& r : rows) {
            json jr{{"u_log", r.u_log}, {"failed", r.failed}};
            if (r.failed) jr["error"] = r.error;
            else {
                jr["log_exact"] = r.log_exact;
                jr["log_asym"] = r.log_asym;
                jr["ratio"] = std::exp(r.log_asym - r.log_exact);
                jr["summand1_log"] = r.s1_log;
                jr["summand2_log"] = r.s2_log;
            }
            jrows.push_back(jr);
        }
        json out{{"rows", jrows},
                 {"asym", rv_to_json(asym)},
                 {"trend_abs_log_ratio_decreasing", trend}};
        if (printed.form) {
            out["printed_total"] = rv_to_json(*printed.form);
            out["printed_delta"] = {{"theta", asym.theta - printed.form->theta},
                                    {"log_tau1", asym.log_tau1 - printed.form->log_tau1},
                                    {"tau2", asym.tau2 - printed.form->tau2}};
        } else {
            out["printed_total"] = nullptr;
            out["printed_note"] = printed.note;
        }
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("%12s %20s %20s %10s\n", "u_log", "log_exact", "log_asym", "ratio");
        for (const auto& r : rows) {
            if (r.failed) { std::printf("%12g row failed: %s\n", r.u_log, r.error.c_str()); continue; }
            std::printf("%12g %20.10f %20.10f %10.6f\n", r.u_log, r.log_exact, r.log_asym,
                        std::exp(r.log_asym - r.log_exact));
        }
        std::printf("trend |log ratio| decreasing: %s\n", trend ? "yes" : "no");
        if (printed.form)
            std::printf("printed-total delta: theta %+.3e  log_tau1 %+.3e  tau2 %+.3e\n",
                        asym.theta - printed.form->theta, asym.log_tau1 - printed.form->log_tau1,
                        asym.tau2 - printed.form->tau2);
        else
            std::printf("printed total unavailable: %s\n", printed.note);
    }
    return any_failed ? 1 : 0;
}

// -------------------------------------------------------------------- fit --

int run_fit(const common_opts& o, const std::string& inject) {
    std::vector<double> grid = parse_grid(o);
    if (grid.empty())
        for (double ul = -40.0; ul >= -400.5; ul -= 40.0) grid.push_back(ul);
    if (grid.size() < 4) throw std::invalid_argument("fit: grid needs at least 4 points");

    fit_result fit;
    rv_form truth;
    if (!inject.empty()) {
        // synthetic mode: --inject-rvform "theta,log_tau1,tau2"
        char c1, c2;
        std::istringstream is(inject);
        if (!(is >> truth.theta >> c1 >> truth.log_tau1 >> c2 >> truth.tau2) || c1 != ',' || c2 != ',')
            throw std::invalid_argument("--inject-rvform expects \"theta,log_tau1,tau2\"");
        std::vector<std::pair<double, double>> pts;
        for (double ul : grid) pts.emplace_back(ul, truth.eval_log(ul));
        fit = fit_rv_points(pts);
    } else {
        parameters p{o.alpha1, o.alpha2, o.rho};
        boundary_flags flags = make_flags(o.boundary);
        truth = dcopula_rv(p, flags);
        fit = empirical_exponent_fit(p, grid);
    }
    double rel = std::fabs(fit.theta / truth.theta - 1.0);
    bool pass = rel <= o.tolerance;
    if (o.format == "json") {
        json out{{"fit", {{"theta", fit.theta}, {"tau2", fit.tau2},
                          {"log_tau1", fit.log_tau1}, {"rms_residual", fit.rms_residual},
                          {"points", fit.n}}},
                 {"analytic", rv_to_json(truth)},
                 {"theta_rel_dev", rel},
                 {"tolerance", o.tolerance},
                 {"pass", pass}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("theta_hat %.12g (analytic %.12g, rel dev %.3e)\n", fit.theta, truth.theta, rel);
        std::printf("tau2_hat  %.12g (analytic %.12g)\n", fit.tau2, truth.tau2);
        std::printf("log_tau1_hat %.12g (analytic %.12g)\n", fit.log_tau1, truth.log_tau1);
        std::printf("rms residual %.3e over %zu points -> %s\n", fit.rms_residual, fit.n,
                    pass ? "PASS" : "FAIL");
    }
    return pass ? 0 : 1;
}

// --------------------------------------------------------------- selftest --

int run_selftest() {
    int failures = 0;
    auto check = [&](const char* name, double got, double want, double tol) {
        bool ok = std::fabs(got - want) <= tol * std::max(1.0, std::fabs(want));
        std::printf("%-44s %s\n", name, ok ? "ok" : "FAIL");
        if (!ok) ++failures;
    };
    check("log_norm_cdf(-10)", log_norm_cdf(-10.0), -53.231285150512470578, 1e-13);
    check("owen_t(1,1)", owen_t(1.0, 1.0), 0.066741882165700966623, 1e-13);
    check("sn_quantile(log 1e-10, 0)", sn_quantile(std::log(1e-10), 0.0), -6.3613409024040562047, 1e-12);
    check("sn_log_cdf(-3,1) = 2 log Phi(-3)", sn_log_cdf(-3.0, 1.0), 2.0 * log_norm_cdf(-3.0), 1e-12);
    check("quantile round trip at -1e5", sn_log_cdf(sn_quantile(-1e5, 2.0), 2.0), -1e5, 1e-12);
    auto t = tail_dependence_asym({-1.0, -1.0, 0.0});
    check("theta at (-1,-1,0)", t.dcdu.theta, 1.0, 1e-13);
    check("kappa at (-1,-1,0)", t.kappa, 2.0, 1e-13);
    double ex = log_add(cond_prob_exact({-200.0, 1, {1, 2, 0.3}}),
                        cond_prob_exact({-200.0, 2, {1, 2, 0.3}}));
    double as = dcopula_rv({1, 2, 0.3}).eval_log(-200.0);
    check("asym/exact log ratio at -200 (1,2,0.3)", as - ex, 0.0, 0.1);
    std::printf("selftest: %d failure(s)\n", failures);
    return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lower-tail dependence asymptotics of the bivariate skew-normal copula"};
    app.require_subcommand(1);

    common_opts oa, ov, of;
    std::string inject;
    auto* analyze = app.add_subcommand("analyze", "classify a parameter set and report its tail asymptote");
    add_common(analyze, oa);
    auto* verify = app.add_subcommand("verify", "compare the asymptote to exact quadrature on a grid");
    add_common(verify, ov);
    auto* fit = app.add_subcommand("fit", "recover exponents by least squares from exact values");
    add_common(fit, of, false);
    fit->add_option("--inject-rvform", inject, "fit synthetic data from \"theta,log_tau1,tau2\"");
    auto* selftest = app.add_subcommand("selftest", "run built-in numerical checks");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        if (analyze->parsed()) return run_analyze(oa);
        if (verify->parsed()) return run_verify(ov);
        if (fit->parsed()) return run_fit(of, inject);
        return run_selftest();
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
