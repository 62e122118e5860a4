#include "zic/cli.hpp"

#include "zic/counterexample.hpp"
#include "zic/entropy.hpp"
#include "zic/error.hpp"
#include "zic/geometry.hpp"
#include "zic/hessian.hpp"
#include "zic/hk_region.hpp"
#include "zic/numeric.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace zic::cli {

namespace {

const std::vector<SubcommandSpec> kSpecs = {
    {"verify-lemma1", "small-t entropy expansion of the default recipe",
     {{"t", "", "time points (default: 9 log-spaced in [1e-4, 1e-2])"}}},
    {"verify-lemma2", "positive objective gap of the default recipe and its Gaussian control",
     {{"t", "", "time points (default: 5 log-spaced in [1e-3, 1.6e-2])"}}},
    {"verify-vertical", "eps^2 coefficient of the vertical D^3 perturbation",
     {{"L", "1.4", "variance of the second input"},
      {"u", "1", "noise variance"},
      {"J", "2", "order of the second-input series"},
      {"delta", "0", "variance offset (0: default)"},
      {"eps", "0", "perturbation size (0: automatic)"}}},
    {"condition54-root", "stability threshold by bisection",
     {{"u", "1", "noise variances"}, {"delta", "0", "variance offset"}}},
    {"hessian", "second-order ledger at the Gaussian stationary point",
     {{"L", "3", "variance of the second input"},
      {"u", "1", "noise variance"},
      {"A", "1", "A_1, A_2, ... coefficients"},
      {"B", "0", "B_1, B_2, ... coefficients (B_1 is projected out)"}}},
    {"phase-diagram", "stability classification over (u, L)",
     {{"u", "0.5,1,2", "noise variances"}, {"L", "1.1:4:0.1", "second-input variances"}}},
    {"theorem5-epsilon", "local optimality radius",
     {{"L", "3", "eigenvalues of diagonal L"},
      {"u", "1", "noise variance"},
      {"K", "", "eigenvalues of diagonal K (default: the maximizer)"}}},
    {"hk-region", "f1 and its concave envelope g1 over a power grid",
     {{"u", "1", "second noise variance"},
      {"N1", "0", "first noise variance"},
      {"q1", "0.5:3:0.5", "first power grid"},
      {"q2", "0.5:3:0.5", "second power grid"},
      {"n", "256", "envelope grid steps per side"}}},
    {"lemma5-audit", "argmax bound on random cells where f1 equals its envelope",
     {{"samples", "200", "number of applicable cells wanted"},
      {"u-max", "3", "u drawn from [0.2, u-max]"},
      {"N1-max", "1", "N1 drawn from [0, N1-max]"},
      {"power-max", "5", "J and L drawn from [0.05, power-max]"},
      {"n", "256", "envelope grid steps per side"}}},
    {"theorem4-audit", "eigenvalue bound on sampled powers",
     {{"d", "1", "dimension (1 or 2)"},
      {"u", "1", "second noise variance"},
      {"N1", "0", "first noise variance"},
      {"q1", "4", "first power range"},
      {"q2", "4", "second power range"},
      {"samples", "50", "number of sampled power pairs"},
      {"n", "64", "envelope grid steps per side"}}},
    {"constant-power-gap", "non-Gaussian witness against the Gaussian value under constant powers",
     {{"u", "1", "weight"},
      {"N1", "1", "first noise variance"},
      {"N2", "0.02", "second noise variance"},
      {"A", "0", "mixing variance (0: automatic)"}}},
    {"conjecture2-map", "where f1 equals its envelope",
     {{"u", "1", "second noise variances"},
      {"q", "0,0.5,1,2,3", "power grid used for both q1 and q2"},
      {"N1", "0", "first noise variance"},
      {"n", "128", "envelope grid steps per side"}}},
    {"geometry", "square, disc and rotated square ratio sweep",
     {{"t", "10:200:10", "scales of the square"},
      {"fit-t", "50,100,200", "three scales for the 1/t fit"},
      {"replace-L-with-B", "", "use the disc in place of the rotated square", true}}},
    {"limit-functional", "D^3 gain of the limiting functional at the stationary variance",
     {{"L", "1.2,1.6,2.0", "second-input variances"},
      {"J", "2", "order of the co-perturbation series"},
      {"delta", "0", "variance offset (0: default)"},
      {"fixed-Y", "", "keep the second input Gaussian", true}}},
};

const SubcommandSpec& find_spec(const std::string& name) {
    for (const auto& s : kSpecs)
        if (s.name == name) return s;
    fail(ErrorKind::InvalidArgument, "unknown subcommand '" + name + "'");
}

class Args {
public:
    Args(const RunConfig& c, const SubcommandSpec& spec, Json& echo) : c_(c), spec_(spec), echo_(echo) {
        for (const auto& [k, v] : c.params) {
            bool known = std::any_of(spec.options.begin(), spec.options.end(), [&](auto& o) { return o.name == k; });
            if (!known) fail(ErrorKind::InvalidArgument, "unknown option --" + k + " for " + spec.name);
        }
    }

    std::string raw(const std::string& name) const {
        auto it = c_.params.find(name);
        if (it != c_.params.end()) return it->second;
        for (const auto& o : spec_.options)
            if (o.name == name) return o.fallback;
        fail(ErrorKind::InvalidArgument, "no option --" + name);
    }

    std::vector<double> values(const std::string& name, const std::vector<double>& fallback = {}) {
        std::string r = raw(name);
        std::vector<double> v = r.empty() ? fallback : parse_values(r);
        if (v.empty()) fail(ErrorKind::InvalidArgument, "--" + name + " is empty");
        echo_[name] = v;
        return v;
    }

    double real(const std::string& name, const std::function<bool(double)>& ok, const std::string& rule) {
        auto v = parse_values(raw(name));
        if (v.size() != 1) fail(ErrorKind::InvalidArgument, "--" + name + " takes one number");
        if (!ok(v[0])) fail(ErrorKind::InvalidArgument, "--" + name + " must be " + rule);
        echo_[name] = v[0];
        return v[0];
    }

    int integer(const std::string& name, int lo, int hi) {
        double v = real(name, [&](double x) { return x == std::floor(x) && x >= lo && x <= hi; },
                        "an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        echo_[name] = int(v);
        return int(v);
    }

    bool flag(const std::string& name) {
        std::string r = raw(name);
        bool b = r == "true" || r == "1";
        if (!(b || r.empty() || r == "false" || r == "0"))
            fail(ErrorKind::InvalidArgument, "--" + name + " is a flag");
        echo_[name] = b;
        return b;
    }

private:
    const RunConfig& c_;
    const SubcommandSpec& spec_;
    Json& echo_;
};

auto positive = [](double x) { return x > 0 && std::isfinite(x); };
auto nonneg = [](double x) { return x >= 0 && std::isfinite(x); };
auto all_positive = [](const std::vector<double>& v, const std::string& name) {
    for (double x : v)
        if (!(x > 0 && std::isfinite(x))) fail(ErrorKind::InvalidArgument, "--" + name + " values must be positive");
};

void check(Report& r, const std::string& name, double value, double reference, double tolerance, bool pass) {
    r.checks.push_back(Json{{"name", name}, {"value", value}, {"reference", reference}, {"tolerance", tolerance},
                            {"pass", pass}});
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

void table(Report& r, std::vector<std::string> cols) { r.columns = std::move(cols); }
void row(Report& r, std::vector<Json> v) { r.rows.push_back(std::move(v)); }

// ---------------------------------------------------------------------------

void lemma1(Args& a, Report& r) {
    auto t = a.values("t", geomspace(1e-4, 1e-2, 9));
    all_positive(t, "t");
    auto rec = default_lemma2_recipe();
    auto e = lemma1_expansion(rec.p, rec.q, t);
    auto pr = lemma1_prediction(rec.p, rec.q);
    r.results = {{"c1", e.c1},           {"c15", e.c15},
                 {"c2", e.c2},           {"c25", e.c25},
                 {"predicted_c1", pr.c1}, {"predicted_c15", pr.c15},
                 {"m2", pr.m2},          {"m3", pr.m3},
                 {"int_p2_lnp", pr.int_p2_lnp}, {"int_p3_lnp", pr.int_p3_lnp},
                 {"residual_slope", e.residual_slope}};
    table(r, {"t", "dh", "residual"});
    for (std::size_t i = 0; i < e.t.size(); ++i) row(r, {e.t[i], e.dh[i], e.residual[i]});
    check(r, "c1", e.c1, pr.c1, 0.02, rel_close(e.c1, pr.c1, 0.02));
    check(r, "c15", e.c15, pr.c15, 0.05, rel_close(e.c15, pr.c15, 0.05));
    check(r, "residual_slope", e.residual_slope, 2.0, 0.25, std::abs(e.residual_slope - 2) <= 0.25);
}

void lemma2(Args& a, Report& r) {
    auto t = a.values("t", default_lemma2_sweep());
    all_positive(t, "t");
    std::sort(t.begin(), t.end());
    auto rec = default_lemma2_recipe();
    auto pred = validate_recipe(rec).prediction;
    auto gap = lemma2_gap(t, rec);
    auto ctl = lemma2_gaussian_control(t, rec);
    table(r, {"t", "gap", "gaussian_control"});
    double worst_ctl = -1e300;
    for (std::size_t i = 0; i < t.size(); ++i) {
        row(r, {t[i], gap[i].gap, ctl[i].gap});
        worst_ctl = std::max(worst_ctl, ctl[i].gap);
    }
    r.results = {{"predicted_coefficient", pred.c15}};
    for (std::size_t i = 0; i < std::min<std::size_t>(2, t.size()); ++i)
        check(r, "gap_positive_t" + std::to_string(i), gap[i].gap, 1e-6, 0.0, gap[i].gap > 1e-6);
    check(r, "gaussian_control", worst_ctl, 1e-6, 0.0, worst_ctl <= 1e-6);
    if (t.size() >= 4) {
        double c = fit_gap_coefficient(gap);
        r.results["fitted_coefficient"] = c;
        check(r, "gap_coefficient", c, pred.c15, 0.05, rel_close(c, pred.c15, 0.05));
    }
}

void vertical(Args& a, Report& r) {
    double L = a.real("L", [](double x) { return x > 1 && std::isfinite(x); }, "> 1");
    double u = a.real("u", positive, "positive");
    int J = a.integer("J", 1, 8);
    double delta = a.real("delta", nonneg, "nonnegative");
    double eps = a.real("eps", nonneg, "nonnegative");
    double K = stationary_K(L, u);
    auto vp = make_vertical(K, L, u, J, delta, eps);
    auto g = vertical_gap(vp);
    double half = 0.5 * condition54(K, u, vp.delta);
    Stability cls = stability_classify(K, u);
    r.results = {{"K", K},
                 {"delta", vp.delta},
                 {"eps", vp.eps},
                 {"gaussian_value", g.gaussian_value},
                 {"base_value", g.base_value},
                 {"perturbed_value", g.perturbed_value},
                 {"quadratic_coeff", g.quadratic_coeff},
                 {"half_condition54", half},
                 {"threshold", stability_threshold(u)},
                 {"classification", stability_name(cls)}};
    table(r, {"eps", "objective"});
    for (int i = 0; i < 3; ++i) row(r, {g.eps[i], g.values[i]});
    check(r, "quadratic_coeff", g.quadratic_coeff, half, 0.02, rel_close(g.quadratic_coeff, half, 0.02));
    if (cls != Stability::critical) {
        bool agree = (g.quadratic_coeff > 0) == (cls == Stability::unstable);
        check(r, "sign_matches_classifier", g.quadratic_coeff, 0.0, 0.0, agree);
    }
}

void c54root(Args& a, Report& r) {
    auto us = a.values("u");
    all_positive(us, "u");
    double delta = a.real("delta", nonneg, "nonnegative");
    std::vector<double> roots(us.size());
    parallel_for(us.size(), [&](std::size_t i) { roots[i] = condition54_root(us[i], delta); });
    table(r, {"u", "root", "threshold", "abs_error"});
    for (std::size_t i = 0; i < us.size(); ++i) {
        double thr = stability_threshold(us[i]);
        row(r, {us[i], roots[i], thr, std::abs(roots[i] - thr)});
        if (delta == 0)
            check(r, "root_u" + Json(us[i]).dump(), roots[i], thr, 1e-8, std::abs(roots[i] - thr) <= 1e-8);
    }
    if (us.size() == 1) {
        r.results["root"] = roots[0];
        r.results["threshold"] = stability_threshold(us[0]);
    }
    r.results["tolerance"] = 1e-8;
}

void hessian(Args& a, Report& r) {
    double L = a.real("L", [](double x) { return x > 1 && std::isfinite(x); }, "> 1");
    double u = a.real("u", positive, "positive");
    auto Av = a.values("A"), Bv = a.values("B");
    HermiteCoeffVector A, B;
    double K = stationary_K(L, u);
    A.base_variance = B.base_variance = K;
    for (std::size_t i = 0; i < Av.size(); ++i) A.coeffs[int(i) + 1] = Av[i];
    for (std::size_t i = 0; i < Bv.size(); ++i) B.coeffs[int(i) + 1] = Bv[i];
    auto rep = hessian_quadratic_form(K, L, u, A, B);
    r.results = {{"K", K},
                 {"S", K + u + L},
                 {"total", rep.total},
                 {"classification", stability_name(rep.classification)},
                 {"threshold", stability_threshold(u)},
                 {"b1_zeroed", rep.b1_zeroed}};
    table(r, {"alpha", "A", "B", "I", "worst_case_I"});
    double sum = 0;
    for (const auto& [alpha, v] : rep.per_alpha_terms) {
        sum += v;
        Json worst = alpha >= 2 ? Json(best_alpha_term(K, u, alpha, A.at(alpha))) : Json(nullptr);
        row(r, {alpha, A.at(alpha), alpha == 1 ? 0.0 : B.at(alpha), v, worst});
    }
    check(r, "total_is_sum", rep.total, sum, 1e-12, std::abs(rep.total - sum) <= 1e-12 * std::max(1.0, std::abs(sum)));
    if (rep.per_alpha_terms.count(1))
        check(r, "I1_nonpositive", rep.per_alpha_terms.at(1), 0.0, 0.0, rep.per_alpha_terms.at(1) <= 1e-15);
}

void phase(Args& a, Report& r) {
    auto us = a.values("u"), Ls = a.values("L");
    all_positive(us, "u");
    for (double L : Ls)
        if (!(L > 1)) fail(ErrorKind::InvalidArgument, "--L values must exceed 1");
    auto cells = phase_diagram(us, Ls);
    table(r, {"u", "L", "K", "classification"});
    int mismatches = 0;
    for (const auto& c : cells) {
        row(r, {c.u, c.L, c.K, stability_name(c.classification)});
        double t = best_alpha_term(c.K, c.u, 2);
        if (c.classification == Stability::stable && !(t < 0)) ++mismatches;
        if (c.classification == Stability::unstable && !(t > 0)) ++mismatches;
    }
    r.results["cells"] = cells.size();
    check(r, "second_order_sign_mismatches", mismatches, 0, 0, mismatches == 0);
}

void theorem5(Args& a, Report& r) {
    auto Ls = a.values("L");
    double u = a.real("u", positive, "positive");
    PsdMatrix L = PsdMatrix::diag(Ls);
    PsdMatrix K;
    if (a.raw("K").empty()) {
        K = theorem5_maximizer(L, u);
        std::vector<double> k;
        for (int i = 0; i < K.dim(); ++i) k.push_back(K(i, i));
        a.values("K", k);
    } else {
        K = PsdMatrix::diag(a.values("K"));
    }
    auto res = theorem5_epsilon(K, L, u);
    r.results = {{"epsilon", res.epsilon ? Json(*res.epsilon) : Json(nullptr)},
                 {"eps1", res.eps1},
                 {"eps2", res.eps2},
                 {"rayleigh_min", res.rayleigh_min},
                 {"worst_cubic_ratio", res.worst_cubic_ratio},
                 {"hypothesis_holds", bool(res.epsilon)},
                 {"offending_eigenvalue",
                  res.offending_eigenvalue ? Json(*res.offending_eigenvalue) : Json(nullptr)},
                 {"threshold", stability_threshold(u)}};
    table(r, {"i", "l", "k"});
    for (int i = 0; i < L.dim(); ++i) row(r, {i, Ls[i], K(i, i)});
    double e = res.eps1, R = res.rayleigh_min;
    if (R > 1)
        check(r, "eps1_root_residual", (1 + e) * (1 + e) / (1 - e), R, 1e-12,
              std::abs((1 + e) * (1 + e) / (1 - e) - R) <= 1e-12 * R);
}

HKParams hk_params(Args& a, bool with_powers) {
    HKParams p;
    p.u = a.real("u", positive, "positive");
    p.N1 = a.real("N1", nonneg, "nonnegative");
    if (with_powers) {
        p.q1 = a.real("q1", positive, "positive");
        p.q2 = a.real("q2", positive, "positive");
    }
    return p;
}

void hk(Args& a, Report& r) {
    HKParams p = hk_params(a, false);
    auto q1 = a.values("q1"), q2 = a.values("q2");
    all_positive(q1, "q1");
    for (double q : q2)
        if (!(q >= 0)) fail(ErrorKind::InvalidArgument, "--q2 values must be nonnegative");
    int n = a.integer("n", 8, 4096);
    table(r, {"q1", "q2", "f1", "g1", "envelope_gap", "K", "case", "support_points", "grid_too_small"});
    int bad_env = 0, bad_support = 0;
    for (double x : q1)
        for (double y : q2) {
            Lemma5Result c = y > 0 ? lemma5_classify(x, y, p) : Lemma5Result{};
            if (y == 0) c.K = phi_argmax(x, y, p.u, p.N1);
            try {
                G1Result g = g1(x, y, p, n);
                double v = 0;
                for (const auto& s : g.support) v += s.weight * s.f;
                if (g.value < g.f1) ++bad_env;
                if (std::abs(v - g.value) > 1e-5) ++bad_support;
                row(r, {x, y, g.f1, g.value, g.value - g.f1, c.K, y > 0 ? Json(c.case_label) : Json(nullptr),
                        g.support.size(), false});
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::GridTooSmall) throw;
                row(r, {x, y, f1(x, y, p), nullptr, nullptr, c.K, y > 0 ? Json(c.case_label) : Json(nullptr), 0,
                        true});
            }
        }
    check(r, "envelope_dominates", bad_env, 0, 0, bad_env == 0);
    check(r, "support_reconstruction", bad_support, 0, 1e-5, bad_support == 0);
}

void lemma5(Args& a, Report& r, std::uint64_t seed) {
    int samples = a.integer("samples", 1, 100000);
    double umax = a.real("u-max", [](double x) { return x > 0.2 && std::isfinite(x); }, "> 0.2");
    double nmax = a.real("N1-max", nonneg, "nonnegative");
    double pmax = a.real("power-max", [](double x) { return x > 0.05 && std::isfinite(x); }, "> 0.05");
    int n = a.integer("n", 8, 4096);
    CounterRng rng(seed, 5);
    table(r, {"u", "N1", "J", "L", "K", "case", "bound", "envelope_gap", "bound_holds"});
    int tries = 0, applicable = 0, violations = 0, loose = 0, loose_viol = 0;
    const int max_tries = 20 * samples;
    while (applicable < samples && tries < max_tries) {
        ++tries;
        HKParams p;
        p.u = rng.uniform(0.2, umax);
        p.N1 = rng.uniform(0, nmax);
        double J = rng.uniform(0.05, pmax), L = rng.uniform(0.05, pmax);
        double gap;
        try {
            G1Result g = g1(J, L, p, n);
            gap = g.value - g.f1;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::GridTooSmall) throw;
            continue;
        }
        Lemma5Result c = lemma5_classify(J, L, p);
        if (gap <= 1e-5) {
            ++loose;
            if (!c.bound_holds) ++loose_viol;
        }
        if (gap > kApplicabilityTolerance) continue;
        ++applicable;
        if (!c.bound_holds) ++violations;
        row(r, {p.u, p.N1, J, L, c.K, c.case_label, c.bound, gap, c.bound_holds});
    }
    r.results = {{"tries", tries},
                 {"applicable", applicable},
                 {"violations", violations},
                 {"applicability_tolerance", kApplicabilityTolerance},
                 {"loose_tolerance", 1e-5},
                 {"loose_admitted", loose},
                 {"loose_violations", loose_viol}};
    check(r, "applicable_cells", applicable, samples, 0, applicable == samples);
    check(r, "bound_violations", violations, 0, 1e-6, violations == 0);
}

void theorem4(Args& a, Report& r, std::uint64_t seed) {
    int d = a.integer("d", 1, 2);
    HKParams p = hk_params(a, true);
    int samples = a.integer("samples", 1, 100000);
    int n = a.integer("n", 8, 4096);
    if (n % 4) fail(ErrorKind::InvalidArgument, "--n must be divisible by 4");
    auto rep = theorem4_audit(d, p, samples, seed, n);
    table(r, {"q1", "q2", "applicable", "envelope_gap", "J", "L", "K", "max_eigenvalue", "bound_holds"});
    for (const auto& s : rep.samples)
        row(r, {s.q1, s.q2, s.applicable, s.envelope_gap, s.J, s.L, s.K, s.max_eigenvalue, s.bound_holds});
    r.results = {{"bound", rep.bound},
                 {"applicable", rep.applicable},
                 {"violations", rep.violations},
                 {"heuristic_certificate", rep.heuristic_certificate}};
    check(r, "bound_violations", rep.violations, 0, 1e-6, rep.violations == 0);
}

void cpg(Args& a, Report& r) {
    HKParams p;
    p.u = a.real("u", positive, "positive");
    p.N1 = a.real("N1", positive, "positive");
    p.N2 = a.real("N2", positive, "positive");
    double A = a.real("A", nonneg, "nonnegative");
    auto g = A > 0 ? constant_power_gap(p, A) : constant_power_gap(p);
    if (A == 0) r.config["params"]["A_resolved"] = g.A;
    r.results = {{"gaussian_value", g.gaussian_value},
                 {"lower_witness", g.lower_witness},
                 {"gap", g.gap},
                 {"c", g.c},
                 {"A", g.A},
                 {"slack", g.slack},
                 {"t", g.t},
                 {"scale", g.scale},
                 {"q1", g.q1},
                 {"q2", g.q2}};
    check(r, "gap_at_least_half_c", g.gap, g.c / 2, 0, g.gap >= g.c / 2);
}

void conj2(Args& a, Report& r) {
    auto us = a.values("u"), qs = a.values("q");
    all_positive(us, "u");
    for (double q : qs)
        if (!(q >= 0)) fail(ErrorKind::InvalidArgument, "--q values must be nonnegative");
    HKParams p;
    p.N1 = a.real("N1", nonneg, "nonnegative");
    int n = a.integer("n", 8, 4096);
    auto cells = conjecture2_map(us, qs, p, n);
    table(r, {"u", "q1", "q2", "f1", "g1", "f1_eq_g1", "K", "grid_too_small"});
    int viol = 0, strict = 0;
    for (const auto& c : cells) {
        row(r, {c.u, c.q1, c.q2, c.f1, c.grid_too_small ? Json(nullptr) : Json(c.g1), c.f1_eq_g1, c.K,
                c.grid_too_small});
        if (c.f1_eq_g1 && c.q2 > 0 && c.K + p.N1 > 1 + std::sqrt(1 + c.u) + 1e-6) ++viol;
        if (!c.f1_eq_g1 && !c.grid_too_small) ++strict;
    }
    r.results = {{"cells", cells.size()}, {"strict_envelope_cells", strict}};
    check(r, "bound_on_equal_cells", viol, 0, 1e-6, viol == 0);
}

void geometry(Args& a, Report& r) {
    auto ts = a.values("t");
    all_positive(ts, "t");
    auto fit_t = a.values("fit-t");
    if (fit_t.size() != 3) fail(ErrorKind::InvalidArgument, "--fit-t takes three values");
    all_positive(fit_t, "fit-t");
    bool use_B = a.flag("replace-L-with-B");
    auto sweep = theorem7_sweep(ts, use_B);
    table(r, {"t", "ratio", "above_one"});
    int bad = 0;
    for (const auto& [t, ratio] : sweep) {
        row(r, {t, ratio, ratio > 1});
        if (use_B && ratio > 1 + 1e-9) ++bad;
        if (!use_B && t >= 20 && !(ratio > 1)) ++bad;
    }
    auto f = theorem7_fit(fit_t);
    r.results = {{"fit_c", f.c},
                 {"fit_d", f.d},
                 {"fit_e", f.e},
                 {"expected_c", f.expected},
                 {"mean_width_B", mean_width_2d(ConvexBody2D::disc(0.5))},
                 {"mean_width_L", mean_width_2d(ConvexBody2D::square(kPi / 4, kPi / 4))}};
    // d/de area(K + eB) and area(K + eL) at e = 0 for the unit square K, exact centered values
    auto K = ConvexBody2D::square(1.0);
    r.results["area_slope_B"] = 2 * mixed_area(K, ConvexBody2D::disc(0.5));
    r.results["area_slope_L"] = 2 * mixed_area(K, ConvexBody2D::square(kPi / 4, kPi / 4));
    check(r, use_B ? "ratio_at_most_one" : "ratio_above_one_for_t_ge_20", bad, 0, 0, bad == 0);
    check(r, "first_order_coefficient", f.c, f.expected, 0.01, rel_close(f.c, f.expected, 0.01));
}

void limitf(Args& a, Report& r) {
    auto Ls = a.values("L");
    for (double L : Ls)
        if (!(L > 1)) fail(ErrorKind::InvalidArgument, "--L values must exceed 1");
    int J = a.integer("J", 1, 8);
    double delta = a.real("delta", nonneg, "nonnegative");
    bool fixed = a.flag("fixed-Y");
    std::vector<LimitGain> g(Ls.size());
    parallel_for(Ls.size(), [&](std::size_t i) { g[i] = limit_perturbation_gain(Ls[i], !fixed, J, delta); });
    table(r, {"L", "K", "quadratic_coeff", "predicted_coeff", "gain_positive"});
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        row(r, {Ls[i], g[i].K, g[i].quadratic_coeff, g[i].predicted_coeff, g[i].quadratic_coeff > 0});
        check(r, "sign_L" + Json(Ls[i]).dump(), g[i].quadratic_coeff, g[i].predicted_coeff, 0,
              (g[i].quadratic_coeff > 0) == (g[i].predicted_coeff > 0));
    }
    r.results["co_perturbed_Y"] = !fixed;
}

std::string csv_field(const Json& v) {
    std::string s;
    if (v.is_null()) return "";
    if (v.is_string()) s = v.get<std::string>();
    else s = v.dump();
    if (s.find_first_of(",\"\r\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return s;
}

bool validation_kind(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::PowerViolation:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::NonConvexInput:
        case ErrorKind::NoGaussianMax:
        case ErrorKind::NotStationary:
        case ErrorKind::RecipeRejected: return true;
        default: return false;
    }
}

}  // namespace

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.at("pass").get<bool>()) return false;
    return true;
}

const std::vector<SubcommandSpec>& subcommands() { return kSpecs; }

std::vector<double> parse_values(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidArgument, "'" + s + "' is not a number");
        }
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size() || !std::isfinite(v)) fail(ErrorKind::InvalidArgument, "'" + s + "' is not a number");
        return v;
    };
    if (text.find_first_not_of(" \t") == std::string::npos) fail(ErrorKind::InvalidArgument, "empty value");
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) fail(ErrorKind::InvalidArgument, "range '" + text + "' must be lo:hi:step");
        double lo = number(parts[0]), hi = number(parts[1]), step = number(parts[2]);
        if (!(step > 0) || hi < lo) fail(ErrorKind::InvalidArgument, "range '" + text + "' needs lo <= hi and step > 0");
        const double n = std::floor((hi - lo) / step + 1e-9);
        if (n > 1e6) fail(ErrorKind::InvalidArgument, "range '" + text + "' has too many points");
        for (int i = 0; i <= int(n); ++i) out.push_back(lo + i * step);
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) {
        if (p.find_first_not_of(" \t") == std::string::npos) fail(ErrorKind::InvalidArgument, "empty list entry");
        out.push_back(number(p));
    }
    return out;
}

Report execute(const RunConfig& config) {
    const SubcommandSpec& spec = find_spec(config.subcommand);
    if (config.format != "json" && config.format != "csv")
        fail(ErrorKind::InvalidArgument, "--format must be json or csv");
    Report r;
    r.config = {{"subcommand", config.subcommand},
                {"seed", config.seed},
                {"format", config.format},
                {"output", config.output},
                {"threads", worker_count()},
                {"params", Json::object()}};
    Args a(config, spec, r.config["params"]);
    const std::string& s = config.subcommand;
    if (s == "verify-lemma1") lemma1(a, r);
    else if (s == "verify-lemma2") lemma2(a, r);
    else if (s == "verify-vertical") vertical(a, r);
    else if (s == "condition54-root") c54root(a, r);
    else if (s == "hessian") hessian(a, r);
    else if (s == "phase-diagram") phase(a, r);
    else if (s == "theorem5-epsilon") theorem5(a, r);
    else if (s == "hk-region") hk(a, r);
    else if (s == "lemma5-audit") lemma5(a, r, config.seed);
    else if (s == "theorem4-audit") theorem4(a, r, config.seed);
    else if (s == "constant-power-gap") cpg(a, r);
    else if (s == "conjecture2-map") conj2(a, r);
    else if (s == "geometry") geometry(a, r);
    else if (s == "limit-functional") limitf(a, r);
    if (!r.columns.empty()) {
        Json t = Json::array();
        for (const auto& rw : r.rows) {
            Json o = Json::object();
            for (std::size_t i = 0; i < r.columns.size(); ++i) o[r.columns[i]] = rw[i];
            t.push_back(o);
        }
        r.results["table"] = t;
    }
    return r;
}

std::string render_json(const Report& r) {
    Json j = {{"config", r.config}, {"results", r.results}, {"checks", r.checks}};
    return j.dump(2) + "\n";
}

std::string render_csv(const Report& r) {
    std::string out;
    for (std::size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + csv_field(r.columns[i]);
    out += "\r\n";
    for (const auto& rw : r.rows) {
        for (std::size_t i = 0; i < rw.size(); ++i) out += (i ? "," : "") + csv_field(rw[i]);
        out += "\r\n";
    }
    return out;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
    if (path == "-" || path.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::InvalidArgument, "cannot write " + path);
    f << text;
}

}  // namespace

int run(const RunConfig& config) {
    Report r;
    try {
        r = execute(config);
    } catch (const Error& e) {
        std::cerr << "zic " << config.subcommand << ": " << e.what() << "\n";
        int code = validation_kind(e.kind()) ? kValidation : kOracleMismatch;
        Json j = {{"config", {{"subcommand", config.subcommand}, {"seed", config.seed}, {"format", config.format},
                              {"output", config.output}, {"params", config.params}}},
                  {"results", {{"error", error_kind_name(e.kind())}, {"message", e.what()}}},
                  {"checks", Json::array()}};
        try {
            if (config.format == "csv" && config.output != "-" && !config.output.empty())
                write_text(config.output + ".meta.json", j.dump(2) + "\n");
            else if (config.format == "json")
                write_text(config.output, j.dump(2) + "\n");
        } catch (const Error&) {
        }
        return code;
    }
    try {
        if (config.format == "csv") {
            write_text(config.output, render_csv(r));
            if (config.output != "-" && !config.output.empty()) {
                Json meta = {{"config", r.config}, {"results", r.results}, {"checks", r.checks}};
                meta["results"].erase("table");
                write_text(config.output + ".meta.json", meta.dump(2) + "\n");
            }
        } else {
            write_text(config.output, render_json(r));
        }
    } catch (const Error& e) {
        std::cerr << "zic: " << e.what() << "\n";
        return kValidation;
    }
    for (const auto& c : r.checks)
        if (!c.at("pass").get<bool>()) std::cerr << "check failed: " << c.at("name").get<std::string>() << "\n";
    return r.all_pass() ? kOk : kOracleMismatch;
}

int main(int argc, const char* const* argv) {
    CLI::App app{"numerical checks for Gaussian optimality in entropy inequalities"};
    app.name("zic");
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_option("--seed", cfg.seed, "seed for all random draws")->capture_default_str();
    app.add_option("-o,--output", cfg.output, "report path, - for stdout")->capture_default_str();
    app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::vector<std::pair<CLI::App*, const SubcommandSpec*>> subs;
    for (const auto& spec : kSpecs) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        sub->fallthrough();
        for (const auto& o : spec.options) {
            const std::string key = spec.name + "/" + o.name;
            std::string help = o.help + (o.fallback.empty() ? "" : " [" + o.fallback + "]");
            if (o.flag) sub->add_flag("--" + o.name, flags[key], help);
            else sub->add_option("--" + o.name, values[key], help);
        }
        subs.push_back({sub, &spec});
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }
    for (auto& [sub, spec] : subs) {
        if (!sub->parsed()) continue;
        cfg.subcommand = spec->name;
        for (const auto& o : spec->options) {
            const std::string key = spec->name + "/" + o.name;
            if (o.flag) {
                if (flags[key]) cfg.params[o.name] = "true";
            } else if (sub->count("--" + o.name)) {
                cfg.params[o.name] = values[key];
            }
        }
    }
    return run(cfg);
}

}  // namespace zic::cli
