#include "zic/counterexample.hpp"

#include "zic/error.hpp"
#include "zic/numeric.hpp"
#include "zic/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace zic {

namespace {

constexpr std::size_t kGridN = 8192;

double second_moment(const GaussDerivMixture& m) { return moments(m, 2)[1]; }

double grid_second_moment(const GridDensity& g) {
    CompensatedSum s;
    for (std::size_t i = 0; i < g.n; ++i) {
        double w = (i == 0 || i + 1 == g.n) ? 0.5 : 1.0;
        s.add(w * g.x(i) * g.x(i) * g.values[i]);
    }
    return s.value() * g.step();
}

// full linear convolution of two grids with a common step
GridDensity convolve_grids(const GridDensity& a, const GridDensity& b) {
    const double h = a.step();
    if (std::fabs(b.step() - h) > 1e-12 * h) fail(ErrorKind::InvalidArgument, "grid convolution needs equal steps");
    GridDensity out;
    out.n = a.n + b.n - 1;
    out.lo = a.lo + b.lo;
    out.hi = out.lo + h * double(out.n - 1);
    out.values.assign(out.n, 0.0);
    for (std::size_t i = 0; i < a.n; ++i) {
        double ai = a.values[i] * h;
        if (ai == 0.0) continue;
        for (std::size_t j = 0; j < b.n; ++j) out.values[i + j] += ai * b.values[j];
    }
    return out;
}

GridDensity add_gaussian_noise(const GridDensity& g, double var) {
    if (var <= 0.0) return g;
    return convolve_grid(g, GaussDerivMixture::gaussian(1.0), var);
}

double h_gauss(double v) { return gaussian_entropy(v); }

// (D^k gamma_a)^2 / gamma_b by quadrature, exponentials combined so the tails do not underflow to 0/0
double overlap_quadrature(int k, double a, double b) {
    HermitePolynomial P(k, a);
    const double pref = std::sqrt(b / a) / std::sqrt(2 * kPi * a);
    const double rate = 1.0 / a - 0.5 / b;
    const double scale = std::sqrt(0.5 / rate);
    return integrate_line(
        [&](double x) {
            double r = P(x);
            return r * r * pref * std::exp(-rate * x * x);
        },
        0.0, scale, 40.0, 1e-14);
}

double richardson(const double e[3], const double q[3]) {
    (void)e;
    double r1 = (4.0 * q[1] - q[0]) / 3.0;
    double r2 = (4.0 * q[2] - q[1]) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

}  // namespace

double conjecture_objective_gaussian(const ConjectureParams& c, double K, double L) {
    return c.u * h_gauss(K + L + c.N1 + c.N2) + h_gauss(K + c.N1) - (1 + c.u) * h_gauss(K + c.N1 + c.N2) - c.Sigma1 * K;
}

double conjecture_objective(const ConjectureParams& c, const GaussDerivMixture& x1, const GaussDerivMixture& x2) {
    require(c.u >= 0 && c.N1 >= 0 && c.N2 >= 0 && c.Sigma1 >= 0 && c.A2 >= 0, "parameters must be nonnegative");
    require(c.d == 1, "non-Gaussian evaluation is one-dimensional");
    double p2 = second_moment(x2);
    if (p2 > c.A2 + 1e-9)
        fail(ErrorKind::PowerViolation, "E[X2^2] = " + std::to_string(p2) + " exceeds " + std::to_string(c.A2));
    auto noisy = [](const GaussDerivMixture& m, double v) {
        return v > 0.0 ? convolve(m, GaussDerivMixture::gaussian(v)) : m;
    };
    auto x1z1 = noisy(x1, c.N1);
    auto x1z = noisy(x1z1, c.N2);
    auto all = convolve(x1z, x2);
    return c.u * entropy(all, kGridN) + entropy(x1z1, kGridN) - (1 + c.u) * entropy(x1z, kGridN) -
           c.Sigma1 * second_moment(x1);
}

double conjecture_objective(const ConjectureParams& c, const GridDensity& x1, const GridDensity& x2) {
    require(c.u >= 0 && c.N1 >= 0 && c.N2 >= 0 && c.Sigma1 >= 0 && c.A2 >= 0, "parameters must be nonnegative");
    require(c.d == 1, "non-Gaussian evaluation is one-dimensional");
    double p2 = grid_second_moment(x2);
    if (p2 > c.A2 + 1e-9)
        fail(ErrorKind::PowerViolation, "E[X2^2] = " + std::to_string(p2) + " exceeds " + std::to_string(c.A2));
    auto x1z1 = add_gaussian_noise(x1, c.N1);
    auto x1z = add_gaussian_noise(x1z1, c.N2);
    auto all = convolve_grids(x1z, x2);
    return c.u * differential_entropy(all) + differential_entropy(x1z1) - (1 + c.u) * differential_entropy(x1z) -
           c.Sigma1 * grid_second_moment(x1);
}

// ---------------------------------------------------------------------------

Lemma2Recipe default_lemma2_recipe() {
    Lemma2Recipe r;
    r.p = GaussDerivMixture::location_mixture({0.7, 0.3}, {0.3, -0.7}, {0.25, 0.25});
    r.q = GaussDerivMixture::location_mixture({0.1, 0.9}, {2.0, -2.0 / 9.0}, {0.04, 0.04});
    return r;
}

std::vector<double> default_lemma2_sweep() { return geomspace(1e-3, 1.6e-2, 5); }

RecipeCheck validate_recipe(const Lemma2Recipe& r) {
    auto reject = [](const std::string& why) { fail(ErrorKind::RecipeRejected, why); };
    if (std::fabs(r.p.mass() - 1.0) > 1e-12) reject("p must have unit mass");
    if (std::fabs(r.q.mass() - 1.0) > 1e-12) reject("q must have unit mass");
    for (const auto& t : r.p.terms())
        if (t.coeff < 0 || t.order != 0) reject("p must be a positive Gaussian location mixture");
    for (const auto& t : r.q.terms())
        if (t.coeff < 0 || t.order != 0) reject("q must be a positive Gaussian location mixture");
    auto m = moments(r.q, 3);
    if (std::fabs(m[0]) > 1e-12) reject("q must have zero mean, got " + std::to_string(m[0]));
    if (!(m[1] > 0)) reject("q must have positive variance");
    RecipeCheck out;
    out.prediction = lemma1_prediction(r.p, r.q);
    // for a genuine sum the t^{3/2} term is m3 * (1/6) int p''' ln p
    if (!(out.prediction.c15 > 0))
        reject("m3 * int p''' ln p must be positive (m3 = " + std::to_string(m[2]) +
               ", int p''' ln p = " + std::to_string(out.prediction.int_p3_lnp) + ")");
    return out;
}

double lemma2_gap_at(double t, const GaussDerivMixture& p, const GaussDerivMixture& q) {
    require(t > 0, "t must be positive");
    const double m2 = moments(q, 2)[1];
    const std::size_t n = 16384;
    auto pz = convolve(p, GaussDerivMixture::gaussian(t * m2));
    auto pzq = convolve(pz, q.dilate(std::sqrt(t)));
    return entropy(pzq, n) + entropy(p, n) - 2.0 * entropy(pz, n);
}

std::vector<GapPoint> lemma2_gap(const std::vector<double>& t_grid, const Lemma2Recipe& recipe) {
    validate_recipe(recipe);
    std::vector<GapPoint> out(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) { out[i] = {t_grid[i], lemma2_gap_at(t_grid[i], recipe.p, recipe.q)}; });
    return out;
}

std::vector<GapPoint> lemma2_gaussian_control(const std::vector<double>& t_grid, const Lemma2Recipe& recipe) {
    auto g = GaussDerivMixture::gaussian(moments(recipe.q, 2)[1]);
    std::vector<GapPoint> out(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) { out[i] = {t_grid[i], lemma2_gap_at(t_grid[i], recipe.p, g)}; });
    return out;
}

double fit_gap_coefficient(const std::vector<GapPoint>& pts) {
    require(pts.size() >= 4, "gap fit needs at least 4 points");
    std::vector<double> a, b, c, y;
    for (const auto& p : pts) {
        a.push_back(std::pow(p.t, 1.5));
        b.push_back(p.t * p.t);
        c.push_back(std::pow(p.t, 2.5));
        y.push_back(p.gap);
    }
    return least_squares({a, b, c}, y)[0];
}

// ---------------------------------------------------------------------------

GaussDerivMixture VerticalPerturbation::p1() const {
    return GaussDerivMixture({{1.0, 0, K}, {-eps, 3, K - delta}});
}

GaussDerivMixture VerticalPerturbation::p2() const {
    std::vector<GaussTerm> t;
    for (int j = 0; j <= J; ++j) t.push_back({std::pow(eps, j), 3 * j, L - j * delta});
    return GaussDerivMixture(t);
}

VerticalPerturbation VerticalPerturbation::with_eps(double e) const {
    auto v = *this;
    v.eps = e;
    return v;
}

double stationary_K(double L, double u) {
    if (!(L > 1.0)) fail(ErrorKind::NoGaussianMax, "L = " + std::to_string(L) + " <= 1 has no Gaussian maximiser");
    return (L + u) / (L - 1.0);
}

double stationary_L(double K, double u) {
    require(K > 1.0, "stationary pairs need K > 1");
    return (K + u) / (K - 1.0);
}

double stability_threshold(double u) {
    require(u > 0, "u must be positive");
    return u / (std::cbrt(1.0 + u) - 1.0);
}

double default_delta(double K, double L, int J) { return std::min(K, L / J) / 10.0; }

namespace {

bool nonnegative(const GaussDerivMixture& m) {
    double s = std::sqrt(m.max_variance());
    return m.min_relative_density(-60 * s, 60 * s, 24001) >= 0.0;
}

void check_vertical(const VerticalPerturbation& vp) {
    require(vp.K > 0 && vp.L > 0 && vp.u > 0, "K, L, u must be positive");
    require(vp.J >= 1 && 3 * (vp.J + 1) <= kMaxOrder, "J out of range");
    require(vp.delta > 0, "delta must be positive");
    require(vp.K - vp.delta > 0, "K - delta must be positive");
    require(vp.L - vp.J * vp.delta > 0, "L - J delta must be positive");
}

}  // namespace

bool densities_nonnegative(const VerticalPerturbation& vp) { return nonnegative(vp.p1()) && nonnegative(vp.p2()); }

double select_eps(double K, double L, double delta, int J) {
    VerticalPerturbation vp{K, L, 1.0, delta, 0.0, J};
    check_vertical(vp);
    for (int k = 1; k <= 60; ++k) {
        double e = std::ldexp(1.0, -k);
        if (densities_nonnegative(vp.with_eps(e))) return 0.5 * e;
    }
    fail(ErrorKind::NegativeDensity, "no eps >= 2^-60 keeps the perturbed densities nonnegative");
}

VerticalPerturbation make_vertical(double K, double L, double u, int J, double delta, double eps) {
    VerticalPerturbation vp{K, L, u, delta > 0 ? delta : default_delta(K, L, J), 0.0, J};
    check_vertical(vp);
    vp.eps = eps > 0 ? eps : select_eps(K, L, vp.delta, J);
    if (!densities_nonnegative(vp)) fail(ErrorKind::NegativeDensity, "eps too large for positivity");
    return vp;
}

GaussDerivMixture input_with_noise(const VerticalPerturbation& vp, double N1) {
    require(N1 >= 0 && vp.K - N1 - vp.delta > 0, "need K - N1 - delta > 0");
    return GaussDerivMixture({{1.0, 0, vp.K - N1}, {-vp.eps, 3, vp.K - N1 - vp.delta}});
}

double vertical_objective(const VerticalPerturbation& vp) {
    auto p1 = vp.p1();
    auto p1u = convolve(p1, GaussDerivMixture::gaussian(vp.u));
    auto all = convolve(p1u, vp.p2());
    return vp.u * entropy(all, kGridN) + entropy(p1, kGridN) - (1 + vp.u) * entropy(p1u, kGridN);
}

double vertical_objective_gaussian(double K, double L, double u) {
    return u * h_gauss(K + u + L) + h_gauss(K) - (1 + u) * h_gauss(K + u);
}

VerticalGap vertical_gap(const VerticalPerturbation& vp) {
    check_vertical(vp);
    require(vp.eps > 0, "eps must be positive");
    VerticalGap out;
    out.gaussian_value = vertical_objective_gaussian(stationary_K(vp.L, vp.u), vp.L, vp.u);
    out.base_value = vertical_objective_gaussian(vp.K, vp.L, vp.u);
    double q[3];
    for (int i = 0; i < 3; ++i) {
        out.eps[i] = vp.eps / double(1 << i);
        auto v = vp.with_eps(out.eps[i]);
        if (!densities_nonnegative(v)) fail(ErrorKind::NegativeDensity, "eps too large for positivity");
        out.values[i] = vertical_objective(v);
        q[i] = (out.values[i] - out.base_value) / (out.eps[i] * out.eps[i]);
    }
    out.perturbed_value = out.values[0];
    out.quadratic_coeff = richardson(out.eps, q);
    return out;
}

double condition54(double K, double u, double delta) {
    require(K > 0 && u > 0 && delta >= 0 && K - delta > 0, "condition54 needs K > delta >= 0");
    return -overlap_quadrature(3, K - delta, K) + (1 + u) * overlap_quadrature(3, K + u - delta, K + u);
}

double condition54_closed(double K, double u, double delta) {
    require(K > 0 && u > 0 && delta >= 0 && K - delta > 0, "condition54 needs K > delta >= 0");
    return -hermite_overlap(3, K - delta, K) + (1 + u) * hermite_overlap(3, K + u - delta, K + u);
}

double condition54_root(double u, double delta, double xtol) {
    require(u > 0, "u must be positive");
    double lo = std::max(1e-3, 2 * delta + 1e-9), hi = 100.0;
    auto f = [&](double K) { return condition54(K, u, delta); };
    return bisect(f, lo, hi, xtol);
}

// ---------------------------------------------------------------------------

double limit_functional_gaussian(double K, double L) { return 0.5 * std::log((K + L) / K) - 0.5 / K; }

double limit_functional(double L, const GaussDerivMixture& x) {
    return limit_functional_pair(x, GaussDerivMixture::gaussian(L));
}

double limit_functional_pair(const GaussDerivMixture& x, const GaussDerivMixture& y) {
    auto xg = mixture_to_grid(x, kGridN);
    return entropy(convolve(x, y), kGridN) - differential_entropy(xg) - 0.5 * fisher_information(xg);
}

double limit_functional(double L, const GridDensity& x) {
    require(L > 0, "L must be positive");
    // pad so X + Y fits on the grid
    const double h = x.step();
    const std::size_t pad = std::size_t(std::ceil(14.0 * std::sqrt(L) / h));
    GridDensity wide = x;
    wide.slope.clear();
    wide.values.clear();
    wide.values.assign(pad, 0.0);
    wide.values.insert(wide.values.end(), x.values.begin(), x.values.end());
    wide.values.insert(wide.values.end(), pad, 0.0);
    wide.n = wide.values.size();
    wide.lo = x.lo - h * double(pad);
    wide.hi = wide.lo + h * double(wide.n - 1);
    auto sum = convolve_grid(wide, GaussDerivMixture::gaussian(L), 1.0);
    return differential_entropy(sum) - differential_entropy(x) - 0.5 * fisher_information(x);
}

LimitGain limit_perturbation_gain(double L, bool co_perturb, int J, double delta) {
    require(L > 1.0, "the Gaussian stationary variance needs L > 1");
    LimitGain out;
    const double K = L / (L - 1.0);
    out.K = K;
    const double d = delta > 0 ? delta : default_delta(K, L, J);
    out.gaussian_value = limit_functional_gaussian(K, L);
    out.predicted_coeff = co_perturb ? 3.0 / std::pow(K, 3) - 9.0 / std::pow(K, 4)
                                     : 3.0 / std::pow(K, 3) - 3.0 / std::pow(K + L, 3) - 9.0 / std::pow(K, 4);
    // the same positivity rule as the vertical perturbation; u does not enter it
    const double e0 = select_eps(K, L, d, J);
    double q[3];
    for (int i = 0; i < 3; ++i) {
        double e = e0 / double(1 << i);
        VerticalPerturbation vp{K, L, 1.0, d, e, J};
        auto y = co_perturb ? vp.p2() : GaussDerivMixture::gaussian(L);
        out.eps[i] = e;
        out.values[i] = limit_functional_pair(vp.p1(), y);
        q[i] = (out.values[i] - out.gaussian_value) / (e * e);
    }
    out.quadratic_coeff = richardson(out.eps, q);
    return out;
}

}  // namespace zic
