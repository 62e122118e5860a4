#include <doctest.h>

#include "zic/counterexample.hpp"
#include "zic/error.hpp"
#include "zic/numeric.hpp"

#include <cmath>

using namespace zic;

namespace {

template <class F>
ErrorKind kind_of(F f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

double psi1(double K, double L, double u, double N1) {
    return u * std::log(K + N1 + u + L) + std::log(K + N1) - (u + 1) * std::log(K + N1 + u);
}

}  // namespace

TEST_CASE("Gaussian objective approaches zero from below") {
    ConjectureParams c{1.0, 0.0, 1.0, 0.0, 1.0, 1};
    double prev = -1.0;
    for (double K : {10.0, 100.0, 1000.0}) {
        double v = conjecture_objective(c, GaussDerivMixture::gaussian(K), GaussDerivMixture::gaussian(1.0));
        CHECK(v < 0.0);
        CHECK(v > prev);
        CHECK(v == doctest::Approx(conjecture_objective_gaussian(c, K, 1.0)).epsilon(1e-8));
        prev = v;
    }
    CHECK(std::fabs(prev) < 1e-6);
}

TEST_CASE("Gaussian inputs match the closed form") {
    for (double N1 : {0.0, 0.3}) {
        ConjectureParams c{1.0, N1, 1.0, 0.0, 10.0, 1};
        for (double K : {0.5, 1.0, 2.0, 4.0, 8.0})
            for (double L : {0.25, 0.5, 1.0, 2.0, 4.0}) {
                double v = conjecture_objective(c, GaussDerivMixture::gaussian(K), GaussDerivMixture::gaussian(L));
                CHECK(std::fabs(v - conjecture_objective_gaussian(c, K, L)) < 1e-6);
                // with N2 = u the objective is half of psi
                CHECK(std::fabs(v - 0.5 * psi1(K, L, 1.0, N1)) < 1e-6);
            }
    }
}

TEST_CASE("grid inputs") {
    ConjectureParams c{1.0, 0.2, 1.0, 0.1, 2.0, 1};
    const double h = 0.01;
    auto grid = [&](double v) {
        double w = 12 * std::sqrt(v);
        std::size_t n = std::size_t(std::ceil(2 * w / h)) + 1;
        return mixture_to_grid(GaussDerivMixture::gaussian(v), -h * double(n / 2), h * double(n / 2), 2 * (n / 2) + 1);
    };
    double v = conjecture_objective(c, grid(1.5), grid(0.8));
    CHECK(std::fabs(v - conjecture_objective_gaussian(c, 1.5, 0.8)) < 1e-6);
}

TEST_CASE("power constraint") {
    ConjectureParams c{1.0, 0.0, 1.0, 0.0, 1.0, 1};
    CHECK(kind_of([&] {
              conjecture_objective(c, GaussDerivMixture::gaussian(1.0), GaussDerivMixture::gaussian(1.1));
          }) == ErrorKind::PowerViolation);
}

TEST_CASE("recipe objective is positive at small t") {
    auto r = default_lemma2_recipe();
    const double t = 2e-3;
    const double m2 = moments(r.q, 2)[1];
    ConjectureParams c{1.0, 0.0, m2, 0.0, m2, 1};
    double v = conjecture_objective(c, r.p.dilate(1.0 / std::sqrt(t)), r.q);
    CHECK(v > 0.0);
    CHECK(v == doctest::Approx(lemma2_gap_at(t, r.p, r.q)).epsilon(1e-5));
}

TEST_CASE("recipe validation") {
    auto r = default_lemma2_recipe();
    auto chk = validate_recipe(r);
    CHECK(chk.prediction.m3 > 0);
    CHECK(chk.prediction.int_p3_lnp > 0);
    auto flipped = r;
    flipped.q = r.q.reflect();
    CHECK(kind_of([&] { validate_recipe(flipped); }) == ErrorKind::RecipeRejected);
    auto biased = r;
    biased.q = r.q.shift(0.1);
    CHECK(kind_of([&] { validate_recipe(biased); }) == ErrorKind::RecipeRejected);
}

TEST_CASE("gap coefficient matches the quadrature prediction") {
    auto r = default_lemma2_recipe();
    auto pts = lemma2_gap(geomspace(1e-4, 1e-2, 9), r);
    double pred = validate_recipe(r).prediction.c15;
    CHECK(fit_gap_coefficient(pts) == doctest::Approx(pred).epsilon(0.05));
    for (const auto& p : lemma2_gap(default_lemma2_sweep(), r)) CHECK(p.gap > 0);
    for (const auto& p : lemma2_gaussian_control(default_lemma2_sweep(), r)) CHECK(p.gap <= 1e-6);
}

TEST_CASE("symmetric kernel gives an O(t^2) gap") {
    auto p = default_lemma2_recipe().p;
    auto q = GaussDerivMixture::location_mixture({0.5, 0.5}, {-0.6, 0.6}, {0.05, 0.05});
    std::vector<GapPoint> pts;
    for (double t : geomspace(1e-4, 1e-2, 9)) pts.push_back({t, lemma2_gap_at(t, p, q)});
    CHECK(std::fabs(fit_gap_coefficient(pts)) < 2e-3);
}

TEST_CASE("threshold and stationary points") {
    CHECK(stability_threshold(1.0) == doctest::Approx(3.8473221018630).epsilon(1e-12));
    CHECK(stationary_K(1.4, 1.0) == doctest::Approx(6.0));
    CHECK(stationary_K(3.0, 1.0) == doctest::Approx(2.0));
    CHECK(kind_of([] { stationary_K(1.0, 1.0); }) == ErrorKind::NoGaussianMax);
    CHECK(stationary_L(stationary_K(2.5, 0.7), 0.7) == doctest::Approx(2.5));
    // the Gaussian objective peaks at the stationary K
    for (double L : {1.3, 2.0, 5.0}) {
        double K = stationary_K(L, 1.0);
        double f = vertical_objective_gaussian(K, L, 1.0);
        CHECK(f >= vertical_objective_gaussian(K * 1.01, L, 1.0));
        CHECK(f >= vertical_objective_gaussian(K * 0.99, L, 1.0));
    }
}

TEST_CASE("perturbation algebra") {
    auto vp = make_vertical(3.0, 2.0, 1.0, 2);
    auto all = convolve(convolve(vp.p1(), GaussDerivMixture::gaussian(vp.u)), vp.p2());
    REQUIRE(all.size() == 2);
    CHECK(all.terms()[0].variance == doctest::Approx(3.0 + 1.0 + 2.0));
    CHECK(all.terms()[1].order == 9);
    CHECK(all.terms()[1].coeff == doctest::Approx(-std::pow(vp.eps, 3)));
    CHECK(densities_nonnegative(vp));
    CHECK_FALSE(densities_nonnegative(vp.with_eps(vp.eps * 4)));
    auto x1 = input_with_noise(vp, 0.3);
    auto back = convolve(x1, GaussDerivMixture::gaussian(0.3));
    for (double x : {-2.0, 0.3, 1.9}) CHECK(back.density(x) == doctest::Approx(vp.p1().density(x)).epsilon(1e-13));
    CHECK_THROWS(make_vertical(1.0, 1.0, 1.0, 2, 1.2));
}

TEST_CASE("vertical gap sign") {
    auto hi = vertical_gap(make_vertical(stationary_K(1.4, 1.0), 1.4, 1.0));
    CHECK(hi.quadratic_coeff > 0);
    CHECK(hi.perturbed_value > hi.gaussian_value);
    auto lo = vertical_gap(make_vertical(stationary_K(3.0, 1.0), 3.0, 1.0));
    CHECK(lo.quadratic_coeff < 0);
    CHECK(lo.perturbed_value < lo.gaussian_value);
    // eps^2 coefficient is half of condition54 at the same delta
    for (double L : {1.4, 3.0}) {
        auto vp = make_vertical(stationary_K(L, 1.0), L, 1.0);
        CHECK(vertical_gap(vp).quadratic_coeff == doctest::Approx(0.5 * condition54(vp.K, 1.0, vp.delta)).epsilon(1e-4));
    }
}

TEST_CASE("condition54") {
    CHECK(condition54(4.0, 1.0, 0.0) == doctest::Approx(-6.0 / 64 + 12.0 / 125).epsilon(1e-12));
    CHECK(condition54(4.0, 1.0, 0.0) == doctest::Approx(0.00225).epsilon(1e-12));
    CHECK(std::fabs(condition54(stability_threshold(1.0), 1.0, 0.0)) < 1e-10);
    CHECK(condition54(4.0, 1.0, 0.01) == doctest::Approx(0.00225).epsilon(0.01));
    for (double d : {0.0, 0.05, 0.3})
        for (double K : {1.0, 3.0, 7.0}) CHECK(condition54(K, 0.8, d) == doctest::Approx(condition54_closed(K, 0.8, d)).epsilon(1e-10));
    for (double u : {0.5, 1.0, 2.0, 5.0}) {
        int changes = 0;
        double prev = condition54(0.05, u, 0.0);
        for (double K = 0.1; K < 100.0; K += 0.1) {
            double v = condition54(K, u, 0.0);
            if ((v < 0) != (prev < 0)) ++changes;
            prev = v;
        }
        CHECK(changes == 1);
        CHECK(std::fabs(condition54_root(u) - stability_threshold(u)) < 1e-8);
    }
}

TEST_CASE("eps^2 coefficient changes sign at the threshold") {
    for (double u : {0.5, 1.0, 2.0}) {
        const double th = stability_threshold(u);
        auto coeff = [&](double K) {
            double L = stationary_L(K, u);
            double d = std::min(K, L / 2) / 100.0;
            return vertical_gap(make_vertical(K, L, u, 2, d)).quadratic_coeff;
        };
        double a = th - 0.3, b = th + 0.3;
        REQUIRE(coeff(a) < 0);
        REQUIRE(coeff(b) > 0);
        while (b - a > 1e-3) {
            double m = 0.5 * (a + b);
            (coeff(m) < 0 ? a : b) = m;
        }
        CHECK(std::fabs(0.5 * (a + b) - th) < 1e-3);
    }
}

TEST_CASE("outer entropy deviation scales as eps^{2(J+1)}") {
    const double K = 2.0, L = 3.0, u = 1.0, d = 0.2;
    const int J = 1;
    auto vp = make_vertical(K, L, u, J, d);
    std::vector<double> e, dev;
    for (int i = 0; i < 4; ++i) {
        auto v = vp.with_eps(vp.eps / double(1 << i));
        auto all = convolve(convolve(v.p1(), GaussDerivMixture::gaussian(u)), v.p2());
        e.push_back(v.eps);
        dev.push_back(std::fabs(entropy(all) - gaussian_entropy(K + u + L)));
    }
    CHECK(loglog_slope(e, dev) >= 2 * (J + 1) - 0.2);
    // J = 2: the deviation matches its leading eps^6 term
    auto v2 = make_vertical(K, L, u, 2, d);
    auto all2 = convolve(convolve(v2.p1(), GaussDerivMixture::gaussian(u)), v2.p2());
    const double S = K + u + L;
    double lead = 0.5 * std::pow(v2.eps, 6) * hermite_overlap(9, S - 3 * d, S);
    CHECK(gaussian_entropy(S) - entropy(all2) == doctest::Approx(lead).epsilon(0.05));
}

TEST_CASE("limiting functional") {
    const double L = 2.0, K = L / (L - 1);
    double closed = limit_functional_gaussian(K, L);
    CHECK(closed == doctest::Approx(0.5 * std::log(2.0) - 0.25));
    CHECK(limit_functional(L, GaussDerivMixture::gaussian(K)) == doctest::Approx(closed).epsilon(1e-9));
    CHECK(limit_functional(L, mixture_to_grid(GaussDerivMixture::gaussian(K), 8192)) == doctest::Approx(closed).epsilon(1e-7));
    // K = L/(L-1) maximises the Gaussian value
    CHECK(closed > limit_functional_gaussian(K * 1.05, L));
    CHECK(closed > limit_functional_gaussian(K * 0.95, L));

    auto in = limit_perturbation_gain(1.2);
    CHECK(in.quadratic_coeff > 0);
    CHECK(in.values[2] > in.gaussian_value);
    auto out = limit_perturbation_gain(2.0);
    CHECK(out.quadratic_coeff < 0);
    for (int i = 0; i < 3; ++i) CHECK(out.values[i] < out.gaussian_value);
    for (double Lf : {1.2, 1.6, 2.0}) {
        auto g = limit_perturbation_gain(Lf);
        CHECK(g.quadratic_coeff == doctest::Approx(g.predicted_coeff).epsilon(0.05));
        // holding Y Gaussian never helps
        CHECK(limit_perturbation_gain(Lf, false).quadratic_coeff < 0);
    }
}
