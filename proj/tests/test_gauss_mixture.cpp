#include <doctest.h>

#include "zic/gauss_mixture.hpp"
#include "zic/numeric.hpp"
#include "zic/quadrature.hpp"

#include <cmath>

using namespace zic;

namespace {

GaussDerivMixture random_mixture(CounterRng& rng, int n_terms) {
    std::vector<GaussTerm> t;
    for (int i = 0; i < n_terms; ++i)
        t.push_back({rng.uniform(-1, 1), int(rng.uniform(0, 4)), rng.uniform(0.2, 3.0), 0.0});
    return GaussDerivMixture(t);
}

bool same_terms(const GaussDerivMixture& a, const GaussDerivMixture& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& x = a.terms()[i];
        const auto& y = b.terms()[i];
        if (x.order != y.order || std::fabs(x.variance - y.variance) > 1e-14 * x.variance ||
            std::fabs(x.coeff - y.coeff) > tol || x.mean != y.mean)
            return false;
    }
    return true;
}

double gamma_v(double v, double x) { return std::exp(-x * x / (2 * v)) / std::sqrt(2 * kPi * v); }

}  // namespace

TEST_CASE("convolution of Gaussians adds variances") {
    auto c = convolve(GaussDerivMixture::gaussian(2.0), GaussDerivMixture::gaussian(0.7));
    REQUIRE(c.size() == 1);
    CHECK(c.terms()[0].order == 0);
    CHECK(c.terms()[0].variance == doctest::Approx(2.7).epsilon(1e-15));
    CHECK(c.terms()[0].coeff == 1.0);
}

TEST_CASE("third-order perturbation carries through a Gaussian convolution") {
    const double K = 3.0, d = 0.2, eps = 0.01, u = 1.0;
    GaussDerivMixture p({{1.0, 0, K}, {-eps, 3, K - d}});
    auto c = convolve(p, GaussDerivMixture::gaussian(u));
    REQUIRE(c.size() == 2);
    CHECK(c.terms()[0].order == 0);
    CHECK(c.terms()[0].variance == doctest::Approx(K + u));
    CHECK(c.terms()[1].order == 3);
    CHECK(c.terms()[1].variance == doctest::Approx(K + u - d));
    CHECK(c.terms()[1].coeff == doctest::Approx(-eps));
}

TEST_CASE("paired perturbations telescope") {
    const double K = 3.3, L = 2.1, d = 0.17, eps = 0.013;
    GaussDerivMixture p1({{1.0, 0, K}, {-eps, 3, K - d}});
    for (int J = 1; J <= 3; ++J) {
        std::vector<GaussTerm> t;
        for (int j = 0; j <= J; ++j) t.push_back({std::pow(eps, j), 3 * j, L - j * d});
        auto c = convolve(p1, GaussDerivMixture(t));
        REQUIRE(c.size() == 2);
        CHECK(c.terms()[0].variance == doctest::Approx(K + L));
        CHECK(c.terms()[0].coeff == 1.0);
        CHECK(c.terms()[1].order == 3 * (J + 1));
        CHECK(c.terms()[1].variance == doctest::Approx(K + L - (J + 1) * d));
        CHECK(c.terms()[1].coeff == doctest::Approx(-std::pow(eps, J + 1)).epsilon(1e-14));
    }
}

TEST_CASE("density evaluation") {
    CHECK(eval_density(GaussDerivMixture::gaussian(1.0), 0.0) == doctest::Approx(1.0 / std::sqrt(2 * kPi)));
    CHECK(std::fabs(eval_density(GaussDerivMixture({{1.0, 1, 1.0}}), 0.0)) < 1e-300);

    // central third difference of gamma_0.9
    const double x = 1.3, h = 1e-3;
    double d3 = (gamma_v(0.9, x + 2 * h) - 2 * gamma_v(0.9, x + h) + 2 * gamma_v(0.9, x - h) - gamma_v(0.9, x - 2 * h)) /
                (2 * h * h * h);
    GaussDerivMixture m({{1.0, 0, 1.0}, {-0.01, 3, 0.9}});
    CHECK(std::fabs(eval_density(m, x) - (gamma_v(1.0, x) - 0.01 * d3)) < 1e-6);
}

TEST_CASE("Hermite polynomial matches the recursion") {
    for (int k = 0; k <= 10; ++k)
        for (double v : {0.5, 1.0, 2.5}) {
            HermitePolynomial P(k, v);
            CHECK(P.leading_coefficient() == doctest::Approx(std::pow(-1.0 / v, k)));
            for (double x : {-2.1, -0.3, 0.0, 0.8, 3.0}) {
                double direct = gauss_deriv(k, v, x) / gamma_v(v, x);
                CHECK(P(x) == doctest::Approx(direct).epsilon(1e-10));
            }
        }
}

TEST_CASE("Hermite weighted norm") {
    CHECK(hermite_weighted_norm(0, 2.0) == 1.0);
    CHECK(hermite_weighted_norm(3, 1.0) == 6.0);
    CHECK(hermite_weighted_norm(3, 2.0) == 0.75);
    double q = integrate_line([](double x) { return std::pow(gauss_deriv(3, 2.0, x), 2) / gamma_v(2.0, x); }, 0.0,
                              std::sqrt(2.0), 30.0);
    CHECK(std::fabs(q - 0.75) < 1e-8);
    for (int k = 0; k <= 12; ++k)
        for (double K : {0.3, 1.0, 2.7}) CHECK(hermite_weighted_norm(k, 2 * K) * std::pow(2.0, k) == hermite_weighted_norm(k, K));
}

TEST_CASE("Hermite orthogonality by quadrature") {
    const double K = 1.7;
    for (int j = 0; j <= 6; ++j)
        for (int k = 0; k <= 6; ++k) {
            double q = integrate_line(
                [&](double x) { return gauss_deriv(j, K, x) * gauss_deriv(k, K, x) / gamma_v(K, x); }, 0.0, std::sqrt(K),
                30.0);
            if (j == k)
                CHECK(q == doctest::Approx(hermite_weighted_norm(k, K)).epsilon(1e-10));
            else
                CHECK(std::fabs(q) < 1e-8);
        }
}

TEST_CASE("general overlap closed form") {
    for (int k : {0, 1, 3, 6, 9})
        for (auto [a, b] : {std::pair{0.9, 1.0}, {2.5, 3.0}, {1.0, 1.0}, {4.0, 2.5}}) {
            double q = integrate_line(
                [&](double x) {
                    // (P_k gamma_a)^2 / gamma_b with the exponentials combined
                    double r = HermitePolynomial(k, a)(x);
                    return r * r * std::sqrt(b / a) / std::sqrt(2 * kPi * a) *
                           std::exp(-x * x / a + x * x / (2 * b));
                },
                0.0,
                std::sqrt(a * b / (2 * b - a)), 30.0);
            CHECK(hermite_overlap(k, a, b) == doctest::Approx(q).epsilon(1e-10));
        }
}

TEST_CASE("moments") {
    auto g = moments(GaussDerivMixture::gaussian(2.5), 4);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(2.5));
    CHECK(g[3] == doctest::Approx(3 * 2.5 * 2.5));

    const double K = 2.0, d = 0.3, eps = 0.02;
    GaussDerivMixture p({{1.0, 0, K}, {-eps, 3, K - d}});
    auto m = moments(p, 3);
    CHECK(m[0] == doctest::Approx(0.0));
    CHECK(m[1] == doctest::Approx(K));
    CHECK(m[2] == doctest::Approx(6 * eps));
    // quadrature oracle for the third moment
    double q3 = integrate_line([&](double x) { return x * x * x * p.density(x); }, 0.0, std::sqrt(K), 30.0);
    CHECK(m[2] == doctest::Approx(q3).epsilon(1e-9));

    GaussDerivMixture d1({{1.0, 0, 1.0}, {0.25, 1, 0.8}});
    CHECK(moments(d1, 1)[0] == doctest::Approx(-0.25));

    auto loc = GaussDerivMixture::location_mixture({0.3, 0.7}, {1.0, -3.0 / 7.0}, {0.5, 0.2});
    auto lm = moments(loc, 3);
    for (int n = 1; n <= 3; ++n) {
        double q = integrate_line([&](double x) { return std::pow(x, n) * loc.density(x); }, 0.0, 1.0, 30.0);
        CHECK(lm[n - 1] == doctest::Approx(q).epsilon(1e-10));
    }
}

TEST_CASE("convolution is commutative and associative") {
    CounterRng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_mixture(rng, 3), b = random_mixture(rng, 2), c = random_mixture(rng, 3);
        CHECK(same_terms(convolve(a, b), convolve(b, a), 1e-12));
        CHECK(same_terms(convolve(convolve(a, b), c), convolve(a, convolve(b, c)), 1e-12));
    }
}

TEST_CASE("unit-mass mixtures integrate to one") {
    CounterRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_mixture(rng, 4);
        double mass = m.mass();
        if (std::fabs(mass) < 0.1) continue;
        m = m * (1.0 / mass);
        double s = std::sqrt(m.max_variance());
        double q = integrate(
            [&](double x) { return m.density(x); }, -12 * s, 12 * s);
        CHECK(std::fabs(q - 1.0) < 1e-9);
    }
}

TEST_CASE("dilation and reflection") {
    GaussDerivMixture p({{1.0, 0, 1.5, 0.2}, {0.05, 3, 1.2, -0.1}});
    for (double a : {0.5, 2.0, -1.3}) {
        auto q = p.dilate(a);
        for (double x : {-2.0, 0.1, 1.7}) CHECK(q.density(x) == doctest::Approx(p.density(x / a) / std::fabs(a)));
    }
    auto r = p.reflect();
    CHECK(r.density(0.7) == doctest::Approx(p.density(-0.7)));
}

TEST_CASE("invalid terms are rejected") {
    CHECK_THROWS(GaussDerivMixture({{1.0, 0, 0.0}}));
    CHECK_THROWS(GaussDerivMixture({{1.0, 0, -1.0}}));
    CHECK_THROWS(GaussDerivMixture({{1.0, 65, 1.0}}));
}
