#include <doctest.h>

#include "zic/entropy.hpp"
#include "zic/error.hpp"
#include "zic/numeric.hpp"

#include <cmath>

using namespace zic;

namespace {

GridDensity without_slope(GridDensity g) {
    g.slope.clear();
    return g;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("Gaussian entropies") {
    auto g1 = mixture_to_grid(GaussDerivMixture::gaussian(1.0), 4096);
    CHECK(differential_entropy(g1) == doctest::Approx(0.5 * std::log(2 * kPi * std::exp(1.0))).epsilon(1e-12));
    CHECK(differential_entropy(mixture_to_grid(GaussDerivMixture::gaussian(3.0), 4096)) ==
          doctest::Approx(gaussian_entropy(3.0)).epsilon(1e-12));
}

TEST_CASE("far-separated mixture adds ln 2") {
    auto m = GaussDerivMixture::location_mixture({0.5, 0.5}, {-5.0, 5.0}, {1.0, 1.0});
    CHECK(std::fabs(entropy(m) - (gaussian_entropy(1.0) + std::log(2.0))) < 1e-5);
}

TEST_CASE("tabulation") {
    auto g = mixture_to_grid(GaussDerivMixture::gaussian(1.0), -10.0, 10.0, 4096);
    CHECK(std::fabs(grid_mass(g) - 1.0) < 1e-9);
    CHECK(kind_of([] { mixture_to_grid(GaussDerivMixture({{1.0, 0, 1.0}, {-0.5, 3, 0.5}}), -12, 12, 4096); }) ==
          ErrorKind::NegativeDensity);
    auto ok = mixture_to_grid(GaussDerivMixture({{1.0, 0, 1.0}, {-0.001, 3, 0.9}}), -12, 12, 4096);
    double mn = *std::min_element(ok.values.begin(), ok.values.end());
    CHECK(mn >= 0.0);
    CHECK(std::fabs(grid_mass(ok) - 1.0) < 1e-9);
}

TEST_CASE("entropy preconditions") {
    auto g = mixture_to_grid(GaussDerivMixture::gaussian(1.0), 4096);
    auto heavy = g;
    for (auto& v : heavy.values) v *= 1.01;
    CHECK(kind_of([&] { differential_entropy(heavy); }) == ErrorKind::NonNormalized);
    auto neg = g;
    neg.values[100] = -1e-9;
    CHECK(kind_of([&] { differential_entropy(neg); }) == ErrorKind::NegativeDensity);
    auto tiny = g;
    tiny.values[0] = -1e-13;
    CHECK_NOTHROW(differential_entropy(tiny));
    auto coarse = mixture_to_grid(GaussDerivMixture::gaussian(1.0), 512);
    CHECK_THROWS(differential_entropy(coarse));
}

TEST_CASE("Fisher information") {
    for (double K : {0.25, 1.0, 4.0}) {
        auto g = mixture_to_grid(GaussDerivMixture::gaussian(K), 8192);
        CHECK(std::fabs(fisher_information(g) * K - 1.0) < 1e-5);
        CHECK(std::fabs(fisher_information(without_slope(g)) * K - 1.0) < 1e-5);
    }
    GaussDerivMixture p({{1.0, 0, 1.0}, {-0.001, 3, 0.9}});
    double fine = fisher_information(without_slope(mixture_to_grid(p, 8192)));
    double coarse = fisher_information(without_slope(mixture_to_grid(p, 2048)));
    CHECK(std::fabs(fine - coarse) < 1e-4);
    CHECK(std::fabs(fine - fisher_information(p)) < 1e-6);
}

TEST_CASE("translation invariance") {
    auto m = GaussDerivMixture::location_mixture({0.3, 0.7}, {-1.0, 0.6}, {0.4, 1.1});
    double h0 = entropy(m);
    for (double c : {-3.7, 12.25}) CHECK(std::fabs(entropy(m.shift(c)) - h0) < 1e-9);
}

TEST_CASE("scaling law") {
    auto m = GaussDerivMixture::location_mixture({0.3, 0.7}, {-1.0, 3.0 / 7.0}, {0.4, 1.1});
    double h0 = entropy(m);
    for (double a : {0.5, 2.0}) CHECK(std::fabs(entropy(m.dilate(a)) - (h0 + std::log(a))) < 1e-6);
}

TEST_CASE("entropy grows under convolution") {
    CounterRng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> w{rng.uniform(0.1, 1), rng.uniform(0.1, 1)}, mu{rng.uniform(-2, 2), rng.uniform(-2, 2)},
            v{rng.uniform(0.05, 2), rng.uniform(0.05, 2)};
        double s = w[0] + w[1];
        auto a = GaussDerivMixture::location_mixture({w[0] / s, w[1] / s}, mu, v);
        auto b = GaussDerivMixture({{1.0, 0, rng.uniform(0.05, 1.5)}, {-0.002, 3, 0.04}});
        b = GaussDerivMixture::gaussian(rng.uniform(0.05, 1.5)) * 0.5 +
            GaussDerivMixture::gaussian(rng.uniform(0.05, 1.5), rng.uniform(-1, 1)) * 0.5;
        double hc = entropy(convolve(a, b));
        CHECK(hc - entropy(a) >= -1e-7);
        CHECK(hc - entropy(b) >= -1e-7);
    }
}

TEST_CASE("Gaussian base, Gaussian kernel expansion") {
    auto g = GaussDerivMixture::gaussian(1.0);
    auto t = geomspace(1e-4, 1e-2, 9);
    auto p = mixture_to_grid(g, -14.0, 14.0, 16384);
    auto e = lemma1_expansion(p, g, t);
    CHECK(e.c1 == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(std::fabs(e.c15) < 1e-3);
    auto pred = lemma1_prediction(g, g);
    CHECK(pred.c1 == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::fabs(pred.c15) < 1e-14);
    // closed-form increments
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::fabs(e.dh[i] - 0.5 * std::log1p(t[i])) < 1e-11);
}

TEST_CASE("symmetric kernel kills the t^{3/2} term") {
    auto p = GaussDerivMixture::location_mixture({0.6, 0.4}, {-0.4, 0.6}, {0.3, 0.5});
    auto q = GaussDerivMixture::location_mixture({0.5, 0.5}, {-1.0, 1.0}, {0.2, 0.2});
    auto t = geomspace(1e-4, 1e-2, 9);
    auto e = lemma1_expansion(p, q, t);
    auto pred = lemma1_prediction(p, q);
    CHECK(std::fabs(pred.m3) < 1e-14);
    CHECK(e.c1 == doctest::Approx(pred.c1).epsilon(0.02));
    CHECK(std::fabs(e.c15) < 0.01 * std::fabs(e.c1));
}

TEST_CASE("grid and mixture predictions agree") {
    auto p = GaussDerivMixture::location_mixture({0.7, 0.3}, {0.3, -0.7}, {0.25, 0.25});
    auto q = GaussDerivMixture::location_mixture({0.1, 0.9}, {2.0, -2.0 / 9.0}, {0.04, 0.04});
    auto pm = lemma1_prediction(p, q);
    auto pg = lemma1_prediction(mixture_to_grid(p, 16384), q);
    CHECK(pg.int_p2_lnp == doctest::Approx(pm.int_p2_lnp).epsilon(1e-7));
    CHECK(pg.int_p3_lnp == doctest::Approx(pm.int_p3_lnp).epsilon(1e-6));
}
