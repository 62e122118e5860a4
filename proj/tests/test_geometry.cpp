#include "doctest.h"

#include "zic/error.hpp"
#include "zic/geometry.hpp"
#include "zic/numeric.hpp"

#include <cmath>

using namespace zic;

namespace {

constexpr double kPiT = 3.14159265358979323846;

ConvexBody2D random_polygon(CounterRng& rng, int n, double scale) {
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) pts.push_back({scale * rng.normal(), scale * rng.normal()});
    auto h = convex_hull(pts);
    while (h.size() < 3) {
        pts.push_back({scale * rng.normal(), scale * rng.normal()});
        h = convex_hull(pts);
    }
    return ConvexBody2D::polygon(h);
}

// area of P + rB by the boundary integral 1/2 \oint x dy - y dx over offset edges and arcs
double rounded_area_boundary(const ConvexBody2D& P, double r) {
    const auto& v = P.vertices();
    const std::size_t n = v.size();
    double a = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 p = v[i], q = v[(i + 1) % n];
        double len = std::hypot(q.x - p.x, q.y - p.y);
        Vec2 nr = {(q.y - p.y) / len, -(q.x - p.x) / len};
        Vec2 a0 = {p.x + r * nr.x, p.y + r * nr.y}, a1 = {q.x + r * nr.x, q.y + r * nr.y};
        a += 0.5 * (a0.x * a1.y - a1.x * a0.y);
        // arc around q from this edge's normal to the next one's
        Vec2 s = v[(i + 2) % n];
        double l2 = std::hypot(s.x - q.x, s.y - q.y);
        Vec2 n2 = {(s.y - q.y) / l2, -(s.x - q.x) / l2};
        double th0 = std::atan2(nr.y, nr.x), th1 = std::atan2(n2.y, n2.x);
        while (th1 < th0) th1 += 2 * kPiT;
        // x dy - y dx = (r^2 + r qx cos + r qy sin) dth on q + r(cos, sin)
        a += 0.5 * (r * r * (th1 - th0) + r * q.x * (std::sin(th1) - std::sin(th0)) -
                    r * q.y * (std::cos(th1) - std::cos(th0)));
    }
    return a;
}

}  // namespace

TEST_CASE("Minkowski sums of squares and discs") {
    auto sq = ConvexBody2D::square(1.0);
    CHECK(sq.area() == doctest::Approx(1.0).epsilon(1e-14));
    auto s2 = minkowski_sum(sq, sq);
    CHECK(s2.area() == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(s2.vertices().size() == 4);
    auto sd = minkowski_sum(sq, ConvexBody2D::disc(0.5));
    CHECK(sd.kind() == ConvexBody2D::Kind::rounded);
    CHECK(sd.area() == doctest::Approx(3 + kPiT / 4).epsilon(1e-14));
    auto rot = ConvexBody2D::square(kPiT / 4, kPiT / 4);
    auto oct = minkowski_sum(sq, rot);
    CHECK(oct.vertices().size() == 8);
    CHECK(oct.area() == doctest::Approx(1 + kPiT * std::sqrt(2.0) / 2 + (kPiT / 4) * (kPiT / 4)).epsilon(1e-13));
    auto dd = minkowski_sum(ConvexBody2D::disc(0.5), ConvexBody2D::disc(0.25, {1, 1}));
    CHECK(dd.kind() == ConvexBody2D::Kind::disc);
    CHECK(dd.radius() == doctest::Approx(0.75));
}

TEST_CASE("polygon validation") {
    CHECK_THROWS_AS(ConvexBody2D::polygon({{0, 0}, {1, 0}, {0.2, 0.2}, {0, 1}}), Error);
    CHECK_THROWS_AS(ConvexBody2D::polygon({{0, 0}, {1, 0}, {2, 0}}), Error);
    try {
        ConvexBody2D::polygon({{0, 0}, {2, 0}, {1, 0.1}, {2, 2}, {0, 2}});
        FAIL("expected NonConvexInput");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonConvexInput);
    }
    // clockwise input is reoriented; duplicates removed
    auto p = ConvexBody2D::polygon({{0, 0}, {0, 1}, {0, 1}, {1, 1}, {1, 0}});
    CHECK(p.vertices().size() == 4);
    CHECK(p.area() == doctest::Approx(1.0));
    CHECK(p.centroid().x == doctest::Approx(0.5));
    CHECK(p.centered().centroid().y == doctest::Approx(0.0));
}

TEST_CASE("mean width") {
    CHECK(mean_width_2d(ConvexBody2D::disc(0.5)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mean_width_2d(ConvexBody2D::square(kPiT / 4, kPiT / 4)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean_width_2d(ConvexBody2D::square(1.0)) == doctest::Approx(4 / kPiT).epsilon(1e-14));
    // mean of the width h(n) + h(-n) over directions, by quadrature
    CounterRng rng(2);
    for (int i = 0; i < 20; ++i) {
        auto P = random_polygon(rng, 12, 1.0);
        double acc = 0;
        const int m = 20000;
        for (int k = 0; k < m; ++k) {
            double th = kPiT * (k + 0.5) / m;
            acc += P.support({std::cos(th), std::sin(th)}) + P.support({-std::cos(th), -std::sin(th)});
        }
        CHECK(acc / m == doctest::Approx(mean_width_2d(P)).epsilon(1e-7));
    }
}

TEST_CASE("sum matches the hull of vertex sums") {
    CounterRng rng(9);
    for (int i = 0; i < 200; ++i) {
        auto A = random_polygon(rng, 3 + i % 9, 1.0), B = random_polygon(rng, 3 + (i * 7) % 11, 2.0);
        std::vector<Vec2> sums;
        for (auto a : A.vertices())
            for (auto b : B.vertices()) sums.push_back({a.x + b.x, a.y + b.y});
        auto H = ConvexBody2D::polygon(convex_hull(sums));
        auto S = minkowski_sum(A, B);
        CHECK(std::abs(S.area() - H.area()) <= 1e-12 * H.area());
        CHECK(S.vertices().size() == H.vertices().size());
    }
}

TEST_CASE("Brunn-Minkowski on random pairs") {
    CounterRng rng(10);
    for (int i = 0; i < 500; ++i) {
        auto A = random_polygon(rng, 3 + i % 12, rng.uniform(0.1, 3));
        auto B = random_polygon(rng, 3 + (i * 5) % 12, rng.uniform(0.1, 3));
        double lhs = std::sqrt(minkowski_sum(A, B).area()), rhs = std::sqrt(A.area()) + std::sqrt(B.area());
        CHECK(lhs - rhs >= -1e-9);
        // and through the mixed area: A(K,L)^2 >= |K| |L|
        double m = mixed_area(A, B);
        CHECK(m * m >= A.area() * B.area() * (1 - 1e-12));
    }
}

TEST_CASE("Steiner polynomial against a boundary integral") {
    CounterRng rng(11);
    for (int i = 0; i < 200; ++i) {
        auto A = random_polygon(rng, 3 + i % 15, 1.0);
        for (double r : {0.1, 1.0}) {
            auto S = minkowski_sum(A, ConvexBody2D::disc(r));
            double steiner = A.area() + A.perimeter() * r + kPiT * r * r;
            CHECK(std::abs(S.area() - steiner) <= 1e-12 * steiner);
            CHECK(std::abs(rounded_area_boundary(A, r) - steiner) <= 1e-12 * steiner);
        }
    }
}

TEST_CASE("mixed area symmetry and expansion") {
    CounterRng rng(12);
    for (int i = 0; i < 300; ++i) {
        auto A = random_polygon(rng, 3 + i % 10, 1.0), B = random_polygon(rng, 3 + (i * 3) % 10, 1.5);
        double ab = mixed_area_edges(A, B), ba = mixed_area_edges(B, A);
        CHECK(std::abs(ab - ba) <= 1e-12 * std::max(1.0, ab));
        double sum = minkowski_sum(A, B).area();
        CHECK(std::abs(sum - (A.area() + 2 * ab + B.area())) <= 1e-12 * sum);
        // translation invariance
        double shifted = mixed_area_edges(A.translated({3, -2}), B.translated({-1, 5}));
        CHECK(std::abs(shifted - ab) <= 1e-11 * std::max(1.0, ab));
        // rounded bodies through bilinearity
        auto Ar = minkowski_sum(A, ConvexBody2D::disc(0.3)), Br = minkowski_sum(B, ConvexBody2D::disc(0.7));
        double total = minkowski_sum(Ar, Br).area();
        CHECK(std::abs(total - (Ar.area() + 2 * mixed_area(Ar, Br) + Br.area())) <= 1e-12 * total);
        CHECK(std::abs(mixed_area(Ar, Br) - mixed_area(Br, Ar)) <= 1e-12 * total);
    }
    // square with the rotated square: 2A = pi sqrt2 / 2
    auto K = ConvexBody2D::square(1.0), L = ConvexBody2D::square(kPiT / 4, kPiT / 4);
    CHECK(2 * mixed_area_edges(K, L) == doctest::Approx(kPiT * std::sqrt(2.0) / 2).epsilon(1e-14));
}

TEST_CASE("non-isotropic ratio") {
    for (double t = 20; t <= 200; t += 1) {
        CHECK(theorem7_ratio(t) > 1);
        CHECK(theorem7_ratio(t, true) <= 1 + 1e-9);
    }
    CHECK(std::abs(theorem7_ratio(1e6) - 1) < 1e-6);
    auto f = theorem7_fit();
    CHECK(f.expected > 0);
    CHECK(f.c == doctest::Approx(f.expected).epsilon(0.01));
    auto sw = theorem7_sweep({20, 50, 100});
    CHECK(sw.size() == 3);
    CHECK(sw[1].second == theorem7_ratio(50));
}
