#ifndef ZIC_GEOMETRY_HPP
#define ZIC_GEOMETRY_HPP

#include <utility>
#include <vector>

namespace zic {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// A convex polygon (possibly a single point) dilated by a disc of radius r.
// Discs are the point case; rounded polygons come out of Minkowski sums with discs.
class ConvexBody2D {
public:
    enum class Kind { polygon, disc, rounded };

    // counterclockwise or clockwise, strictly convex after removing duplicates; NonConvexInput otherwise
    static ConvexBody2D polygon(const std::vector<Vec2>& vertices);
    static ConvexBody2D disc(double radius, Vec2 centre = {});
    // core polygon (or a single point) dilated by r >= 0
    static ConvexBody2D rounded(const std::vector<Vec2>& core, double r);
    static ConvexBody2D regular_polygon(int n, double side, double rotation = 0.0);
    static ConvexBody2D square(double side, double rotation = 0.0) { return regular_polygon(4, side, rotation); }

    Kind kind() const;
    const std::vector<Vec2>& vertices() const { return v_; }
    double radius() const { return r_; }
    // centroid of the polygonal core (the centre for a disc)
    Vec2 centroid() const { return c_; }

    double area() const;
    double perimeter() const;
    double core_area() const;
    double core_perimeter() const;
    // h(n) = sup <x, n>
    double support(Vec2 n) const;

    ConvexBody2D translated(Vec2 d) const;
    ConvexBody2D centered() const { return translated({-c_.x, -c_.y}); }
    ConvexBody2D scaled(double s) const;

private:
    std::vector<Vec2> v_;  // counterclockwise
    double r_ = 0.0;
    Vec2 c_;
};

ConvexBody2D minkowski_sum(const ConvexBody2D& a, const ConvexBody2D& b);

// 2 A(K, L) = sum over edges e of L of h_K(n_e) |e|; polygonal cores only, rounding ignored
double mixed_area_edges(const ConvexBody2D& K, const ConvexBody2D& L);
// bilinear extension including the disc parts: A(P+rB, Q+sB) = A(P,Q) + (s per(P) + r per(Q))/2 + pi r s
double mixed_area(const ConvexBody2D& K, const ConvexBody2D& L);

// perimeter / pi
double mean_width_2d(const ConvexBody2D& c);

std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

// tK unit square scaled by t, B disc of radius 1/2, L square of side pi/4 rotated by pi/4, all centred
double theorem7_ratio(double t, bool replace_L_with_B = false);
std::vector<std::pair<double, double>> theorem7_sweep(const std::vector<double>& ts, bool replace_L_with_B = false);

struct Theorem7Fit {
    double c = 0.0;  // coefficient of 1/t in ratio - 1
    double d = 0.0;
    double e = 0.0;
    double expected = 0.0;  // (pi sqrt2 / 2 - 2) / 2
};

// (ratio - 1) t = c + d/t + e/t^2 solved exactly at three t values
Theorem7Fit theorem7_fit(const std::vector<double>& ts = {50.0, 100.0, 200.0});

}  // namespace zic

#endif
