#include "zic/geometry.hpp"

#include "zic/error.hpp"
#include "zic/numeric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace zic {

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double scale_of(const std::vector<Vec2>& v) {
    double s = 0;
    for (auto p : v) s = std::max({s, std::abs(p.x), std::abs(p.y)});
    return std::max(s, 1e-300);
}

std::vector<Vec2> dedupe(const std::vector<Vec2>& in) {
    std::vector<Vec2> out;
    const double tol = 1e-14 * scale_of(in);
    for (auto p : in) {
        if (!out.empty() && std::abs(p.x - out.back().x) <= tol && std::abs(p.y - out.back().y) <= tol) continue;
        out.push_back(p);
    }
    while (out.size() > 1 && std::abs(out.front().x - out.back().x) <= tol &&
           std::abs(out.front().y - out.back().y) <= tol)
        out.pop_back();
    return out;
}

// drop vertices whose neighbours are collinear with them (Minkowski sums of parallel edges)
std::vector<Vec2> drop_collinear(const std::vector<Vec2>& in) {
    if (in.size() < 3) return in;
    std::vector<Vec2> out;
    const std::size_t n = in.size();
    const double s = scale_of(in);
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = in[(i + n - 1) % n], b = in[i], c = in[(i + 1) % n];
        if (std::abs(cross(a, b, c)) > 1e-13 * s * s) out.push_back(b);
    }
    return out;
}

Vec2 polygon_centroid(const std::vector<Vec2>& v) {
    if (v.size() == 1) return v[0];
    if (v.size() == 2) return {(v[0].x + v[1].x) / 2, (v[0].y + v[1].y) / 2};
    CompensatedSum a, cx, cy;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec2 p = v[i], q = v[(i + 1) % v.size()];
        double w = p.x * q.y - q.x * p.y;
        a.add(w);
        cx.add((p.x + q.x) * w);
        cy.add((p.y + q.y) * w);
    }
    return {cx.value() / (3 * a.value()), cy.value() / (3 * a.value())};
}

// index of the lowest (then leftmost) vertex, the start of the edge sequence by angle
std::size_t bottom(const std::vector<Vec2>& v) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i].y < v[k].y || (v[i].y == v[k].y && v[i].x < v[k].x)) k = i;
    return k;
}

}  // namespace

ConvexBody2D ConvexBody2D::polygon(const std::vector<Vec2>& vertices) {
    for (auto p : vertices)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail(ErrorKind::InvalidArgument, "vertices must be finite");
    std::vector<Vec2> v = dedupe(vertices);
    if (v.size() < 3) fail(ErrorKind::NonConvexInput, "a polygon needs at least three distinct vertices");
    const std::size_t n = v.size();
    const double s = scale_of(v);
    int pos = 0, neg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double c = cross(v[i], v[(i + 1) % n], v[(i + 2) % n]);
        if (c > 1e-13 * s * s) ++pos;
        else if (c < -1e-13 * s * s) ++neg;
    }
    if (pos != int(n) && neg != int(n)) fail(ErrorKind::NonConvexInput, "polygon is not strictly convex");
    if (neg == int(n)) std::reverse(v.begin(), v.end());
    // a star polygon turns the same way at every vertex but winds more than once
    double turn = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = v[i], b = v[(i + 1) % n], c = v[(i + 2) % n];
        turn += std::atan2(cross(a, b, c), (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y));
    }
    if (std::abs(turn - 2 * kPi) > 1e-6) fail(ErrorKind::NonConvexInput, "polygon winds more than once");
    ConvexBody2D b;
    b.v_ = std::move(v);
    b.c_ = polygon_centroid(b.v_);
    return b;
}

ConvexBody2D ConvexBody2D::disc(double radius, Vec2 centre) {
    require(radius > 0 && std::isfinite(radius), "disc radius must be positive");
    ConvexBody2D b;
    b.v_ = {centre};
    b.r_ = radius;
    b.c_ = centre;
    return b;
}

ConvexBody2D ConvexBody2D::rounded(const std::vector<Vec2>& core, double r) {
    require(r >= 0 && std::isfinite(r), "rounding radius must be nonnegative");
    if (core.size() == 1) {
        if (r == 0) fail(ErrorKind::NonConvexInput, "a single point is not a convex body");
        return disc(r, core[0]);
    }
    ConvexBody2D b = polygon(core);
    b.r_ = r;
    return b;
}

ConvexBody2D ConvexBody2D::regular_polygon(int n, double side, double rotation) {
    require(n >= 3 && side > 0, "regular polygon needs n >= 3 and a positive side");
    const double R = side / (2 * std::sin(kPi / n));
    std::vector<Vec2> v(n);
    for (int i = 0; i < n; ++i) {
        double a = rotation + kPi / n * (2 * i + 1) - kPi / 2;
        v[i] = {R * std::cos(a), R * std::sin(a)};
    }
    return polygon(v);
}

ConvexBody2D::Kind ConvexBody2D::kind() const {
    if (v_.size() == 1) return Kind::disc;
    return r_ > 0 ? Kind::rounded : Kind::polygon;
}

double ConvexBody2D::core_area() const {
    if (v_.size() < 3) return 0.0;
    CompensatedSum a;
    for (std::size_t i = 0; i < v_.size(); ++i) {
        Vec2 p = v_[i], q = v_[(i + 1) % v_.size()];
        a.add(p.x * q.y - q.x * p.y);
    }
    return 0.5 * a.value();
}

double ConvexBody2D::core_perimeter() const {
    if (v_.size() < 2) return 0.0;
    CompensatedSum s;
    for (std::size_t i = 0; i < v_.size(); ++i) {
        Vec2 p = v_[i], q = v_[(i + 1) % v_.size()];
        s.add(std::hypot(q.x - p.x, q.y - p.y));
    }
    return s.value();
}

// Steiner: |P + rB| = |P| + r per(P) + pi r^2
double ConvexBody2D::area() const { return core_area() + r_ * core_perimeter() + kPi * r_ * r_; }
double ConvexBody2D::perimeter() const { return core_perimeter() + 2 * kPi * r_; }

double ConvexBody2D::support(Vec2 n) const {
    double h = -1e300;
    for (auto p : v_) h = std::max(h, p.x * n.x + p.y * n.y);
    return h + r_ * std::hypot(n.x, n.y);
}

ConvexBody2D ConvexBody2D::translated(Vec2 d) const {
    ConvexBody2D b = *this;
    for (auto& p : b.v_) p = {p.x + d.x, p.y + d.y};
    b.c_ = {c_.x + d.x, c_.y + d.y};
    return b;
}

ConvexBody2D ConvexBody2D::scaled(double s) const {
    require(s > 0, "scale must be positive");
    ConvexBody2D b = *this;
    for (auto& p : b.v_) p = {p.x * s, p.y * s};
    b.c_ = {c_.x * s, c_.y * s};
    b.r_ = r_ * s;
    return b;
}

ConvexBody2D minkowski_sum(const ConvexBody2D& a, const ConvexBody2D& b) {
    const auto& P = a.vertices();
    const auto& Q = b.vertices();
    std::vector<Vec2> v;
    if (P.size() == 1 || Q.size() == 1) {
        Vec2 s = P.size() == 1 ? P[0] : Q[0];
        const auto& other = P.size() == 1 ? Q : P;
        for (auto p : other) v.push_back({p.x + s.x, p.y + s.y});
    } else {
        // merge the edge sequences by polar angle, both starting at the lowest vertex
        const std::size_t n = P.size(), m = Q.size();
        std::size_t i0 = bottom(P), j0 = bottom(Q), i = 0, j = 0;
        while (i < n || j < m) {
            Vec2 p = P[(i0 + i) % n], q = Q[(j0 + j) % m];
            v.push_back({p.x + q.x, p.y + q.y});
            Vec2 ep = {P[(i0 + i + 1) % n].x - p.x, P[(i0 + i + 1) % n].y - p.y};
            Vec2 eq = {Q[(j0 + j + 1) % m].x - q.x, Q[(j0 + j + 1) % m].y - q.y};
            double c = ep.x * eq.y - ep.y * eq.x;
            if (j == m || (i < n && c > 0)) ++i;
            else if (i == n || c < 0) ++j;
            else ++i, ++j;
        }
        v = drop_collinear(dedupe(v));
    }
    return ConvexBody2D::rounded(v, a.radius() + b.radius());
}

double mixed_area_edges(const ConvexBody2D& K, const ConvexBody2D& L) {
    const auto& v = L.vertices();
    if (v.size() < 2) return 0.0;  // a point contributes nothing once translated away
    CompensatedSum s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec2 p = v[i], q = v[(i + 1) % v.size()];
        Vec2 e = {q.x - p.x, q.y - p.y};
        double len = std::hypot(e.x, e.y);
        Vec2 nrm = {e.y / len, -e.x / len};  // outward for counterclockwise order
        double h = -1e300;
        for (auto w : K.vertices()) h = std::max(h, w.x * nrm.x + w.y * nrm.y);
        s.add(h * len);
    }
    return 0.5 * s.value();
}

double mixed_area(const ConvexBody2D& K, const ConvexBody2D& L) {
    const double r = K.radius(), s = L.radius();
    return mixed_area_edges(K, L) + 0.5 * (s * K.core_perimeter() + r * L.core_perimeter()) + kPi * r * s;
}

double mean_width_2d(const ConvexBody2D& c) { return c.perimeter() / kPi; }

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    if (pts.size() < 3) return pts;
    std::vector<Vec2> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

double theorem7_ratio(double t, bool replace_L_with_B) {
    require(t > 0, "t must be positive");
    const ConvexBody2D tK = ConvexBody2D::square(t).centered();
    const ConvexBody2D B = ConvexBody2D::disc(0.5);
    const ConvexBody2D L = replace_L_with_B ? B : ConvexBody2D::square(kPi / 4, kPi / 4).centered();
    const double a_tKB = minkowski_sum(tK, B).area();
    const double a_all = minkowski_sum(minkowski_sum(tK, B), L).area();
    return std::sqrt(a_all * tK.area()) / a_tKB;
}

std::vector<std::pair<double, double>> theorem7_sweep(const std::vector<double>& ts, bool replace_L_with_B) {
    std::vector<std::pair<double, double>> out(ts.size());
    parallel_for(ts.size(), [&](std::size_t i) { out[i] = {ts[i], theorem7_ratio(ts[i], replace_L_with_B)}; });
    return out;
}

Theorem7Fit theorem7_fit(const std::vector<double>& ts) {
    require(ts.size() == 3, "the fit uses exactly three t values");
    Eigen::Matrix3d A;
    Eigen::Vector3d y;
    for (int i = 0; i < 3; ++i) {
        const double t = ts[i];
        require(t > 0, "t must be positive");
        A.row(i) << 1.0, 1.0 / t, 1.0 / (t * t);
        y(i) = (theorem7_ratio(t) - 1) * t;
    }
    Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
    Theorem7Fit f;
    f.c = c(0);
    f.d = c(1);
    f.e = c(2);
    f.expected = (kPi * std::sqrt(2.0) / 2 - 2) / 2;
    return f;
}

}  // namespace zic
