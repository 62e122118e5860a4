#include "zic/envelope.hpp"

#include "zic/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace zic {

namespace {

// revised simplex on at most three equality rows, dense basis inverse
struct Simplex {
    int m;
    const std::vector<EnvelopePoint>& cols;  // cols.back() is the query
    std::vector<int> basis;
    Eigen::Matrix3d Binv = Eigen::Matrix3d::Identity();
    Eigen::Vector3d lam = Eigen::Vector3d::Zero();

    Eigen::Vector3d column(int j) const {
        const auto& p = cols[j];
        return {1.0, p.x, m == 3 ? p.y : 0.0};
    }

    void refactor() {
        Eigen::Matrix3d B = Eigen::Matrix3d::Identity();
        for (int i = 0; i < m; ++i) B.col(i).head(m) = column(basis[i]).head(m);
        Binv = B.inverse();
    }
};

}  // namespace

EnvelopeResult concave_envelope_at(const std::vector<EnvelopePoint>& pts, const EnvelopePoint& query) {
    require(std::isfinite(query.f), "envelope query value must be finite");
    std::vector<EnvelopePoint> cols;
    cols.reserve(pts.size() + 1);
    double fscale = std::abs(query.f), xs = std::abs(query.x), ys = std::abs(query.y);
    bool flat = true;
    for (const auto& p : pts) {
        require(std::isfinite(p.f) && std::isfinite(p.x) && std::isfinite(p.y), "envelope samples must be finite");
        cols.push_back(p);
        fscale = std::max(fscale, std::abs(p.f));
        xs = std::max(xs, std::abs(p.x));
        ys = std::max(ys, std::abs(p.y));
        if (p.y != query.y) flat = false;
    }
    cols.push_back(query);
    const int nq = int(cols.size()) - 1;

    Simplex s{flat ? 2 : 3, cols, {}, {}, {}};
    const int m = s.m;

    // starting basis: the query plus auxiliary columns with zero weight
    s.basis.push_back(nq);
    auto lift = [&](int j) {
        return Eigen::Vector3d(1.0, (cols[j].x - query.x) / std::max(xs, 1e-300),
                               m == 3 ? (cols[j].y - query.y) / std::max(ys, 1e-300) : 0.0);
    };
    int b1 = -1;
    double best = 0;
    for (int j = 0; j < nq; ++j) {
        double d = std::abs(lift(j)(1)) + std::abs(lift(j)(2));
        if (d > best) best = d, b1 = j;
    }
    if (b1 < 0) {
        // every sample sits on the query point
        EnvelopeResult r;
        r.value = query.f;
        for (int j = 0; j < nq; ++j) r.value = std::max(r.value, cols[j].f);
        r.support.push_back({query.x, query.y, r.value, 1.0, -1});
        return r;
    }
    s.basis.push_back(b1);
    if (m == 3) {
        int b2 = -1;
        best = 0;
        Eigen::Vector3d u = lift(b1);
        for (int j = 0; j < nq; ++j) {
            Eigen::Vector3d v = lift(j);
            double d = std::abs(u(1) * v(2) - u(2) * v(1));
            if (d > best) best = d, b2 = j;
        }
        if (b2 < 0 || best < 1e-12) fail(ErrorKind::GridTooSmall, "envelope samples are collinear with the query");
        s.basis.push_back(b2);
    }
    s.refactor();
    s.lam.setZero();
    s.lam(0) = 1.0;

    const double tol = 1e-12 * std::max(1.0, fscale);
    const int max_pivots = 20000;
    int degenerate_run = 0;
    EnvelopeResult res;
    for (; res.pivots < max_pivots; ++res.pivots) {
        Eigen::Vector3d cB = Eigen::Vector3d::Zero();
        for (int i = 0; i < m; ++i) cB(i) = cols[s.basis[i]].f;
        Eigen::Vector3d pi = s.Binv.transpose() * cB;
        const bool bland = degenerate_run > 30;
        int enter = -1;
        double best_r = tol;
        for (int j = 0; j <= nq; ++j) {
            const auto& p = cols[j];
            double r = p.f - (pi(0) + pi(1) * p.x + (m == 3 ? pi(2) * p.y : 0.0));
            if (r > best_r) {
                enter = j;
                if (bland) break;
                best_r = r;
            }
        }
        if (enter < 0) break;
        Eigen::Vector3d d = s.Binv * s.column(enter);
        int leave = -1;
        double theta = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (d(i) > 1e-12) {
                double ratio = s.lam(i) / d(i);
                if (ratio < theta - 1e-15 ||
                    (ratio <= theta + 1e-15 && leave >= 0 && s.basis[i] < s.basis[leave])) {
                    theta = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) fail(ErrorKind::GridTooSmall, "envelope LP is unbounded");
        degenerate_run = theta <= 1e-15 ? degenerate_run + 1 : 0;
        for (int i = 0; i < m; ++i) s.lam(i) -= theta * d(i);
        s.lam(leave) = theta;
        s.basis[leave] = enter;
        s.refactor();
        // recompute the weights from the basis to stop drift
        Eigen::Vector3d rhs(1.0, query.x, m == 3 ? query.y : 0.0);
        Eigen::Vector3d w = s.Binv * rhs;
        for (int i = 0; i < m; ++i) s.lam(i) = std::max(0.0, w(i));
    }
    if (res.pivots >= max_pivots) fail(ErrorKind::GridTooSmall, "envelope LP did not converge");

    double total = 0;
    for (int i = 0; i < m; ++i) total += s.lam(i);
    res.value = 0;
    for (int i = 0; i < m; ++i) {
        double w = s.lam(i) / total;
        int j = s.basis[i];
        res.value += w * cols[j].f;
        if (w > 1e-12) res.support.push_back({cols[j].x, cols[j].y, cols[j].f, w, j == nq ? -1 : j});
    }
    res.value = std::max(res.value, query.f);
    return res;
}

}  // namespace zic
