#include "zic/entropy.hpp"

#include "zic/error.hpp"
#include "zic/numeric.hpp"
#include "zic/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zic {

namespace {

constexpr double kLogFloor = 1e-300;
constexpr double kNegTolerance = -1e-12;

double upper_q(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }
double phi0(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

struct TailPiece {
    double mass = 0.0;
    double entropy = 0.0;  // -int f ln f over the tail
    double fisher = 0.0;   // int f'^2/f over the tail
};

// tail beyond distance z (in sd units) from the component mean
TailPiece tail_piece(const GaussianTail& t, double z) {
    TailPiece out;
    if (t.weight <= 0.0) return out;
    const double Q = upper_q(z);
    const double zp = z * phi0(z);
    out.mass = t.weight * Q;
    out.entropy = -t.weight * std::log(t.weight) * Q + t.weight * (0.5 * std::log(2 * kPi * t.variance) * Q + 0.5 * (zp + Q));
    out.fisher = t.weight / t.variance * (zp + Q);
    return out;
}

TailPiece left_piece(const GridDensity& p) {
    if (!p.left_tail) return {};
    const auto& t = *p.left_tail;
    return tail_piece(t, (t.mean - p.lo) / std::sqrt(t.variance));
}

TailPiece right_piece(const GridDensity& p) {
    if (!p.right_tail) return {};
    const auto& t = *p.right_tail;
    return tail_piece(t, (p.hi - t.mean) / std::sqrt(t.variance));
}

void check_grid(const GridDensity& p) {
    if (p.n < 2 || p.values.size() != p.n || !(p.hi > p.lo))
        fail(ErrorKind::InvalidArgument, "malformed grid density");
    for (double v : p.values) {
        if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "non-finite grid value");
        if (v < kNegTolerance) fail(ErrorKind::NegativeDensity, "grid value " + std::to_string(v));
    }
}

void check_mass(const GridDensity& p) {
    double m = grid_mass(p);
    if (std::fabs(m - 1.0) > kMassTolerance) fail(ErrorKind::NonNormalized, "mass " + std::to_string(m));
}

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

// 4th-order central difference of order k (1..3) at node i; zero where the stencil does not fit.
double fd_derivative(const std::vector<double>& f, std::size_t i, double h, int k) {
    const std::size_t n = f.size();
    auto at = [&](long j) { return f[std::size_t(long(i) + j)]; };
    switch (k) {
    case 1:
        if (i < 2 || i + 2 >= n) return 0.0;
        return (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
    case 2:
        if (i < 2 || i + 2 >= n) return 0.0;
        return (-at(2) + 16 * at(1) - 30 * at(0) + 16 * at(-1) - at(-2)) / (12 * h * h);
    case 3:
        if (i < 3 || i + 3 >= n) return 0.0;
        return (-at(3) + 8 * at(2) - 13 * at(1) + 13 * at(-1) - 8 * at(-2) + at(-3)) / (8 * h * h * h);
    default:
        fail(ErrorKind::InvalidArgument, "finite-difference order must be 1..3");
    }
}

std::optional<GaussianTail> dominant_tail(const GaussDerivMixture& m, double edge, bool right) {
    std::optional<GaussianTail> best;
    double best_mass = -1.0;
    for (const auto& t : m.terms()) {
        if (t.order != 0 || t.coeff <= 0.0) continue;
        double s = std::sqrt(t.variance);
        double z = right ? (edge - t.mean) / s : (t.mean - edge) / s;
        double mass = t.coeff * upper_q(z);
        if (mass > best_mass) {
            best_mass = mass;
            best = GaussianTail{t.coeff, t.mean, t.variance};
        }
    }
    return best;
}

}  // namespace

double grid_mass(const GridDensity& p) {
    check_grid(p);
    CompensatedSum s;
    for (std::size_t i = 0; i < p.n; ++i) s.add(trapezoid_weight(i, p.n) * std::max(p.values[i], 0.0));
    return s.value() * p.step() + left_piece(p).mass + right_piece(p).mass;
}

GridDensity normalized(GridDensity p) {
    double m = grid_mass(p);
    require(m > 0.0, "cannot normalize a zero density");
    for (auto& v : p.values) v /= m;
    for (auto& v : p.slope) v /= m;
    if (p.left_tail) p.left_tail->weight /= m;
    if (p.right_tail) p.right_tail->weight /= m;
    return p;
}

double differential_entropy(const GridDensity& p) {
    check_grid(p);
    if (p.n < kMinEntropyPoints) fail(ErrorKind::InvalidArgument, "entropy needs at least 1024 grid points");
    check_mass(p);
    CompensatedSum s;
    for (std::size_t i = 0; i < p.n; ++i) {
        double v = p.values[i];
        if (v < kLogFloor) continue;
        s.add(-trapezoid_weight(i, p.n) * v * std::log(v));
    }
    return s.value() * p.step() + left_piece(p).entropy + right_piece(p).entropy;
}

double fisher_information(const GridDensity& p) {
    check_grid(p);
    if (p.n < kMinEntropyPoints) fail(ErrorKind::InvalidArgument, "Fisher information needs at least 1024 grid points");
    check_mass(p);
    const double h = p.step();
    const bool exact = p.slope.size() == p.n;
    CompensatedSum s;
    for (std::size_t i = 0; i < p.n; ++i) {
        double v = p.values[i];
        if (v < kLogFloor) continue;
        double d = exact ? p.slope[i] : fd_derivative(p.values, i, h, 1);
        s.add(trapezoid_weight(i, p.n) * d * d / v);
    }
    return s.value() * h + left_piece(p).fisher + right_piece(p).fisher;
}

std::pair<double, double> default_window(const GaussDerivMixture& m, double extra) {
    double s = std::sqrt(m.max_variance());
    return {m.min_mean() - 12.0 * s - extra, m.max_mean() + 12.0 * s + extra};
}

GridDensity mixture_to_grid(const GaussDerivMixture& m, double lo, double hi, std::size_t n) {
    require(n >= 2 && hi > lo, "mixture_to_grid needs a proper window");
    if (std::fabs(m.mass() - 1.0) > 1e-12) fail(ErrorKind::NonNormalized, "mixture mass " + std::to_string(m.mass()));
    GridDensity g;
    g.lo = lo;
    g.hi = hi;
    g.n = n;
    g.values.resize(n);
    g.slope.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = g.x(i);
        double v = m.density(x);
        if (v < kNegTolerance)
            fail(ErrorKind::NegativeDensity, "density " + std::to_string(v) + " at x=" + std::to_string(x));
        g.values[i] = std::max(v, 0.0);
        g.slope[i] = m.derivative(x, 1);
    }
    g.left_tail = dominant_tail(m, lo, false);
    g.right_tail = dominant_tail(m, hi, true);
    return g;
}

GridDensity mixture_to_grid(const GaussDerivMixture& m, std::size_t n) {
    auto [lo, hi] = default_window(m);
    return mixture_to_grid(m, lo, hi, n);
}

double entropy(const GaussDerivMixture& m, std::size_t n) { return differential_entropy(mixture_to_grid(m, n)); }

double fisher_information(const GaussDerivMixture& m, std::size_t n) {
    return fisher_information(mixture_to_grid(m, n));
}

GridDensity convolve_grid(const GridDensity& p, const GaussDerivMixture& q, double t) {
    check_grid(p);
    require(t > 0.0, "convolution scale must be positive");
    const auto qt = q.dilate(std::sqrt(t));
    const double h = p.step();
    double reach = std::max(std::fabs(qt.min_mean()), std::fabs(qt.max_mean())) + 14.0 * std::sqrt(qt.max_variance());
    const long K = long(std::ceil(reach / h));
    std::vector<double> kern(2 * K + 1);
    for (long k = -K; k <= K; ++k) kern[std::size_t(k + K)] = qt.density(double(k) * h) * h;

    GridDensity out = p;
    out.slope.clear();
    const long n = long(p.n);
    for (long i = 0; i < n; ++i) {
        CompensatedSum s;
        long jlo = std::max(-K, i - (n - 1)), jhi = std::min(K, i);
        for (long k = jlo; k <= jhi; ++k) s.add(p.values[std::size_t(i - k)] * kern[std::size_t(k + K)]);
        out.values[std::size_t(i)] = std::max(s.value(), 0.0);
    }
    // tails widen by the second moment of the kernel
    double m2 = moments(qt, 2)[1];
    if (out.left_tail) out.left_tail->variance += m2;
    if (out.right_tail) out.right_tail->variance += m2;
    return out;
}

double log_derivative_integral(const GridDensity& p, int k) {
    check_grid(p);
    require(k >= 1 && k <= 3, "derivative order must be 1..3");
    const double h = p.step();
    CompensatedSum s;
    for (std::size_t i = 0; i < p.n; ++i) {
        double v = p.values[i];
        if (v < kLogFloor) continue;
        s.add(trapezoid_weight(i, p.n) * fd_derivative(p.values, i, h, k) * std::log(v));
    }
    return s.value() * h;
}

double log_derivative_integral(const GaussDerivMixture& p, int k) {
    auto [lo, hi] = default_window(p);
    double c = 0.5 * (lo + hi);
    double scale = (hi - lo) / 80.0;
    return integrate_line(
        [&](double x) {
            double v = p.density(x);
            if (v < kLogFloor) return 0.0;
            return p.derivative(x, k) * std::log(v);
        },
        c, scale, 40.0);
}

namespace {

ExpansionPrediction prediction_from(double i2, double i3, const GaussDerivMixture& q) {
    auto m = moments(q, 3);
    ExpansionPrediction out;
    out.int_p2_lnp = i2;
    out.int_p3_lnp = i3;
    out.m2 = m[1];
    out.m3 = m[2];
    out.c1 = m[1] * (-0.5 * i2);
    out.c15 = m[2] * (i3 / 6.0);
    return out;
}

void check_kernel(const GaussDerivMixture& q, const std::vector<double>& t_grid) {
    if (std::fabs(q.mass() - 1.0) > 1e-12) fail(ErrorKind::NonNormalized, "q must have unit mass");
    auto m = moments(q, 1);
    require(std::fabs(m[0]) < 1e-12, "q must have zero mean");
    require(t_grid.size() >= 6, "expansion fit needs at least 6 t values");
    for (double t : t_grid) require(t > 0.0 && t <= 0.1, "t values must lie in (0, 0.1]");
}

EntropyExpansion accept(EntropyExpansion e) {
    if (!(std::fabs(e.residual_slope - 2.0) <= 0.25))
        fail(ErrorKind::FitRejected, "residual slope " + std::to_string(e.residual_slope));
    return e;
}

}  // namespace

ExpansionPrediction lemma1_prediction(const GaussDerivMixture& p, const GaussDerivMixture& q) {
    return prediction_from(log_derivative_integral(p, 2), log_derivative_integral(p, 3), q);
}

ExpansionPrediction lemma1_prediction(const GridDensity& p, const GaussDerivMixture& q) {
    return prediction_from(log_derivative_integral(p, 2), log_derivative_integral(p, 3), q);
}

EntropyExpansion fit_expansion(const std::vector<double>& t, const std::vector<double>& dh) {
    require(t.size() == dh.size() && t.size() >= 6, "fit needs at least 6 points");
    std::vector<double> b1(t.size()), b15(t.size()), b2(t.size()), b25(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        b1[i] = t[i];
        b15[i] = std::pow(t[i], 1.5);
        b2[i] = t[i] * t[i];
        b25[i] = std::pow(t[i], 2.5);
    }
    auto c = least_squares({b1, b15, b2, b25}, dh);
    EntropyExpansion e;
    e.c1 = c[0];
    e.c15 = c[1];
    e.c2 = c[2];
    e.c25 = c[3];
    e.t = t;
    e.dh = dh;
    e.residual.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) e.residual[i] = dh[i] - e.c1 * b1[i] - e.c15 * b15[i];
    e.residual_slope = loglog_slope(t, e.residual);
    return e;
}

EntropyExpansion lemma1_expansion(const GridDensity& p, const GaussDerivMixture& q, const std::vector<double>& t_grid) {
    check_kernel(q, t_grid);
    const double h0 = differential_entropy(p);
    std::vector<double> dh(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) { dh[i] = differential_entropy(convolve_grid(p, q, t_grid[i])) - h0; });
    return accept(fit_expansion(t_grid, dh));
}

EntropyExpansion lemma1_expansion(const GaussDerivMixture& p, const GaussDerivMixture& q,
                                  const std::vector<double>& t_grid) {
    check_kernel(q, t_grid);
    const std::size_t n = 16384;
    const double h0 = entropy(p, n);
    std::vector<double> dh(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) {
        dh[i] = entropy(convolve(p, q.dilate(std::sqrt(t_grid[i]))), n) - h0;
    });
    return accept(fit_expansion(t_grid, dh));
}

}  // namespace zic
