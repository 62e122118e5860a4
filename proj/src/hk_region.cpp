#include "zic/hk_region.hpp"

#include "zic/counterexample.hpp"
#include "zic/entropy.hpp"
#include "zic/error.hpp"
#include "zic/gauss_mixture.hpp"
#include "zic/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace zic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void same_dim(const PsdMatrix& a, const PsdMatrix& b) {
    if (a.dim() != b.dim())
        fail(ErrorKind::DimensionMismatch,
             "dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()) + " differ");
}


Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& a) {
    SymEigen e = jacobi_eigen(a);
    Eigen::VectorXd s = e.values.cwiseMax(0.0).cwiseSqrt();
    return e.vectors * s.asDiagonal() * e.vectors.transpose();
}

Eigen::MatrixXd clamp_unit(const Eigen::MatrixXd& m) {
    SymEigen e = jacobi_eigen(0.5 * (m + m.transpose()));
    Eigen::VectorXd v = e.values.cwiseMax(0.0).cwiseMin(1.0);
    return e.vectors * v.asDiagonal() * e.vectors.transpose();
}

double psi_matrix(const Eigen::MatrixXd& K, const Eigen::MatrixXd& L, double u, double N1) {
    const auto I = Eigen::MatrixXd::Identity(K.rows(), K.cols());
    double a = log_det(K + N1 * I);
    if (!std::isfinite(a)) return kNegInf;
    return u * log_det(K + (N1 + u) * I + L) + a - (u + 1) * log_det(K + (N1 + u) * I);
}

}  // namespace

double psi(const PsdMatrix& K, const PsdMatrix& L, double u, double N1) {
    same_dim(K, L);
    require(u > 0 && N1 >= 0, "psi needs u > 0 and N1 >= 0");
    return psi_matrix(K.matrix(), L.matrix(), u, N1);
}

double psi(double K, double L, double u, double N1) {
    const double x = K + N1;
    if (!(x > 0)) return kNegInf;
    return u * std::log(x + u + L) + std::log(x) - (u + 1) * std::log(x + u);
}

double psi_stationary_value(double L, double u) {
    require(L > 1 && u > 0, "stationary value needs L > 1 and u > 0");
    return (u + 1) * std::log(u + L) - std::log(L) - (u + 1) * std::log(u + 1);
}

double phi_argmax(double J, double L, double u, double N1) {
    require(J >= 0 && L >= 0 && u > 0 && N1 >= 0, "phi needs J, L, N1 >= 0 and u > 0");
    // d psi / dx has the sign of u (L-1) ((u+L)/(L-1) - x) with x = K + N1
    if (L <= 1) return J;
    double x_star = (u + L) / (L - 1);
    return std::clamp(x_star - N1, 0.0, J);
}

double phi(double J, double L, double u, double N1) { return psi(phi_argmax(J, L, u, N1), L, u, N1); }

PhiResult phi(const PsdMatrix& J, const PsdMatrix& L, double u, double N1) {
    same_dim(J, L);
    require(u > 0 && N1 >= 0, "phi needs u > 0 and N1 >= 0");
    const int d = J.dim();
    const double scale = std::max({1.0, J.matrix().norm(), L.matrix().norm()});
    PhiResult out;

    if (commutator_norm(J.matrix(), L.matrix()) < 1e-10 * scale * scale) {
        // a generic combination separates shared eigenvectors even with repeated eigenvalues
        SymEigen e = jacobi_eigen(J.matrix() + 0.7390851332151607 * L.matrix());
        Eigen::VectorXd k(d);
        double v = 0;
        for (int i = 0; i < d; ++i) {
            const Eigen::VectorXd q = e.vectors.col(i);
            double ji = std::max(0.0, q.dot(J.matrix() * q));
            double li = std::max(0.0, q.dot(L.matrix() * q));
            k(i) = phi_argmax(ji, li, u, N1);
            v += psi(k(i), li, u, N1);
        }
        Eigen::MatrixXd K = e.vectors * k.asDiagonal() * e.vectors.transpose();
        out.value = v;
        out.argmax = PsdMatrix(0.5 * (K + K.transpose()));
        return out;
    }

    // K = S M S with S = J^{1/2}, 0 <= M <= I; projected gradient ascent with backtracking
    const Eigen::MatrixXd S = sym_sqrt(J.matrix());
    const auto I = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd M = 0.5 * I;
    auto value = [&](const Eigen::MatrixXd& m) { return psi_matrix(S * m * S, L.matrix(), u, N1); };
    double f = value(M);
    double step = 1.0;
    for (int it = 0; it < 5000 && step > 1e-14; ++it) {
        Eigen::MatrixXd K = S * M * S;
        Eigen::MatrixXd G = u * (K + (N1 + u) * I + L.matrix()).inverse() + (K + N1 * I).inverse() -
                            (u + 1) * (K + (N1 + u) * I).inverse();
        Eigen::MatrixXd GM = S * G * S;
        bool moved = false;
        while (step > 1e-14) {
            Eigen::MatrixXd trial = clamp_unit(M + step * GM);
            double ft = value(trial);
            if (std::isfinite(ft) && ft > f) {
                double change = (trial - M).norm();
                M = trial;
                f = ft;
                step *= 2;
                moved = change > 1e-13;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    Eigen::MatrixXd K = S * M * S;
    out.value = f;
    out.argmax = PsdMatrix(0.5 * (K + K.transpose()));
    out.exact = false;
    return out;
}

double f1_objective(double J, double L, const HKParams& p) {
    double ph = phi(J, L, p.u, p.N1);
    if (!std::isfinite(ph)) return kNegInf;
    return std::log(J + p.N1 + p.u + L) + ph;
}

double f1(double q1, double q2, const HKParams& p) {
    require(q1 >= 0 && q2 >= 0, "f1 needs nonnegative powers");
    return f1_objective(q1, q2, p);
}

G1Result g1(double q1, double q2, const HKParams& p, int n, double margin) {
    require(q1 > 0 && q2 >= 0, "g1 needs q1 > 0 and q2 >= 0");
    require(n >= 4 && margin > 1, "g1 grid needs n >= 4 and margin > 1");
    G1Result r;
    r.n = n;
    // a small q2 still needs room in L: the envelope can reach well past q2 when q1 is large
    r.x_max = margin * q1;
    r.y_max = margin * std::max(q2, 0.5 * q1);
    const int ny = q2 > 0 ? n : 0;
    const double hx = r.x_max / n, hy = q2 > 0 ? r.y_max / n : 0.0;
    std::vector<EnvelopePoint> pts(std::size_t(n + 1) * (ny + 1));
    parallel_for(n + 1, [&](std::size_t i) {
        for (int j = 0; j <= ny; ++j) {
            double x = double(i) * hx, y = j * hy;
            pts[i * (ny + 1) + j] = {x, y, f1_objective(x, y, p)};
        }
    });
    pts.erase(std::remove_if(pts.begin(), pts.end(), [](const EnvelopePoint& e) { return !std::isfinite(e.f); }),
              pts.end());
    r.f1 = f1(q1, q2, p);
    if (!std::isfinite(r.f1)) fail(ErrorKind::InvalidArgument, "f1 is -inf at the query point");
    EnvelopeResult e = concave_envelope_at(pts, {q1, q2, r.f1});
    r.value = e.value;
    r.support = e.support;

    // Midpoint probes: the envelope is at least the mean of f1 at q +- h v. They catch a local loss of
    // concavity that falls between grid lines, mostly near q2 = 0 where the bad direction is diagonal.
    if (q2 > 0) {
        auto f = [&](double x, double y) { return f1_objective(x, y, p); };
        std::vector<std::pair<double, double>> dirs;
        for (int k = 0; k < 16; ++k) dirs.push_back({std::cos(k * kPi / 16), std::sin(k * kPi / 16)});
        const double d = 1e-4 * std::min(q1, q2);
        const double fxx = (f(q1 + d, q2) - 2 * r.f1 + f(q1 - d, q2)) / (d * d);
        const double fyy = (f(q1, q2 + d) - 2 * r.f1 + f(q1, q2 - d)) / (d * d);
        const double fxy = (f(q1 + d, q2 + d) - f(q1 + d, q2 - d) - f(q1 - d, q2 + d) + f(q1 - d, q2 - d)) / (4 * d * d);
        const double lam = 0.5 * (fxx + fyy) + std::hypot(0.5 * (fxx - fyy), fxy);
        if (std::isfinite(lam)) {
            double vx = fxy, vy = lam - fxx;
            if (std::hypot(vx, vy) < 1e-14) vx = lam - fyy, vy = fxy;
            double nv = std::hypot(vx, vy);
            if (nv > 0) dirs.push_back({vx / nv, vy / nv});
        }
        const double hmax = std::min(hx, hy);
        for (auto [vx, vy] : dirs) {
            double h = hmax;
            if (vx != 0) h = std::min(h, q1 / std::abs(vx));
            if (vy != 0) h = std::min(h, q2 / std::abs(vy));
            for (double s : {h, h / 4}) {
                if (!(s > 0)) continue;
                double ax = q1 + s * vx, ay = q2 + s * vy, bx = q1 - s * vx, by = q2 - s * vy;
                double fa = f(ax, ay), fb = f(bx, by);
                if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
                double v = 0.5 * (fa + fb);
                if (v > r.value) {
                    r.value = v;
                    r.support = {{ax, ay, fa, 0.5, -1}, {bx, by, fb, 0.5, -1}};
                }
            }
        }
    }
    for (const auto& s : r.support) {
        bool far_x = s.x >= r.x_max * (1 - 1e-12);
        bool far_y = q2 > 0 && s.y >= r.y_max * (1 - 1e-12);
        if (s.weight > 1e-9 && (far_x || far_y))
            fail(ErrorKind::GridTooSmall, "envelope support point at the tabulation boundary (" + std::to_string(s.x) +
                                              ", " + std::to_string(s.y) + ")");
    }
    return r;
}

Lemma5Result lemma5_classify(double J, double L, const HKParams& p) {
    require(J > 0 && L > 0, "the argmax bound needs J, L > 0");
    Lemma5Result r;
    r.J = J;
    r.L = L;
    r.K = phi_argmax(J, L, p.u, p.N1);
    r.bound = 1 + std::sqrt(1 + p.u);
    r.case_label = 2;
    if (L > 1) {
        double x_star = (p.u + L) / (L - 1);
        double x = J + p.N1;
        if (std::abs(x - x_star) <= 1e-9 * std::max(1.0, x_star))
            r.case_label = 3;
        else if (x > x_star)
            r.case_label = 1;
    }
    r.bound_holds = r.K + p.N1 <= r.bound + 1e-6;
    return r;
}

Lemma5Result lemma5_check(double J, double L, const HKParams& p, double tol, int n) {
    Lemma5Result r = lemma5_classify(J, L, p);
    G1Result g = g1(J, L, p, n);
    r.f1 = g.f1;
    r.g1 = g.value;
    if (g.value - g.f1 > tol)
        fail(ErrorKind::NotApplicable,
             "g1 exceeds f1 by " + std::to_string(g.value - g.f1) + " at (" + std::to_string(J) + ", " +
                 std::to_string(L) + ")");
    return r;
}

namespace {

// f1 on the lattice (i hx, j hy), i, j = 0..m
std::vector<double> f1_lattice(int m, double hx, double hy, const HKParams& p) {
    std::vector<double> F(std::size_t(m + 1) * (m + 1));
    parallel_for(m + 1, [&](std::size_t i) {
        for (int j = 0; j <= m; ++j) F[i * (m + 1) + j] = f1_objective(double(i) * hx, j * hy, p);
    });
    return F;
}

// best split of lattice point (I, J) into two lattice points
F2Split best_split(const std::vector<double>& F, int m, int I, int Jx, double hx, double hy) {
    F2Split s;
    s.value = kNegInf;
    for (int i = 0; i <= I; ++i)
        for (int j = 0; j <= Jx; ++j) {
            double v = F[std::size_t(i) * (m + 1) + j] + F[std::size_t(I - i) * (m + 1) + (Jx - j)];
            if (v > s.value) {
                s.value = v;
                s.a[0] = i * hx;
                s.a[1] = (I - i) * hx;
                s.b[0] = j * hy;
                s.b[1] = (Jx - j) * hy;
            }
        }
    return s;
}

}  // namespace

TensorCheck tensorization_check(double q1, double q2, const HKParams& p, int n) {
    require(q1 > 0 && q2 > 0, "tensorization check needs positive powers");
    require(n >= 8 && n % 4 == 0, "tensorization lattice needs n divisible by 4");
    TensorCheck out;
    out.q1 = q1;
    out.q2 = q2;
    out.twice_g1 = 2 * g1(q1, q2, p, n, 4.0).value;

    const double hx = 4 * q1 / n, hy = 4 * q2 / n;
    const int m = 2 * n;  // f2 lattice covers [0, 8 q]
    std::vector<double> F = f1_lattice(m, hx, hy, p);
    std::vector<double> F2(std::size_t(m + 1) * (m + 1));
    parallel_for(m + 1, [&](std::size_t I) {
        for (int Jx = 0; Jx <= m; ++Jx) F2[I * (m + 1) + Jx] = best_split(F, m, int(I), Jx, hx, hy).value;
    });
    std::vector<EnvelopePoint> pts;
    pts.reserve(F2.size());
    for (int I = 0; I <= m; ++I)
        for (int Jx = 0; Jx <= m; ++Jx) {
            double v = F2[std::size_t(I) * (m + 1) + Jx];
            if (std::isfinite(v)) pts.push_back({I * hx, Jx * hy, v});
        }
    const int qi = n / 2;  // 2 q sits at lattice index n/2 of step 4q/n
    out.f2 = F2[std::size_t(qi) * (m + 1) + qi];
    EnvelopeResult e = concave_envelope_at(pts, {2 * q1, 2 * q2, out.f2});
    out.g2 = e.value;
    return out;
}

Theorem4Report theorem4_audit(int d, const HKParams& p, int samples, std::uint64_t seed, int n) {
    require(d == 1 || d == 2, "the eigenvalue audit supports d = 1 or 2");
    require(samples > 0, "audit needs at least one sample");
    require(p.q1 > 0 && p.q2 > 0, "audit needs positive power ranges");
    Theorem4Report rep;
    rep.d = d;
    rep.bound = 1 + std::sqrt(1 + p.u);
    rep.heuristic_certificate = d == 2;
    rep.samples.resize(samples);
    CounterRng rng(seed, 4);
    std::vector<std::pair<double, double>> qs(samples);
    for (auto& q : qs) {
        q.first = p.q1 * (1 - rng.uniform());  // (0, q1]
        q.second = p.q2 * (1 - rng.uniform());
    }

    parallel_for(std::size_t(samples), [&](std::size_t s) {
        Theorem4Sample& out = rep.samples[s];
        out.q1 = qs[s].first;
        out.q2 = qs[s].second;
        try {
            if (d == 1) {
                G1Result g = g1(out.q1, out.q2, p, n);
                out.envelope_gap = g.value - g.f1;
                out.J = {out.q1};
                out.L = {out.q2};
            } else {
                // aligned diagonal maximizer: split each trace across the two coordinates
                const double hq1 = out.q1 / 2, hq2 = out.q2 / 2;
                const double hx = 4 * hq1 / n, hy = 4 * hq2 / n;
                const int m = n / 2;  // q sits at index n/2 of step 4(q/2)/n
                std::vector<double> F = f1_lattice(m, hx, hy, p);
                F2Split sp = best_split(F, m, m, m, hx, hy);
                double twice_g1 = 2 * g1(hq1, hq2, p, n, 4.0).value;
                out.envelope_gap = std::max(0.0, twice_g1 - sp.value);
                out.J = {sp.a[0], sp.a[1]};
                out.L = {sp.b[0], sp.b[1]};
            }
            out.applicable = out.envelope_gap <= kApplicabilityTolerance;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::GridTooSmall && e.kind() != ErrorKind::InvalidArgument) throw;
            out.applicable = false;
        }
        for (std::size_t i = 0; i < out.J.size(); ++i) {
            double k = phi_argmax(out.J[i], out.L[i], p.u, p.N1);
            out.K.push_back(k);
            out.max_eigenvalue = std::max(out.max_eigenvalue, k + p.N1);
        }
        out.bound_holds = out.max_eigenvalue <= rep.bound + 1e-6;
    });
    for (const auto& s : rep.samples) {
        if (!s.applicable) continue;
        ++rep.applicable;
        if (!s.bound_holds) ++rep.violations;
    }
    return rep;
}

ConstantPowerGap constant_power_gap(const HKParams& p, std::optional<double> A) {
    if (p.u != 1.0) fail(ErrorKind::WitnessUnavailable, "the positive-gap construction is only available for u = 1");
    require(p.N1 > 0 && p.N2 > 0, "constant power gap needs N1, N2 > 0");
    if (A) require(*A > 0, "mixing variance A must be positive");

    // Recipe units: X1' + Z1 ~ p with Z1 taking theta of p's component variance, Z2 ~ N(0, t m2), X2 ~ sqrt(t) q.
    // Psi is scale invariant at u = 1, so scaling by s^2 = N1 / (theta v_p) matches the requested noises.
    const Lemma2Recipe rec = default_lemma2_recipe();
    validate_recipe(rec);
    const double vp = rec.p.terms().front().variance;
    const double m2q = moments(rec.q, 2)[1];
    const double t_max = vp * p.N2 / (p.N1 * m2q);  // theta <= 1
    std::vector<double> cand;
    for (double t : default_lemma2_sweep())
        if (t <= t_max) cand.push_back(t);
    cand.push_back(std::min(t_max, default_lemma2_sweep().back()));
    std::vector<double> gaps(cand.size());
    parallel_for(cand.size(), [&](std::size_t i) { gaps[i] = lemma2_gap_at(cand[i], rec.p, rec.q); });
    std::size_t best = std::max_element(gaps.begin(), gaps.end()) - gaps.begin();
    if (!(gaps[best] > 0))
        fail(ErrorKind::WitnessUnavailable, "no positive Psi gap for N2/N1 = " + std::to_string(p.N2 / p.N1));

    ConstantPowerGap out;
    out.t = cand[best];
    out.c = gaps[best];
    const double theta = p.N1 * out.t * m2q / (vp * p.N2);
    out.scale = p.N1 / (theta * vp);
    const double var_x1p = out.scale * (moments(rec.p, 2)[1] - theta * vp);  // mean zero recipe
    out.q2 = p.N2;

    // X1+X2+Z1+Z2 in recipe units, before adding U
    const auto base = convolve(convolve(rec.p, GaussDerivMixture::gaussian(out.t * m2q)), rec.q.dilate(std::sqrt(out.t)));
    auto evaluate = [&](double a) {
        const double q1 = var_x1p + a;
        const double total = q1 + p.N1 + p.N2 + out.q2;
        const double h = entropy(convolve(base, GaussDerivMixture::gaussian(a / out.scale)), 16384) +
                         0.5 * std::log(out.scale);
        ConstantPowerGap r = out;
        r.A = a;
        r.q1 = q1;
        r.slack = 0.5 * std::log(2 * kPi * std::exp(1.0) * total) - h;
        r.lower_witness = h - 0.5 * std::log(2 * kPi * std::exp(1.0) * p.N1) + out.c;
        // Gaussian (U, X1) is optimal for the envelope; the u-weighted psi term is increasing in K, so K = q1
        const double x = q1 + p.N1;
        const double env = 0.5 * (p.u * std::log(x + p.N2 + out.q2) + std::log(x) - (p.u + 1) * std::log(x + p.N2));
        r.gaussian_value = 0.5 * std::log(total / p.N1) + env;
        r.gap = r.lower_witness - r.gaussian_value;
        return r;
    };

    if (A) return evaluate(*A);
    double a = p.N1;
    ConstantPowerGap r = evaluate(a);
    for (int i = 0; i < 60 && !(r.slack < out.c / 4); ++i) r = evaluate(a *= 2);
    return r;
}

std::vector<Conjecture2Cell> conjecture2_map(const std::vector<double>& u_grid, const std::vector<double>& q_grid,
                                             const HKParams& p, int n) {
    require(!u_grid.empty() && !q_grid.empty(), "the envelope map needs nonempty grids");
    for (double u : u_grid) require(u > 0, "u must be positive");
    for (double q : q_grid) require(q >= 0, "powers must be nonnegative");
    std::vector<Conjecture2Cell> cells;
    for (double u : u_grid)
        for (double a : q_grid)
            for (double b : q_grid)
                if (a > 0) cells.push_back({u, a, b});
    // each g1 call already parallelizes its tabulation
    for (auto& c : cells) {
        HKParams q = p;
        q.u = c.u;
        c.K = phi_argmax(c.q1, c.q2, c.u, q.N1);
        c.f1 = f1(c.q1, c.q2, q);
        try {
            G1Result g = g1(c.q1, c.q2, q, n);
            c.g1 = g.value;
            c.f1_eq_g1 = g.value - g.f1 <= kApplicabilityTolerance;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::GridTooSmall) throw;
            c.grid_too_small = true;
            c.g1 = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return cells;
}

double alignment_slack(const PsdMatrix& K, const PsdMatrix& L) {
    same_dim(K, L);
    const Eigen::MatrixXd a = decreasing_alignment(K).aligned.matrix() + increasing_alignment(L).aligned.matrix();
    return log_det(a) - log_det(K.matrix() + L.matrix());
}

double rotation_derivative(const Eigen::MatrixXd& K, const Eigen::MatrixXd& L, const Eigen::MatrixXd& H, double h) {
    const auto I = Eigen::MatrixXd::Identity(K.rows(), K.cols());
    auto at = [&](double s) {
        Eigen::MatrixXd Q = (I - 0.5 * s * H).inverse() * (I + 0.5 * s * H);
        return log_det(K + Q.transpose() * L * Q);
    };
    return (at(h) - at(-h)) / (2 * h);
}

}  // namespace zic
