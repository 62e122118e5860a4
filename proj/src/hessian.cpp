#include "zic/hessian.hpp"

#include "zic/counterexample.hpp"
#include "zic/error.hpp"
#include "zic/gauss_mixture.hpp"
#include "zic/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace zic {

double HermiteCoeffVector::at(int alpha) const {
    auto it = coeffs.find(alpha);
    return it == coeffs.end() ? 0.0 : it->second;
}

const char* stability_name(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::critical: return "critical";
    }
    return "?";
}

namespace {

void check_stationary(double K, double L, double u) {
    if (!(K > 0 && L > 0 && u > 0)) fail(ErrorKind::InvalidArgument, "K, L, u must be positive");
    if (L <= 1) fail(ErrorKind::NotStationary, "no Gaussian stationary point for L <= 1");
    double expect = (L + u) / (L - 1);
    if (std::abs(K - expect) > kStationaryTolerance * std::max(1.0, expect))
        fail(ErrorKind::NotStationary,
             "K = " + std::to_string(K) + " but (L+u)/(L-1) = " + std::to_string(expect));
}

}  // namespace

HessianReport hessian_quadratic_form(double K, double L, double u, const HermiteCoeffVector& A,
                                     const HermiteCoeffVector& B) {
    check_stationary(K, L, u);
    HessianReport rep;
    const double S = K + u + L;

    int top = 1;
    for (auto& [a, c] : A.coeffs) {
        require(a >= 0 && a <= kMaxOrder, "coefficient index out of range");
        top = std::max(top, a);
    }
    for (auto& [a, c] : B.coeffs) {
        require(a >= 0 && a <= kMaxOrder, "coefficient index out of range");
        top = std::max(top, a);
    }
    rep.b1_zeroed = B.at(1) != 0.0;

    CompensatedSum total;
    const double a1 = A.at(1);
    if (a1 != 0.0 || A.coeffs.count(1)) {
        double i1 = -2 * u * a1 * a1 / (S * S) - 2 * a1 * a1 / (K * K) + 2 * (1 + u) * a1 * a1 / ((K + u) * (K + u));
        rep.per_alpha_terms[1] = i1;
        total.add(i1);
    }
    for (int alpha = 2; alpha <= top; ++alpha) {
        if (!A.coeffs.count(alpha) && !B.coeffs.count(alpha)) continue;
        const double a = A.at(alpha), b = B.at(alpha);
        const double p = alpha + 1.0;
        double inner = -u * a * a / std::pow(S, p) - a * a / std::pow(K, p) + (1 + u) * a * a / std::pow(K + u, p)
                       - u * b * b / std::pow(S, p) - 2 * u * a * b / std::pow(S, p);
        double term = factorial(alpha + 1) * inner;
        rep.per_alpha_terms[alpha] = term;
        total.add(term);
    }
    rep.total = total.value();
    rep.classification = stability_classify(K, u);
    return rep;
}

double best_alpha_term(double K, double u, int alpha, double A) {
    require(alpha >= 2, "best_alpha_term needs alpha >= 2");
    const double p = alpha + 1.0;
    return factorial(alpha + 1) * A * A * ((1 + u) / std::pow(K + u, p) - 1 / std::pow(K, p));
}

Stability stability_classify(double K, double u) {
    require(K > 0 && u > 0, "K and u must be positive");
    const double thr = stability_threshold(u);
    if (std::abs(K - thr) < kCriticalBand) return Stability::critical;
    return K < thr ? Stability::stable : Stability::unstable;
}

PsdMatrix theorem5_maximizer(const PsdMatrix& L, double u) {
    require(u > 0, "u must be positive");
    if (L.min_eigenvalue() <= 1) fail(ErrorKind::NoGaussianMax, "L must exceed the identity");
    const Eigen::VectorXd& l = L.eigenvalues();
    const Eigen::MatrixXd& V = L.eigenvectors();
    Eigen::VectorXd k(l.size());
    for (int i = 0; i < l.size(); ++i) k(i) = (l(i) + u) / (l(i) - 1);
    Eigen::MatrixXd m = V * k.asDiagonal() * V.transpose();
    return PsdMatrix(0.5 * (m + m.transpose()));
}

Theorem5Result theorem5_epsilon(const PsdMatrix& K, const PsdMatrix& L, double u) {
    if (K.dim() != L.dim()) fail(ErrorKind::DimensionMismatch, "K and L differ in dimension");
    require(u > 0, "u must be positive");
    if (L.min_eigenvalue() <= 1) fail(ErrorKind::NotStationary, "L must exceed the identity");
    const int d = K.dim();
    const double scale = std::max(1.0, K.matrix().cwiseAbs().maxCoeff());
    if (commutator_norm(K.matrix(), L.matrix()) > 1e-9 * scale * std::max(1.0, L.matrix().norm()))
        fail(ErrorKind::NotStationary, "K and L do not commute");
    PsdMatrix expect = theorem5_maximizer(L, u);
    if ((expect.matrix() - K.matrix()).cwiseAbs().maxCoeff() > kStationaryTolerance * scale)
        fail(ErrorKind::NotStationary, "K is not (L-I)^{-1}(L+uI)");

    // pair the eigenvalues through L's eigenbasis so k_i and l_i refer to the same direction
    const Eigen::VectorXd& lv = L.eigenvalues();
    std::vector<double> k(d), l(d);
    for (int i = 0; i < d; ++i) {
        l[i] = lv(i);
        k[i] = (lv(i) + u) / (lv(i) - 1);
    }

    Theorem5Result res;
    res.k_eigenvalues = k;
    std::sort(res.k_eigenvalues.begin(), res.k_eigenvalues.end(), std::greater<>());
    const double kmax = res.k_eigenvalues.front();
    const double thr = stability_threshold(u);

    // second-order block: symmetric Lambda coordinates (i <= j)
    const int m = d * (d + 1) / 2;
    Eigen::VectorXd num(m), den(m);
    int idx = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j, ++idx) {
            const double Si = k[i] + u + l[i], Sj = k[j] + u + l[j];
            if (i == j) {
                num(idx) = 2 / (k[i] * k[i]) + 2 * u / (Si * Si);
                den(idx) = (1 + u) * 2 / ((k[i] + u) * (k[i] + u));
            } else {
                num(idx) = 1 / (k[i] * k[j]) + u / (Si * Sj);
                den(idx) = (1 + u) / ((k[i] + u) * (k[j] + u));
            }
        }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Eigen::MatrixXd(num.asDiagonal()),
                                                                  Eigen::MatrixXd(den.asDiagonal()));
    const double R = ges.eigenvalues().minCoeff();
    res.rayleigh_min = R;
    res.eps1 = R > 1 ? 0.5 * (-(2 + R) + std::sqrt((2 + R) * (2 + R) + 4 * (R - 1))) : 0.0;

    // third order: worst multi-index puts all three derivatives on the largest k
    const double r = kmax / (kmax + u);
    const double rho = (1 + u) * r * r * r;
    res.worst_cubic_ratio = rho;
    res.eps2 = rho < 1 ? (1 - rho) / (1 + rho) : 0.0;

    if (kmax >= thr - 1e-9) {
        res.offending_eigenvalue = kmax;
        return res;
    }
    double eps = std::min(res.eps1, res.eps2);
    if (eps <= 0) {
        res.offending_eigenvalue = kmax;
        return res;
    }
    res.epsilon = eps;
    return res;
}

double theorem5_epsilon_strict(const PsdMatrix& K, const PsdMatrix& L, double u) {
    Theorem5Result r = theorem5_epsilon(K, L, u);
    if (!r.epsilon)
        throw HypothesisError(*r.offending_eigenvalue,
                              "eigenvalue " + std::to_string(*r.offending_eigenvalue) +
                                  " of K is not below the stability threshold " +
                                  std::to_string(stability_threshold(u)));
    return *r.epsilon;
}

std::vector<PhaseCell> phase_diagram(const std::vector<double>& u_grid, const std::vector<double>& L_grid) {
    require(!u_grid.empty() && !L_grid.empty(), "phase diagram grids must be nonempty");
    for (double L : L_grid) require(L > 1, "phase diagram needs L > 1");
    for (double u : u_grid) require(u > 0, "phase diagram needs u > 0");
    std::vector<PhaseCell> cells(u_grid.size() * L_grid.size());
    parallel_for(cells.size(), [&](std::size_t n) {
        PhaseCell& c = cells[n];
        c.u = u_grid[n / L_grid.size()];
        c.L = L_grid[n % L_grid.size()];
        c.K = (c.L + c.u) / (c.L - 1);
        c.classification = stability_classify(c.K, c.u);
    });
    return cells;
}

}  // namespace zic
