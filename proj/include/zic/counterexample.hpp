#ifndef ZIC_COUNTEREXAMPLE_HPP
#define ZIC_COUNTEREXAMPLE_HPP

#include "zic/entropy.hpp"
#include "zic/gauss_mixture.hpp"

#include <vector>

namespace zic {

struct ConjectureParams {
    double u = 1.0;
    double N1 = 0.0;
    double N2 = 1.0;
    double Sigma1 = 0.0;
    double A2 = 1.0;
    int d = 1;
};

// u h(X1+X2+Z1+Z2) + h(X1+Z1) - (1+u) h(X1+Z1+Z2) - Sigma1 E[X1^2]
double conjecture_objective(const ConjectureParams& params, const GaussDerivMixture& x1, const GaussDerivMixture& x2);
double conjecture_objective(const ConjectureParams& params, const GridDensity& x1, const GridDensity& x2);
// both inputs Gaussian with variances K and L
double conjecture_objective_gaussian(const ConjectureParams& params, double K, double L);

// ---- non-Gaussian base density with a skewed kernel ----

struct Lemma2Recipe {
    GaussDerivMixture p;  // law of sqrt(t) X1
    GaussDerivMixture q;  // law of X2
};

Lemma2Recipe default_lemma2_recipe();

struct RecipeCheck {
    ExpansionPrediction prediction;  // c15 is the predicted t^{3/2} coefficient of the gap
};

// Checks q: unit mass, m1=0, m2>0, and m3 * int p''' ln p > 0. Throws RecipeRejected.
RecipeCheck validate_recipe(const Lemma2Recipe& recipe);

struct GapPoint {
    double t = 0.0;
    double gap = 0.0;
};

// h(X1+Z2+X2) + h(X1) - 2h(X1+Z2) with sqrt(t) X1 ~ p, X2 ~ q, N2 = m2(q)
std::vector<GapPoint> lemma2_gap(const std::vector<double>& t_grid, const Lemma2Recipe& recipe);
// same with q replaced by a centred Gaussian of equal variance; no sign precondition
std::vector<GapPoint> lemma2_gaussian_control(const std::vector<double>& t_grid, const Lemma2Recipe& recipe);
double lemma2_gap_at(double t, const GaussDerivMixture& p, const GaussDerivMixture& q);

// least-squares fit of gap ~ a t^{3/2} + b t^2 + c t^{5/2}; returns a
double fit_gap_coefficient(const std::vector<GapPoint>& pts);

std::vector<double> default_lemma2_sweep();

// ---- vertical perturbation ----

struct VerticalPerturbation {
    double K = 0.0;
    double L = 0.0;
    double u = 1.0;
    double delta = 0.0;
    double eps = 0.0;
    int J = 2;

    GaussDerivMixture p1() const;  // gamma_K - eps D^3 gamma_{K-delta}
    GaussDerivMixture p2() const;  // sum_j eps^j D^{3j} gamma_{L-j delta}
    VerticalPerturbation with_eps(double e) const;
};

double stationary_K(double L, double u);     // (L+u)/(L-1); NoGaussianMax for L <= 1
double stationary_L(double K, double u);     // inverse map, needs K > 1
double stability_threshold(double u);        // u/((1+u)^{1/3}-1)
double default_delta(double K, double L, int J);

// largest 2^-k with both densities nonnegative, halved once
double select_eps(double K, double L, double delta, int J);
bool densities_nonnegative(const VerticalPerturbation& vp);

// Builds a valid perturbation; delta <= 0 picks the default, eps <= 0 runs the selection.
VerticalPerturbation make_vertical(double K, double L, double u, int J = 2, double delta = 0.0, double eps = 0.0);

// law of X1 when Z1 ~ N(0, N1) is split off: X1 + Z1 ~ p1()
GaussDerivMixture input_with_noise(const VerticalPerturbation& vp, double N1);

struct VerticalGap {
    double gaussian_value = 0.0;    // sup over K' of the Gaussian objective
    double base_value = 0.0;        // Gaussian objective at vp.K
    double perturbed_value = 0.0;   // objective at vp.eps
    double quadratic_coeff = 0.0;   // Richardson-extrapolated eps^2 coefficient
    double eps[3] = {0, 0, 0};
    double values[3] = {0, 0, 0};
};

// u h(P1*gamma_u*P2) + h(P1) - (1+u) h(P1*gamma_u)
double vertical_objective(const VerticalPerturbation& vp);
double vertical_objective_gaussian(double K, double L, double u);
VerticalGap vertical_gap(const VerticalPerturbation& vp);

// -integral (D^3 gamma_{K-d})^2/gamma_K + (1+u) integral (D^3 gamma_{K+u-d})^2/gamma_{K+u}, by quadrature
double condition54(double K, double u, double delta);
double condition54_closed(double K, double u, double delta);
// bisection root in K of condition54(., u, delta); delta fixed
double condition54_root(double u, double delta = 0.0, double xtol = 1e-12);

// ---- limiting functional h(X+Y) - h(X) - J(X)/2 ----

double limit_functional(double L, const GridDensity& x);
double limit_functional(double L, const GaussDerivMixture& x);
double limit_functional_pair(const GaussDerivMixture& x, const GaussDerivMixture& y);
double limit_functional_gaussian(double K, double L);

struct LimitGain {
    double K = 0.0;
    double gaussian_value = 0.0;
    double quadratic_coeff = 0.0;
    double predicted_coeff = 0.0;  // delta -> 0 value
    double eps[3] = {0, 0, 0};
    double values[3] = {0, 0, 0};
};

// Perturbs X = gamma_K - eps D^3 gamma_{K-delta} at K = L/(L-1). With co_perturb the budget
// variable Y is moved along sum_j eps^j D^{3j} gamma_{L-j delta} (variance stays L);
// otherwise Y stays gamma_L.
LimitGain limit_perturbation_gain(double L, bool co_perturb = true, int J = 2, double delta = 0.0);

}  // namespace zic

#endif
