#ifndef ZIC_ENTROPY_HPP
#define ZIC_ENTROPY_HPP

#include "zic/gauss_mixture.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace zic {

// weight * N(mean, variance) beyond the grid edge
struct GaussianTail {
    double weight = 0.0;
    double mean = 0.0;
    double variance = 1.0;
};

struct GridDensity {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 0;
    std::vector<double> values;
    std::optional<GaussianTail> left_tail;
    std::optional<GaussianTail> right_tail;
    // exact p' at the nodes when known (mixture tabulation); empty otherwise
    std::vector<double> slope;

    double step() const { return (hi - lo) / double(n - 1); }
    double x(std::size_t i) const { return lo + step() * double(i); }
};

inline constexpr double kMassTolerance = 1e-7;
inline constexpr std::size_t kMinEntropyPoints = 1024;
inline constexpr std::size_t kDefaultGridPoints = 8192;

// trapezoid mass plus analytic tail mass
double grid_mass(const GridDensity& p);
GridDensity normalized(GridDensity p);

double differential_entropy(const GridDensity& p);
double fisher_information(const GridDensity& p);

// [min mean - 12 sd, max mean + 12 sd] of the widest term
std::pair<double, double> default_window(const GaussDerivMixture& m, double extra = 0.0);

GridDensity mixture_to_grid(const GaussDerivMixture& m, double lo, double hi, std::size_t n);
GridDensity mixture_to_grid(const GaussDerivMixture& m, std::size_t n = kDefaultGridPoints);

// h of a mixture density on its default window
double entropy(const GaussDerivMixture& m, std::size_t n = kDefaultGridPoints);
double fisher_information(const GaussDerivMixture& m, std::size_t n = kDefaultGridPoints);

// p * (law of sqrt(t) Y), Y ~ q, by direct quadrature at each node of p's grid
GridDensity convolve_grid(const GridDensity& p, const GaussDerivMixture& q, double t);

// integral of p^{(k)} ln p
double log_derivative_integral(const GridDensity& p, int k);
double log_derivative_integral(const GaussDerivMixture& p, int k);

struct EntropyExpansion {
    double c1 = 0.0;
    double c15 = 0.0;
    double residual_slope = 0.0;
    // higher-order fit terms (t^2, t^{5/2}) that absorb the O(t^2) remainder
    double c2 = 0.0;
    double c25 = 0.0;
    std::vector<double> t;
    std::vector<double> dh;        // h(p_t) - h(p)
    std::vector<double> residual;  // dh - c1 t - c15 t^{3/2}
};

// Leading coefficients predicted for h(X + sqrt(t) Y) - h(X):
// c1 = m2 (-1/2 int p'' ln p), c15 = m3 (1/6 int p''' ln p).
struct ExpansionPrediction {
    double c1 = 0.0;
    double c15 = 0.0;
    double int_p2_lnp = 0.0;
    double int_p3_lnp = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
};

ExpansionPrediction lemma1_prediction(const GaussDerivMixture& p, const GaussDerivMixture& q);
ExpansionPrediction lemma1_prediction(const GridDensity& p, const GaussDerivMixture& q);

// Fits h(p_t) - h(p) over t_grid; throws FitRejected when the residual slope is not 2 +- 0.25.
EntropyExpansion lemma1_expansion(const GridDensity& p, const GaussDerivMixture& q, const std::vector<double>& t_grid);
EntropyExpansion lemma1_expansion(const GaussDerivMixture& p, const GaussDerivMixture& q,
                                  const std::vector<double>& t_grid);

// fit only, no acceptance check
EntropyExpansion fit_expansion(const std::vector<double>& t, const std::vector<double>& dh);

}  // namespace zic

#endif
