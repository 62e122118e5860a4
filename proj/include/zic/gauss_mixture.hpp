#ifndef ZIC_GAUSS_MIXTURE_HPP
#define ZIC_GAUSS_MIXTURE_HPP

#include <vector>

namespace zic {

inline constexpr int kMaxOrder = 64;

// coeff * D^order gamma_{mean, variance}
struct GaussTerm {
    double coeff = 0.0;
    int order = 0;
    double variance = 1.0;
    double mean = 0.0;
};

// Finite signed combination of derivatives of Gaussian densities.
// Terms are kept sorted and merged; the algebra is closed under convolution.
class GaussDerivMixture {
public:
    GaussDerivMixture() = default;
    explicit GaussDerivMixture(std::vector<GaussTerm> terms);

    static GaussDerivMixture gaussian(double variance, double mean = 0.0);
    // sum_i w_i N(mu_i, v_i)
    static GaussDerivMixture location_mixture(const std::vector<double>& weights, const std::vector<double>& means,
                                              const std::vector<double>& variances);

    const std::vector<GaussTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    double mass() const;
    double max_variance() const;
    double min_mean() const;
    double max_mean() const;
    int max_order() const;

    double density(double x) const;
    // j-th derivative of the density
    double derivative(double x, int j) const;

    GaussDerivMixture operator+(const GaussDerivMixture& o) const;
    GaussDerivMixture operator-(const GaussDerivMixture& o) const;
    GaussDerivMixture operator*(double s) const;

    GaussDerivMixture differentiate(int j = 1) const;
    // law of a*X for a != 0
    GaussDerivMixture dilate(double a) const;
    // law of -X
    GaussDerivMixture reflect() const;
    GaussDerivMixture shift(double c) const;

    // min over [lo, hi] of density / gamma_{V}(x - c) with V the largest variance
    // and c the mass-weighted centre; negative iff the density dips below zero there.
    double min_relative_density(double lo, double hi, std::size_t n) const;

private:
    std::vector<GaussTerm> terms_;
};

GaussDerivMixture operator*(double s, const GaussDerivMixture& m);

GaussDerivMixture convolve(const GaussDerivMixture& a, const GaussDerivMixture& b);

double eval_density(const GaussDerivMixture& m, double x);

// D^k gamma_{mean, v}(x)
double gauss_deriv(int k, double v, double x, double mean = 0.0);

// probabilists' Hermite polynomial He_k(y)
double hermite_he(int k, double y);

// Polynomial factor of D^k gamma_v, generated by the Rodrigues recursion
// P_{k+1} = P_k' - x P_k / v.
class HermitePolynomial {
public:
    HermitePolynomial(int degree, double variance);
    int degree() const { return degree_; }
    double variance() const { return variance_; }
    // coefficient of x^j, j = 0..degree
    const std::vector<double>& coefficients() const { return coeffs_; }
    double leading_coefficient() const { return coeffs_.back(); }
    double operator()(double x) const;

private:
    int degree_;
    double variance_;
    std::vector<double> coeffs_;
};

// integral of (D^k gamma_K)^2 / gamma_K = k!/K^k
double hermite_weighted_norm(int k, double K);

// integral of (D^k gamma_a)^2 / gamma_b, closed form; needs 2b > a.
double hermite_overlap(int k, double a, double b);

// raw moments m_1..m_up_to
std::vector<double> moments(const GaussDerivMixture& m, int up_to);

double factorial(int n);

}  // namespace zic

#endif
