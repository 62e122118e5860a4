#include "zic/gauss_mixture.hpp"

#include "zic/error.hpp"
#include "zic/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace zic {

namespace {

bool close_rel(double a, double b) {
    // a few ulps: absorbs non-associativity of sums like K+(L-d) vs (K-d)+L
    double scale = std::max(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= 8.0 * std::numeric_limits<double>::epsilon() * scale;
}

bool same_kernel(const GaussTerm& a, const GaussTerm& b) {
    return a.order == b.order && close_rel(a.variance, b.variance) && close_rel(a.mean, b.mean);
}

bool term_less(const GaussTerm& a, const GaussTerm& b) {
    if (a.order != b.order) return a.order < b.order;
    if (a.variance != b.variance) return a.variance < b.variance;
    return a.mean < b.mean;
}

void validate(const GaussTerm& t) {
    if (!(t.variance > 0.0) || !std::isfinite(t.variance))
        fail(ErrorKind::InvalidArgument, "term variance must be positive, got " + std::to_string(t.variance));
    if (t.order < 0 || t.order > kMaxOrder)
        fail(ErrorKind::InvalidArgument, "term order out of range: " + std::to_string(t.order));
    if (!std::isfinite(t.coeff) || !std::isfinite(t.mean)) fail(ErrorKind::InvalidArgument, "non-finite term");
}

std::vector<GaussTerm> normalize_terms(std::vector<GaussTerm> in) {
    for (const auto& t : in) validate(t);
    std::sort(in.begin(), in.end(), term_less);
    std::vector<GaussTerm> out;
    out.reserve(in.size());
    for (const auto& t : in) {
        bool merged = false;
        // near-equal variances sort adjacently within an order, but means may interleave
        for (auto it = out.rbegin(); it != out.rend() && it->order == t.order; ++it) {
            if (same_kernel(*it, t)) {
                it->coeff += t.coeff;
                merged = true;
                break;
            }
            if (!close_rel(it->variance, t.variance)) break;
        }
        if (!merged) out.push_back(t);
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const GaussTerm& t) { return t.coeff == 0.0; }), out.end());
    return out;
}

// E[(mu + s Z)^j]
double shifted_normal_moment(double mu, double var, int j) {
    double total = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= j; ++i) {
        if (i > 0) binom = binom * double(j - i + 1) / double(i);
        if (i % 2) continue;
        double ez = 1.0;  // (i-1)!!
        for (int r = i - 1; r > 0; r -= 2) ez *= r;
        total += binom * std::pow(mu, j - i) * std::pow(var, i / 2) * ez;
    }
    return total;
}

}  // namespace

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double hermite_he(int k, double y) {
    if (k == 0) return 1.0;
    double hm = 1.0, h = y;
    for (int n = 1; n < k; ++n) {
        double hp = y * h - n * hm;
        hm = h;
        h = hp;
    }
    return h;
}

double gauss_deriv(int k, double v, double x, double mean) {
    double s = std::sqrt(v);
    double y = (x - mean) / s;
    double g = std::exp(-0.5 * y * y) / (s * std::sqrt(2.0 * kPi));
    if (g == 0.0) return 0.0;
    double sign = (k % 2) ? -1.0 : 1.0;
    return sign * std::pow(s, -k) * hermite_he(k, y) * g;
}

GaussDerivMixture::GaussDerivMixture(std::vector<GaussTerm> terms) : terms_(normalize_terms(std::move(terms))) {}

GaussDerivMixture GaussDerivMixture::gaussian(double variance, double mean) {
    return GaussDerivMixture({GaussTerm{1.0, 0, variance, mean}});
}

GaussDerivMixture GaussDerivMixture::location_mixture(const std::vector<double>& weights, const std::vector<double>& means,
                                                      const std::vector<double>& variances) {
    require(weights.size() == means.size() && means.size() == variances.size(), "location_mixture size mismatch");
    std::vector<GaussTerm> t;
    for (std::size_t i = 0; i < weights.size(); ++i) t.push_back({weights[i], 0, variances[i], means[i]});
    return GaussDerivMixture(std::move(t));
}

double GaussDerivMixture::mass() const {
    double m = 0.0;
    for (const auto& t : terms_)
        if (t.order == 0) m += t.coeff;
    return m;
}

double GaussDerivMixture::max_variance() const {
    double v = 0.0;
    for (const auto& t : terms_) v = std::max(v, t.variance);
    return v;
}

double GaussDerivMixture::min_mean() const {
    double m = terms_.empty() ? 0.0 : terms_.front().mean;
    for (const auto& t : terms_) m = std::min(m, t.mean);
    return m;
}

double GaussDerivMixture::max_mean() const {
    double m = terms_.empty() ? 0.0 : terms_.front().mean;
    for (const auto& t : terms_) m = std::max(m, t.mean);
    return m;
}

int GaussDerivMixture::max_order() const {
    int k = 0;
    for (const auto& t : terms_) k = std::max(k, t.order);
    return k;
}

double GaussDerivMixture::density(double x) const { return derivative(x, 0); }

double GaussDerivMixture::derivative(double x, int j) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coeff * gauss_deriv(t.order + j, t.variance, x, t.mean);
    return s;
}

GaussDerivMixture GaussDerivMixture::operator+(const GaussDerivMixture& o) const {
    auto t = terms_;
    t.insert(t.end(), o.terms_.begin(), o.terms_.end());
    return GaussDerivMixture(std::move(t));
}

GaussDerivMixture GaussDerivMixture::operator-(const GaussDerivMixture& o) const { return *this + o * -1.0; }

GaussDerivMixture GaussDerivMixture::operator*(double s) const {
    auto t = terms_;
    for (auto& x : t) x.coeff *= s;
    return GaussDerivMixture(std::move(t));
}

GaussDerivMixture operator*(double s, const GaussDerivMixture& m) { return m * s; }

GaussDerivMixture GaussDerivMixture::differentiate(int j) const {
    auto t = terms_;
    for (auto& x : t) x.order += j;
    return GaussDerivMixture(std::move(t));
}

GaussDerivMixture GaussDerivMixture::dilate(double a) const {
    require(a != 0.0 && std::isfinite(a), "dilate needs a nonzero factor");
    if (a < 0) return reflect().dilate(-a);
    auto t = terms_;
    for (auto& x : t) {
        x.coeff *= std::pow(a, x.order);
        x.variance *= a * a;
        x.mean *= a;
    }
    return GaussDerivMixture(std::move(t));
}

GaussDerivMixture GaussDerivMixture::reflect() const {
    auto t = terms_;
    for (auto& x : t) {
        if (x.order % 2) x.coeff = -x.coeff;
        x.mean = -x.mean;
    }
    return GaussDerivMixture(std::move(t));
}

GaussDerivMixture GaussDerivMixture::shift(double c) const {
    auto t = terms_;
    for (auto& x : t) x.mean += c;
    return GaussDerivMixture(std::move(t));
}

double GaussDerivMixture::min_relative_density(double lo, double hi, std::size_t n) const {
    require(n >= 2 && hi > lo, "min_relative_density needs a proper window");
    const double V = max_variance();
    double c = 0.0, w = 0.0;
    for (const auto& t : terms_)
        if (t.order == 0) {
            c += t.coeff * t.mean;
            w += t.coeff;
        }
    c = (w != 0.0) ? c / w : 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double x = lo + (hi - lo) * double(i) / double(n - 1);
        double r = 0.0;
        for (const auto& t : terms_) {
            double s = std::sqrt(t.variance);
            double y = (x - t.mean) / s;
            double expo = -0.5 * y * y + 0.5 * (x - c) * (x - c) / V;
            expo = std::min(expo, 700.0);
            double sign = (t.order % 2) ? -1.0 : 1.0;
            r += t.coeff * sign * std::pow(s, -t.order) * hermite_he(t.order, y) * std::sqrt(V / t.variance) *
                 std::exp(expo);
        }
        best = std::min(best, r);
    }
    return best;
}

GaussDerivMixture convolve(const GaussDerivMixture& a, const GaussDerivMixture& b) {
    std::vector<GaussTerm> t;
    t.reserve(a.size() * b.size());
    for (const auto& x : a.terms())
        for (const auto& y : b.terms()) {
            require(x.order + y.order <= kMaxOrder, "convolution exceeds the maximum derivative order");
            t.push_back({x.coeff * y.coeff, x.order + y.order, x.variance + y.variance, x.mean + y.mean});
        }
    return GaussDerivMixture(std::move(t));
}

double eval_density(const GaussDerivMixture& m, double x) { return m.density(x); }

HermitePolynomial::HermitePolynomial(int degree, double variance) : degree_(degree), variance_(variance) {
    require(degree >= 0 && degree <= kMaxOrder, "Hermite degree out of range");
    require(variance > 0.0, "Hermite variance must be positive");
    std::vector<double> p{1.0};
    for (int k = 0; k < degree; ++k) {
        std::vector<double> q(p.size() + 1, 0.0);
        for (std::size_t j = 1; j < p.size(); ++j) q[j - 1] += double(j) * p[j];
        for (std::size_t j = 0; j < p.size(); ++j) q[j + 1] -= p[j] / variance;
        p = std::move(q);
    }
    coeffs_ = std::move(p);
}

double HermitePolynomial::operator()(double x) const {
    double s = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s = s * x + *it;
    return s;
}

double hermite_weighted_norm(int k, double K) {
    require(k >= 0 && k <= kMaxOrder, "order out of range");
    require(K > 0.0, "K must be positive");
    return factorial(k) / std::pow(K, k);
}

double hermite_overlap(int k, double a, double b) {
    require(a > 0 && b > 0 && 2.0 * b > a, "hermite_overlap needs 2b > a > 0");
    const long double c = (long double)a * b / (2.0L * b - a);
    const long double rho2 = c / a;
    const long double rho = std::sqrt(rho2);
    // He_k(rho z) = sum_i rho^{k-2i} (rho^2-1)^i k!/(i!(k-2i)! 2^i) He_{k-2i}(z)
    long double total = 0.0L;
    for (int i = 0; 2 * i <= k; ++i) {
        long double coef = std::pow(rho, (long double)(k - 2 * i)) * std::pow(rho2 - 1.0L, (long double)i) *
                           std::tgamma((long double)k + 1) /
                           (std::tgamma((long double)i + 1) * std::tgamma((long double)(k - 2 * i) + 1) *
                            std::pow(2.0L, (long double)i));
        total += coef * coef * std::tgamma((long double)(k - 2 * i) + 1);
    }
    long double pref = std::pow((long double)a, (long double)-k) * std::sqrt((long double)b * c) / a;
    return double(pref * total);
}

std::vector<double> moments(const GaussDerivMixture& m, int up_to) {
    require(up_to >= 0, "moment order must be nonnegative");
    std::vector<double> out(up_to);
    for (int n = 1; n <= up_to; ++n) {
        double s = 0.0;
        for (const auto& t : m.terms()) {
            if (t.order > n) continue;
            double falling = 1.0;  // n!/(n-m)!
            for (int r = 0; r < t.order; ++r) falling *= double(n - r);
            double sign = (t.order % 2) ? -1.0 : 1.0;
            s += t.coeff * sign * falling * shifted_normal_moment(t.mean, t.variance, n - t.order);
        }
        out[n - 1] = s;
    }
    return out;
}

}  // namespace zic
