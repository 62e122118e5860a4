#ifndef ZIC_HESSIAN_HPP
#define ZIC_HESSIAN_HPP

#include "zic/psd_matrix.hpp"

#include <map>
#include <optional>
#include <vector>

namespace zic {

// A_alpha (or B_alpha) of a direction sum_alpha A_alpha D^alpha gamma_K / gamma_K
struct HermiteCoeffVector {
    std::map<int, double> coeffs;
    double base_variance = 1.0;

    double at(int alpha) const;
};

enum class Stability { stable, unstable, critical };
const char* stability_name(Stability s);

struct HessianReport {
    std::map<int, double> per_alpha_terms;
    double total = 0.0;
    Stability classification = Stability::stable;
    bool b1_zeroed = false;  // a nonzero B_1 was projected out
};

inline constexpr double kStationaryTolerance = 1e-9;
inline constexpr double kCriticalBand = 1e-9;

// I_1 = -2uA1^2/S^2 - 2A1^2/K^2 + 2(1+u)A1^2/(K+u)^2, S = K+u+L; for alpha >= 2
// I_alpha/(alpha+1)! = [-u A^2 - u B^2 - 2u A B]/S^{alpha+1} - A^2/K^{alpha+1} + (1+u)A^2/(K+u)^{alpha+1}.
HessianReport hessian_quadratic_form(double K, double L, double u, const HermiteCoeffVector& A,
                                     const HermiteCoeffVector& B);

// per-alpha term with B_alpha = -A_alpha: (alpha+1)! A^2 [(1+u)/(K+u)^{alpha+1} - 1/K^{alpha+1}]
double best_alpha_term(double K, double u, int alpha, double A = 1.0);

Stability stability_classify(double K, double u);

struct Theorem5Result {
    std::optional<double> epsilon;  // min(eps1, eps2); empty when the hypothesis fails
    double eps1 = 0.0;
    double eps2 = 0.0;
    double rayleigh_min = 0.0;       // minimum ratio on the second-order coordinates
    double worst_cubic_ratio = 0.0;  // (1+u) max_i (k_i/(k_i+u))^3
    std::vector<double> k_eigenvalues;
    std::optional<double> offending_eigenvalue;
};

// K must equal (L-I)^{-1}(L+uI) (NotStationary otherwise); K and L must commute.
Theorem5Result theorem5_epsilon(const PsdMatrix& K, const PsdMatrix& L, double u);
// same, but throws HypothesisError instead of returning an empty epsilon
double theorem5_epsilon_strict(const PsdMatrix& K, const PsdMatrix& L, double u);
// (L-I)^{-1}(L+uI)
PsdMatrix theorem5_maximizer(const PsdMatrix& L, double u);

struct PhaseCell {
    double u = 0.0;
    double L = 0.0;
    double K = 0.0;
    Stability classification = Stability::stable;
};

std::vector<PhaseCell> phase_diagram(const std::vector<double>& u_grid, const std::vector<double>& L_grid);

}  // namespace zic

#endif
