#ifndef ZIC_HK_REGION_HPP
#define ZIC_HK_REGION_HPP

#include "zic/envelope.hpp"
#include "zic/psd_matrix.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace zic {

// The psi/phi/f/g family uses u for the second noise variance; N2 is only read by constant_power_gap.
struct HKParams {
    double u = 1.0;
    double N1 = 0.0;
    double N2 = 1.0;
    double q1 = 1.0;
    double q2 = 1.0;
};

// u lndet(K+N1+u+L) + lndet(K+N1) - (u+1) lndet(K+N1+u)
double psi(const PsdMatrix& K, const PsdMatrix& L, double u, double N1);
double psi(double K, double L, double u, double N1);
// (u+1) ln(u+L) - ln L - (u+1) ln(u+1), the value at K = (u+L)/(L-1), N1 = 0
double psi_stationary_value(double L, double u);

struct PhiResult {
    double value = 0.0;
    PsdMatrix argmax;
    bool exact = true;  // false when projected gradient ascent was used
};

// sup over 0 <= K <= J; ties broken toward the smaller K
double phi_argmax(double J, double L, double u, double N1);
double phi(double J, double L, double u, double N1);
PhiResult phi(const PsdMatrix& J, const PsdMatrix& L, double u, double N1);

// ln(J+N1+u+L) + phi(J,L)
double f1_objective(double J, double L, const HKParams& p);
// nondecreasing in both arguments, so the sup sits at the corner
double f1(double q1, double q2, const HKParams& p);

struct G1Result {
    double value = 0.0;
    double f1 = 0.0;
    std::vector<SupportPoint> support;
    int n = 0;
    double x_max = 0.0;
    double y_max = 0.0;
};

// upper concave envelope of f1 tabulated on [0, margin q1] x [0, margin q2] with n steps per side
G1Result g1(double q1, double q2, const HKParams& p, int n = 256, double margin = 4.0);

// The grid envelope never exceeds the true one, so any gap above round-off already certifies f1 < g1.
inline constexpr double kApplicabilityTolerance = 1e-10;

struct Lemma5Result {
    double J = 0.0;
    double L = 0.0;
    double K = 0.0;
    double bound = 0.0;  // 1 + sqrt(1+u)
    bool bound_holds = false;
    int case_label = 2;
    double f1 = 0.0;
    double g1 = 0.0;
};

// NotApplicable when g1 exceeds f1 by more than tol at (J, L)
Lemma5Result lemma5_check(double J, double L, const HKParams& p, double tol = kApplicabilityTolerance, int n = 256);
// case analysis and bound only, no envelope
Lemma5Result lemma5_classify(double J, double L, const HKParams& p);

struct Theorem4Sample {
    double q1 = 0.0;
    double q2 = 0.0;
    bool applicable = false;
    double envelope_gap = 0.0;  // g - f at the sample
    std::vector<double> J;      // per-coordinate powers of the maximizer
    std::vector<double> L;
    std::vector<double> K;
    double max_eigenvalue = 0.0;  // of K + N1
    bool bound_holds = true;
};

struct Theorem4Report {
    int d = 1;
    double bound = 0.0;
    std::vector<Theorem4Sample> samples;
    int applicable = 0;
    int violations = 0;
    bool heuristic_certificate = false;  // d = 2 uses the aligned tensorization check
};

// (q1, q2) drawn uniformly from (0, p.q1] x (0, p.q2]
Theorem4Report theorem4_audit(int d, const HKParams& p, int samples, std::uint64_t seed = 0, int n = 64);

// f_2 on an aligned diagonal split: sup over a1+a2 = q1, b1+b2 = q2 of f1(a1,b1) + f1(a2,b2)
struct F2Split {
    double value = 0.0;
    double a[2] = {0, 0};
    double b[2] = {0, 0};
};

struct TensorCheck {
    double q1 = 0.0;
    double q2 = 0.0;
    double g2 = 0.0;        // at (2 q1, 2 q2)
    double twice_g1 = 0.0;  // 2 g1(q1, q2) on the same lattice
    double f2 = 0.0;        // at (2 q1, 2 q2)
};

// lattice step 4 q / n shared by both sides
TensorCheck tensorization_check(double q1, double q2, const HKParams& p, int n = 64);

struct ConstantPowerGap {
    double gaussian_value = 0.0;
    double lower_witness = 0.0;
    double gap = 0.0;
    double c = 0.0;      // Psi at the non-Gaussian pair
    double A = 0.0;      // mixing variance
    double slack = 0.0;  // Gaussian-entropy bound minus h(X1+X2+Z1+Z2)
    double t = 0.0;      // recipe time parameter used
    double scale = 0.0;  // variance scale from recipe units
    double q1 = 0.0;
    double q2 = 0.0;
};

// u must be 1 and N1 > 0; A chosen by doubling until slack < c/4 when absent
ConstantPowerGap constant_power_gap(const HKParams& p, std::optional<double> A = std::nullopt);

struct Conjecture2Cell {
    double u = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;
    double f1 = 0.0;
    double g1 = 0.0;
    bool f1_eq_g1 = false;
    double K = 0.0;  // phi-argmax at (q1, q2)
    bool grid_too_small = false;
};

// u from u_grid, (q1, q2) over q_grid x q_grid
std::vector<Conjecture2Cell> conjecture2_map(const std::vector<double>& u_grid, const std::vector<double>& q_grid,
                                             const HKParams& p, int n = 128);

// lndet of the decreasing+increasing aligned pair minus lndet(K+L)
double alignment_slack(const PsdMatrix& K, const PsdMatrix& L);
// d/ds lndet(K + Q_s^T L Q_s) at s=0, Q_s the Cayley transform of s H, central difference
double rotation_derivative(const Eigen::MatrixXd& K, const Eigen::MatrixXd& L, const Eigen::MatrixXd& H,
                           double h = 1e-5);

}  // namespace zic

#endif
