#ifndef ZIC_PSD_MATRIX_HPP
#define ZIC_PSD_MATRIX_HPP

#include <Eigen/Dense>

#include <vector>

namespace zic {

struct SymEigen {
    Eigen::VectorXd values;   // decreasing
    Eigen::MatrixXd vectors;  // columns; largest-magnitude entry of each made positive
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is below tol * ||A||.
SymEigen jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-12);

// symmetric to 1e-12, eigenvalues >= -1e-10 (clamped to zero)
class PsdMatrix {
public:
    PsdMatrix() = default;
    explicit PsdMatrix(const Eigen::MatrixXd& m);

    static PsdMatrix diag(const std::vector<double>& d);
    static PsdMatrix scalar(double s, int dim = 1);

    int dim() const { return int(m_.rows()); }
    const Eigen::MatrixXd& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }
    const Eigen::VectorXd& eigenvalues() const { return eig_.values; }
    const Eigen::MatrixXd& eigenvectors() const { return eig_.vectors; }
    double max_eigenvalue() const { return eig_.values(0); }
    double min_eigenvalue() const { return eig_.values(eig_.values.size() - 1); }
    double trace() const { return m_.trace(); }

private:
    Eigen::MatrixXd m_;
    SymEigen eig_;
};

// ln det, -inf when singular or indefinite
double log_det(const Eigen::MatrixXd& a);

struct Alignment {
    PsdMatrix aligned;          // diagonal, eigenvalues ordered
    Eigen::MatrixXd conjugator; // Q with Q^T M Q = aligned
};

Alignment decreasing_alignment(const PsdMatrix& m);
Alignment increasing_alignment(const PsdMatrix& m);

double commutator_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
// a <= b in the Loewner order, up to tol
bool loewner_leq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol = 1e-10);

}  // namespace zic

#endif
