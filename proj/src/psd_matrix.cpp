#include "zic/psd_matrix.hpp"

#include "zic/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace zic {

SymEigen jacobi_eigen(const Eigen::MatrixXd& a_in, double tol) {
    const int n = int(a_in.rows());
    require(a_in.cols() == n, "jacobi_eigen needs a square matrix");
    Eigen::MatrixXd a = 0.5 * (a_in + a_in.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
    auto off = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };
    for (int sweep = 0; sweep < 100 && off() > tol * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) > a(j, j); });
    SymEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        out.values(k) = a(idx[k], idx[k]);
        Eigen::VectorXd col = v.col(idx[k]);
        Eigen::Index big = 0;
        col.cwiseAbs().maxCoeff(&big);
        if (col(big) < 0) col = -col;
        out.vectors.col(k) = col;
    }
    return out;
}

PsdMatrix::PsdMatrix(const Eigen::MatrixXd& m) {
    require(m.rows() == m.cols() && m.rows() >= 1, "PSD matrix must be square and nonempty");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        fail(ErrorKind::InvalidArgument, "matrix is not symmetric");
    m_ = 0.5 * (m + m.transpose());
    eig_ = jacobi_eigen(m_);
    if (eig_.values.minCoeff() < -1e-10) fail(ErrorKind::InvalidArgument, "matrix has a negative eigenvalue");
    if (eig_.values.minCoeff() < 0.0) {
        eig_.values = eig_.values.cwiseMax(0.0);
        m_ = eig_.vectors * eig_.values.asDiagonal() * eig_.vectors.transpose();
        m_ = 0.5 * (m_ + m_.transpose());
    }
}

PsdMatrix PsdMatrix::diag(const std::vector<double>& d) {
    Eigen::VectorXd v(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) v(Eigen::Index(i)) = d[i];
    return PsdMatrix(Eigen::MatrixXd(v.asDiagonal()));
}

PsdMatrix PsdMatrix::scalar(double s, int dim) { return PsdMatrix(s * Eigen::MatrixXd::Identity(dim, dim)); }

double log_det(const Eigen::MatrixXd& a) {
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (a + a.transpose()));
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const auto& l = llt.matrixL();
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double d = l(i, i);
        if (!(d > 0)) return -std::numeric_limits<double>::infinity();
        s += 2.0 * std::log(d);
    }
    return s;
}

Alignment decreasing_alignment(const PsdMatrix& m) {
    Eigen::MatrixXd d = m.eigenvalues().asDiagonal();
    return Alignment{PsdMatrix(d), m.eigenvectors()};
}

Alignment increasing_alignment(const PsdMatrix& m) {
    const int n = m.dim();
    Eigen::VectorXd vals = m.eigenvalues().reverse();
    Eigen::MatrixXd q = m.eigenvectors().rowwise().reverse();
    return Alignment{PsdMatrix(Eigen::MatrixXd(vals.asDiagonal())), q.leftCols(n)};
}

double commutator_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a * b - b * a).norm(); }

bool loewner_leq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
    return jacobi_eigen(b - a).values.minCoeff() >= -tol;
}

}  // namespace zic
