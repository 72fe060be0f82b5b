#include "rsnet/matrixlab.hpp"

#include "rsnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rsnet {

namespace {

constexpr double kDominanceSlack = 1e-12;
constexpr double kSymmetryTol = 1e-12;
constexpr double kSingularRcond = 1e-14;

}  // namespace

DiagonalScaling::DiagonalScaling(Vector d) : d_(std::move(d)) {
    for (Eigen::Index i = 0; i < d_.size(); ++i) {
        if (!std::isfinite(d_[i]) || d_[i] <= 0.0) {
            throw InvalidArgument("diagonal scaling entry " + std::to_string(i) +
                                  " is not a positive finite value");
        }
    }
}

void require_square(const Matrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw InvalidArgument(std::string(what) + ": expected a non-empty square matrix");
    }
    if (!m.allFinite()) {
        throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
    }
}

Vector lu_solve(const Matrix& m, const Vector& b) {
    if (m.rows() != m.cols() || m.rows() != b.size()) {
        throw DimensionMismatch("lu_solve: incompatible dimensions");
    }
    Eigen::PartialPivLU<Matrix> lu(m);
    if (!(lu.rcond() > kSingularRcond)) {
        throw SingularMatrix("lu_solve: matrix is numerically singular");
    }
    Vector x = lu.solve(b);
    if (!x.allFinite()) {
        throw SingularMatrix("lu_solve: solution is not finite");
    }
    return x;
}

bool is_z_pattern(const Matrix& m) {
    require_square(m, "is_z_pattern");
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (i != j && m(i, j) > 0.0) return false;
        }
    }
    return true;
}

bool is_m_matrix(const Matrix& m) {
    if (!is_z_pattern(m)) return false;
    Vector d;
    try {
        d = lu_solve(m, Vector::Ones(m.rows()));
    } catch (const SingularMatrix&) {
        return false;
    }
    return (d.array() > 0.0).all();
}

DiagonalScaling column_dominance_scaling(const Matrix& m) {
    if (!is_m_matrix(m)) {
        throw NotMMatrix("column_dominance_scaling: input is not an M-matrix");
    }
    Vector d = lu_solve(m.transpose(), Vector::Ones(m.rows()));
    if (!(d.array() > 0.0).all()) {
        throw NotMMatrix("column_dominance_scaling: M^T d = 1 has a non-positive solution");
    }
    return DiagonalScaling(std::move(d));
}

DiagonalScaling diagonal_lyapunov_scaling(const Matrix& m) {
    if (!is_m_matrix(m)) {
        throw NotMMatrix("diagonal_lyapunov_scaling: input is not an M-matrix");
    }
    const Vector ones = Vector::Ones(m.rows());
    const Vector w = lu_solve(m, ones);
    const Vector v = lu_solve(m.transpose(), ones);
    if (!(w.array() > 0.0).all() || !(v.array() > 0.0).all()) {
        throw NotMMatrix("diagonal_lyapunov_scaling: non-positive dominance vector");
    }
    Vector q = v.cwiseQuotient(w);
    const Matrix sym = q.asDiagonal() * m + m.transpose() * q.asDiagonal();
    if (!is_spd(sym)) {
        throw CertificateFailure("diagonal_lyapunov_scaling: Q M + M^T Q failed the Cholesky check");
    }
    return DiagonalScaling(std::move(q));
}

bool is_spd(const Matrix& m) {
    require_square(m, "is_spd");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw NotSymmetric("is_spd: matrix is not symmetric");
    }
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) return false;
    return (llt.matrixLLT().diagonal().array() > 0.0).all();
}

double column_dominance_margin(const Matrix& m) {
    require_square(m, "column_dominance_margin");
    double margin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double diag = m(j, j);
        if (diag <= 0.0) return -std::numeric_limits<double>::infinity();
        const double off = m.col(j).cwiseAbs().sum() - std::abs(diag);
        margin = std::min(margin, (diag - off) / diag);
    }
    return margin;
}

bool is_strictly_column_dominant(const Matrix& m) {
    return column_dominance_margin(m) >= kDominanceSlack;
}

double min_symmetric_eigenvalue(const Matrix& m) {
    require_square(m, "min_symmetric_eigenvalue");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double spectral_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

}  // namespace rsnet
