#pragma once

#include <Eigen/Dense>

namespace rsnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Positive diagonal matrix diag(d), stored as its diagonal.
class DiagonalScaling {
public:
    DiagonalScaling() = default;
    /// Throws InvalidArgument unless every entry is finite and strictly positive.
    explicit DiagonalScaling(Vector d);

    const Vector& values() const noexcept { return d_; }
    Eigen::Index size() const noexcept { return d_.size(); }
    double operator[](Eigen::Index i) const { return d_[i]; }
    Matrix as_matrix() const { return d_.asDiagonal(); }

private:
    Vector d_;
};

/// Throws InvalidArgument if M is empty, not square, or holds non-finite entries.
void require_square(const Matrix& m, const char* what);

/// True iff every off-diagonal entry is <= 0.
bool is_z_pattern(const Matrix& m);

/// True iff M is a Z-matrix and M d = 1 has a solution with d > 0.
///
/// For a Z-matrix this is equivalent to positive stability. A singular M is
/// reported as "not an M-matrix" rather than raised.
bool is_m_matrix(const Matrix& m);

/// Returns d > 0 with diag(d) M diag(d)^-1 strictly column-diagonally dominant,
/// built from M^T d = 1. Throws NotMMatrix.
DiagonalScaling column_dominance_scaling(const Matrix& m);

/// Returns q > 0 with diag(q) M + M^T diag(q) positive definite.
///
/// Built as q_i = v_i / w_i with M w = 1 and M^T v = 1, then verified by a
/// Cholesky factorization. Throws NotMMatrix, or CertificateFailure if the
/// verification fails.
DiagonalScaling diagonal_lyapunov_scaling(const Matrix& m);

/// Cholesky test. Throws NotSymmetric if |M_ij - M_ji| exceeds 1e-12 relative
/// to max(1, max |M|).
bool is_spd(const Matrix& m);

/// min_j (M_jj - sum_{i != j} |M_ij|) / M_jj; positive iff M is strictly
/// column-diagonally dominant with a positive diagonal.
double column_dominance_margin(const Matrix& m);

/// Strict column dominance with the 1e-12 slack on the unit-diagonal margin.
bool is_strictly_column_dominant(const Matrix& m);

/// Solves M x = b by partial-pivoting LU. Throws SingularMatrix when M is
/// numerically singular or the solution is not finite.
Vector lu_solve(const Matrix& m, const Vector& b);

/// Smallest eigenvalue of a symmetric matrix.
double min_symmetric_eigenvalue(const Matrix& m);

/// Induced 2-norm (largest singular value).
double spectral_norm(const Matrix& m);

}  // namespace rsnet
