#include "rsnet/simplex.hpp"

#include "rsnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace rsnet {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kCostTol = 1e-11;

// Tableau layout: rows 0..m-1 are constraints, row m is the objective
// (reduced costs, with -objective value in the rhs column).
class Tableau {
public:
    Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Matrix::Zero(rows + 1, cols + 1)), basis_(rows) {}

    Matrix& data() { return t_; }
    std::vector<Eigen::Index>& basis() { return basis_; }
    Eigen::Index rows() const { return t_.rows() - 1; }
    Eigen::Index cols() const { return t_.cols() - 1; }
    double rhs(Eigen::Index r) const { return t_(r, t_.cols() - 1); }

    void pivot(Eigen::Index row, Eigen::Index col) {
        t_.row(row) /= t_(row, col);
        for (Eigen::Index r = 0; r < t_.rows(); ++r) {
            if (r == row) continue;
            const double factor = t_(r, col);
            if (factor != 0.0) t_.row(r) -= factor * t_.row(row);
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    // Sets the objective row from cost vector c (length cols()).
    void set_objective(const Vector& c) {
        const Eigen::Index m = rows();
        t_.row(m).setZero();
        t_.row(m).head(cols()) = c.transpose();
        for (Eigen::Index r = 0; r < m; ++r) {
            const double cb = c[basis_[static_cast<std::size_t>(r)]];
            if (cb != 0.0) t_.row(m) -= cb * t_.row(r);
        }
    }

    // Runs Bland's rule over columns allowed by `allowed`; returns pivot count.
    long optimize(const std::vector<bool>& allowed, long guard, long& pivots) {
        const Eigen::Index m = rows();
        const double scale = std::max(1.0, t_.row(m).head(cols()).cwiseAbs().maxCoeff());
        while (true) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < cols(); ++j) {
                if (allowed[static_cast<std::size_t>(j)] && t_(m, j) < -kCostTol * scale) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return pivots;

            Eigen::Index leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (Eigen::Index r = 0; r < m; ++r) {
                const double a = t_(r, enter);
                if (a <= kPivotTol) continue;
                const double ratio = std::max(0.0, rhs(r)) / a;
                if (ratio < best_ratio - 1e-14 ||
                    (std::abs(ratio - best_ratio) <= 1e-14 && leave >= 0 &&
                     basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
            if (leave < 0) throw SolverFailure("simplex: problem is unbounded");
            pivot(leave, enter);
            if (++pivots > guard) throw SolverFailure("simplex: pivot guard exceeded");
        }
    }

private:
    Matrix t_;
    std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult simplex_minimize(const Vector& c, const Matrix& a, const Vector& b) {
    const Eigen::Index m = a.rows();
    const Eigen::Index nv = a.cols();
    if (c.size() != nv || b.size() != m) throw DimensionMismatch("simplex: inconsistent dimensions");
    if (!a.allFinite() || !b.allFinite() || !c.allFinite()) {
        throw InvalidArgument("simplex: non-finite problem data");
    }

    Eigen::Index n_art = 0;
    for (Eigen::Index r = 0; r < m; ++r) {
        if (b[r] < 0.0) ++n_art;
    }
    const Eigen::Index slack0 = nv;
    const Eigen::Index art0 = nv + m;
    const Eigen::Index total = nv + m + n_art;

    Tableau tab(m, total);
    Matrix& t = tab.data();
    Eigen::Index next_art = art0;
    for (Eigen::Index r = 0; r < m; ++r) {
        const double sign = b[r] < 0.0 ? -1.0 : 1.0;
        t.row(r).head(nv) = sign * a.row(r);
        t(r, slack0 + r) = sign;
        t(r, total) = sign * b[r];
        if (b[r] < 0.0) {
            t(r, next_art) = 1.0;
            tab.basis()[static_cast<std::size_t>(r)] = next_art++;
        } else {
            tab.basis()[static_cast<std::size_t>(r)] = slack0 + r;
        }
    }

    const long guard = 200 * static_cast<long>(m + total) + 1000;
    long pivots = 0;
    std::vector<bool> allowed(static_cast<std::size_t>(total), true);

    if (n_art > 0) {
        Vector phase1 = Vector::Zero(total);
        phase1.tail(n_art).setOnes();
        tab.set_objective(phase1);
        tab.optimize(allowed, guard, pivots);
        if (-tab.rhs(m) > 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff())) {
            throw SolverFailure("simplex: problem is infeasible");
        }
        // Drive zero-level artificials out of the basis where possible.
        for (Eigen::Index r = 0; r < m; ++r) {
            if (tab.basis()[static_cast<std::size_t>(r)] < art0) continue;
            for (Eigen::Index j = 0; j < art0; ++j) {
                if (std::abs(t(r, j)) > 1e-9) {
                    tab.pivot(r, j);
                    break;
                }
            }
        }
        for (Eigen::Index j = art0; j < total; ++j) allowed[static_cast<std::size_t>(j)] = false;
    }

    Vector cost = Vector::Zero(total);
    cost.head(nv) = c;
    tab.set_objective(cost);
    tab.optimize(allowed, guard, pivots);

    LpResult out;
    out.x = Vector::Zero(nv);
    for (Eigen::Index r = 0; r < m; ++r) {
        const Eigen::Index var = tab.basis()[static_cast<std::size_t>(r)];
        if (var < nv) out.x[var] = tab.rhs(r);
    }
    out.objective = c.dot(out.x);
    out.pivots = pivots;
    return out;
}

}  // namespace rsnet
