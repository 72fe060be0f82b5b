#include "rsnet/optimality.hpp"

#include "rsnet/errors.hpp"
#include "rsnet/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace rsnet {

namespace {

constexpr double kFeasibilityTol = 1e-9;

void require_weights(const WeightVector& gamma, const PlantModel& plant) {
    if (static_cast<std::size_t>(gamma.size()) != plant.n()) {
        throw DimensionMismatch("gamma has the wrong dimension");
    }
}

// Gamma A^-1 B and Gamma A^-1 w.
Matrix weighted_coupling(const WeightVector& gamma, const PlantModel& plant) {
    return gamma.values().cwiseQuotient(plant.a()).asDiagonal() * plant.b();
}

Vector weighted_offset(const WeightVector& gamma, const PlantModel& plant, const Vector& w) {
    return gamma.values().cwiseQuotient(plant.a()).cwiseProduct(w);
}

AllocationSolution finish(const WeightVector& gamma, const PlantModel& plant, const Vector& w, Vector v) {
    AllocationSolution out;
    out.x_star = (plant.b() * v + w).cwiseQuotient(plant.a());
    out.v_star = std::move(v);
    out.cost = gamma.values().cwiseProduct(out.x_star).lpNorm<1>();
    return out;
}

}  // namespace

WeightVector::WeightVector(Vector gamma) : gamma_(std::move(gamma)) {
    for (Eigen::Index i = 0; i < gamma_.size(); ++i) {
        if (!std::isfinite(gamma_[i]) || gamma_[i] <= 0.0) {
            throw InvalidArgument("gamma[" + std::to_string(i) + "] must be positive and finite");
        }
    }
}

bool check_gamma_condition(const WeightVector& gamma, const PlantModel& plant) {
    require_weights(gamma, plant);
    const Matrix g = weighted_coupling(gamma, plant);
    return is_m_matrix(g) && is_strictly_column_dominant(g);
}

WeightVector admissible_gamma(const PlantModel& plant) {
    const Matrix m = plant.a().cwiseInverse().asDiagonal() * plant.b();
    const DiagonalScaling d = column_dominance_scaling(m);
    return WeightVector(d.values() / d.values().maxCoeff());
}

AllocationSolution solve_weighted_l1_lp(const WeightVector& gamma, const PlantModel& plant, const Vector& w) {
    require_weights(gamma, plant);
    if (static_cast<std::size_t>(w.size()) != plant.n()) throw DimensionMismatch("lp: w has the wrong dimension");
    const Eigen::Index n = static_cast<Eigen::Index>(plant.n());
    const Matrix g = weighted_coupling(gamma, plant);
    const Vector offset = weighted_offset(gamma, plant, w);

    // Variables (y, t) with v = y - 1, y in [0, 2]:
    //    G y - t <=  G 1 - g
    //   -G y - t <= -(G 1 - g)
    //        y   <=  2
    const Vector shifted = g * Vector::Ones(n) - offset;
    Matrix a = Matrix::Zero(3 * n, 2 * n);
    Vector b(3 * n);
    a.block(0, 0, n, n) = g;
    a.block(0, n, n, n) = -Matrix::Identity(n, n);
    b.head(n) = shifted;
    a.block(n, 0, n, n) = -g;
    a.block(n, n, n, n) = -Matrix::Identity(n, n);
    b.segment(n, n) = -shifted;
    a.block(2 * n, 0, n, n) = Matrix::Identity(n, n);
    b.tail(n).setConstant(2.0);
    Vector c = Vector::Zero(2 * n);
    c.tail(n).setOnes();

    const LpResult lp = simplex_minimize(c, a, b);
    Vector v = lp.x.head(n) - Vector::Ones(n);
    const double violation = (v.cwiseAbs().array() - 1.0).maxCoeff();
    if (violation > kFeasibilityTol) {
        throw SolverFailure("lp: solution violates -1 <= v <= 1 by " + std::to_string(violation));
    }
    AllocationSolution out = finish(gamma, plant, w, std::move(v));
    const double eq_residual = (-plant.a().cwiseProduct(out.x_star) + plant.b() * out.v_star + w)
                                   .lpNorm<Eigen::Infinity>();
    if (eq_residual > kFeasibilityTol * std::max(1.0, w.lpNorm<Eigen::Infinity>())) {
        throw SolverFailure("lp: equality constraint residual too large");
    }
    return out;
}

GridSearchResult brute_force_oracle(const WeightVector& gamma, const PlantModel& plant, const Vector& w,
                                    int grid) {
    require_weights(gamma, plant);
    const auto n = static_cast<Eigen::Index>(plant.n());
    if (n > 4) throw DimensionTooLarge("brute_force_oracle: n must be <= 4");
    if (grid < 3) throw InvalidArgument("brute_force_oracle: grid must be >= 3");

    const Matrix g = weighted_coupling(gamma, plant);
    const Vector offset = weighted_offset(gamma, plant, w);
    const auto objective = [&](const Vector& v) { return (g * v + offset).lpNorm<1>(); };

    Vector lo = Vector::Constant(n, -1.0);
    Vector hi = Vector::Constant(n, 1.0);
    Vector best_v = Vector::Zero(n);
    double best = objective(best_v);
    const double h0 = 2.0 / (grid - 1);

    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int round = 0; round < 3; ++round) {
        const Vector step = (hi - lo) / (grid - 1);
        std::fill(idx.begin(), idx.end(), 0);
        Vector v(n);
        while (true) {
            for (Eigen::Index j = 0; j < n; ++j) v[j] = lo[j] + step[j] * idx[static_cast<std::size_t>(j)];
            const double value = objective(v);
            if (value < best) {
                best = value;
                best_v = v;
            }
            Eigen::Index j = 0;
            while (j < n && ++idx[static_cast<std::size_t>(j)] == grid) idx[static_cast<std::size_t>(j++)] = 0;
            if (j == n) break;
        }
        lo = (best_v - step).cwiseMax(-1.0);
        hi = (best_v + step).cwiseMin(1.0);
    }

    GridSearchResult out;
    out.solution = finish(gamma, plant, w, best_v);
    out.resolution = g.cwiseAbs().colwise().sum().maxCoeff() * static_cast<double>(n) * h0 / 2.0;
    return out;
}

CertificateReport certify_equilibrium_optimality(const WeightVector& gamma, const PlantModel& plant,
                                                 const ControllerSpec& ctrl, const Vector& w, double tol) {
    if (plant.pair().kind() != SectorKind::SaturationDeadzone) {
        throw ConditionViolated("optimality certificate needs the saturation/deadzone pair");
    }
    if (ctrl.variant != ControllerVariant::Decentralized) {
        throw ConditionViolated("optimality certificate needs the decentralized controller");
    }
    if (!check_gamma_condition(gamma, plant)) {
        throw ConditionViolated("Gamma A^-1 B is not a strictly column-dominant M-matrix");
    }

    CertificateReport report;
    report.tolerance = tol;
    report.gamma = gamma;
    report.equilibrium = solve_equilibrium(plant, ctrl, w, std::min(1e-10, tol * 1e-2));
    report.lp = solve_weighted_l1_lp(gamma, plant, w);

    const EquilibriumResult& eq = report.equilibrium;
    report.equilibrium_cost = gamma.values().cwiseProduct(eq.x0).lpNorm<1>();
    report.lp_cost = report.lp.cost;
    report.cost_gap = std::abs(report.equilibrium_cost - report.lp_cost);
    const Vector dz = eval_h(plant.pair(), eq.u0);
    report.sign_structure_error = (eq.x0 + ctrl.s.cwiseProduct(dz)).lpNorm<Eigen::Infinity>();
    report.cost_ok = report.cost_gap <= tol;
    report.sign_ok = report.sign_structure_error <= tol;
    report.pass = report.cost_ok && report.sign_ok;
    return report;
}

}  // namespace rsnet
