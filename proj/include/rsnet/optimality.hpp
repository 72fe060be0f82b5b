#pragma once

#include "rsnet/equilibrium.hpp"
#include "rsnet/matrixlab.hpp"
#include "rsnet/model.hpp"

namespace rsnet {

/// Positive weights gamma_i of the cost sum_i gamma_i |x_i|.
class WeightVector {
public:
    WeightVector() = default;
    /// Throws InvalidArgument unless every entry is positive and finite.
    explicit WeightVector(Vector gamma);
    const Vector& values() const noexcept { return gamma_; }
    Eigen::Index size() const noexcept { return gamma_.size(); }

private:
    Vector gamma_;
};

enum class AllocationStatus { Optimal, SolverFailure };

struct AllocationSolution {
    Vector x_star;
    Vector v_star;
    double cost = 0.0;
    AllocationStatus status = AllocationStatus::Optimal;
};

/// Gamma A^-1 B is an M-matrix and strictly column-diagonally dominant
/// (unscaled).
bool check_gamma_condition(const WeightVector& gamma, const PlantModel& plant);

/// gamma = d / max(d) with d from the column-dominance scaling of A^-1 B.
WeightVector admissible_gamma(const PlantModel& plant);

/// min ||Gamma x||_1  s.t.  -A x + B v + w = 0,  -1 <= v <= 1.
///
/// x is eliminated and the epigraph LP over (v, t) is solved with the dense
/// simplex; the returned point is checked against its own constraints
/// (SolverFailure beyond 1e-9).
AllocationSolution solve_weighted_l1_lp(const WeightVector& gamma, const PlantModel& plant, const Vector& w);

struct GridSearchResult {
    AllocationSolution solution;
    /// Guaranteed bound: solution.cost - optimum <= resolution.
    double resolution = 0.0;
};

/// Grid search of the reduced objective over [-1, 1]^n followed by two
/// local refinements around the incumbent. n <= 4 (DimensionTooLarge),
/// grid >= 3 (InvalidArgument).
GridSearchResult brute_force_oracle(const WeightVector& gamma, const PlantModel& plant, const Vector& w,
                                    int grid);

struct CertificateReport {
    double equilibrium_cost = 0.0;  // ||Gamma x0||_1
    double lp_cost = 0.0;
    double cost_gap = 0.0;
    double sign_structure_error = 0.0;  // max_i |x0_i + s_i dz(u0_i)|
    bool cost_ok = false;
    bool sign_ok = false;
    bool pass = false;
    double tolerance = 0.0;
    WeightVector gamma;
    EquilibriumResult equilibrium;
    AllocationSolution lp;
};

/// Checks that the decentralized equilibrium attains the LP optimum.
/// Requires a saturation pair, a decentralized controller and a gamma that
/// passes check_gamma_condition (ConditionViolated otherwise; this is not a
/// disproof).
CertificateReport certify_equilibrium_optimality(const WeightVector& gamma, const PlantModel& plant,
                                                 const ControllerSpec& ctrl, const Vector& w,
                                                 double tol = 1e-7);

}  // namespace rsnet
