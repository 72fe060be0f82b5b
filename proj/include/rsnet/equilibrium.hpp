#pragma once

#include "rsnet/matrixlab.hpp"
#include "rsnet/model.hpp"
#include "rsnet/sector.hpp"

#include <cstdint>
#include <vector>

namespace rsnet {

/// Fixed-point map whose unique fixed point gives the equilibrium input.
///
/// With M = S^-1 A^-1 B and D from the column-dominance scaling of M:
///   B^ = D M D^-1,  w^ = D S^-1 A^-1 w,  zeta = D u,
///   T(zeta) = -(1/k) [ (1 - k) h^(zeta) + (B^ - k I) f^(zeta) + w^ ]
/// where f^(zeta) = D f(D^-1 zeta), h^ = id - f^. T is a contraction in the
/// 1-norm with factor gamma_bar = max(lambda, max_i mu_i) < 1.
class ContractionMap {
public:
    ContractionMap(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w);

    Vector apply(const Vector& zeta) const;

    /// T(0) = -w^ / k.
    Vector initial_iterate() const { return -w_hat_ / k_; }

    std::size_t n() const noexcept { return static_cast<std::size_t>(w_hat_.size()); }
    const DiagonalScaling& scaling() const noexcept { return d_; }
    const Matrix& b_hat() const noexcept { return b_hat_; }
    const Vector& w_hat() const noexcept { return w_hat_; }
    const SectorPair& scaled_pair() const noexcept { return scaled_; }
    double k() const noexcept { return k_; }
    double lambda() const noexcept { return lambda_; }
    const Vector& mu() const noexcept { return mu_; }
    double gamma_bar() const noexcept { return gamma_bar_; }

    /// Same map with a different scaled disturbance w^ (everything else kept).
    ContractionMap with_w_hat(Vector w_hat) const;

private:
    DiagonalScaling d_;
    Matrix b_hat_;
    Vector w_hat_;
    SectorPair scaled_;
    double k_ = 0.0;
    double lambda_ = 0.0;
    Vector mu_;
    double gamma_bar_ = 0.0;
};

/// Throws UnsupportedVariant for non-decentralized controllers and NotMMatrix
/// if S^-1 A^-1 B cannot be scaled.
ContractionMap build_contraction(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w);

struct FixedPointResult {
    Vector zeta;
    long iterations = 0;
    double last_delta = 0.0;
    bool roundoff_limited = false;  // stopped at the floating-point floor
    std::vector<double> deltas;     // ||zeta_{m+1} - zeta_m||_1, when recorded
};

/// Banach iteration zeta <- T(zeta) until ||delta||_1 <= tol (1 - g) / g,
/// which bounds the distance to the fixed point by tol. Also stops when the
/// step reaches the rounding floor of the iterate. Throws
/// MaxIterationsExceeded.
FixedPointResult iterate_fixed_point(const ContractionMap& map, const Vector& zeta0, double tol = 1e-10,
                                     long max_iter = 1'000'000, bool record_deltas = false);

struct EquilibriumResult : Equilibrium {
    Vector zeta;
    double residual_stationary = 0.0;  // ||h(u0) + S^-1 A^-1 (B f(u0) + w)||_inf
    long iterations = 0;
    double contraction_bound = 0.0;
    DiagonalScaling scaling_d;
    double k = 0.0;
};

/// ||h(u) + S^-1 A^-1 B f(u) + S^-1 A^-1 w||_inf.
double stationary_residual(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w,
                           const Vector& u);

/// Unique equilibrium of the decentralized loop. The iteration tolerance is
/// tightened so that the stationary residual is also <= tol; throws
/// ConvergenceFailure if it is not.
EquilibriumResult solve_equilibrium(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w,
                                    double tol = 1e-10, long max_iter = 1'000'000);

/// Equilibrium from a given fixed point of `map` (x0, z0 by back-substitution).
EquilibriumResult equilibrium_from_zeta(const PlantModel& plant, const ControllerSpec& ctrl,
                                        const Vector& w, const ContractionMap& map, const Vector& zeta);

struct UniquenessProbe {
    int restarts = 0;
    double max_spread = 0.0;  // max_k | ||u0_k||_1 - ||u0||_1 |
    double max_distance = 0.0;  // max_k ||u0_k - u0||_1
    bool pass = false;
};

/// Re-runs the iteration from `restarts` random iterates drawn uniformly in
/// [-R, R]^n, R = 10 max(1, ||zeta||_inf), and compares each limit with
/// `reference`. Passes when every ||u0_k - u0||_1 <= agree_tol.
UniquenessProbe probe_uniqueness(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w,
                                 const EquilibriumResult& reference, int restarts, std::uint64_t seed,
                                 double agree_tol = 1e-6, double tol = 1e-10);

/// max ||T(a) - T(b)||_1 / ||a - b||_1 over random pairs (uniform pairs, close
/// pairs and coordinate-axis pairs). The sampling box depends only on D, so
/// the result is independent of w^.
double measure_contraction(const ContractionMap& map, int trials, std::uint64_t seed = 1);

}  // namespace rsnet
