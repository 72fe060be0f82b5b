#pragma once

#include "rsnet/matrixlab.hpp"
#include "rsnet/model.hpp"
#include "rsnet/sector.hpp"
#include "rsnet/simulate.hpp"

#include <optional>
#include <vector>

namespace rsnet {

/// Weights and bounds of the Lyapunov function
///   V = sum_i q_i (a_i p_i / r_i - 1) int_0^{z~_i} (f~_i + eps s) ds
///     + sum_i q_i int_0^{u~_i} (f~_i + eps s) ds.
struct LyapunovParameters {
    Vector q;            // Q P B + B^T P Q > 0
    double alpha = 0.0;  // lambda_min(Q P B + B^T P Q) / 2
    double beta = 0.0;   // min diag(Q R S)
    double gamma = 0.0;  // ||Q P B||_2
    /// eps must stay below this for the quadratic bound on V' to be negative
    /// definite (infinite when any eps works).
    double epsilon_bound = 0.0;
    double epsilon = 0.0;
};

/// Derives q from the diagonal Lyapunov scaling of P B and fixes epsilon
/// (default: half the bound, or 1 when the bound is infinite). Throws
/// EpsilonTooLarge if a requested epsilon is not below the bound, and
/// UnsupportedVariant for non-decentralized controllers.
LyapunovParameters lyapunov_parameters(const PlantModel& plant, const ControllerSpec& ctrl,
                                       std::optional<double> epsilon = std::nullopt);

double lyapunov_value(const PlantModel& plant, const ControllerSpec& ctrl, const LyapunovParameters& par,
                      const SectorPair& shifted, const Vector& z_tilde, const Vector& u_tilde);

/// Analytic V' along the loop, as the sum of the four dissipation terms.
double lyapunov_derivative(const PlantModel& plant, const ControllerSpec& ctrl, const LyapunovParameters& par,
                           const SectorPair& shifted, const Vector& z_tilde, const Vector& u_tilde);

struct LyapunovTrace {
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> derivative;     // analytic
    std::vector<double> derivative_fd;  // centered differences of `value`
    LyapunovParameters parameters;
    bool tuning_ok = false;
    std::vector<std::size_t> increase_steps;  // k with V[k+1] > V[k] + tol max(1, V[k])
    double max_relative_increase = 0.0;
    bool monotone = true;
};

/// Evaluates V and V' along a decentralized trajectory generated with the
/// constant disturbance that `eq` belongs to.
LyapunovTrace lyapunov_trace(const PlantModel& plant, const ControllerSpec& ctrl, const Equilibrium& eq,
                             const Trajectory& traj, std::optional<double> epsilon = std::nullopt,
                             double increase_tol = 1e-9);

}  // namespace rsnet
