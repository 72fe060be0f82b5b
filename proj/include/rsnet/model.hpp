#pragma once

#include "rsnet/matrixlab.hpp"
#include "rsnet/sector.hpp"

#include <string>
#include <vector>

namespace rsnet {

/// x' = -A x + B f(u) + w with A = diag(a).
class PlantModel {
public:
    /// Throws InvalidArgument (a not positive, dimension or sector problems)
    /// or NotMMatrix (B).
    PlantModel(Vector a, Matrix b, SectorPair pair);

    const Vector& a() const noexcept { return a_; }
    const Matrix& b() const noexcept { return b_; }
    const SectorPair& pair() const noexcept { return pair_; }
    std::size_t n() const noexcept { return static_cast<std::size_t>(a_.size()); }

private:
    Vector a_;
    Matrix b_;
    SectorPair pair_;
};

enum class ControllerVariant { Decentralized, Coordinating, Static };

std::string to_string(ControllerVariant variant);
/// Accepts "decentralized", "coordinating", "static" (and the long forms
/// "decentralized_pi_aw", "coordinating_pi_aw", "static_feedback").
ControllerVariant parse_variant(const std::string& name);

struct ControllerSpec {
    ControllerVariant variant = ControllerVariant::Decentralized;
    Vector p;  // proportional gains
    Vector r;  // integral gains
    Vector s;  // anti-windup gains
    double beta = 0.0;  // coordinating variant only
    Matrix k_static;    // static variant only

    static ControllerSpec decentralized(Vector p, Vector r, Vector s);
    /// beta <= 0 selects the default 1/n.
    static ControllerSpec coordinating(Vector p, Vector r, Vector s, double beta = 0.0);
    static ControllerSpec static_feedback(Matrix k);
    /// u = -B^T x on the standard-form plant.
    static ControllerSpec static_default(const PlantModel& plant);

    bool is_pi() const noexcept { return variant != ControllerVariant::Static; }
    /// Throws InvalidArgument / DimensionMismatch.
    void validate(std::size_t n) const;
};

struct ClosedLoopState {
    Vector x;
    Vector z;  // empty for the static controller
};

/// Constant or piecewise-linear disturbance w(t). Values outside the
/// sampled range are held at the end samples.
class DisturbanceSignal {
public:
    DisturbanceSignal() = default;
    static DisturbanceSignal constant(Vector w);
    static DisturbanceSignal series(std::vector<double> times, std::vector<Vector> values);

    bool is_constant() const noexcept { return times_.size() <= 1; }
    std::size_t size() const noexcept;
    Vector at(double t) const;

    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<Vector>& values() const noexcept { return values_; }

private:
    std::vector<double> times_;
    std::vector<Vector> values_;
};

struct LoopDerivative {
    Vector dx;
    Vector dz;  // empty for the static controller
    Vector u;
};

/// Throws DimensionMismatch.
LoopDerivative closed_loop_derivative(const PlantModel& plant, const ControllerSpec& ctrl,
                                      const ClosedLoopState& state, const Vector& w);

/// u for the given state (shared by the derivative and the trajectory code).
Vector control_input(const ControllerSpec& ctrl, const ClosedLoopState& state);

struct CoordinateTuning {
    double gain_margin = 0.0;    // a_i p_i - r_i, must be > 0
    double windup_margin = 0.0;  // 1 - p_i s_i, must be > 0
    bool gain_ok = false;
    bool windup_ok = false;
};

struct TuningReport {
    std::vector<CoordinateTuning> coordinates;
    bool pass = false;
    bool gain_condition = false;
    bool windup_condition = false;
};

/// Decentralized tuning rule a_i p_i > r_i and p_i s_i < 1. A failing report is
/// a warning: the rule is sufficient, not necessary. Throws UnsupportedVariant
/// for the static controller.
TuningReport check_tuning(const PlantModel& plant, const ControllerSpec& ctrl);

/// Equilibrium point of the decentralized loop.
struct Equilibrium {
    Vector x0;
    Vector z0;
    Vector u0;
};

struct ErrorCoordinates {
    Vector z_tilde;  // -R (z - z0)
    Vector u_tilde;  // u - u0
    SectorPair shifted;  // f~(x) = f(x + u0) - f(u0)
};

ErrorCoordinates transform_to_error_coords(const PlantModel& plant, const ControllerSpec& ctrl,
                                           const Equilibrium& eq, const ClosedLoopState& state);

struct ErrorDerivative {
    Vector dz_tilde;
    Vector du_tilde;
};

/// Evaluates the closed loop in (z~, u~) coordinates:
///   z~' = -R P^-1 z~ + R P^-1 u~ - R S h~(u~)
///   u~' = (A - R P^-1) z~ + (-A + R P^-1) u~ - P B f~(u~) - R S h~(u~)
/// Decentralized controller only (UnsupportedVariant otherwise).
ErrorDerivative error_coords_derivative(const PlantModel& plant, const ControllerSpec& ctrl,
                                        const Equilibrium& eq, const Vector& z_tilde,
                                        const Vector& u_tilde);

/// Same, with the shifted pair supplied by the caller.
ErrorDerivative error_coords_derivative(const PlantModel& plant, const ControllerSpec& ctrl,
                                        const SectorPair& shifted, const Vector& z_tilde,
                                        const Vector& u_tilde);

}  // namespace rsnet
