#pragma once

#include "rsnet/matrixlab.hpp"
#include "rsnet/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rsnet {

struct TimeSpan {
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Sampled closed-loop trajectory; one entry per integration step.
struct Trajectory {
    ControllerVariant variant = ControllerVariant::Decentralized;
    std::vector<double> t;
    std::vector<Vector> x;
    std::vector<Vector> z;  // empty vectors for the static controller
    std::vector<Vector> u;
    std::vector<Vector> v;  // f(u)
    std::vector<std::string> warnings;

    std::size_t steps() const noexcept { return t.size(); }
    std::size_t n() const noexcept { return x.empty() ? 0 : static_cast<std::size_t>(x.front().size()); }
    bool has_integral_state() const noexcept { return !z.empty() && z.front().size() > 0; }
};

/// Largest dt for which RK4 stays stable on the linearized loop, using the
/// induced inf-norm of the Jacobian in the unsaturated and saturated regimes
/// as a spectral-radius bound.
double stability_step_bound(const PlantModel& plant, const ControllerSpec& ctrl);

/// Classic fixed-step RK4 over `span`. The step is dt shrunk to divide the
/// span evenly. Appends a warning if dt exceeds stability_step_bound. Throws
/// NonFiniteState if any state leaves |.| <= 1e12.
Trajectory integrate(const PlantModel& plant, const ControllerSpec& ctrl, const DisturbanceSignal& w,
                     const Vector& x_init, const Vector& z_init, TimeSpan span, double dt);

struct CostReport {
    double j1 = 0.0;    // (1/T) int ||x||_1
    double jinf = 0.0;  // (1/T) int ||x||_inf
    double j2 = 0.0;    // (1/T) int x^T L x + f(u)^T f(u)
    double horizon = 0.0;
    Vector l_diag;
};

/// Trapezoidal quadrature on the trajectory grid, normalized by T. A
/// single-sample trajectory reports the instantaneous integrands.
CostReport evaluate_costs(const Trajectory& traj, const Vector& l_diag);

/// CSV with header t,x1..xn,z1..zn,u1..un,v1..vn (z columns omitted for the
/// static controller), shortest round-trip number formatting. Every
/// `stride`-th step is written, plus the final step.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::size_t stride = 1);

/// Parses the format written by write_trajectory_csv. Throws ParseError.
Trajectory read_trajectory_csv(std::istream& in);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace rsnet
