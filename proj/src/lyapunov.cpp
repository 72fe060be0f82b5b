#include "rsnet/lyapunov.hpp"

#include "rsnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsnet {

namespace {

Vector phi(const SectorPair& shifted, const Vector& v, double eps) {
    return eval_f(shifted, v) + eps * v;
}

}  // namespace

LyapunovParameters lyapunov_parameters(const PlantModel& plant, const ControllerSpec& ctrl,
                                       std::optional<double> epsilon) {
    if (ctrl.variant != ControllerVariant::Decentralized) {
        throw UnsupportedVariant("lyapunov: decentralized controller only");
    }
    ctrl.validate(plant.n());
    const Matrix pb = ctrl.p.asDiagonal() * plant.b();

    LyapunovParameters par;
    par.q = diagonal_lyapunov_scaling(pb).values();
    const Matrix qpb = par.q.asDiagonal() * pb;
    par.alpha = 0.5 * min_symmetric_eigenvalue(qpb + qpb.transpose());
    par.beta = par.q.cwiseProduct(ctrl.r).cwiseProduct(ctrl.s).minCoeff();
    par.gamma = spectral_norm(qpb);

    const double excess = par.gamma * par.gamma / (4.0 * par.beta) - par.alpha;
    par.epsilon_bound = excess > 0.0 ? par.alpha / excess : std::numeric_limits<double>::infinity();
    if (epsilon) {
        if (!(*epsilon > 0.0) || !(*epsilon < par.epsilon_bound)) {
            throw EpsilonTooLarge("lyapunov: epsilon must lie in (0, " + std::to_string(par.epsilon_bound) + ")",
                                  par.epsilon_bound);
        }
        par.epsilon = *epsilon;
    } else {
        par.epsilon = std::isfinite(par.epsilon_bound) ? 0.5 * par.epsilon_bound : 1.0;
    }
    return par;
}

double lyapunov_value(const PlantModel& plant, const ControllerSpec& ctrl, const LyapunovParameters& par,
                      const SectorPair& shifted, const Vector& z_tilde, const Vector& u_tilde) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < z_tilde.size(); ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const double weight_z = par.q[i] * (plant.a()[i] * ctrl.p[i] / ctrl.r[i] - 1.0);
        const double zi = z_tilde[i];
        const double ui = u_tilde[i];
        v += weight_z * (shifted.integral_f(ii, zi) + 0.5 * par.epsilon * zi * zi);
        v += par.q[i] * (shifted.integral_f(ii, ui) + 0.5 * par.epsilon * ui * ui);
    }
    return v;
}

double lyapunov_derivative(const PlantModel& plant, const ControllerSpec& ctrl, const LyapunovParameters& par,
                           const SectorPair& shifted, const Vector& z_tilde, const Vector& u_tilde) {
    const double eps = par.epsilon;
    const Vector d_tilde = par.q.cwiseProduct(plant.a() - ctrl.r.cwiseQuotient(ctrl.p));
    const Vector phi_z = phi(shifted, z_tilde, eps);
    const Vector phi_u = phi(shifted, u_tilde, eps);
    const Vector f_u = eval_f(shifted, u_tilde);
    const Vector h_u = u_tilde - f_u;

    const double term_a = -(phi_z - phi_u).dot(d_tilde.cwiseProduct(z_tilde - u_tilde));
    const double term_b = -phi_z.dot(d_tilde.cwiseProduct(ctrl.p).cwiseProduct(ctrl.s).cwiseProduct(h_u));
    const double term_c = -phi_u.dot(par.q.cwiseProduct(ctrl.r).cwiseProduct(ctrl.s).cwiseProduct(h_u));
    const double term_d = -phi_u.dot(par.q.cwiseProduct(ctrl.p.cwiseProduct(plant.b() * f_u)));
    return term_a + term_b + term_c + term_d;
}

LyapunovTrace lyapunov_trace(const PlantModel& plant, const ControllerSpec& ctrl, const Equilibrium& eq,
                             const Trajectory& traj, std::optional<double> epsilon, double increase_tol) {
    if (traj.variant != ControllerVariant::Decentralized || !traj.has_integral_state()) {
        throw UnsupportedVariant("lyapunov_trace: needs a decentralized trajectory");
    }
    LyapunovTrace out;
    out.parameters = lyapunov_parameters(plant, ctrl, epsilon);
    out.tuning_ok = check_tuning(plant, ctrl).pass;
    const SectorPair shifted = shift_pair(plant.pair(), eq.u0);

    const std::size_t steps = traj.steps();
    out.t = traj.t;
    out.value.reserve(steps);
    out.derivative.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const Vector z_tilde = -ctrl.r.cwiseProduct(traj.z[k] - eq.z0);
        const Vector u_tilde = traj.u[k] - eq.u0;
        out.value.push_back(lyapunov_value(plant, ctrl, out.parameters, shifted, z_tilde, u_tilde));
        out.derivative.push_back(lyapunov_derivative(plant, ctrl, out.parameters, shifted, z_tilde, u_tilde));
    }

    out.derivative_fd.resize(steps, 0.0);
    if (steps >= 2) {
        out.derivative_fd.front() = (out.value[1] - out.value[0]) / (out.t[1] - out.t[0]);
        out.derivative_fd.back() =
            (out.value[steps - 1] - out.value[steps - 2]) / (out.t[steps - 1] - out.t[steps - 2]);
        for (std::size_t k = 1; k + 1 < steps; ++k) {
            out.derivative_fd[k] = (out.value[k + 1] - out.value[k - 1]) / (out.t[k + 1] - out.t[k - 1]);
        }
    }

    for (std::size_t k = 0; k + 1 < steps; ++k) {
        const double scale = std::max(1.0, out.value[k]);
        const double rise = (out.value[k + 1] - out.value[k]) / scale;
        out.max_relative_increase = std::max(out.max_relative_increase, rise);
        if (rise > increase_tol) out.increase_steps.push_back(k);
    }
    out.monotone = out.increase_steps.empty();
    return out;
}

}  // namespace rsnet
