#include "rsnet/model.hpp"

#include "rsnet/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rsnet {

namespace {

void require_len(const Vector& v, std::size_t n, const char* what) {
    if (static_cast<std::size_t>(v.size()) != n) {
        throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(n) +
                                ", got " + std::to_string(v.size()));
    }
}

void require_positive(const Vector& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || v[i] <= 0.0) {
            throw InvalidArgument(std::string(what) + "[" + std::to_string(i) +
                                  "] must be positive and finite");
        }
    }
}

}  // namespace

PlantModel::PlantModel(Vector a, Matrix b, SectorPair pair)
    : a_(std::move(a)), b_(std::move(b)), pair_(std::move(pair)) {
    if (a_.size() == 0) throw InvalidArgument("plant: empty state dimension");
    require_positive(a_, "plant a");
    require_square(b_, "plant B");
    if (b_.rows() != a_.size()) throw DimensionMismatch("plant: B and a disagree in dimension");
    if (pair_.size() != n()) throw DimensionMismatch("plant: sector pair has the wrong dimension");
    if (!is_m_matrix(b_)) throw NotMMatrix("plant: B is not an M-matrix");
    if (const auto why = sector_violation(pair_); !why.empty()) {
        throw InvalidArgument("plant: sector pair violates the [0, 1] sector: " + why);
    }
}

std::string to_string(ControllerVariant variant) {
    switch (variant) {
        case ControllerVariant::Decentralized: return "decentralized";
        case ControllerVariant::Coordinating: return "coordinating";
        case ControllerVariant::Static: return "static";
    }
    return "unknown";
}

ControllerVariant parse_variant(const std::string& name) {
    if (name == "decentralized" || name == "decentralized_pi_aw") return ControllerVariant::Decentralized;
    if (name == "coordinating" || name == "coordinating_pi_aw") return ControllerVariant::Coordinating;
    if (name == "static" || name == "static_feedback") return ControllerVariant::Static;
    throw InvalidArgument("unknown controller variant '" + name + "'");
}

ControllerSpec ControllerSpec::decentralized(Vector p, Vector r, Vector s) {
    ControllerSpec c;
    c.variant = ControllerVariant::Decentralized;
    c.p = std::move(p);
    c.r = std::move(r);
    c.s = std::move(s);
    return c;
}

ControllerSpec ControllerSpec::coordinating(Vector p, Vector r, Vector s, double beta) {
    ControllerSpec c = decentralized(std::move(p), std::move(r), std::move(s));
    c.variant = ControllerVariant::Coordinating;
    c.beta = beta > 0.0 ? beta : 1.0 / static_cast<double>(std::max<Eigen::Index>(1, c.p.size()));
    return c;
}

ControllerSpec ControllerSpec::static_feedback(Matrix k) {
    ControllerSpec c;
    c.variant = ControllerVariant::Static;
    c.k_static = std::move(k);
    return c;
}

ControllerSpec ControllerSpec::static_default(const PlantModel& plant) {
    return static_feedback(plant.b().transpose());
}

void ControllerSpec::validate(std::size_t n) const {
    if (variant == ControllerVariant::Static) {
        if (static_cast<std::size_t>(k_static.rows()) != n ||
            static_cast<std::size_t>(k_static.cols()) != n) {
            throw DimensionMismatch("static controller gain must be n x n");
        }
        if (!k_static.allFinite()) throw InvalidArgument("static controller gain is not finite");
        return;
    }
    require_len(p, n, "controller p");
    require_len(r, n, "controller r");
    require_len(s, n, "controller s");
    require_positive(p, "controller p");
    require_positive(r, "controller r");
    require_positive(s, "controller s");
    if (variant == ControllerVariant::Coordinating && !(beta > 0.0 && std::isfinite(beta))) {
        throw InvalidArgument("coordinating controller needs beta > 0");
    }
}

DisturbanceSignal DisturbanceSignal::constant(Vector w) {
    if (!w.allFinite()) throw InvalidArgument("disturbance: non-finite value");
    DisturbanceSignal d;
    d.times_ = {0.0};
    d.values_ = {std::move(w)};
    return d;
}

DisturbanceSignal DisturbanceSignal::series(std::vector<double> times, std::vector<Vector> values) {
    if (times.empty() || times.size() != values.size()) {
        throw InvalidArgument("disturbance: need matching, non-empty time and value lists");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k])) throw InvalidArgument("disturbance: non-finite timestamp");
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw InvalidArgument("disturbance: timestamps must be strictly increasing");
        }
        if (values[k].size() != values[0].size()) {
            throw DimensionMismatch("disturbance: samples differ in dimension");
        }
        if (!values[k].allFinite()) throw InvalidArgument("disturbance: non-finite value");
    }
    DisturbanceSignal d;
    d.times_ = std::move(times);
    d.values_ = std::move(values);
    return d;
}

std::size_t DisturbanceSignal::size() const noexcept {
    return values_.empty() ? 0 : static_cast<std::size_t>(values_.front().size());
}

Vector DisturbanceSignal::at(double t) const {
    if (values_.empty()) throw InvalidArgument("disturbance: empty signal");
    if (times_.size() == 1 || t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const auto k = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double theta = (t - times_[k]) / (times_[k + 1] - times_[k]);
    return values_[k] + theta * (values_[k + 1] - values_[k]);
}

Vector control_input(const ControllerSpec& ctrl, const ClosedLoopState& state) {
    if (ctrl.variant == ControllerVariant::Static) return -(ctrl.k_static * state.x);
    return -(ctrl.p.cwiseProduct(state.x) + ctrl.r.cwiseProduct(state.z));
}

LoopDerivative closed_loop_derivative(const PlantModel& plant, const ControllerSpec& ctrl,
                                      const ClosedLoopState& state, const Vector& w) {
    const std::size_t n = plant.n();
    require_len(state.x, n, "state x");
    require_len(w, n, "disturbance w");
    if (ctrl.is_pi()) {
        require_len(state.z, n, "state z");
        require_len(ctrl.p, n, "controller p");
    } else if (static_cast<std::size_t>(ctrl.k_static.cols()) != n ||
               static_cast<std::size_t>(ctrl.k_static.rows()) != n) {
        throw DimensionMismatch("static controller gain must be n x n");
    }

    LoopDerivative out;
    out.u = control_input(ctrl, state);
    const Vector fu = eval_f(plant.pair(), out.u);
    out.dx = -plant.a().cwiseProduct(state.x) + plant.b() * fu + w;
    switch (ctrl.variant) {
        case ControllerVariant::Decentralized:
            out.dz = state.x + ctrl.s.cwiseProduct(out.u - fu);
            break;
        case ControllerVariant::Coordinating:
            out.dz = state.x + Vector::Constant(static_cast<Eigen::Index>(n), ctrl.beta * (out.u - fu).sum());
            break;
        case ControllerVariant::Static:
            break;
    }
    return out;
}

TuningReport check_tuning(const PlantModel& plant, const ControllerSpec& ctrl) {
    if (!ctrl.is_pi()) throw UnsupportedVariant("check_tuning: static controller has no PI gains");
    ctrl.validate(plant.n());
    TuningReport report;
    report.gain_condition = true;
    report.windup_condition = true;
    for (Eigen::Index i = 0; i < plant.a().size(); ++i) {
        CoordinateTuning c;
        c.gain_margin = plant.a()[i] * ctrl.p[i] - ctrl.r[i];
        c.windup_margin = 1.0 - ctrl.p[i] * ctrl.s[i];
        c.gain_ok = c.gain_margin > 0.0;
        c.windup_ok = c.windup_margin > 0.0;
        report.gain_condition = report.gain_condition && c.gain_ok;
        report.windup_condition = report.windup_condition && c.windup_ok;
        report.coordinates.push_back(c);
    }
    report.pass = report.gain_condition && report.windup_condition;
    return report;
}

ErrorCoordinates transform_to_error_coords(const PlantModel& plant, const ControllerSpec& ctrl,
                                           const Equilibrium& eq, const ClosedLoopState& state) {
    if (!ctrl.is_pi()) throw UnsupportedVariant("error coordinates need an integral state");
    const std::size_t n = plant.n();
    require_len(state.x, n, "state x");
    require_len(state.z, n, "state z");
    require_len(eq.u0, n, "equilibrium u0");
    ErrorCoordinates out;
    out.z_tilde = -ctrl.r.cwiseProduct(state.z - eq.z0);
    out.u_tilde = control_input(ctrl, state) - eq.u0;
    out.shifted = shift_pair(plant.pair(), eq.u0);
    return out;
}

ErrorDerivative error_coords_derivative(const PlantModel& plant, const ControllerSpec& ctrl,
                                        const Equilibrium& eq, const Vector& z_tilde,
                                        const Vector& u_tilde) {
    if (ctrl.variant != ControllerVariant::Decentralized) {
        throw UnsupportedVariant("error_coords_derivative: decentralized controller only");
    }
    require_len(eq.u0, plant.n(), "equilibrium u0");
    return error_coords_derivative(plant, ctrl, shift_pair(plant.pair(), eq.u0), z_tilde, u_tilde);
}

ErrorDerivative error_coords_derivative(const PlantModel& plant, const ControllerSpec& ctrl,
                                        const SectorPair& shifted, const Vector& z_tilde,
                                        const Vector& u_tilde) {
    if (ctrl.variant != ControllerVariant::Decentralized) {
        throw UnsupportedVariant("error_coords_derivative: decentralized controller only");
    }
    const std::size_t n = plant.n();
    require_len(z_tilde, n, "z_tilde");
    require_len(u_tilde, n, "u_tilde");
    const Vector r_over_p = ctrl.r.cwiseQuotient(ctrl.p);
    const Vector rs = ctrl.r.cwiseProduct(ctrl.s);
    const Vector ft = eval_f(shifted, u_tilde);
    const Vector ht = u_tilde - ft;
    const Vector diff = z_tilde - u_tilde;

    ErrorDerivative out;
    out.dz_tilde = -r_over_p.cwiseProduct(diff) - rs.cwiseProduct(ht);
    out.du_tilde = (plant.a() - r_over_p).cwiseProduct(diff) -
                   ctrl.p.cwiseProduct(plant.b() * ft) - rs.cwiseProduct(ht);
    return out;
}

}  // namespace rsnet
