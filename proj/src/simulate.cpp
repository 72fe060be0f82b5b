#include "rsnet/simulate.hpp"

#include "rsnet/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace rsnet {

namespace {

constexpr double kBlowUp = 1e12;
constexpr double kRk4RealAxisLimit = 2.78;

// Jacobian of the loop with every input slope equal to `slope` (1: linear
// regime, 0: fully saturated).
Matrix regime_jacobian(const PlantModel& plant, const ControllerSpec& ctrl, double slope) {
    const auto n = static_cast<Eigen::Index>(plant.n());
    const Matrix a = plant.a().asDiagonal();
    if (ctrl.variant == ControllerVariant::Static) {
        return -a - slope * plant.b() * ctrl.k_static;
    }
    const Matrix p = ctrl.p.asDiagonal();
    const Matrix r = ctrl.r.asDiagonal();
    Matrix j = Matrix::Zero(2 * n, 2 * n);
    j.topLeftCorner(n, n) = -a - slope * plant.b() * p;
    j.topRightCorner(n, n) = -slope * plant.b() * r;
    Matrix windup;
    if (ctrl.variant == ControllerVariant::Decentralized) {
        windup = (1.0 - slope) * Matrix(ctrl.s.asDiagonal());
    } else {
        windup = (1.0 - slope) * ctrl.beta * Matrix::Ones(n, n);
    }
    j.bottomLeftCorner(n, n) = Matrix::Identity(n, n) - windup * p;
    j.bottomRightCorner(n, n) = -windup * r;
    return j;
}

double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

void check_finite(const Vector& y, double t, std::size_t step) {
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > kBlowUp) {
        throw NonFiniteState("integrate: state blew up at t = " + format_double(t) + " (step " +
                                 std::to_string(step) + ")",
                             t, step);
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& text, std::size_t line) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && *begin == ' ') ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\r')) --end;
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ParseError("trajectory csv: bad number '" + text + "'", line);
    }
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double stability_step_bound(const PlantModel& plant, const ControllerSpec& ctrl) {
    ctrl.validate(plant.n());
    const double rho = std::max(inf_norm(regime_jacobian(plant, ctrl, 1.0)),
                                inf_norm(regime_jacobian(plant, ctrl, 0.0)));
    return kRk4RealAxisLimit / rho;
}

Trajectory integrate(const PlantModel& plant, const ControllerSpec& ctrl, const DisturbanceSignal& w,
                     const Vector& x_init, const Vector& z_init, TimeSpan span, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("integrate: dt must be positive");
    if (!(span.t1 >= span.t0)) throw InvalidArgument("integrate: t1 must be >= t0");
    ctrl.validate(plant.n());
    const auto n = static_cast<Eigen::Index>(plant.n());
    if (x_init.size() != n) throw DimensionMismatch("integrate: x_init has the wrong dimension");
    if (w.size() != plant.n()) throw DimensionMismatch("integrate: disturbance has the wrong dimension");
    const bool pi = ctrl.is_pi();
    if (pi && z_init.size() != n) throw DimensionMismatch("integrate: z_init has the wrong dimension");

    Trajectory traj;
    traj.variant = ctrl.variant;
    const double bound = stability_step_bound(plant, ctrl);
    if (dt > bound) {
        traj.warnings.push_back("dt = " + format_double(dt) + " exceeds the RK4 stability estimate " +
                                format_double(bound));
    }

    const double length = span.t1 - span.t0;
    const auto steps = static_cast<std::size_t>(std::max(0.0, std::ceil(length / dt - 1e-9)));
    const double h = steps > 0 ? length / static_cast<double>(steps) : 0.0;
    const Eigen::Index dim = pi ? 2 * n : n;

    const auto unpack = [&](const Vector& y) {
        ClosedLoopState s;
        s.x = y.head(n);
        if (pi) s.z = y.tail(n);
        return s;
    };
    const auto rhs = [&](double t, const Vector& y) {
        const LoopDerivative d = closed_loop_derivative(plant, ctrl, unpack(y), w.at(t));
        Vector out(dim);
        out.head(n) = d.dx;
        if (pi) out.tail(n) = d.dz;
        return out;
    };
    const auto record = [&](double t, const Vector& y) {
        ClosedLoopState s = unpack(y);
        Vector u = control_input(ctrl, s);
        traj.t.push_back(t);
        traj.v.push_back(eval_f(plant.pair(), u));
        traj.u.push_back(std::move(u));
        traj.x.push_back(std::move(s.x));
        traj.z.push_back(std::move(s.z));
    };

    Vector y(dim);
    y.head(n) = x_init;
    if (pi) y.tail(n) = z_init;
    check_finite(y, span.t0, 0);

    traj.t.reserve(steps + 1);
    record(span.t0, y);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = span.t0 + static_cast<double>(k) * h;
        const Vector k1 = rhs(t, y);
        const Vector k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        const Vector k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        const Vector k4 = rhs(t + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t_next = span.t0 + static_cast<double>(k + 1) * h;
        check_finite(y, t_next, k + 1);
        record(t_next, y);
    }
    return traj;
}

CostReport evaluate_costs(const Trajectory& traj, const Vector& l_diag) {
    if (traj.steps() == 0) throw InvalidArgument("evaluate_costs: empty trajectory");
    if (static_cast<std::size_t>(l_diag.size()) != traj.n()) {
        throw DimensionMismatch("evaluate_costs: L has the wrong dimension");
    }
    CostReport report;
    report.l_diag = l_diag;
    const auto integrands = [&](std::size_t k) {
        const Vector& x = traj.x[k];
        const Vector& v = traj.v[k];
        return Eigen::Vector3d(x.lpNorm<1>(), x.lpNorm<Eigen::Infinity>(),
                               x.dot(l_diag.cwiseProduct(x)) + v.squaredNorm());
    };
    if (traj.steps() == 1) {
        const Eigen::Vector3d f = integrands(0);
        report.j1 = f[0];
        report.jinf = f[1];
        report.j2 = f[2];
        return report;
    }
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    Eigen::Vector3d prev = integrands(0);
    for (std::size_t k = 1; k < traj.steps(); ++k) {
        const Eigen::Vector3d cur = integrands(k);
        acc += 0.5 * (traj.t[k] - traj.t[k - 1]) * (prev + cur);
        prev = cur;
    }
    report.horizon = traj.t.back() - traj.t.front();
    if (report.horizon > 0.0) acc /= report.horizon;
    report.j1 = acc[0];
    report.jinf = acc[1];
    report.j2 = acc[2];
    return report;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::size_t stride) {
    if (stride == 0) throw InvalidArgument("write_trajectory_csv: stride must be >= 1");
    const std::size_t n = traj.n();
    const bool with_z = traj.has_integral_state();
    out << 't';
    const auto header = [&](char name) {
        for (std::size_t i = 1; i <= n; ++i) out << ',' << name << i;
    };
    header('x');
    if (with_z) header('z');
    header('u');
    header('v');
    out << '\n';
    const auto row = [&](std::size_t k) {
        out << format_double(traj.t[k]);
        const auto cells = [&](const Vector& v) {
            for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << format_double(v[i]);
        };
        cells(traj.x[k]);
        if (with_z) cells(traj.z[k]);
        cells(traj.u[k]);
        cells(traj.v[k]);
        out << '\n';
    };
    for (std::size_t k = 0; k < traj.steps(); k += stride) row(k);
    if (traj.steps() > 0 && (traj.steps() - 1) % stride != 0) row(traj.steps() - 1);
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("trajectory csv: missing header", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto head = split_csv(line);
    if (head.empty() || head[0] != "t") throw ParseError("trajectory csv: header must start with 't'", 1);
    std::size_t nx = 0;
    std::size_t nz = 0;
    std::size_t nu = 0;
    std::size_t nv = 0;
    for (std::size_t c = 1; c < head.size(); ++c) {
        const char kind = head[c].empty() ? '?' : head[c][0];
        std::size_t* counter = kind == 'x' ? &nx : kind == 'z' ? &nz : kind == 'u' ? &nu : kind == 'v' ? &nv : nullptr;
        if (counter == nullptr || head[c] != std::string(1, kind) + std::to_string(*counter + 1)) {
            throw ParseError("trajectory csv: unexpected column '" + head[c] + "'", 1);
        }
        ++*counter;
    }
    if (nx == 0 || nu != nx || nv != nx || (nz != 0 && nz != nx)) {
        throw ParseError("trajectory csv: inconsistent column groups", 1);
    }

    Trajectory traj;
    traj.variant = nz == 0 ? ControllerVariant::Static : ControllerVariant::Decentralized;
    const auto n = static_cast<Eigen::Index>(nx);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != head.size()) throw ParseError("trajectory csv: wrong number of fields", line_no);
        std::size_t c = 0;
        traj.t.push_back(parse_number(cells[c++], line_no));
        const auto block = [&](Eigen::Index len) {
            Vector v(len);
            for (Eigen::Index i = 0; i < len; ++i) v[i] = parse_number(cells[c++], line_no);
            return v;
        };
        traj.x.push_back(block(n));
        traj.z.push_back(block(nz == 0 ? 0 : n));
        traj.u.push_back(block(n));
        traj.v.push_back(block(n));
    }
    return traj;
}

}  // namespace rsnet
