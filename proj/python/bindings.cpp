#include "rsnet/cli.hpp"
#include "rsnet/equilibrium.hpp"
#include "rsnet/errors.hpp"
#include "rsnet/heating.hpp"
#include "rsnet/optimality.hpp"
#include "rsnet/simulate.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace rsnet;

namespace {

ControllerVariant parse_variant(const std::string& name) {
    if (name == "decentralized") return ControllerVariant::Decentralized;
    if (name == "coordinating") return ControllerVariant::Coordinating;
    if (name == "static") return ControllerVariant::Static;
    throw InvalidArgument("unknown controller variant '" + name + "'");
}

SectorPair make_pair(const std::string& kind, std::size_t n) {
    if (kind == "saturation") return SectorPair::saturation(n);
    if (kind == "identity") return SectorPair::identity(n);
    throw InvalidArgument("unknown sector pair '" + kind + "'");
}

py::dict trajectory_dict(const Trajectory& traj) {
    const auto stack = [](const std::vector<Vector>& rows) {
        const Eigen::Index cols = rows.empty() ? 0 : rows.front().size();
        Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
        for (std::size_t k = 0; k < rows.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
        return m;
    };
    py::dict d;
    d["variant"] = to_string(traj.variant);
    d["t"] = Vector(Eigen::Map<const Vector>(traj.t.data(), static_cast<Eigen::Index>(traj.t.size())));
    d["x"] = stack(traj.x);
    d["z"] = traj.has_integral_state() ? py::cast(stack(traj.z)) : py::none();
    d["u"] = stack(traj.u);
    d["v"] = stack(traj.v);
    d["warnings"] = traj.warnings;
    return d;
}

py::dict cost_dict(const CostReport& c) {
    py::dict d;
    d["J1"] = c.j1;
    d["Jinf"] = c.jinf;
    d["J2"] = c.j2;
    d["horizon"] = c.horizon;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Decentralized anti-windup PI control of saturated M-matrix networks";

    py::register_exception<Error>(m, "RsnetError");

    py::class_<SectorPair>(m, "SectorPair")
        .def_static("saturation", &SectorPair::saturation, py::arg("n"))
        .def_static("identity", &SectorPair::identity, py::arg("n"))
        .def_property_readonly("kind", [](const SectorPair& p) { return to_string(p.kind()); })
        .def("__len__", &SectorPair::size)
        .def("f", [](const SectorPair& p, const Vector& u) { return eval_f(p, u); })
        .def("h", [](const SectorPair& p, const Vector& u) { return eval_h(p, u); });

    py::class_<PlantModel>(m, "PlantModel")
        .def(py::init([](Vector a, Matrix b, const std::string& pair) {
                 const auto n = static_cast<std::size_t>(a.size());
                 return PlantModel(std::move(a), std::move(b), make_pair(pair, n));
             }),
             py::arg("a"), py::arg("b"), py::arg("pair") = "saturation")
        .def_property_readonly("a", &PlantModel::a)
        .def_property_readonly("b", &PlantModel::b)
        .def_property_readonly("pair", &PlantModel::pair)
        .def_property_readonly("n", &PlantModel::n);

    py::class_<ControllerSpec>(m, "ControllerSpec")
        .def_static("decentralized", &ControllerSpec::decentralized, py::arg("p"), py::arg("r"), py::arg("s"))
        .def_static("coordinating", &ControllerSpec::coordinating, py::arg("p"), py::arg("r"), py::arg("s"),
                    py::arg("beta") = 0.0)
        .def_static("static_feedback", &ControllerSpec::static_feedback, py::arg("k"))
        .def_static("static_default", &ControllerSpec::static_default, py::arg("plant"))
        .def_property_readonly("variant", [](const ControllerSpec& c) { return to_string(c.variant); })
        .def_readonly("beta", &ControllerSpec::beta);

    m.def("is_m_matrix", [](const Matrix& b) { return is_m_matrix(b); }, py::arg("b"));

    m.def(
        "check_tuning",
        [](const PlantModel& plant, const ControllerSpec& ctrl) {
            const auto rep = check_tuning(plant, ctrl);
            py::dict d;
            d["pass"] = rep.pass;
            d["gain_condition"] = rep.gain_condition;
            d["windup_condition"] = rep.windup_condition;
            return d;
        },
        py::arg("plant"), py::arg("ctrl"));

    m.def(
        "solve_equilibrium",
        [](const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w, double tol) {
            const auto eq = solve_equilibrium(plant, ctrl, w, tol);
            py::dict d;
            d["x0"] = eq.x0;
            d["z0"] = eq.z0;
            d["u0"] = eq.u0;
            d["residual"] = eq.residual_stationary;
            d["iterations"] = eq.iterations;
            d["contraction_bound"] = eq.contraction_bound;
            return d;
        },
        py::arg("plant"), py::arg("ctrl"), py::arg("w"), py::arg("tol") = 1e-10);

    m.def(
        "contraction_bound",
        [](const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w) {
            return build_contraction(plant, ctrl, w).gamma_bar();
        },
        py::arg("plant"), py::arg("ctrl"), py::arg("w"));

    m.def(
        "admissible_gamma", [](const PlantModel& plant) { return admissible_gamma(plant).values(); },
        py::arg("plant"));

    m.def(
        "certify_optimality",
        [](const Vector& gamma, const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w, double tol) {
            const auto rep = certify_equilibrium_optimality(WeightVector(gamma), plant, ctrl, w, tol);
            py::dict d;
            d["pass"] = rep.pass;
            d["equilibrium_cost"] = rep.equilibrium_cost;
            d["lp_cost"] = rep.lp_cost;
            d["cost_gap"] = rep.cost_gap;
            d["x_star"] = rep.lp.x_star;
            return d;
        },
        py::arg("gamma"), py::arg("plant"), py::arg("ctrl"), py::arg("w"), py::arg("tol") = 1e-7);

    m.def(
        "simulate",
        [](const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w, const Vector& x0,
           std::optional<Vector> z0, double t1, double dt) {
            const Vector z = z0.value_or(ctrl.is_pi() ? Vector(Vector::Zero(x0.size())) : Vector());
            return trajectory_dict(
                integrate(plant, ctrl, DisturbanceSignal::constant(w), x0, z, TimeSpan{0.0, t1}, dt));
        },
        py::arg("plant"), py::arg("ctrl"), py::arg("w"), py::arg("x0"), py::arg("z0") = py::none(),
        py::arg("t1") = 50.0, py::arg("dt") = 0.01);

    m.def(
        "benchmark_costs",
        [](double dt) {
            const auto s = paper_benchmark_scenario();
            const auto sf = to_standard_form(s);
            const TimeSpan span{sf.w.times().front(), sf.w.times().back()};
            py::dict out;
            for (auto v : {ControllerVariant::Decentralized, ControllerVariant::Coordinating,
                           ControllerVariant::Static}) {
                const auto ctrl = scenario_controller(s, sf.plant, v);
                const Vector x0 = Vector::Zero(sf.plant.a().size());
                const Vector z0 = ctrl.is_pi() ? x0 : Vector();
                const auto traj = integrate(sf.plant, ctrl, sf.w, x0, z0, span, dt);
                out[py::str(to_string(v))] = cost_dict(evaluate_costs(traj, sf.l_diag));
            }
            return out;
        },
        py::arg("dt") = 0.01);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"rsnet"};
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
