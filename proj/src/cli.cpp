#include "rsnet/cli.hpp"

#include "rsnet/equilibrium.hpp"
#include "rsnet/errors.hpp"
#include "rsnet/lyapunov.hpp"
#include "rsnet/matrixlab.hpp"
#include "rsnet/optimality.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace rsnet::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys = {
    "schema_version", "scenario", "controller", "controllers", "tolerance", "certificate_tolerance",
    "max_iterations", "t_span_h", "dt_h", "csv_stride", "out_dir", "seed", "gamma", "L_diag", "epsilon",
    "init", "certify"};

const std::set<std::string> kCertifyKeys = {"restarts", "contraction_trials", "monitor_runs", "monitor_time_h",
                                            "monitor_init_radius", "w_time_h"};

double positive(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError("field '" + field + "' must be a number");
    const double v = j.get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("field '" + field + "' must be positive");
    return v;
}

long positive_int(const json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long>() < 1) throw ConfigError("field '" + field + "' must be an integer >= 1");
    return j.get<long>();
}

Vector vector_field(const json& j, const std::string& field) {
    if (j.is_number()) return Vector::Constant(1, j.get<double>());
    return json_vector(j, field);
}

// A scalar given in the config is broadcast to n entries.
Vector sized(const Vector& v, std::size_t n, const std::string& field) {
    const auto m = static_cast<Eigen::Index>(n);
    if (v.size() == m) return v;
    if (v.size() == 1) return Vector::Constant(m, v[0]);
    throw ConfigError("field '" + field + "' must have 1 or " + std::to_string(n) + " entries");
}

std::string status_name(int code) {
    switch (code) {
        case kExitOk:
            return "pass";
        case kExitWarning:
            return "warning";
        default:
            return "failure";
    }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw ConfigError("cannot write " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

void prepare_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fixed(double v, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

ResolvedScenario load_scenario(const RunConfig& config) {
    ResolvedScenario s = resolve_scenario(config.scenario, config.base_dir);
    if (config.l_diag) s.l_diag = sized(*config.l_diag, s.plant.n(), "L_diag");
    return s;
}

double w_time(const RunConfig& config, const ResolvedScenario& s) {
    if (config.certify.w_time_h) return *config.certify.w_time_h;
    return default_time_span(config, s).t0;
}

ControllerSpec controller_for(const RunConfig& config, const ResolvedScenario& s, ControllerVariant variant) {
    (void)config;
    ControllerSpec ctrl = s.controller(variant);
    ctrl.validate(s.plant.n());
    return ctrl;
}

// Trajectory file names are unique even when a variant is listed twice.
std::vector<std::string> run_names(const std::vector<ControllerVariant>& variants) {
    std::map<std::string, int> count;
    for (auto v : variants) ++count[to_string(v)];
    std::vector<std::string> names;
    for (std::size_t k = 0; k < variants.size(); ++k) {
        const std::string base = to_string(variants[k]);
        names.push_back(count[base] > 1 ? base + "_" + std::to_string(k + 1) : base);
    }
    return names;
}

struct VariantRun {
    ControllerVariant variant = ControllerVariant::Decentralized;
    std::string name;
    std::optional<Trajectory> traj;
    CostReport costs;
    std::string error;
    json error_detail;
};

VariantRun run_variant(const RunConfig& config, const ResolvedScenario& s, ControllerVariant variant,
                       const std::string& name, TimeSpan span) {
    VariantRun run;
    run.variant = variant;
    run.name = name;
    const ControllerSpec ctrl = controller_for(config, s, variant);
    const auto n = static_cast<Eigen::Index>(s.plant.n());
    const Vector x0 = config.x_init ? sized(*config.x_init, s.plant.n(), "init.x") : Vector::Zero(n);
    Vector z0;
    if (ctrl.is_pi()) z0 = config.z_init ? sized(*config.z_init, s.plant.n(), "init.z") : Vector::Zero(n);
    try {
        run.traj = integrate(s.plant, ctrl, s.w, x0, z0, span, config.dt_h);
        run.costs = evaluate_costs(*run.traj, s.l_diag);
    } catch (const NonFiniteState& e) {
        run.error = e.what();
        run.error_detail = {{"error", "NonFiniteState"}, {"message", e.what()}, {"time_h", e.time()},
                            {"step", e.step()}};
    }
    return run;
}

json run_json(const VariantRun& run, const std::string& csv_name) {
    json j = {{"controller", to_string(run.variant)}, {"name", run.name}};
    if (!run.error.empty()) {
        j.update(run.error_detail);
        return j;
    }
    j["J1"] = run.costs.j1;
    j["Jinf"] = run.costs.jinf;
    j["J2"] = run.costs.j2;
    j["horizon_h"] = run.costs.horizon;
    j["steps"] = run.traj->steps();
    j["trajectory_csv"] = csv_name;
    j["warnings"] = run.traj->warnings;
    return j;
}

struct Simulation {
    std::vector<VariantRun> runs;
    TimeSpan span;
    int exit_code = kExitOk;
};

Simulation simulate_all(const RunConfig& config, const ResolvedScenario& s, bool parallel) {
    Simulation sim;
    sim.span = default_time_span(config, s);
    const auto names = run_names(config.controllers);
    if (parallel) {
        std::vector<std::future<VariantRun>> jobs;
        for (std::size_t k = 0; k < config.controllers.size(); ++k) {
            jobs.push_back(std::async(std::launch::async, run_variant, std::cref(config), std::cref(s),
                                      config.controllers[k], names[k], sim.span));
        }
        for (auto& job : jobs) sim.runs.push_back(job.get());
    } else {
        for (std::size_t k = 0; k < config.controllers.size(); ++k) {
            sim.runs.push_back(run_variant(config, s, config.controllers[k], names[k], sim.span));
        }
    }
    for (const auto& run : sim.runs) {
        if (!run.error.empty()) {
            sim.exit_code = kExitFailure;
        } else if (!run.traj->warnings.empty() && sim.exit_code == kExitOk) {
            sim.exit_code = kExitWarning;
        }
    }
    return sim;
}

json simulation_report(const std::string& command, const RunConfig& config, const ResolvedScenario& s,
                       const Simulation& sim) {
    json runs = json::array();
    for (const auto& run : sim.runs) runs.push_back(run_json(run, "trajectory_" + run.name + ".csv"));
    return {{"schema_version", kReportSchemaVersion},
            {"command", command},
            {"status", status_name(sim.exit_code)},
            {"exit_code", sim.exit_code},
            {"scenario_kind", s.kind},
            {"n", s.plant.n()},
            {"t_span_h", {sim.span.t0, sim.span.t1}},
            {"dt_h", config.dt_h},
            {"L_diag", vector_json(s.l_diag)},
            {"runs", runs}};
}

void write_trajectories(const RunConfig& config, const Simulation& sim) {
    for (const auto& run : sim.runs) {
        if (!run.traj) continue;
        std::ostringstream os;
        write_trajectory_csv(os, *run.traj, config.csv_stride);
        write_file(config.out_dir / ("trajectory_" + run.name + ".csv"), os.str());
    }
}

std::string cost_table_text(const Simulation& sim) {
    std::ostringstream os;
    os << std::left << std::setw(16) << "controller" << std::right << std::setw(14) << "J1" << std::setw(14)
       << "Jinf" << std::setw(14) << "J2" << "\n";
    for (const auto& run : sim.runs) {
        os << std::left << std::setw(16) << run.name << std::right;
        if (!run.error.empty()) {
            os << "  failed: " << run.error << "\n";
            continue;
        }
        os << std::setw(14) << fixed(run.costs.j1) << std::setw(14) << fixed(run.costs.jinf) << std::setw(14)
           << fixed(run.costs.j2) << "\n";
        for (const auto& w : run.traj->warnings) os << "  warning: " << w << "\n";
    }
    return os.str();
}

// Certificate bookkeeping: each check is pass, warn, fail or skipped.
struct CheckList {
    json checks = json::array();
    std::ostringstream text;
    bool failed = false;
    bool warned = false;

    void add(const std::string& name, const std::string& status, const std::string& summary, json detail = json::object()) {
        detail["name"] = name;
        detail["status"] = status;
        detail["summary"] = summary;
        checks.push_back(std::move(detail));
        if (status == "fail") failed = true;
        if (status == "warn") warned = true;
        text << std::left << std::setw(20) << name << std::setw(9) << status << summary << "\n";
    }

    int exit_code() const { return failed ? kExitFailure : (warned ? kExitWarning : kExitOk); }
};

CommandResult finish_certify(const RunConfig& config, CheckList& list, json header) {
    CommandResult res;
    res.exit_code = list.exit_code();
    header["schema_version"] = kReportSchemaVersion;
    header["command"] = "certify";
    header["status"] = status_name(res.exit_code);
    header["exit_code"] = res.exit_code;
    header["checks"] = list.checks;
    res.report = std::move(header);
    res.text = list.text.str() + "result: " + status_name(res.exit_code) + "\n";
    write_json(config.out_dir / "certify_report.json", res.report);
    write_file(config.out_dir / "certify_report.txt", res.text);
    return res;
}

std::optional<WeightVector> pick_gamma(const RunConfig& config, const ResolvedScenario& s, std::string& source) {
    if (config.gamma) {
        source = "config";
        return WeightVector(sized(*config.gamma, s.plant.n(), "gamma"));
    }
    if (s.plant.pair().kind() == SectorKind::SaturationDeadzone) {
        source = "admissible_gamma";
        return admissible_gamma(s.plant);
    }
    source = "none";
    return std::nullopt;
}

void monitor_check(const RunConfig& config, const ResolvedScenario& s, const ControllerSpec& ctrl,
                   const EquilibriumResult& eq, const Vector& w0, bool tuning_ok, CheckList& list) {
    const auto n = static_cast<Eigen::Index>(s.plant.n());
    const double horizon = config.certify.monitor_time_h.value_or(50.0 / s.plant.a().minCoeff());
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> box(-config.certify.monitor_init_radius, config.certify.monitor_init_radius);
    double worst_rise = 0.0;
    double worst_final = 0.0;
    bool monotone = true;
    for (int run = 0; run < config.certify.monitor_runs; ++run) {
        Vector x0(n);
        Vector z0(n);
        for (Eigen::Index i = 0; i < n; ++i) x0[i] = box(rng);
        for (Eigen::Index i = 0; i < n; ++i) z0[i] = box(rng);
        const auto traj = integrate(s.plant, ctrl, DisturbanceSignal::constant(w0), x0, z0, TimeSpan{0.0, horizon},
                                    config.dt_h);
        const auto trace = lyapunov_trace(s.plant, ctrl, eq, traj, config.epsilon);
        monotone = monotone && trace.monotone;
        worst_rise = std::max(worst_rise, trace.max_relative_increase);
        worst_final = std::max(worst_final, (traj.x.back() - eq.x0).cwiseAbs().maxCoeff() +
                                                (traj.z.back() - eq.z0).cwiseAbs().maxCoeff());
    }
    const json detail = {{"runs", config.certify.monitor_runs}, {"horizon_h", horizon}, {"dt_h", config.dt_h},
                         {"monotone", monotone}, {"max_relative_increase", worst_rise},
                         {"max_final_distance", worst_final}};
    const std::string summary = "V monotone over " + std::to_string(config.certify.monitor_runs) +
                                " runs of " + fixed(horizon) + " h, final distance " + fixed(worst_final, 3);
    if (monotone) {
        list.add("lyapunov_monitor", "pass", summary, detail);
    } else {
        // Without the tuning rule the decrease is not guaranteed.
        list.add("lyapunov_monitor", tuning_ok ? "fail" : "warn",
                 "V increased (max relative rise " + fixed(worst_rise, 3) + ")", detail);
    }
}

}  // namespace

TimeSpan default_time_span(const RunConfig& config, const ResolvedScenario& s) {
    if (config.t_span) return *config.t_span;
    if (const auto span = s.disturbance_span()) return TimeSpan{span->first, span->second};
    return TimeSpan{0.0, 50.0 / s.plant.a().minCoeff()};
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("run configuration must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!kConfigKeys.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
    }
    try {
        RunConfig c;
        c.base_dir = base_dir;
        if (doc.contains("schema_version") && doc.at("schema_version") != kConfigSchemaVersion) {
            throw ConfigError("unsupported configuration schema_version");
        }
        if (!doc.contains("scenario")) throw ConfigError("missing required field 'scenario'");
        c.scenario = doc.at("scenario");
        if (doc.contains("controller") && doc.contains("controllers")) {
            throw ConfigError("give either 'controller' or 'controllers'");
        }
        const auto variant = [](const json& j) {
            if (!j.is_string()) throw ConfigError("controller names must be strings");
            try {
                return parse_variant(j.get<std::string>());
            } catch (const InvalidArgument& e) {
                throw ConfigError(e.what());
            }
        };
        if (doc.contains("controller")) c.controllers = {variant(doc.at("controller"))};
        if (doc.contains("controllers")) {
            const json& list = doc.at("controllers");
            if (!list.is_array() || list.empty()) throw ConfigError("'controllers' must be a non-empty array");
            c.controllers.clear();
            for (const json& v : list) c.controllers.push_back(variant(v));
        }
        if (doc.contains("tolerance")) c.tolerance = positive(doc.at("tolerance"), "tolerance");
        if (doc.contains("certificate_tolerance")) {
            c.certificate_tolerance = positive(doc.at("certificate_tolerance"), "certificate_tolerance");
        }
        if (doc.contains("max_iterations")) c.max_iterations = positive_int(doc.at("max_iterations"), "max_iterations");
        if (doc.contains("t_span_h")) {
            const Vector span = json_vector(doc.at("t_span_h"), "t_span_h", 2);
            if (!(span[1] > span[0])) throw ConfigError("t_span_h must be increasing");
            c.t_span = TimeSpan{span[0], span[1]};
        }
        if (doc.contains("dt_h")) c.dt_h = positive(doc.at("dt_h"), "dt_h");
        if (doc.contains("csv_stride")) c.csv_stride = static_cast<std::size_t>(positive_int(doc.at("csv_stride"), "csv_stride"));
        if (doc.contains("out_dir")) {
            if (!doc.at("out_dir").is_string()) throw ConfigError("out_dir must be a string");
            const std::filesystem::path p(doc.at("out_dir").get<std::string>());
            c.out_dir = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
        }
        if (doc.contains("seed")) {
            if (!doc.at("seed").is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
            c.seed = doc.at("seed").get<std::uint64_t>();
        }
        if (doc.contains("gamma")) {
            const json& g = doc.at("gamma");
            if (!(g.is_string() && g.get<std::string>() == "auto")) {
                c.gamma = vector_field(g, "gamma");
                if ((c.gamma->array() <= 0.0).any()) throw ConfigError("gamma entries must be positive");
            }
        }
        if (doc.contains("L_diag")) c.l_diag = vector_field(doc.at("L_diag"), "L_diag");
        if (doc.contains("epsilon")) c.epsilon = positive(doc.at("epsilon"), "epsilon");
        if (doc.contains("init")) {
            const json& init = doc.at("init");
            if (!init.is_object()) throw ConfigError("init must be an object");
            if (init.contains("x")) c.x_init = vector_field(init.at("x"), "init.x");
            if (init.contains("z")) c.z_init = vector_field(init.at("z"), "init.z");
        }
        if (doc.contains("certify")) {
            const json& cert = doc.at("certify");
            if (!cert.is_object()) throw ConfigError("certify must be an object");
            for (const auto& [key, value] : cert.items()) {
                (void)value;
                if (!kCertifyKeys.count(key)) throw ConfigError("unknown certify key '" + key + "'");
            }
            if (cert.contains("restarts")) c.certify.restarts = static_cast<int>(positive_int(cert.at("restarts"), "restarts"));
            if (cert.contains("contraction_trials")) {
                c.certify.contraction_trials =
                    static_cast<int>(positive_int(cert.at("contraction_trials"), "contraction_trials"));
            }
            if (cert.contains("monitor_runs")) {
                if (!cert.at("monitor_runs").is_number_integer() || cert.at("monitor_runs").get<long>() < 0) {
                    throw ConfigError("monitor_runs must be a non-negative integer");
                }
                c.certify.monitor_runs = cert.at("monitor_runs").get<int>();
            }
            if (cert.contains("monitor_time_h")) c.certify.monitor_time_h = positive(cert.at("monitor_time_h"), "monitor_time_h");
            if (cert.contains("monitor_init_radius")) {
                c.certify.monitor_init_radius = positive(cert.at("monitor_init_radius"), "monitor_init_radius");
            }
            if (cert.contains("w_time_h")) {
                if (!cert.at("w_time_h").is_number()) throw ConfigError("w_time_h must be a number");
                c.certify.w_time_h = cert.at("w_time_h").get<double>();
            }
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("run configuration: ") + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("configuration file not found: " + path.string());
    return parse_run_config(read_json_file(path), path.parent_path());
}

CommandResult cmd_certify(const RunConfig& config) {
    prepare_out_dir(config.out_dir);
    CheckList list;
    std::optional<ResolvedScenario> loaded;
    try {
        loaded = load_scenario(config);
    } catch (const NotMMatrix& e) {
        list.add("m_matrix", "fail", std::string("NotMMatrix: ") + e.what(), {{"error", "NotMMatrix"}});
        return finish_certify(config, list, {{"controller", "decentralized"}});
    }
    const ResolvedScenario& s = *loaded;
    const double t_w = w_time(config, s);
    const Vector w0 = s.w.at(t_w);
    json header = {{"controller", "decentralized"}, {"scenario_kind", s.kind}, {"n", s.plant.n()},
                   {"w_time_h", t_w}, {"w", vector_json(w0)}, {"seed", config.seed}};

    list.add("m_matrix", "pass", "B is an M-matrix", {{"is_m_matrix", true}});

    const ControllerSpec ctrl = controller_for(config, s, ControllerVariant::Decentralized);
    const TuningReport tuning = check_tuning(s.plant, ctrl);
    {
        double gain = std::numeric_limits<double>::infinity();
        double windup = std::numeric_limits<double>::infinity();
        for (const auto& c : tuning.coordinates) {
            gain = std::min(gain, c.gain_margin);
            windup = std::min(windup, c.windup_margin);
        }
        const json detail = {{"gain_condition", tuning.gain_condition}, {"windup_condition", tuning.windup_condition},
                             {"min_gain_margin", gain}, {"min_windup_margin", windup}};
        std::string summary = "a_i p_i > r_i " + std::string(tuning.gain_condition ? "holds" : "violated") +
                              ", p_i s_i < 1 " + (tuning.windup_condition ? "holds" : "violated");
        list.add("tuning", tuning.pass ? "pass" : "warn", summary, detail);
    }

    std::optional<EquilibriumResult> eq;
    try {
        eq = solve_equilibrium(s.plant, ctrl, w0, config.tolerance, config.max_iterations);
        list.add("equilibrium", "pass", "residual " + fixed(eq->residual_stationary, 3) + " after " +
                                            std::to_string(eq->iterations) + " iterations",
                 {{"x0", vector_json(eq->x0)}, {"z0", vector_json(eq->z0)}, {"u0", vector_json(eq->u0)},
                  {"residual_stationary", eq->residual_stationary}, {"iterations", eq->iterations},
                  {"gamma_bar", eq->contraction_bound}, {"tolerance", config.tolerance}});
    } catch (const Error& e) {
        list.add("equilibrium", "fail", e.what());
    }

    if (eq) {
        const auto probe = probe_uniqueness(s.plant, ctrl, w0, *eq, config.certify.restarts, config.seed,
                                            1e-6, config.tolerance);
        list.add("uniqueness", probe.pass ? "pass" : "fail",
                 std::to_string(probe.restarts) + " restarts, max ||u0 - u0*||_1 = " + fixed(probe.max_distance, 3),
                 {{"restarts", probe.restarts}, {"max_distance", probe.max_distance},
                  {"max_norm_spread", probe.max_spread}});

        const ContractionMap map(s.plant, ctrl, w0);
        const double ratio = measure_contraction(map, config.certify.contraction_trials, config.seed);
        const bool ok = map.gamma_bar() < 1.0 && ratio <= map.gamma_bar() + 1e-12;
        list.add("contraction", ok ? "pass" : "fail",
                 "measured " + fixed(ratio, 8) + " <= gamma_bar " + fixed(map.gamma_bar(), 8),
                 {{"measured_ratio", ratio}, {"gamma_bar", map.gamma_bar()}, {"lambda", map.lambda()},
                  {"mu", vector_json(map.mu())}, {"k", map.k()}, {"trials", config.certify.contraction_trials},
                  {"d", vector_json(map.scaling().values())}});
    } else {
        list.add("uniqueness", "skipped", "no equilibrium");
        list.add("contraction", "skipped", "no equilibrium");
    }

    bool eps_ok = false;
    try {
        const auto par = lyapunov_parameters(s.plant, ctrl, config.epsilon);
        eps_ok = true;
        list.add("lyapunov_epsilon", "pass",
                 "epsilon " + fixed(par.epsilon, 4) + " below bound " + fixed(par.epsilon_bound, 4),
                 {{"q", vector_json(par.q)}, {"alpha", par.alpha}, {"beta", par.beta}, {"gamma", par.gamma},
                  {"epsilon", par.epsilon}, {"epsilon_bound", finite_or_null(par.epsilon_bound)}});
    } catch (const EpsilonTooLarge& e) {
        list.add("lyapunov_epsilon", "fail", e.what(), {{"epsilon_bound", finite_or_null(e.bound())}});
    } catch (const CertificateFailure& e) {
        list.add("lyapunov_epsilon", "fail", e.what());
    }

    if (eq && eps_ok && config.certify.monitor_runs > 0) {
        try {
            monitor_check(config, s, ctrl, *eq, w0, tuning.pass, list);
        } catch (const NonFiniteState& e) {
            list.add("lyapunov_monitor", "fail", e.what(), {{"time_h", e.time()}, {"step", e.step()}});
        }
    } else {
        list.add("lyapunov_monitor", "skipped", eq ? "epsilon not admissible or no runs requested" : "no equilibrium");
    }

    std::string source;
    const auto gamma = pick_gamma(config, s, source);
    if (!gamma) {
        list.add("optimality", "skipped", "no gamma given and the pair is not saturation");
    } else {
        try {
            const auto rep =
                certify_equilibrium_optimality(*gamma, s.plant, ctrl, w0, config.certificate_tolerance);
            list.add("optimality", rep.pass ? "pass" : "fail",
                     "||Gamma x0||_1 = " + fixed(rep.equilibrium_cost, 10) + ", LP " + fixed(rep.lp_cost, 10),
                     {{"gamma", vector_json(gamma->values())}, {"gamma_source", source},
                      {"equilibrium_cost", rep.equilibrium_cost}, {"lp_cost", rep.lp_cost},
                      {"cost_gap", rep.cost_gap}, {"sign_structure_error", rep.sign_structure_error},
                      {"tolerance", rep.tolerance}, {"v_star", vector_json(rep.lp.v_star)}});
        } catch (const ConditionViolated& e) {
            list.add("optimality", "warn", std::string("not applicable: ") + e.what(), {{"gamma_source", source}});
        } catch (const Error& e) {
            list.add("optimality", "fail", e.what(), {{"gamma_source", source}});
        }
    }
    return finish_certify(config, list, std::move(header));
}

CommandResult cmd_simulate(const RunConfig& config) {
    prepare_out_dir(config.out_dir);
    const ResolvedScenario s = load_scenario(config);
    const Simulation sim = simulate_all(config, s, false);
    write_trajectories(config, sim);
    CommandResult res;
    res.exit_code = sim.exit_code;
    res.report = simulation_report("simulate", config, s, sim);
    res.text = cost_table_text(sim);
    write_json(config.out_dir / "simulate_report.json", res.report);
    return res;
}

CommandResult cmd_compare(const RunConfig& config) {
    if (config.controllers.size() < 2) throw ConfigError("compare needs at least two controllers");
    prepare_out_dir(config.out_dir);
    const ResolvedScenario s = load_scenario(config);
    const Simulation sim = simulate_all(config, s, true);
    write_trajectories(config, sim);

    CommandResult res;
    res.exit_code = sim.exit_code;
    res.report = simulation_report("compare", config, s, sim);

    std::ostringstream csv;
    csv << "controller,J1,Jinf,J2\n";
    for (const auto& run : sim.runs) {
        if (!run.error.empty()) continue;
        csv << run.name << "," << format_double(run.costs.j1) << "," << format_double(run.costs.jinf) << ","
            << format_double(run.costs.j2) << "\n";
    }
    write_file(config.out_dir / "compare.csv", csv.str());

    // Orderings reported when the three standard variants are all present.
    std::map<ControllerVariant, const CostReport*> by;
    for (const auto& run : sim.runs) {
        if (run.error.empty() && !by.count(run.variant)) by[run.variant] = &run.costs;
    }
    json orderings = json::object();
    std::string order_text;
    if (by.size() == 3) {
        const auto* d = by[ControllerVariant::Decentralized];
        const auto* c = by[ControllerVariant::Coordinating];
        const auto* st = by[ControllerVariant::Static];
        orderings["J1_decentralized_lt_coordinating_lt_static"] = d->j1 < c->j1 && c->j1 < st->j1;
        orderings["Jinf_coordinating_lt_decentralized"] = c->jinf < d->jinf;
        for (const auto& [k, v] : orderings.items()) order_text += k + ": " + (v.get<bool>() ? "yes" : "no") + "\n";
    }
    res.report["orderings"] = orderings;
    res.report["table_csv"] = "compare.csv";
    res.text = cost_table_text(sim) + order_text;
    write_file(config.out_dir / "compare.txt", res.text);
    write_json(config.out_dir / "compare_report.json", res.report);
    return res;
}

CommandResult cmd_equilibrium(const RunConfig& config) {
    prepare_out_dir(config.out_dir);
    const ResolvedScenario s = load_scenario(config);
    const double t_w = w_time(config, s);
    const Vector w0 = s.w.at(t_w);
    const ControllerSpec ctrl = controller_for(config, s, ControllerVariant::Decentralized);
    const auto eq = solve_equilibrium(s.plant, ctrl, w0, config.tolerance, config.max_iterations);
    CommandResult res;
    res.report = {{"schema_version", kReportSchemaVersion},
                  {"command", "equilibrium"},
                  {"status", "pass"},
                  {"exit_code", kExitOk},
                  {"n", s.plant.n()},
                  {"w_time_h", t_w},
                  {"w", vector_json(w0)},
                  {"x0", vector_json(eq.x0)},
                  {"z0", vector_json(eq.z0)},
                  {"u0", vector_json(eq.u0)},
                  {"residual_stationary", eq.residual_stationary},
                  {"iterations", eq.iterations},
                  {"gamma_bar", eq.contraction_bound},
                  {"k", eq.k},
                  {"d", vector_json(eq.scaling_d.values())}};
    std::ostringstream os;
    os << "equilibrium (w at t = " << fixed(t_w) << " h), residual " << fixed(eq.residual_stationary, 3) << ", "
       << eq.iterations << " iterations, gamma_bar " << fixed(eq.contraction_bound, 8) << "\n";
    os << std::left << std::setw(6) << "i" << std::setw(18) << "x0" << std::setw(18) << "z0" << "u0\n";
    for (Eigen::Index i = 0; i < eq.x0.size(); ++i) {
        os << std::setw(6) << i + 1 << std::setw(18) << fixed(eq.x0[i], 10) << std::setw(18) << fixed(eq.z0[i], 10)
           << fixed(eq.u0[i], 10) << "\n";
    }
    res.text = os.str();
    write_json(config.out_dir / "equilibrium.json", res.report);
    return res;
}

CommandResult cmd_lp(const RunConfig& config) {
    prepare_out_dir(config.out_dir);
    const ResolvedScenario s = load_scenario(config);
    const double t_w = w_time(config, s);
    const Vector w0 = s.w.at(t_w);
    std::string source;
    auto gamma = pick_gamma(config, s, source);
    if (!gamma) {
        source = "admissible_gamma";
        gamma = admissible_gamma(s.plant);
    }
    const auto sol = solve_weighted_l1_lp(*gamma, s.plant, w0);
    CommandResult res;
    res.report = {{"schema_version", kReportSchemaVersion},
                  {"command", "lp"},
                  {"status", "pass"},
                  {"exit_code", kExitOk},
                  {"n", s.plant.n()},
                  {"w_time_h", t_w},
                  {"gamma", vector_json(gamma->values())},
                  {"gamma_source", source},
                  {"gamma_condition", check_gamma_condition(*gamma, s.plant)},
                  {"x_star", vector_json(sol.x_star)},
                  {"v_star", vector_json(sol.v_star)},
                  {"cost", sol.cost}};
    res.text = "weighted l1 optimum " + fixed(sol.cost, 12) + " (gamma from " + source + ")\n";
    write_json(config.out_dir / "lp.json", res.report);
    return res;
}

std::vector<CostRow> read_cost_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "controller,J1,Jinf,J2") throw ParseError("cost table: bad header", 1);
    std::vector<CostRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 4) throw ParseError("cost table: expected 4 fields", lineno);
        CostRow row;
        row.controller = cells[0];
        try {
            std::size_t used = 0;
            double* targets[] = {&row.j1, &row.jinf, &row.j2};
            for (int k = 0; k < 3; ++k) {
                *targets[k] = std::stod(cells[static_cast<std::size_t>(k + 1)], &used);
                if (used != cells[static_cast<std::size_t>(k + 1)].size()) throw std::invalid_argument("trailing");
            }
        } catch (const std::exception&) {
            throw ParseError("cost table: bad number", lineno);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Resource-sharing network controller analysis"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::vector<std::string> controllers;
    app.add_option("--config", config_path, "Run configuration (JSON)")->required();
    auto* out_opt = app.add_option("--out", out_dir, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized probes");
    auto* dt_opt = app.add_option("--dt", dt, "Integration step in hours")->check(CLI::PositiveNumber);
    app.add_option("--controller", controllers, "Controller variant (repeatable)");
    app.fallthrough();

    using Command = CommandResult (*)(const RunConfig&);
    const std::vector<std::pair<std::string, std::pair<Command, std::string>>> commands = {
        {"certify", {cmd_certify, "Run the certificate suite"}},
        {"simulate", {cmd_simulate, "Integrate the closed loop and report costs"}},
        {"compare", {cmd_compare, "Cost table across controller variants"}},
        {"equilibrium", {cmd_equilibrium, "Solve the equilibrium"}},
        {"lp", {cmd_lp, "Solve the weighted l1 allocation LP"}},
    };
    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.second);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "rsnet: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    Command command = nullptr;
    for (const auto& [name, entry] : commands) {
        if (app.got_subcommand(name)) command = entry.first;
    }

    RunConfig config;
    try {
        config = load_run_config(config_path);
        if (*out_opt) config.out_dir = out_dir;
        if (*seed_opt) config.seed = seed;
        if (*dt_opt) config.dt_h = dt;
        if (!controllers.empty()) {
            config.controllers.clear();
            for (const auto& c : controllers) config.controllers.push_back(parse_variant(c));
        }
    } catch (const Error& e) {
        err << "rsnet: configuration error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const CommandResult res = command(config);
        out << res.text;
        return res.exit_code;
    } catch (const NotMMatrix& e) {
        err << "rsnet: NotMMatrix: " << e.what() << "\n";
        return kExitFailure;
    } catch (const ConfigError& e) {
        err << "rsnet: configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "rsnet: configuration error: line " << e.line() << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const GapTooLarge& e) {
        err << "rsnet: configuration error: line " << e.line() << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "rsnet: configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DimensionMismatch& e) {
        err << "rsnet: configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "rsnet: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace rsnet::cli
