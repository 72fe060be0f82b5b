#include <catch_amalgamated.hpp>

#include "rsnet/cli.hpp"
#include "rsnet/errors.hpp"
#include "rsnet/simulate.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rsnet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run rsnet_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "rsnet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "rsnet_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json textbook_scenario() {
    return json::parse(R"({"kind": "standard", "a_per_h": [1.0], "B": [[1.0]], "w": -2.0,
                           "p": 1.0, "r": 0.5, "s": 0.5})");
}

// Writes {"scenario": scenario, ...extra} and returns the config path.
fs::path write_config(const fs::path& dir, const json& scenario, json extra = json::object()) {
    extra["scenario"] = scenario;
    if (!extra.contains("out_dir")) extra["out_dir"] = "out";
    const auto path = dir / "config.json";
    std::ofstream(path) << extra.dump(2);
    return path;
}

json report(const fs::path& path) { return json::parse(slurp(path)); }

const json& check(const json& rep, const std::string& name) {
    for (const auto& c : rep.at("checks")) {
        if (c.at("name") == name) return c;
    }
    FAIL("no check named " << name);
    static json none;
    return none;
}

}  // namespace

TEST_CASE("certify on the textbook system passes", "[cli]") {
    const auto dir = scratch("certify_textbook");
    const auto cfg = write_config(dir, textbook_scenario(), {{"seed", 3}});
    const auto r = rsnet_cli({"certify", "--config", cfg.string()});
    INFO(r.out << r.err);
    CHECK(r.code == cli::kExitOk);
    const auto rep = report(dir / "out" / "certify_report.json");
    CHECK(rep.at("schema_version") == cli::kReportSchemaVersion);
    CHECK(rep.at("status") == "pass");
    for (const auto& c : rep.at("checks")) {
        INFO(c.at("name"));
        CHECK(c.at("status") == "pass");
    }
    CHECK(check(rep, "equilibrium").at("u0")[0].get<double>() == Catch::Approx(3.0).margin(1e-9));
    CHECK(check(rep, "optimality").at("lp_cost").get<double>() == Catch::Approx(1.0));
    CHECK(fs::exists(dir / "out" / "certify_report.txt"));
}

TEST_CASE("certify on the benchmark warns about the tuning rule", "[cli]") {
    const auto dir = scratch("certify_benchmark");
    const auto cfg = write_config(dir, {{"builtin", "benchmark"}});
    const auto r = rsnet_cli({"certify", "--config", cfg.string()});
    INFO(r.out << r.err);
    CHECK(r.code == cli::kExitWarning);
    const auto rep = report(dir / "out" / "certify_report.json");
    CHECK(rep.at("status") == "warning");
    CHECK(check(rep, "tuning").at("status") == "warn");
    CHECK(check(rep, "tuning").at("min_windup_margin").get<double>() == Catch::Approx(-4.0));
    CHECK(check(rep, "equilibrium").at("status") == "pass");
    CHECK(check(rep, "uniqueness").at("status") == "pass");
    CHECK(check(rep, "contraction").at("status") == "pass");
    CHECK(check(rep, "optimality").at("status") == "pass");
}

TEST_CASE("certify reports a non M-matrix", "[cli]") {
    const auto dir = scratch("certify_not_m");
    auto scenario = textbook_scenario();
    scenario["a_per_h"] = {1.0, 1.0};
    scenario["B"] = json::parse("[[1, 2], [3, 1]]");
    const auto cfg = write_config(dir, scenario);
    const auto r = rsnet_cli({"certify", "--config", cfg.string()});
    CHECK(r.code == cli::kExitFailure);
    const auto rep = report(dir / "out" / "certify_report.json");
    CHECK(check(rep, "m_matrix").at("error") == "NotMMatrix");
    CHECK(rsnet_cli({"simulate", "--config", cfg.string()}).code == cli::kExitFailure);
    CHECK(rsnet_cli({"equilibrium", "--config", cfg.string()}).err.find("NotMMatrix") != std::string::npos);
}

TEST_CASE("certify fails an inadmissible epsilon", "[cli]") {
    const auto dir = scratch("certify_eps");
    const auto cfg = write_config(dir, {{"builtin", "benchmark"}}, {{"epsilon", 1.0}, {"certify", {{"monitor_runs", 0}}}});
    const auto r = rsnet_cli({"certify", "--config", cfg.string()});
    CHECK(r.code == cli::kExitFailure);
    const auto rep = report(dir / "out" / "certify_report.json");
    CHECK(check(rep, "lyapunov_epsilon").at("status") == "fail");
    CHECK(check(rep, "lyapunov_epsilon").at("epsilon_bound").get<double>() < 1.0);
}

TEST_CASE("certify skips the lp certificate without a saturation pair", "[cli]") {
    const auto dir = scratch("certify_identity");
    auto scenario = textbook_scenario();
    scenario["pair"] = "identity";
    const auto cfg = write_config(dir, scenario);
    const auto r = rsnet_cli({"certify", "--config", cfg.string()});
    CHECK(r.code == cli::kExitOk);
    CHECK(check(report(dir / "out" / "certify_report.json"), "optimality").at("status") == "skipped");

    // A supplied gamma makes the certificate applicable, and its hypothesis fails.
    const auto cfg2 = write_config(dir, scenario, {{"gamma", 1.0}});
    CHECK(rsnet_cli({"certify", "--config", cfg2.string()}).code == cli::kExitWarning);
}

TEST_CASE("simulate emits one cost triple per variant", "[cli]") {
    const auto dir = scratch("simulate_benchmark");
    const auto cfg = write_config(dir, {{"builtin", "benchmark"}},
                                  {{"controllers", {"decentralized", "coordinating", "static"}}, {"csv_stride", 20}});
    const auto r = rsnet_cli({"simulate", "--config", cfg.string()});
    INFO(r.err);
    REQUIRE(r.code == cli::kExitOk);
    const auto rep = report(dir / "out" / "simulate_report.json");
    REQUIRE(rep.at("runs").size() == 3);
    for (const auto& run : rep.at("runs")) {
        CHECK(run.at("J1").get<double>() > 0.0);
        CHECK(run.at("Jinf").get<double>() > 0.0);
        CHECK(run.at("J2").get<double>() > 0.0);
        const auto path = dir / "out" / run.at("trajectory_csv").get<std::string>();
        std::ifstream in(path);
        const auto traj = read_trajectory_csv(in);
        CHECK(traj.t.back() == 336.0);
        CHECK(traj.n() == 10);
    }
    CHECK(rep.at("t_span_h")[1] == 336.0);
}

TEST_CASE("zero disturbance gives zero costs", "[cli]") {
    const auto dir = scratch("simulate_zero");
    auto scenario = textbook_scenario();
    scenario["w"] = 0.0;
    const auto cfg = write_config(dir, scenario, {{"controllers", {"decentralized", "coordinating", "static"}}});
    REQUIRE(rsnet_cli({"simulate", "--config", cfg.string()}).code == cli::kExitOk);
    const auto rep = report(dir / "out" / "simulate_report.json");
    for (const auto& run : rep.at("runs")) {
        CHECK(run.at("J1") == 0.0);
        CHECK(run.at("Jinf") == 0.0);
        CHECK(run.at("J2") == 0.0);
    }
    // 50 / min(a) without a disturbance series.
    CHECK(rep.at("t_span_h")[1] == 50.0);
}

TEST_CASE("outputs are byte-identical across runs", "[cli]") {
    const auto dir = scratch("determinism");
    const auto cfg = write_config(dir, {{"builtin", "benchmark"}, {"n", 4}},
                                  {{"controllers", {"decentralized", "static"}}, {"t_span_h", {0, 60}}});
    for (const auto* cmd : {"compare", "certify"}) {
        REQUIRE(rsnet_cli({cmd, "--config", cfg.string(), "--out", (dir / "a").string(), "--seed", "11"}).code <= 2);
        REQUIRE(rsnet_cli({cmd, "--config", cfg.string(), "--out", (dir / "b").string(), "--seed", "11"}).code <= 2);
    }
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        ++files;
        INFO(entry.path().filename());
        CHECK(slurp(entry.path()) == slurp(dir / "b" / entry.path().filename()));
    }
    CHECK(files >= 6);
}

TEST_CASE("compare tables round-trip", "[cli]") {
    const auto dir = scratch("compare");
    const auto cfg = write_config(dir, {{"builtin", "benchmark"}},
                                  {{"controllers", {"decentralized", "coordinating", "static", "decentralized"}},
                                   {"dt_h", 0.02}});
    const auto r = rsnet_cli({"compare", "--config", cfg.string()});
    REQUIRE(r.code == cli::kExitOk);
    std::ifstream in(dir / "out" / "compare.csv");
    const auto rows = cli::read_cost_table(in);
    const auto rep = report(dir / "out" / "compare_report.json");
    REQUIRE(rows.size() == 4);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& run = rep.at("runs")[k];
        CHECK(rows[k].controller == run.at("name"));
        CHECK(rows[k].j1 == run.at("J1").get<double>());
        CHECK(rows[k].jinf == run.at("Jinf").get<double>());
        CHECK(rows[k].j2 == run.at("J2").get<double>());
    }
    // Config order, and a repeated variant reproduces its row.
    CHECK(rows[0].controller == "decentralized_1");
    CHECK(rows[3].controller == "decentralized_4");
    CHECK(rows[0].j1 == rows[3].j1);
    CHECK(rows[0].j2 == rows[3].j2);
    CHECK(rep.at("orderings").at("Jinf_coordinating_lt_decentralized").is_boolean());
    CHECK(fs::exists(dir / "out" / "compare.txt"));

    std::istringstream bad("controller,J1,Jinf,J2\nx,1,2\n");
    CHECK_THROWS_AS(cli::read_cost_table(bad), ParseError);
}

TEST_CASE("equilibrium and lp commands", "[cli]") {
    const auto dir = scratch("single");
    const auto cfg = write_config(dir, textbook_scenario());
    REQUIRE(rsnet_cli({"equilibrium", "--config", cfg.string()}).code == cli::kExitOk);
    const auto eq = report(dir / "out" / "equilibrium.json");
    CHECK(eq.at("x0")[0].get<double>() == Catch::Approx(-1.0).margin(1e-9));
    CHECK(eq.at("z0")[0].get<double>() == Catch::Approx(-4.0).margin(1e-9));
    REQUIRE(rsnet_cli({"lp", "--config", cfg.string()}).code == cli::kExitOk);
    const auto lp = report(dir / "out" / "lp.json");
    CHECK(lp.at("cost").get<double>() == Catch::Approx(1.0));
    CHECK(lp.at("gamma_source") == "admissible_gamma");

    const auto slow = write_config(dir, textbook_scenario(), {{"max_iterations", 2}});
    CHECK(rsnet_cli({"equilibrium", "--config", slow.string()}).code == cli::kExitFailure);
}

TEST_CASE("flags override the configuration", "[cli]") {
    const auto dir = scratch("overrides");
    const auto cfg = write_config(dir, textbook_scenario());
    const auto out = dir / "elsewhere";
    const auto r = rsnet_cli({"simulate", "--config", cfg.string(), "--out", out.string(), "--controller", "static",
                        "--controller", "coordinating", "--dt", "0.05"});
    REQUIRE(r.code == cli::kExitOk);
    const auto rep = report(out / "simulate_report.json");
    CHECK(rep.at("dt_h") == 0.05);
    REQUIRE(rep.at("runs").size() == 2);
    CHECK(rep.at("runs")[0].at("controller") == "static");
    // Options may also precede the subcommand.
    CHECK(rsnet_cli({"--config", cfg.string(), "--out", out.string(), "lp"}).code == cli::kExitOk);
}

TEST_CASE("warnings and blow-ups", "[cli]") {
    const auto dir = scratch("runtime");
    const auto coarse = write_config(dir, textbook_scenario());
    const auto r = rsnet_cli({"simulate", "--config", coarse.string(), "--dt", "3"});
    CHECK(r.code == cli::kExitWarning);
    CHECK(r.out.find("warning") != std::string::npos);

    auto scenario = textbook_scenario();
    scenario["a_per_h"] = {0.1};
    scenario["pair"] = "identity";
    scenario["K_static"] = {{-1.0}};
    const auto unstable = write_config(dir, scenario, {{"controller", "static"}, {"t_span_h", {0, 100}}});
    const auto blow = rsnet_cli({"simulate", "--config", unstable.string()});
    CHECK(blow.code == cli::kExitFailure);
    const auto rep = report(dir / "out" / "simulate_report.json");
    CHECK(rep.at("runs")[0].at("error") == "NonFiniteState");
    CHECK(rep.at("runs")[0].at("time_h").get<double>() > 0.0);
}

TEST_CASE("usage and configuration errors exit 64", "[cli]") {
    const auto dir = scratch("usage");
    const auto good = write_config(dir, textbook_scenario());
    CHECK(rsnet_cli({}).code == cli::kExitUsage);
    CHECK(rsnet_cli({"simulate"}).code == cli::kExitUsage);
    CHECK(rsnet_cli({"bogus", "--config", good.string()}).code == cli::kExitUsage);
    CHECK(rsnet_cli({"simulate", "--config", (dir / "missing.json").string()}).code == cli::kExitUsage);
    CHECK(rsnet_cli({"simulate", "--config", good.string(), "--dt", "-1"}).code == cli::kExitUsage);
    CHECK(rsnet_cli({"simulate", "--config", good.string(), "--seed", "abc"}).code == cli::kExitUsage);
    CHECK(rsnet_cli({"simulate", "--config", good.string(), "--controller", "fuzzy"}).code == cli::kExitUsage);
    CHECK(rsnet_cli({"compare", "--config", good.string()}).code == cli::kExitUsage);
    CHECK(rsnet_cli({"--help"}).code == cli::kExitOk);

    const auto bad_json = dir / "bad.json";
    std::ofstream(bad_json) << "{\"scenario\": ";
    CHECK(rsnet_cli({"simulate", "--config", bad_json.string()}).code == cli::kExitUsage);

    const std::vector<json> bad_extras = {
        {{"unknown_key", 1}},
        {{"dt_h", -0.1}},
        {{"tolerance", 0}},
        {{"t_span_h", {5, 1}}},
        {{"seed", -4}},
        {{"controllers", json::array()}},
        {{"controller", "static"}, {"controllers", {"static"}}},
        {{"certify", {{"restarts", 0}}}},
        {{"certify", {{"what", 1}}}},
        {{"init", {{"x", {1, 2, 3}}}}},
        {{"gamma", {-1.0}}},
        {{"schema_version", 7}},
    };
    for (const auto& extra : bad_extras) {
        const auto cfg = write_config(dir, textbook_scenario(), extra);
        INFO(extra.dump());
        CHECK(rsnet_cli({"simulate", "--config", cfg.string()}).code == cli::kExitUsage);
    }

    auto scenario = textbook_scenario();
    scenario["p"] = -1.0;
    CHECK(rsnet_cli({"simulate", "--config", write_config(dir, scenario).string()}).code == cli::kExitUsage);
    scenario = textbook_scenario();
    scenario.erase("B");
    CHECK(rsnet_cli({"certify", "--config", write_config(dir, scenario).string()}).code == cli::kExitUsage);

    std::ofstream(dir / "gappy.csv") << "0,1\n1,1\n9,1\n";
    const json csv_scenario = {{"builtin", "benchmark"}, {"T_ext_degC", {{"csv", "gappy.csv"}}}};
    CHECK(rsnet_cli({"simulate", "--config", write_config(dir, csv_scenario).string()}).code == cli::kExitUsage);
    const json missing_csv = {{"builtin", "benchmark"}, {"T_ext_degC", {{"csv", "nope.csv"}}}};
    CHECK(rsnet_cli({"simulate", "--config", write_config(dir, missing_csv).string()}).code == cli::kExitUsage);

    const auto not_a_dir = dir / "file";
    std::ofstream(not_a_dir) << "x";
    CHECK(rsnet_cli({"lp", "--config", good.string(), "--out", (not_a_dir / "sub").string()}).code == cli::kExitUsage);
}

TEST_CASE("config files resolve relative paths", "[cli]") {
    const auto dir = scratch("relative");
    fs::create_directories(dir / "scenarios");
    std::ofstream(dir / "scenarios" / "one.json") << textbook_scenario().dump();
    std::ofstream(dir / "run.json") << R"({"scenario": "scenarios/one.json", "out_dir": "results"})";
    REQUIRE(rsnet_cli({"equilibrium", "--config", (dir / "run.json").string()}).code == cli::kExitOk);
    CHECK(fs::exists(dir / "results" / "equilibrium.json"));

    const auto bundled = fs::path(RSNET_SOURCE_DIR) / "configs";
    for (const auto* name : {"benchmark.json", "textbook_n1.json", "benchmark_csv.json"}) {
        INFO(name);
        const auto cfg = cli::load_run_config(bundled / name);
        CHECK_NOTHROW(resolve_scenario(cfg.scenario, cfg.base_dir));
    }
}
