#include <catch_amalgamated.hpp>

#include "instances.hpp"
#include "rsnet/equilibrium.hpp"
#include "rsnet/errors.hpp"
#include "rsnet/heating.hpp"

using namespace rsnet;
using Catch::Approx;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }

// Damped semismooth Newton on g(u) = h(u) + S^-1 A^-1 (B f(u) + w), using
// one-sided slopes of the PWL f. Independent of the contraction machinery.
Vector newton_oracle(const PlantModel& plant, const ControllerSpec& ctrl, const Vector& w) {
    const Vector sa_inv = plant.a().cwiseProduct(ctrl.s).cwiseInverse();
    const auto g = [&](const Vector& u) {
        const Vector f = eval_f(plant.pair(), u);
        return Vector(u - f + sa_inv.cwiseProduct(plant.b() * f + w));
    };
    const auto n = static_cast<Eigen::Index>(plant.n());
    Vector u = Vector::Zero(n);
    for (int it = 0; it < 200; ++it) {
        const Vector gu = g(u);
        if (gu.cwiseAbs().maxCoeff() < 1e-14) break;
        Vector slope(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            const double step = 1e-7 * std::max(1.0, std::abs(u[i]));
            slope[i] = (plant.pair().f(ii, u[i] + step) - plant.pair().f(ii, u[i])) / step;
        }
        const Matrix jac = Matrix(Vector(Vector::Ones(n) - slope).asDiagonal()) +
                           sa_inv.asDiagonal() * plant.b() * slope.asDiagonal();
        const Vector du = jac.partialPivLu().solve(-gu);
        double t = 1.0;
        while (t > 1e-8 && g(u + t * du).lpNorm<1>() > (1.0 - 1e-4 * t) * gu.lpNorm<1>()) t *= 0.5;
        u += t * du;
    }
    return u;
}

}  // namespace

TEST_CASE("contraction constants of the scalar identity system", "[equilibrium]") {
    const PlantModel plant(v1(1), Matrix::Identity(1, 1), SectorPair::saturation(1));
    const auto ctrl = ControllerSpec::decentralized(v1(1), v1(1), v1(1));
    const auto map = build_contraction(plant, ctrl, v1(0));
    CHECK(map.b_hat()(0, 0) == Approx(1.0));
    CHECK(map.k() == Approx(3.0));
    CHECK(map.lambda() == Approx(2.0 / 3.0));
    CHECK(map.mu()[0] == Approx(2.0 / 3.0));
    CHECK(map.gamma_bar() == Approx(2.0 / 3.0));
}

TEST_CASE("diagonal B gives diagonal B hat", "[equilibrium]") {
    Vector diag(3);
    diag << 1.0, 2.5, 0.7;
    const PlantModel plant(Vector::Ones(3), Matrix(diag.asDiagonal()), SectorPair::saturation(3));
    const auto ctrl = ControllerSpec::decentralized(Vector::Ones(3), Vector::Ones(3), Vector::Constant(3, 0.5));
    const auto map = build_contraction(plant, ctrl, Vector::Zero(3));
    const Matrix off = map.b_hat() - Matrix(map.b_hat().diagonal().asDiagonal());
    CHECK(off.cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(map.mu()[i] == Approx((map.k() - map.b_hat()(i, i)) / map.k()));
    }
}

TEST_CASE("benchmark contraction bound", "[equilibrium]") {
    const auto scenario = paper_benchmark_scenario();
    const auto sf = to_standard_form(scenario);
    const auto ctrl = scenario_controller(scenario, sf.plant, ControllerVariant::Decentralized);
    const auto map = build_contraction(sf.plant, ctrl, sf.w.at(0.0));
    CHECK(map.gamma_bar() < 1.0);
    CHECK(measure_contraction(map, 1000, 7) <= map.gamma_bar() + 1e-12);
}

TEST_CASE("fixed point iteration examples", "[equilibrium]") {
    const auto plant = testing::scalar_plant();
    const auto ctrl = testing::scalar_controller();

    const auto zero_map = build_contraction(plant, ctrl, v1(0));
    const auto at_zero = iterate_fixed_point(zero_map, v1(0));
    CHECK(at_zero.iterations == 1);
    CHECK(at_zero.zeta[0] == 0.0);

    for (const auto& [w, u0] : {std::pair{-0.3, 0.3}, std::pair{-2.0, 3.0}}) {
        const auto map = build_contraction(plant, ctrl, v1(w));
        const auto fp = iterate_fixed_point(map, map.initial_iterate());
        CHECK(fp.zeta[0] / map.scaling()[0] == Approx(u0).margin(1e-9));
    }
    CHECK_THROWS_AS(iterate_fixed_point(zero_map, v1(0), 0.0), InvalidArgument);
}

TEST_CASE("max iterations is reported", "[equilibrium]") {
    const auto plant = testing::scalar_plant();
    const auto map = build_contraction(plant, testing::scalar_controller(), v1(-2));
    try {
        iterate_fixed_point(map, v1(100), 1e-10, 3);
        FAIL("expected MaxIterationsExceeded");
    } catch (const MaxIterationsExceeded& e) {
        CHECK(e.iterations() == 3);
        CHECK(e.last_delta() > 0.0);
    }
}

TEST_CASE("solve equilibrium on the scalar example", "[equilibrium]") {
    const auto plant = testing::scalar_plant();
    const auto ctrl = testing::scalar_controller();

    const auto origin = solve_equilibrium(plant, ctrl, v1(0));
    CHECK(origin.x0[0] == 0.0);
    CHECK(origin.z0[0] == 0.0);
    CHECK(origin.u0[0] == 0.0);

    const auto low = solve_equilibrium(plant, ctrl, v1(-0.3));
    CHECK(low.x0[0] == Approx(0.0).margin(1e-9));
    CHECK(low.z0[0] == Approx(-0.6).margin(1e-9));
    CHECK(low.u0[0] == Approx(0.3).margin(1e-9));

    const auto sat = solve_equilibrium(plant, ctrl, v1(-2));
    CHECK(sat.x0[0] == Approx(-1.0).margin(1e-9));
    CHECK(sat.z0[0] == Approx(-4.0).margin(1e-9));
    CHECK(sat.u0[0] == Approx(3.0).margin(1e-9));
    CHECK(sat.residual_stationary <= 1e-10);
    CHECK(sat.contraction_bound < 1.0);

    CHECK_THROWS_AS(solve_equilibrium(plant, ControllerSpec::static_default(plant), v1(0)), UnsupportedVariant);
}

TEST_CASE("two-agent equilibrium against the newton oracle", "[equilibrium]") {
    Matrix b(2, 2);
    b << 2, -1, -1, 2;
    const PlantModel plant(Vector::Ones(2), b, SectorPair::saturation(2));
    const auto ctrl = ControllerSpec::decentralized(Vector::Constant(2, 0.5), Vector::Constant(2, 0.25),
                                                    Vector::Constant(2, 0.5));
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector w = testing::uniform_vector(rng, 2, -6, 6);
        const auto eq = solve_equilibrium(plant, ctrl, w);
        CHECK(eq.residual_stationary <= 1e-10);
        const Vector u_ref = newton_oracle(plant, ctrl, w);
        CHECK((eq.u0 - u_ref).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("random instances against the newton oracle", "[equilibrium][property]") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 60; ++trial) {
        const auto inst = testing::random_instance(rng, 1 + trial % 8);
        const auto eq = solve_equilibrium(inst.plant, inst.ctrl, inst.w);
        CHECK(eq.residual_stationary <= 1e-10);
        const Vector u_ref = newton_oracle(inst.plant, inst.ctrl, inst.w);
        CHECK((eq.u0 - u_ref).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, u_ref.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("uniqueness from random starts", "[equilibrium][property]") {
    std::mt19937_64 rng(10);
    const double tol = 1e-10;
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_instance(rng, 1 + trial % 8);
        const auto n = static_cast<Eigen::Index>(inst.plant.n());
        const auto map = build_contraction(inst.plant, inst.ctrl, inst.w);
        const Vector ref = iterate_fixed_point(map, map.initial_iterate(), tol).zeta;
        for (int start = 0; start < 50; ++start) {
            const Vector z0 = testing::uniform_vector(rng, n, -100, 100);
            const Vector z = iterate_fixed_point(map, z0, tol).zeta;
            CHECK((z - ref).lpNorm<1>() <= 10 * tol);
        }
    }
}

TEST_CASE("equilibrium is stationary for the closed loop", "[equilibrium][property]") {
    std::mt19937_64 rng(12);
    const double tol = 1e-10;
    for (int trial = 0; trial < 50; ++trial) {
        const auto inst = testing::random_instance(rng, 1 + trial % 8);
        const auto eq = solve_equilibrium(inst.plant, inst.ctrl, inst.w, tol);
        const auto d = closed_loop_derivative(inst.plant, inst.ctrl, ClosedLoopState{eq.x0, eq.z0}, inst.w);
        CHECK(d.dx.cwiseAbs().maxCoeff() <= 10 * tol);
        CHECK(d.dz.cwiseAbs().maxCoeff() <= 10 * tol);
        CHECK((d.u - eq.u0).cwiseAbs().maxCoeff() <= 10 * tol * std::max(1.0, eq.u0.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("successive deltas contract by gamma bar", "[equilibrium][property]") {
    std::mt19937_64 rng(13);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int trial = 0; trial < 30; ++trial) {
        const auto inst = testing::random_instance(rng, 1 + trial % 8);
        const auto map = build_contraction(inst.plant, inst.ctrl, inst.w);
        const Vector z0 = testing::uniform_vector(rng, static_cast<Eigen::Index>(map.n()), -50, 50);
        const auto fp = iterate_fixed_point(map, z0, 1e-10, 1'000'000, true);
        REQUIRE(fp.deltas.size() == static_cast<std::size_t>(fp.iterations));
        const double scale = std::max(1.0, fp.zeta.lpNorm<Eigen::Infinity>()) * 64.0 * eps *
                             static_cast<double>(map.n());
        for (std::size_t m = 0; m + 1 < fp.deltas.size(); ++m) {
            CHECK(fp.deltas[m + 1] <= map.gamma_bar() * fp.deltas[m] + scale);
        }
    }
}

TEST_CASE("measured contraction ratio", "[equilibrium][property]") {
    // Linear map with diagonal B hat: the ratio is the largest diagonal factor.
    Vector diag(3);
    diag << 1.0, 3.0, 0.4;
    const PlantModel lin(Vector::Ones(3), Matrix(diag.asDiagonal()), SectorPair::identity(3));
    const auto ctrl = ControllerSpec::decentralized(Vector::Ones(3), Vector::Ones(3), Vector::Ones(3));
    const auto map = build_contraction(lin, ctrl, Vector::Zero(3));
    const double expected = ((map.k() - map.b_hat().diagonal().array()) / map.k()).maxCoeff();
    CHECK(measure_contraction(map, 1000, 3) == Approx(expected).epsilon(1e-12));

    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 30; ++trial) {
        const auto inst = testing::random_instance(rng, 1 + trial % 8);
        const auto m = build_contraction(inst.plant, inst.ctrl, inst.w);
        const double ratio = measure_contraction(m, 1000, static_cast<std::uint64_t>(trial));
        CHECK(ratio <= m.gamma_bar() + 1e-12);
        // Translation by w hat leaves the ratio unchanged.
        const auto shifted = m.with_w_hat(m.w_hat() + testing::uniform_vector(rng, m.w_hat().size(), -50, 50));
        CHECK(measure_contraction(shifted, 1000, static_cast<std::uint64_t>(trial)) == Approx(ratio).epsilon(1e-9));
    }
}

TEST_CASE("uniqueness probe", "[equilibrium]") {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_instance(rng, 1 + trial % 8);
        const auto eq = solve_equilibrium(inst.plant, inst.ctrl, inst.w);
        const auto probe = probe_uniqueness(inst.plant, inst.ctrl, inst.w, eq, 50, 7 + trial);
        CHECK(probe.restarts == 50);
        CHECK(probe.pass);
        // Triangle inequality, up to rounding of the two norm sums.
        CHECK(probe.max_spread <= probe.max_distance + 1e-13 * std::max(1.0, eq.u0.lpNorm<1>()));
    }
    const auto plant = testing::scalar_plant();
    const auto ctrl = testing::scalar_controller();
    const auto eq = solve_equilibrium(plant, ctrl, v1(-2));
    auto wrong = eq;
    wrong.u0[0] += 1e-3;
    CHECK_FALSE(probe_uniqueness(plant, ctrl, v1(-2), wrong, 5, 1).pass);
    CHECK_THROWS_AS(probe_uniqueness(plant, ctrl, v1(-2), eq, 0, 1), InvalidArgument);
}
