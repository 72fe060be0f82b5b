#include <catch_amalgamated.hpp>

#include "instances.hpp"
#include "rsnet/errors.hpp"
#include "rsnet/sector.hpp"

#include <cstring>

using namespace rsnet;
using Catch::Approx;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

PiecewiseLinear half_slope() {
    PiecewiseLinear p;
    p.knots = {-1.0, 1.0};
    p.values = {-0.5, 0.5};
    return p;
}

}  // namespace

TEST_CASE("eval_f examples", "[sector]") {
    CHECK(eval_f(SectorPair::saturation(3), vec({0.5, 2, -3})) == vec({0.5, 1, -1}));
    CHECK(eval_f(SectorPair::identity(1), vec({7})) == vec({7}));
    const auto custom = SectorPair::custom({half_slope()});
    CHECK(eval_f(custom, vec({0.4}))[0] == Approx(0.2));
    CHECK(eval_f(custom, vec({5.0}))[0] == Approx(0.5));
    CHECK(eval_f(custom, vec({-5.0}))[0] == Approx(-0.5));
}

TEST_CASE("eval_h examples", "[sector]") {
    CHECK(eval_h(SectorPair::saturation(1), vec({2}))[0] == 1.0);
    CHECK(eval_h(SectorPair::saturation(1), vec({0.5}))[0] == 0.0);
    CHECK(eval_h(SectorPair::identity(1), vec({7}))[0] == 0.0);
    CHECK_THROWS_AS(eval_f(SectorPair::saturation(2), vec({1})), DimensionMismatch);
}

TEST_CASE("shift_pair examples", "[sector]") {
    const auto sat = SectorPair::saturation(1);
    const auto same = shift_pair(sat, vec({0}));
    for (double x : {-3.0, -1.0, -0.2, 0.0, 0.7, 1.0, 4.0}) {
        CHECK(same.f(0, x) == sat.f(0, x));
    }
    CHECK(shift_pair(sat, vec({3})).f(0, -1.0) == 0.0);
    CHECK(shift_pair(sat, vec({0.5})).f(0, 0.2) == Approx(0.2));
    CHECK(shift_pair(SectorPair::identity(1), vec({3})).kind() == SectorKind::IdentityZero);
}

TEST_CASE("scale_pair examples", "[sector]") {
    const auto sat = SectorPair::saturation(1);
    const auto unit = scale_pair(sat, DiagonalScaling(Vector::Ones(1)));
    for (double x : {-3.0, -0.4, 0.0, 0.9, 2.5}) CHECK(unit.f(0, x) == sat.f(0, x));
    const auto twice = scale_pair(sat, DiagonalScaling(vec({2})));
    CHECK(twice.f(0, 1.0) == Approx(1.0));
    CHECK(twice.f(0, 4.0) == Approx(2.0));
    CHECK(twice.f(0, -9.0) == Approx(-2.0));
}

TEST_CASE("sector_audit examples", "[sector]") {
    const auto report = sector_audit(SectorPair::saturation(1), 10000, Interval{-5, 5});
    CHECK(report.pass);
    CHECK(report.f_zero_at_origin);
    CHECK(report.f_slope.min >= 0.0);
    CHECK(report.f_slope.max <= 1.0 + 1e-12);

    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        const double x0 = testing::uniform(rng, -10, 10);
        CHECK(sector_audit(shift_pair(SectorPair::saturation(1), vec({x0})), 2000, Interval{-5, 5}).pass);
    }

    PiecewiseLinear steep;
    steep.knots = {0.0, 1.0};
    steep.values = {0.0, 1.5};
    const auto bad = SectorPair::custom({steep});
    CHECK_FALSE(sector_audit(bad, 10000, Interval{-5, 5}).pass);
    CHECK_FALSE(sector_violation(bad).empty());
    CHECK(sector_violation(SectorPair::saturation(2)).empty());
}

TEST_CASE("custom pair structural validation", "[sector]") {
    PiecewiseLinear unsorted;
    unsorted.knots = {1.0, 0.0};
    unsorted.values = {0.0, 0.0};
    CHECK_THROWS_AS(SectorPair::custom({unsorted}), InvalidArgument);
    PiecewiseLinear empty;
    CHECK_THROWS_AS(SectorPair::custom({empty}), InvalidArgument);
}

TEST_CASE("pwl integral is exact", "[sector]") {
    const auto sat = SectorPair::saturation(1);
    // int_0^x sat = x^2/2 for |x| <= 1, then 1/2 + (|x| - 1).
    CHECK(sat.integral_f(0, 0.5) == Approx(0.125));
    CHECK(sat.integral_f(0, 3.0) == Approx(2.5));
    CHECK(sat.integral_f(0, -3.0) == Approx(2.5));
    CHECK(SectorPair::identity(1).integral_f(0, -2.0) == Approx(2.0));
    const auto shifted = shift_pair(sat, vec({0.5}));
    // f~(x) = sat(x + 0.5) - 0.5: x in [0, 0.5] is linear, then constant 0.5.
    CHECK(shifted.integral_f(0, 2.0) == Approx(0.125 + 1.5 * 0.5));
}

TEST_CASE("f + h is the identity bit for bit", "[sector][property]") {
    std::mt19937_64 rng(17);
    std::vector<SectorPair> pairs{SectorPair::saturation(3), SectorPair::identity(3),
                                  testing::random_custom_pair(rng, 3)};
    for (const auto& pair : pairs) {
        for (int k = 0; k < 1000; ++k) {
            const Vector u = testing::uniform_vector(rng, 3, -20, 20);
            const Vector f = eval_f(pair, u);
            const Vector h = eval_h(pair, u);
            for (Eigen::Index i = 0; i < 3; ++i) {
                // h is u - f, so f + h rounds back to u.
                CHECK(h[i] == u[i] - f[i]);
            }
        }
    }
}

TEST_CASE("monotone and 1-lipschitz", "[sector][property]") {
    std::mt19937_64 rng(23);
    std::vector<SectorPair> pairs{SectorPair::saturation(2), testing::random_custom_pair(rng, 2),
                                  shift_pair(SectorPair::saturation(2), vec({0.3, -4}))};
    for (const auto& pair : pairs) {
        for (int k = 0; k < 2000; ++k) {
            const Vector x = testing::uniform_vector(rng, 2, -10, 10);
            const Vector y = x + testing::uniform_vector(rng, 2, 0, 5);
            const Vector fx = eval_f(pair, x);
            const Vector fy = eval_f(pair, y);
            CHECK((fy - fx).minCoeff() >= -1e-12);
            CHECK(((fy - fx).array() <= (y - x).array() + 1e-12).all());
        }
    }
}

TEST_CASE("audits on transformed pairs", "[sector][property]") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pair = trial % 2 == 0 ? SectorPair::saturation(2) : testing::random_custom_pair(rng, 2);
        const auto x0 = testing::uniform_vector(rng, 2, -5, 5);
        const auto d = DiagonalScaling(testing::uniform_vector(rng, 2, 0.1, 10));
        CHECK(sector_audit(pair, 2000, Interval{-8, 8}, trial).pass);
        CHECK(sector_audit(shift_pair(pair, x0), 2000, Interval{-8, 8}, trial).pass);
        CHECK(sector_audit(scale_pair(pair, d), 2000, Interval{-8, 8}, trial).pass);
        CHECK(sector_violation(shift_pair(pair, x0)).empty());
        CHECK(sector_violation(scale_pair(pair, d)).empty());
    }
}
