#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "labelfuse/bounds.hpp"

using namespace labelfuse;

namespace {

double rel_err(double x, double ref) { return std::fabs(x - ref) / std::fabs(ref); }

std::vector<double> uniform_probs(uint64_t c) {
    return std::vector<double>(c, 1.0 / (double)c);
}

// Reference values frozen from an independent float64 implementation.
constexpr double kC3At1 = 0.36787944117144233;       // e^-1
constexpr double kC3At01 = 0.04837418035959575;
constexpr double kC3At02 = 0.0936537653899093;
constexpr double kC3At025 = 0.11520313228561947;
constexpr double kC3At05 = 0.21306131942526685;
constexpr double kC3At2 = 0.5676676416183064;
constexpr double kUpperAt01 = 0.18181818181818182;
constexpr double kUpperAt05 = 0.6666666666666666;
constexpr double kC4At01P09 = 0.4861976093903201;
constexpr double kC4At001P1 = 0.5012489557365449;
constexpr double kReprExact001 = 0.006626145155327541;    // beta = 1/3
constexpr double kReprExact1em3 = 0.0006662594793361815;  // beta = 1/3
constexpr double kReprTheorem001 = 0.006012421383360509;  // beta = 1/3
constexpr double kReprTheorem1Tiny = 0.36787944117234456; // beta = 1e-6

}  // namespace

TEST_CASE("q is the surviving fraction and decreases in alpha") {
    CHECK(rel_err(q_function(1.0), -std::expm1(-1.0)) < 1e-14);
    CHECK(rel_err(q_function(2.0), -std::expm1(-2.0) / 2.0) < 1e-14);
    // tiny-alpha series branch agrees with the direct form at the switch
    CHECK(rel_err(q_function(9.9e-5), -std::expm1(-9.9e-5) / 9.9e-5) < 1e-12);
    double prev = 2.0;
    for (double a = 1e-5; a < 50.0; a *= 1.3) {
        double v = q_function(a);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(q_function(0.0), std::domain_error);
    CHECK_THROWS_AS(q_function(-1.0), std::domain_error);
    double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(q_function(inf), std::domain_error);
}

TEST_CASE("batch-merge bound matches frozen values") {
    CHECK(rel_err(c3_bound(1.0), std::exp(-1.0)) < 1e-12);
    CHECK(rel_err(c3_bound(1.0), kC3At1) < 1e-13);
    CHECK(rel_err(c3_bound(0.1), kC3At01) < 1e-13);
    CHECK(rel_err(c3_bound(0.2), kC3At02) < 1e-13);
    CHECK(rel_err(c3_bound(0.25), kC3At025) < 1e-13);
    CHECK(rel_err(c3_bound(0.5), kC3At05) < 1e-13);
    CHECK(rel_err(c3_bound(2.0), kC3At2) < 1e-13);
    // complement identity, both evaluation branches
    for (double a : {1e-6, 1e-3, 0.3, 0.49, 0.51, 1.0, 4.0})
        CHECK(std::fabs(c3_bound(a) + q_function(a) - 1.0) < 1e-12);
    CHECK_THROWS_AS(c3_bound(0.0), std::domain_error);
}

TEST_CASE("efficiency ceiling is min(1, 2a/(1+a))") {
    CHECK(upper_bound(0.25) == 0.4);  // exact in float64
    CHECK(rel_err(upper_bound(0.1), kUpperAt01) < 1e-15);
    CHECK(rel_err(upper_bound(0.5), kUpperAt05) < 1e-15);
    CHECK(upper_bound(1.0) == 1.0);
    CHECK(upper_bound(2.0) == 1.0);
    CHECK(upper_bound(17.0) == 1.0);
    // uncoordinated-model lower bounds sit below the ceiling (the same-name
    // batching bound may exceed it, since it relies on cross-teacher
    // consistency the ceiling's model forbids)
    for (double a = 0.05; a <= 3.0; a += 0.05) {
        double up = upper_bound(a);
        CHECK(c3_bound(a) < up);
        CHECK(optimize_beta(a, BetaObjective::Exact).value < up + 1e-12);
    }
    CHECK_THROWS_AS(upper_bound(-0.5), std::domain_error);
}

TEST_CASE("same-name batching bound reduces to batch-merge at p = 0") {
    for (int i = 0; i < 100; ++i) {
        double a = 0.01 + (5.0 - 0.01) * i / 99.0;
        CHECK(std::fabs(c4_bound(a, 0.0) - c3_bound(a)) < 1e-12);
    }
    CHECK(rel_err(c4_bound(0.1, 0.9), kC4At01P09) < 1e-13);
    CHECK(rel_err(c4_bound(0.01, 1.0), kC4At001P1) < 1e-13);
    // nondecreasing in p
    for (double a : {0.1, 0.5, 1.0, 2.0}) {
        double prev = -1.0;
        for (double p = 0.0; p <= 1.0 + 1e-9; p += 0.05) {
            double v = c4_bound(a, std::min(p, 1.0));
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
        CHECK(c4_bound(a, 1.0) > c4_bound(a, 0.0));
    }
    CHECK_THROWS_AS(c4_bound(1.0, -0.1), std::domain_error);
    CHECK_THROWS_AS(c4_bound(1.0, 1.1), std::domain_error);
}

TEST_CASE("representative bounds match frozen values") {
    double third = 1.0 / 3.0;
    CHECK(rel_err(representatives_bound_exact(0.01, third), kReprExact001) < 1e-11);
    CHECK(rel_err(representatives_bound_exact(1e-3, third), kReprExact1em3) < 1e-11);
    CHECK(rel_err(representatives_bound(0.01, third), kReprTheorem001) < 1e-11);
    // as beta -> 0 the asymptotic form collapses to the batch-merge bound
    CHECK(rel_err(representatives_bound(1.0, 1e-6), kReprTheorem1Tiny) < 1e-11);
    CHECK(std::fabs(representatives_bound(1.0, 1e-9) - c3_bound(1.0)) < 1e-6);
    CHECK_THROWS_AS(representatives_bound(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(representatives_bound(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(representatives_bound_exact(0.0, 0.5), std::domain_error);
}

TEST_CASE("optimized exact form beats the optimized weakened form") {
    // pointwise dominance does not hold: the exact form rounds the schedule
    // length up to an integer, which can dip below the smooth weakened curve
    // at moderate alpha. At the optimized beta the exact form always wins.
    for (double a : {1e-3, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
        double ex = optimize_beta(a, BetaObjective::Exact).value;
        double th = optimize_beta(a, BetaObjective::Theorem).value;
        CHECK(ex > th);
    }
}

TEST_CASE("beta optimizer hits frozen optima") {
    BetaOpt o = optimize_beta(1e-3, BetaObjective::Exact);
    CHECK(std::fabs(o.betaStar - 0.3277614525766106) < 5e-6);
    CHECK(rel_err(o.value, 0.000666215509620361) < 1e-9);

    o = optimize_beta(1.0, BetaObjective::Theorem);
    CHECK(std::fabs(o.betaStar - 0.2778882637864163) < 5e-6);
    CHECK(rel_err(o.value, 0.40348726841754257) < 1e-9);

    o = optimize_beta(1.0, BetaObjective::Exact);
    CHECK(std::fabs(o.betaStar - 0.2500002800335821) < 5e-6);
    CHECK(rel_err(o.value, 0.41492268317277653) < 1e-9);

    o = optimize_beta(0.2, BetaObjective::Exact);
    CHECK(std::fabs(o.betaStar - 0.31250036656871794) < 5e-6);
    CHECK(rel_err(o.value, 0.11884582315566108) < 1e-9);

    o = optimize_beta(0.2, BetaObjective::Theorem);
    CHECK(std::fabs(o.betaStar - 0.35492518508605453) < 5e-6);
    CHECK(rel_err(o.value, 0.11041589280042383) < 1e-9);

    o = optimize_beta(0.1, BetaObjective::Exact);
    CHECK(std::fabs(o.betaStar - 0.32258076654856815) < 5e-6);
    CHECK(rel_err(o.value, 0.06283206820098332) < 1e-9);

    // optimized representative runs beat plain batch merging at these alphas
    CHECK(optimize_beta(0.1, BetaObjective::Exact).value > c3_bound(0.1));
    CHECK(optimize_beta(0.2, BetaObjective::Exact).value > c3_bound(0.2));
    CHECK(optimize_beta(1.0, BetaObjective::Exact).value > c3_bound(1.0));

    // determinism: bitwise-identical on repeat
    BetaOpt a1 = optimize_beta(0.7, BetaObjective::Exact);
    BetaOpt a2 = optimize_beta(0.7, BetaObjective::Exact);
    CHECK(a1.betaStar == a2.betaStar);
    CHECK(a1.value == a2.value);
    CHECK_THROWS_AS(optimize_beta(0.0, BetaObjective::Exact), std::domain_error);
}

TEST_CASE("expected distinct-class count") {
    // closed hand cases
    CHECK(std::fabs(expected_unique_exact(2, 1, {0.3, 0.7}) - 1.0) < 1e-15);
    CHECK(std::fabs(expected_unique_exact(2, 2, uniform_probs(2)) - 1.5) < 1e-15);
    // l = c draws: per-label distinct fraction approaches q(1) at rate O(1/c)
    for (uint64_t c : {100ull, 1000ull, 10000ull}) {
        double eue = expected_unique_exact(c, c, uniform_probs(c));
        CHECK(std::fabs(eue / (double)c - q_function(1.0)) < 2.0 / (double)c);
    }
    // scale check around the c = 1000 point
    double eue = expected_unique_exact(1000, 1000, uniform_probs(1000));
    CHECK(eue > 632.0);
    CHECK(eue < 632.6);
    CHECK_THROWS_AS(expected_unique_exact(2, 0, uniform_probs(2)), std::domain_error);
    CHECK_THROWS_AS(expected_unique_exact(3, 1, uniform_probs(2)), std::domain_error);
    CHECK_THROWS_AS(expected_unique_exact(2, 1, std::vector<double>{0.5, 0.6}), std::domain_error);
    CHECK_THROWS_AS(expected_unique_exact(2, 1, std::vector<double>{1.1, -0.1}), std::domain_error);
}

TEST_CASE("bound curves evaluate pointwise over a grid") {
    std::vector<double> grid{0.1, 0.25, 0.5, 1.0, 2.0};
    BoundCurve c3 = eval_bound_curve(BoundKind::C3, grid, 0.0);
    REQUIRE(c3.values.size() == grid.size());
    CHECK(c3.values[0] == c3_bound(0.1));
    CHECK(c3.values[3] == c3_bound(1.0));

    BoundCurve up = eval_bound_curve(BoundKind::Upper, grid, 0.0);
    CHECK(up.values[1] == 0.4);
    CHECK(up.values[4] == 1.0);

    BoundCurve c4 = eval_bound_curve(BoundKind::C4, grid, 0.9);
    CHECK(c4.values[0] == c4_bound(0.1, 0.9));

    BoundCurve rx = eval_bound_curve(BoundKind::ReprExact, grid, 1.0 / 3.0);
    CHECK(rx.values[3] == representatives_bound_exact(1.0, 1.0 / 3.0));

    // param <= 0 selects the per-point optimum
    BoundCurve ro = eval_bound_curve(BoundKind::ReprExact, grid, 0.0);
    CHECK(rel_err(ro.values[3], 0.41492268317277653) < 1e-9);

    CHECK_THROWS_AS(eval_bound_curve(BoundKind::C3, {}, 0.0), std::domain_error);
    CHECK_THROWS_AS(eval_bound_curve(BoundKind::C3, {0.5, 0.5}, 0.0), std::domain_error);
    CHECK_THROWS_AS(eval_bound_curve(BoundKind::C3, {1.0, 0.5}, 0.0), std::domain_error);
}
