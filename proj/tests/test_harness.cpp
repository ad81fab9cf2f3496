#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "labelfuse/bounds.hpp"
#include "labelfuse/harness.hpp"

using namespace labelfuse;

namespace {

ExperimentConfig base_config(Algorithm alg, uint64_t n, uint64_t c, double alpha, double p,
                             uint64_t trials, uint64_t seed) {
    ExperimentConfig cfg;
    cfg.problem = ProblemConfig{n, c, Distribution::uniform(), 0};
    cfg.algorithm = alg;
    cfg.alpha = alpha;
    cfg.p = p;
    cfg.trials = trials;
    cfg.masterSeed = seed;
    return cfg;
}

bool same_result(const ExperimentResult& a, const ExperimentResult& b) {
    if (a.meanLabels != b.meanLabels) return false;
    if (a.meanEfficiency != b.meanEfficiency) return false;
    if (a.stdErr != b.stdErr) return false;
    if (a.perTrial.size() != b.perTrial.size()) return false;
    for (size_t i = 0; i < a.perTrial.size(); ++i) {
        if (a.perTrial[i].labelsUsed != b.perTrial[i].labelsUsed) return false;
        if (a.perTrial[i].rounds != b.perTrial[i].rounds) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("single-class problems reach the per-batch efficiency floor") {
    // c = 1, l = 5: every batch of five collapses to one node, so at most
    // one label in five is spent on overlap
    double floor = 4.0 / 5.0;
    for (Algorithm alg :
         {Algorithm::C3, Algorithm::C4, Algorithm::Representatives, Algorithm::BaselineSplit}) {
        ExperimentConfig cfg = base_config(alg, 200, 1, 5.0, 0.0, 3, 7);
        if (alg == Algorithm::C4) cfg.p = 0.0;
        if (alg == Algorithm::BaselineSplit) cfg.p = 1.0;
        if (alg == Algorithm::Representatives) cfg.repr = ReprConfig::fixed(0.2);
        ExperimentResult res = run_experiment(cfg);
        CHECK(res.meanEfficiency >= floor - 1e-12);
        CHECK(res.budget == 5);
        CHECK(res.alphaEffective == 5.0);
    }
}

TEST_CASE("results are bitwise deterministic and independent of worker count") {
    ExperimentConfig cfg = base_config(Algorithm::C3, 4000, 50, 1.0, 0.0, 6, 99);
    ExperimentResult r1 = run_experiment(cfg);
    ExperimentResult r2 = run_experiment(cfg);
    CHECK(same_result(r1, r2));

    setenv("LABELFUSE_THREADS", "1", 1);
    CHECK(worker_count() == 1);
    ExperimentResult serial = run_experiment(cfg);
    setenv("LABELFUSE_THREADS", "4", 1);
    CHECK(worker_count() == 4);
    ExperimentResult wide = run_experiment(cfg);
    unsetenv("LABELFUSE_THREADS");
    CHECK(worker_count() >= 1);
    CHECK(same_result(serial, wide));
    CHECK(same_result(r1, serial));

    // different master seed moves the numbers
    cfg.masterSeed = 100;
    ExperimentResult other = run_experiment(cfg);
    CHECK_FALSE(same_result(r1, other));
}

TEST_CASE("statistics are internally consistent") {
    ExperimentConfig cfg = base_config(Algorithm::C3, 4000, 50, 1.0, 0.0, 5, 3);
    ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.perTrial.size() == 5);
    double sumEff = 0.0, sumLab = 0.0, sumRounds = 0.0;
    for (const TrialResult& t : res.perTrial) {
        CHECK(t.efficiency == 4000.0 / (double)t.labelsUsed);
        sumEff += t.efficiency;
        sumLab += (double)t.labelsUsed;
        sumRounds += (double)t.rounds;
    }
    CHECK(std::fabs(res.meanEfficiency - sumEff / 5.0) < 1e-15);
    CHECK(std::fabs(res.meanLabels - sumLab / 5.0) < 1e-9);
    CHECK(std::fabs(res.meanRounds - sumRounds / 5.0) < 1e-12);
    CHECK(std::fabs(res.ratioOfMeans - 4000.0 / res.meanLabels) < 1e-15);
    CHECK(res.stdErr > 0.0);
    CHECK(std::fabs(res.ci95Low - (res.meanEfficiency - 1.96 * res.stdErr)) < 1e-15);
    CHECK(std::fabs(res.ci95High - (res.meanEfficiency + 1.96 * res.stdErr)) < 1e-15);
    CHECK(res.boundValue == c3_bound(1.0));
    CHECK(res.upperValue == upper_bound(1.0));
    CHECK(res.betaUsed == 0.0);

    cfg.trials = 1;
    ExperimentResult one = run_experiment(cfg);
    CHECK(one.stdErr == 0.0);
    CHECK(one.ci95Low == one.meanEfficiency);
    CHECK(one.ci95High == one.meanEfficiency);
}

TEST_CASE("the budget comes from rounding alpha times c") {
    ExperimentConfig cfg = base_config(Algorithm::C3, 500, 9, 0.25, 0.0, 1, 0);
    ExperimentResult res = run_experiment(cfg);  // l = round(2.25) = 2
    CHECK(res.budget == 2);
    CHECK(res.alphaEffective == 2.0 / 9.0);
    CHECK(res.boundValue == c3_bound(2.0 / 9.0));
    CHECK(res.upperValue == upper_bound(2.0 / 9.0));
}

TEST_CASE("representatives report the beta they used") {
    ExperimentConfig cfg = base_config(Algorithm::Representatives, 3000, 50, 0.2, 0.0, 2, 5);
    cfg.repr = ReprConfig::auto_optimized();
    ExperimentResult res = run_experiment(cfg);
    CHECK(std::fabs(res.betaUsed - 0.3125) < 1e-3);
    CHECK(res.boundValue == representatives_bound_exact(res.alphaEffective, res.betaUsed));

    cfg.repr = ReprConfig::fixed(0.4);
    ExperimentResult fixed = run_experiment(cfg);
    CHECK(fixed.betaUsed == 0.4);
}

TEST_CASE("split baseline spends one label per instance at p 1") {
    ExperimentConfig cfg = base_config(Algorithm::BaselineSplit, 1000, 10, 10.0, 1.0, 2, 11);
    ExperimentResult res = run_experiment(cfg);
    CHECK(res.meanLabels == 1000.0);
    CHECK(res.meanEfficiency == 1.0);
    CHECK(res.stdErr == 0.0);
    CHECK(res.boundValue == 1.0);

    cfg.p = 0.5;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("efficiency respects the ceiling across algorithms") {
    for (Algorithm alg : {Algorithm::C3, Algorithm::Representatives}) {
        for (double alpha : {0.25, 1.0}) {
            ExperimentConfig cfg = base_config(alg, 4000, 50, alpha, 0.0, 4, 23);
            if (alg == Algorithm::Representatives) cfg.repr = ReprConfig::auto_optimized();
            ExperimentResult res = run_experiment(cfg);
            CHECK(res.meanEfficiency <= res.upperValue + 3.0 * res.stdErr);
            CHECK(res.meanEfficiency > 0.0);
        }
    }
}

TEST_CASE("consistent names help the same-name batcher monotonically") {
    ExperimentConfig cfg = base_config(Algorithm::C4, 4000, 50, 1.0, 0.0, 4, 31);
    SweepTable tab = sweep(cfg, {1.0}, {0.0, 0.5, 1.0});
    REQUIRE(tab.rows.size() == 3);
    CHECK(tab.rows[0].p == 0.0);
    CHECK(tab.rows[2].p == 1.0);
    double e0 = tab.rows[0].result.meanEfficiency;
    double e5 = tab.rows[1].result.meanEfficiency;
    double e1 = tab.rows[2].result.meanEfficiency;
    CHECK(e5 >= e0 - 2.0 * (tab.rows[0].result.stdErr + tab.rows[1].result.stdErr));
    CHECK(e1 >= e5 - 2.0 * (tab.rows[1].result.stdErr + tab.rows[2].result.stdErr));
    CHECK(e1 > e0);
}

TEST_CASE("sweep orders its grid and pairs seeds with single runs") {
    ExperimentConfig cfg = base_config(Algorithm::C3, 2000, 50, 1.0, 0.0, 3, 77);
    SweepTable tab = sweep(cfg, {1.0, 0.5}, {});
    REQUIRE(tab.rows.size() == 2);
    CHECK(tab.rows[0].alpha == 0.5);
    CHECK(tab.rows[1].alpha == 1.0);
    CHECK(tab.rows[0].p == 0.0);

    ExperimentConfig single = cfg;
    single.alpha = 0.5;
    ExperimentResult direct = run_experiment(single);
    CHECK(same_result(tab.rows[0].result, direct));

    CHECK_THROWS_AS(sweep(cfg, {}, {}), std::invalid_argument);
}

TEST_CASE("degenerate experiment configs are rejected") {
    ExperimentConfig cfg = base_config(Algorithm::C3, 1, 1, 5.0, 0.0, 1, 0);
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);  // n = 1

    cfg = base_config(Algorithm::C3, 100, 10, 0.01, 0.0, 1, 0);
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);  // l rounds to 0

    cfg = base_config(Algorithm::C3, 100, 10, 1.0, 0.0, 0, 0);
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);  // no trials

    cfg = base_config(Algorithm::C3, 100, 10, 1.0, 1.5, 1, 0);
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);  // p outside [0,1]

    cfg = base_config(Algorithm::C3, 100, 10, -1.0, 0.0, 1, 0);
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("trial-integrity failures carry the trial index") {
    IntegrityError e(3);
    CHECK(e.trialIndex == 3);
    CHECK(std::string(e.what()).size() > 0);
}
