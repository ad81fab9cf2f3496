#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "labelfuse/algorithms.hpp"
#include "labelfuse/problem.hpp"
#include "labelfuse/teachers.hpp"

namespace labelfuse {

enum class Algorithm { C3, Representatives, C4, BaselineSplit };

// One Monte Carlo experiment: `trials` independent problems at budget
// l = round(alpha * c), all seeded from masterSeed. p selects the
// name-consistency level; C3 and Representatives run against an
// uncoordinated pool when p = 0.
struct ExperimentConfig {
    ProblemConfig problem;                 // per-trial seed is derived, not taken from here
    Algorithm algorithm = Algorithm::C3;
    ReprConfig repr;                       // Representatives only
    double alpha = 1.0;
    double p = 0.0;
    uint64_t trials = 1;
    uint64_t masterSeed = 0;
};

struct TrialResult {
    uint64_t labelsUsed = 0;
    uint64_t teachersUsed = 0;
    uint64_t rounds = 0;
    double efficiency = 0.0;               // n / labelsUsed
};

struct ExperimentResult {
    double meanLabels = 0.0;
    double meanEfficiency = 0.0;           // mean of per-trial n/labels
    double ratioOfMeans = 0.0;             // n / mean labels
    double stdErr = 0.0;                   // sample sd / sqrt(trials); 0 when trials = 1
    double ci95Low = 0.0;
    double ci95High = 0.0;
    double meanRounds = 0.0;
    std::vector<TrialResult> perTrial;
    double boundValue = 0.0;               // algorithm's theoretical lower bound at l/c
    double upperValue = 0.0;               // ceiling min(1, 2a/(1+a)) at l/c
    double betaUsed = 0.0;                 // Representatives only, 0 otherwise
    double alphaEffective = 0.0;           // realized l/c after rounding
    uint64_t budget = 0;                   // l
};

// A trial produced a partition that disagrees with the ground truth: a
// simulation bug, never a statistical outcome.
struct IntegrityError : std::runtime_error {
    uint64_t trialIndex;
    explicit IntegrityError(uint64_t trial);
};

// Worker threads for trial parallelism: LABELFUSE_THREADS, where unset, 0,
// or unparsable means the hardware count.
unsigned worker_count();

// Runs all trials (possibly across worker threads; output independent of
// worker count) and reduces statistics in trial order. Throws
// std::invalid_argument on a bad config and IntegrityError when any trial
// fails verify_partition.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
    double alpha = 0.0;
    double p = 0.0;
    ExperimentResult result;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

// One run_experiment per (alpha, p) grid point, rows ordered by (alpha, p),
// every point reusing base.masterSeed so columns are seed-paired. An empty
// pGrid means {base.p}.
SweepTable sweep(const ExperimentConfig& base, std::vector<double> alphaGrid,
                 std::vector<double> pGrid);

// Splits instances into batches of l in index order and takes names at face
// value. Only correct when every teacher uses true names, so the pool must
// be PartiallyConsistent(1); anything else throws std::invalid_argument.
RunOutcome baseline_split(const GroundTruth& truth, TeacherPool& pool);

}  // namespace labelfuse
