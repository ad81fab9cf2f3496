#pragma once

#include <cstdint>
#include <vector>

#include "labelfuse/rng.hpp"

namespace labelfuse {

enum class DistKind { Uniform, Zipf, Explicit };

struct Distribution {
    DistKind kind = DistKind::Uniform;
    double zipfS = 1.0;               // Zipf exponent
    std::vector<double> probs;        // Explicit only

    static Distribution uniform() { return {}; }
    static Distribution zipf(double s) { return {DistKind::Zipf, s, {}}; }
    static Distribution explicit_probs(std::vector<double> p) {
        return {DistKind::Explicit, 0.0, std::move(p)};
    }
};

struct ProblemConfig {
    uint64_t n = 0;
    uint64_t c = 0;
    Distribution dist;
    uint64_t seed = 0;
};

struct GroundTruth {
    ProblemConfig config;
    std::vector<uint32_t> labels;     // true class per instance, in [0, c)
    std::vector<double> classProbs;   // generating distribution, by class id
};

struct RepresentativeSet {
    std::vector<uint64_t> reps;       // one instance index per class, by class id
    std::vector<double> probs;        // matching class probabilities
};

// Validates a config; throws std::invalid_argument on violation.
void validate_config(const ProblemConfig& cfg);

// Class probabilities implied by the distribution (uniform 1/c, Zipf
// 1/rank^s normalized, or the explicit list).
std::vector<double> class_probabilities(const ProblemConfig& cfg);

// Draws labels i.i.d. from the class distribution, resampling the whole
// vector until every class appears (keeps labels i.i.d. conditioned on full
// support). Deterministic for a fixed seed.
GroundTruth generate_problem(const ProblemConfig& cfg);

// Lowest-index instance of each class, with exact class probabilities.
RepresentativeSet representatives_of(const GroundTruth& gt);

}  // namespace labelfuse
