#pragma once

#include <cstdint>
#include <vector>

namespace labelfuse {

// Closed-form efficiency bounds for the label-fusion algorithms, plus the
// batch-survival function q and its complement. All functions validate their
// domain and throw std::domain_error outside it.

// q(alpha) = (1 - e^-alpha)/alpha, the expected surviving fraction of a fresh
// batch. Series 1 - a/2 + a^2/6 below 1e-4 for stability.
double q_function(double alpha);

// Exact finite-population expectation of distinct classes among l i.i.d.
// draws: c - sum_i (1 - p_i)^l.
double expected_unique_exact(uint64_t c, uint64_t l, const std::vector<double>& probs);

// Lower bound on batch-merge efficiency: 1 - q(alpha), evaluated without
// cancellation.
double c3_bound(double alpha);

// Representative-algorithm bound, asymptotic form: real-valued r = 1/(alpha*beta).
double representatives_bound(double alpha, double beta);

// Representative-algorithm bound, exact pre-weakening form:
// (1-beta) / sum_{i=0}^{r-1} (1 - i/r) prod_{k<i} q(alpha(1-beta)/(1-k*alpha*beta)),
// integer r = ceil(1/(alpha*beta)) with an integer-snap guard.
double representatives_bound_exact(double alpha, double beta);

// Ceiling on any algorithm's efficiency in the uncoordinated-naming model:
// min(1, 2*alpha/(1+alpha)).
double upper_bound(double alpha);

// Same-name batching bound under name-consistency probability p:
// 1 - (1-e^-alpha) / (alpha + (e^{-alpha(1-p)} - e^{-alpha})).
// The denominator is grouped so p=0 reduces to c3_bound exactly.
double c4_bound(double alpha, double p);

enum class BetaObjective { Theorem, Exact };

struct BetaOpt {
    double betaStar;
    double value;
};

// Deterministic argmax over beta in [1e-3, 1-1e-3]: 1e-3 grid scan followed
// by golden-section refinement to |dbeta| < 1e-6.
BetaOpt optimize_beta(double alpha, BetaObjective objective);

enum class BoundKind { C3, ReprTheorem, ReprExact, Upper, C4 };

struct BoundCurve {
    BoundKind kind;
    std::vector<double> alphaGrid;
    std::vector<double> values;
};

// Evaluates one bound over a strictly increasing alpha grid. `param` is beta
// for the representative forms (<= 0 selects the per-point optimum) and p
// for C4; ignored otherwise.
BoundCurve eval_bound_curve(BoundKind kind, const std::vector<double>& alphaGrid, double param);

}  // namespace labelfuse
