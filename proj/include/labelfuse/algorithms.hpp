#pragma once

#include <cstdint>
#include <vector>

#include "labelfuse/graph.hpp"
#include "labelfuse/problem.hpp"
#include "labelfuse/rng.hpp"
#include "labelfuse/teachers.hpp"

namespace labelfuse {

struct RunOutcome {
    std::vector<uint32_t> partition;  // recovered class per instance, dense ids
    uint64_t labelsUsed = 0;
    uint64_t teachersUsed = 0;
    uint64_t rounds = 0;              // outer-loop iterations
};

struct ReprConfig {
    double beta = 1.0 / 3.0;
    bool autoOptimize = false;

    static ReprConfig fixed(double b) { return {b, false}; }
    static ReprConfig auto_optimized() { return {0.0, true}; }
};

// Beta actually used by a representative run: the configured value, or the
// deterministic optimizer's argmax at alpha = l/c when autoOptimize is set.
double resolve_beta(const ReprConfig& cfg, uint64_t l, uint64_t c);

// Batch-merge algorithm: repeatedly query min(l, nodeCount) distinct
// super-nodes drawn uniformly (with a progress guard ensuring the batch
// carries an unseparated pair), contract equal names, separate unequal
// names, until the graph is a clique.
RunOutcome run_c3(const GroundTruth& truth, TeacherPool& pool, Rng& rng);

// Representative algorithm: classes sorted by descending probability are
// split into sets of floor(beta*l) representatives; per set, the remaining
// super-nodes are partitioned into batches of floor((1-beta)*l), each
// queried together with the set; matched nodes collapse into their
// representative and the set's classes leave the graph.
RunOutcome run_representatives(const GroundTruth& truth, TeacherPool& pool,
                               const RepresentativeSet& reps, const ReprConfig& cfg, Rng& rng);

// Same-name batching variant: every super-node carries a name-tag
// (initially a shared fresh tag); batches are filled from the largest tag
// groups first, queried super-nodes are retagged with the returned names.
// Equivalence is still only declared within a single teacher's batch.
// Requires a PartiallyConsistent pool (p = 0 allowed).
RunOutcome run_c4(const GroundTruth& truth, TeacherPool& pool, Rng& rng);

// True iff the recovered partition equals the true one up to a bijective
// relabeling.
bool verify_partition(const RunOutcome& outcome, const GroundTruth& truth);

}  // namespace labelfuse
