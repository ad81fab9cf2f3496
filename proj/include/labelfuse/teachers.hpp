#pragma once

#include <cstdint>
#include <vector>

#include "labelfuse/problem.hpp"
#include "labelfuse/rng.hpp"

namespace labelfuse {

enum class NamingKind { Uncoordinated, PartiallyConsistent };

struct NamingModel {
    NamingKind kind = NamingKind::Uncoordinated;
    double p = 0.0;

    static NamingModel uncoordinated() { return {NamingKind::Uncoordinated, 0.0}; }
    static NamingModel partially_consistent(double p) {
        return {NamingKind::PartiallyConsistent, p};
    }
};

// Simulated teacher pool. Every query consumes one fresh teacher with budget
// l and a private, self-consistent class naming: within a query, two
// instances get equal names iff they share a true class. Under
// PartiallyConsistent(p) each class independently gets its true id as the
// name with probability p, otherwise an alias unique to (teacher, class).
// Aliases live in a namespace disjoint from true ids, so a name equal to a
// class id is always genuine and cross-teacher same-name groups never mix
// classes.
class TeacherPool {
public:
    TeacherPool(const GroundTruth& truth, NamingModel model, uint64_t budget, Rng rng);

    // Names aligned with the batch. Throws on an empty batch or one beyond
    // the per-teacher budget.
    std::vector<uint64_t> query(const std::vector<uint64_t>& batch);

    uint64_t labels_used() const { return labelsUsed_; }
    uint64_t teachers_used() const { return teachersUsed_; }
    uint64_t budget() const { return budget_; }
    const NamingModel& model() const { return model_; }

    static bool is_true_name(uint64_t name) { return (name >> 63) == 0; }

private:
    const GroundTruth* truth_;
    NamingModel model_;
    uint64_t budget_;
    uint64_t labelsUsed_ = 0;
    uint64_t teachersUsed_ = 0;
    Rng rng_;
    // per-class memo for the current teacher, generation-stamped to avoid
    // clearing between queries
    std::vector<uint64_t> classStamp_;
    std::vector<uint64_t> className_;
};

}  // namespace labelfuse
