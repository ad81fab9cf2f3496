#include "labelfuse/teachers.hpp"

#include <stdexcept>

namespace labelfuse {

namespace {

constexpr uint64_t kAliasBit = 1ull << 63;
constexpr unsigned kClassBits = 24;

}  // namespace

TeacherPool::TeacherPool(const GroundTruth& truth, NamingModel model, uint64_t budget, Rng rng)
    : truth_(&truth), model_(model), budget_(budget), rng_(rng) {
    if (budget_ < 1) throw std::invalid_argument("teacher budget must be positive");
    if (model_.kind == NamingKind::PartiallyConsistent &&
        (!(model_.p >= 0.0) || !(model_.p <= 1.0)))
        throw std::invalid_argument("name-consistency probability must lie in [0,1]");
    classStamp_.assign(truth.config.c, 0);
    className_.assign(truth.config.c, 0);
}

std::vector<uint64_t> TeacherPool::query(const std::vector<uint64_t>& batch) {
    if (batch.empty()) throw std::invalid_argument("query needs a nonempty batch");
    if (batch.size() > budget_)
        throw std::length_error("batch exceeds the per-teacher label budget");
    uint64_t teacher = teachersUsed_++;
    labelsUsed_ += batch.size();
    uint64_t stamp = teacher + 1;
    std::vector<uint64_t> names(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) {
        uint64_t inst = batch[i];
        if (inst >= truth_->labels.size()) throw std::invalid_argument("instance id out of range");
        uint32_t k = truth_->labels[inst];
        if (classStamp_[k] != stamp) {
            classStamp_[k] = stamp;
            uint64_t alias = kAliasBit | (teacher << kClassBits) | (uint64_t)k;
            if (model_.kind == NamingKind::PartiallyConsistent && rng_.bernoulli(model_.p))
                className_[k] = (uint64_t)k;
            else
                className_[k] = alias;
        }
        names[i] = className_[k];
    }
    return names;
}

}  // namespace labelfuse
