#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "labelfuse/problem.hpp"
#include "labelfuse/teachers.hpp"

using namespace labelfuse;

namespace {

// identity labeling: instance i belongs to class i
GroundTruth identity_truth(uint64_t c) {
    GroundTruth gt;
    gt.config = ProblemConfig{c, c, Distribution::uniform(), 0};
    gt.labels.resize(c);
    for (uint64_t i = 0; i < c; ++i) gt.labels[i] = (uint32_t)i;
    gt.classProbs.assign(c, 1.0 / (double)c);
    return gt;
}

GroundTruth from_labels(std::vector<uint32_t> labels, uint64_t c) {
    GroundTruth gt;
    gt.config = ProblemConfig{labels.size(), c, Distribution::uniform(), 0};
    gt.labels = std::move(labels);
    gt.classProbs.assign(c, 1.0 / (double)c);
    return gt;
}

}  // namespace

TEST_CASE("one teacher names a batch self-consistently") {
    GroundTruth gt = from_labels({0, 1, 0, 2, 1, 0}, 3);
    for (auto model : {NamingModel::uncoordinated(), NamingModel::partially_consistent(0.5)}) {
        TeacherPool pool(gt, model, 6, Rng(11));
        std::vector<uint64_t> batch{0, 1, 2, 3, 4, 5};
        std::vector<uint64_t> names = pool.query(batch);
        REQUIRE(names.size() == 6);
        for (size_t i = 0; i < 6; ++i)
            for (size_t j = 0; j < 6; ++j) {
                bool sameClass = gt.labels[batch[i]] == gt.labels[batch[j]];
                CHECK((names[i] == names[j]) == sameClass);
            }
    }
}

TEST_CASE("fully consistent teachers use the true class id") {
    GroundTruth gt = from_labels({0, 1, 0, 2}, 3);
    TeacherPool pool(gt, NamingModel::partially_consistent(1.0), 4, Rng(3));
    for (int t = 0; t < 5; ++t) {
        std::vector<uint64_t> names = pool.query({0, 1, 2, 3});
        CHECK(names == std::vector<uint64_t>{0, 1, 0, 2});
        for (uint64_t nm : names) CHECK(TeacherPool::is_true_name(nm));
    }
}

TEST_CASE("uncoordinated teachers never reuse names across teachers") {
    GroundTruth gt = identity_truth(100);
    TeacherPool pool(gt, NamingModel::uncoordinated(), 100, Rng(5));
    std::vector<uint64_t> batch(100);
    for (uint64_t i = 0; i < 100; ++i) batch[i] = i;
    std::set<uint64_t> seen;
    for (int t = 0; t < 50; ++t) {
        std::vector<uint64_t> names = pool.query(batch);
        for (uint64_t nm : names) {
            CHECK_FALSE(TeacherPool::is_true_name(nm));
            CHECK(seen.insert(nm).second);  // new name every (teacher, class)
        }
    }
}

TEST_CASE("uncoordinated naming ignores the pool rng") {
    GroundTruth gt = identity_truth(50);
    TeacherPool a(gt, NamingModel::uncoordinated(), 50, Rng(1));
    TeacherPool b(gt, NamingModel::uncoordinated(), 50, Rng(999));
    std::vector<uint64_t> batch{4, 9, 17, 4};
    for (int t = 0; t < 3; ++t) CHECK(a.query(batch) == b.query(batch));
}

TEST_CASE("partially consistent naming keeps the true id at the configured rate") {
    const uint64_t c = 10000;
    GroundTruth gt = identity_truth(c);
    TeacherPool pool(gt, NamingModel::partially_consistent(0.5), c, Rng(42));
    std::vector<uint64_t> batch(c);
    for (uint64_t i = 0; i < c; ++i) batch[i] = i;
    std::vector<uint64_t> names = pool.query(batch);
    uint64_t trueCount = 0;
    for (uint64_t i = 0; i < c; ++i) {
        if (TeacherPool::is_true_name(names[i])) {
            ++trueCount;
            CHECK(names[i] == i);
        }
    }
    double frac = (double)trueCount / (double)c;
    CHECK(frac > 0.485);
    CHECK(frac < 0.515);

    // p = 0 behaves like uncoordinated naming: aliases only
    TeacherPool zero(gt, NamingModel::partially_consistent(0.0), c, Rng(42));
    for (uint64_t nm : zero.query(batch)) CHECK_FALSE(TeacherPool::is_true_name(nm));
}

TEST_CASE("each query consumes one teacher and counts its labels") {
    GroundTruth gt = identity_truth(100);
    TeacherPool pool(gt, NamingModel::uncoordinated(), 70, Rng(0));
    std::vector<uint64_t> batch(70);
    for (uint64_t i = 0; i < 70; ++i) batch[i] = i;
    CHECK(pool.labels_used() == 0);
    CHECK(pool.teachers_used() == 0);
    pool.query(batch);
    pool.query(batch);
    CHECK(pool.labels_used() == 140);
    CHECK(pool.teachers_used() == 2);
    CHECK(pool.budget() == 70);

    std::vector<uint64_t> small{3};
    pool.query(small);
    CHECK(pool.labels_used() == 141);
    CHECK(pool.teachers_used() == 3);
}

TEST_CASE("malformed queries and configs are rejected") {
    GroundTruth gt = identity_truth(10);
    TeacherPool pool(gt, NamingModel::uncoordinated(), 5, Rng(0));
    CHECK_THROWS_AS(pool.query({}), std::invalid_argument);
    CHECK_THROWS_AS(pool.query({0, 1, 2, 3, 4, 5}), std::length_error);
    CHECK_THROWS_AS(pool.query({99}), std::invalid_argument);
    CHECK_THROWS_AS(TeacherPool(gt, NamingModel::uncoordinated(), 0, Rng(0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(TeacherPool(gt, NamingModel::partially_consistent(1.5), 5, Rng(0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(TeacherPool(gt, NamingModel::partially_consistent(-0.1), 5, Rng(0)),
                    std::invalid_argument);
    GroundTruth ok = identity_truth(3);
    TeacherPool p2(ok, NamingModel::uncoordinated(), 3, Rng(0));
    std::vector<uint64_t> names1 = p2.query({0, 1});
    std::vector<uint64_t> names2 = p2.query({0, 1});
    CHECK(names1 != names2);  // distinct teachers, distinct aliases
}
