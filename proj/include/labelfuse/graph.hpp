#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "labelfuse/rng.hpp"

namespace labelfuse {

// Thrown when an operation would assert that two instances are both
// equivalent and different (a separation inside one super-node).
struct ConsistencyViolation : std::runtime_error {
    uint64_t a, b;
    ConsistencyViolation(uint64_t a_, uint64_t b_)
        : std::runtime_error("separation requested inside a single super-node"), a(a_), b(b_) {}
};

// Partition of n instances into super-nodes (union-find, path compression,
// union by size) plus "known different" separation edges between super-nodes.
//
// Separations are stored in two phases. While the graph is large, each
// separation event (a pairwise-separated set of roots from one query) is a
// cohort; every root keeps a sorted list of the cohort ids it belongs to, and
// two roots are separated iff their lists intersect. This is exact: cohort
// members are pairwise distinct classes and distinct classes never merge.
// Storage per root is its number of separation events, typically a handful.
// Contraction merges the smaller list into the larger. Once node_count drops
// to matrixThreshold the graph switches to a dense bit matrix over compacted
// roots, where sep_count/is_clique are O(1) bookkeeping.
class ContractionGraph {
public:
    static constexpr uint64_t kDefaultMatrixThreshold = 4096;

    explicit ContractionGraph(uint64_t n, uint64_t matrixThreshold = kDefaultMatrixThreshold);

    uint64_t size() const { return n_; }
    uint64_t node_count() const { return rootList_.size(); }
    uint64_t find(uint64_t v) const;

    // Merges the super-nodes of u and v; no-op when they already share one.
    // Returns the surviving root.
    uint64_t contract(uint64_t u, uint64_t v);

    // Records that u's and v's super-nodes hold different classes.
    // Throws ConsistencyViolation when they share a root.
    void separate(uint64_t u, uint64_t v);

    // Pairwise separation of a set of current roots (the distinct-name
    // super-nodes of one query). Throws ConsistencyViolation when two
    // entries share a root.
    void separate_all(const std::vector<uint64_t>& roots);

    bool separated(uint64_t u, uint64_t v) const;

    // True iff every pair of super-nodes is separated.
    bool is_clique();

    // Some unseparated pair of distinct roots, chosen by randomized probing
    // with a deterministic fallback scan; nullopt iff is_clique().
    std::optional<std::pair<uint64_t, uint64_t>> find_unseparated_pair(Rng& rng);

    // First unseparated pair found inside a set of distinct roots.
    std::optional<std::pair<uint64_t, uint64_t>> unseparated_pair_within(
        const std::vector<uint64_t>& roots, Rng& rng);

    // Exact separation-edge count. O(1) bookkeeping in the dense phase,
    // full recount before it (tests and replay summaries only).
    uint64_t sep_count() const;

    // Super-node member lists, ordered by smallest member; the union over
    // parts is [0, n).
    std::vector<std::vector<uint64_t>> components() const;

    const std::vector<uint32_t>& roots() const { return rootList_; }

    // k distinct super-nodes uniformly without replacement (reorders the
    // internal root list).
    std::vector<uint64_t> sample_roots(uint64_t k, Rng& rng);

    bool dense_phase() const { return dense_; }

private:
    static constexpr uint32_t kNone = UINT32_MAX;

    uint32_t root_of(uint64_t v) const;
    void check_id(uint64_t v) const;
    void list_add(uint32_t root, uint64_t cohort);
    bool lists_intersect(uint32_t a, uint32_t b) const;
    void merge_lists(uint32_t winner, uint32_t loser);
    void densify();
    void dense_contract(uint32_t winner, uint32_t loser);
    std::optional<std::pair<uint64_t, uint64_t>> cohort_unseparated(Rng* rng);
    bool witness_valid() const;
    uint64_t* row(uint32_t slot) { return bits_.data() + (size_t)slot * words_; }
    const uint64_t* row(uint32_t slot) const { return bits_.data() + (size_t)slot * words_; }
    uint64_t masked_popcount(const uint64_t* r) const;
    uint32_t stamp_begin();

    uint64_t n_;
    uint64_t matrixThreshold_;
    mutable std::vector<uint32_t> parent_;
    std::vector<uint32_t> sizeOf_;
    std::vector<uint32_t> rootList_;
    std::vector<uint32_t> rootPos_;

    // cohort phase
    std::vector<uint32_t> bmOf_;
    std::vector<std::vector<uint32_t>> cohortLists_;
    uint64_t cohortCount_ = 0;
    mutable uint32_t witnessA_ = kNone, witnessB_ = kNone;
    // fixed-seed probe stream so rng-less queries (is_clique) stay cheap and
    // deterministic
    Rng probeRng_{0x6c62272e07bb0142ull};

    // dense phase
    bool dense_ = false;
    uint32_t words_ = 0;
    uint64_t live_ = 0;
    uint64_t unsep_ = 0;
    std::vector<uint64_t> bits_;
    std::vector<uint64_t> valid_;
    std::vector<uint32_t> slotOf_;
    std::vector<uint32_t> rootOfSlot_;

    std::vector<uint32_t> stamp_;
    uint32_t stampGen_ = 0;
};

}  // namespace labelfuse
