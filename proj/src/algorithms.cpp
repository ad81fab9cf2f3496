#include "labelfuse/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "labelfuse/bounds.hpp"

namespace labelfuse {

namespace {

constexpr uint32_t kNone = UINT32_MAX;

// Larger budgets push the dense-matrix switch further out so the endgame
// (where batches cover most of the graph) always runs on the matrix.
uint64_t matrix_threshold_for(uint64_t l) {
    return std::clamp<uint64_t>(3 * l + 64, ContractionGraph::kDefaultMatrixThreshold, 16384);
}

void fill_partition(const ContractionGraph& g, uint64_t n, RunOutcome& out) {
    out.partition.assign(n, kNone);
    std::vector<uint32_t> compOf(n, kNone);
    uint32_t next = 0;
    for (uint64_t i = 0; i < n; ++i) {
        auto r = (uint32_t)g.find(i);
        if (compOf[r] == kNone) compOf[r] = next++;
        out.partition[i] = compOf[r];
    }
}

// Contracts equal-named batch members and separates the distinct-name
// super-nodes. Returns (name, surviving root) in batch first-occurrence
// order.
std::vector<std::pair<uint64_t, uint64_t>> apply_response(ContractionGraph& g,
                                                          const std::vector<uint64_t>& batch,
                                                          const std::vector<uint64_t>& names) {
    std::unordered_map<uint64_t, size_t> slotOfName;
    slotOfName.reserve(names.size() * 2);
    std::vector<std::pair<uint64_t, uint64_t>> merged;
    merged.reserve(names.size());
    for (size_t i = 0; i < batch.size(); ++i) {
        auto [it, fresh] = slotOfName.try_emplace(names[i], merged.size());
        if (fresh)
            merged.emplace_back(names[i], batch[i]);
        else
            merged[it->second].second = g.contract(merged[it->second].second, batch[i]);
    }
    if (merged.size() >= 2) {
        std::vector<uint64_t> distinct;
        distinct.reserve(merged.size());
        for (auto& [name, root] : merged) distinct.push_back(root);
        g.separate_all(distinct);
    }
    return merged;
}

// Guarantees the batch contains an unseparated pair by swapping in both
// endpoints of a known one when the sampled batch is already internally
// resolved. Returns indices of replaced members (for callers tracking batch
// membership elsewhere).
std::vector<std::pair<size_t, uint64_t>> ensure_progress(ContractionGraph& g,
                                                         std::vector<uint64_t>& batch, Rng& rng) {
    std::vector<std::pair<size_t, uint64_t>> replaced;
    if (batch.size() < 2) return replaced;
    if (g.unseparated_pair_within(batch, rng)) return replaced;
    auto pr = g.find_unseparated_pair(rng);
    if (!pr) throw std::logic_error("graph reported non-clique without an unseparated pair");
    auto [a, b] = *pr;
    size_t posA = SIZE_MAX, posB = SIZE_MAX;
    for (size_t i = 0; i < batch.size(); ++i) {
        if (batch[i] == a) posA = i;
        if (batch[i] == b) posB = i;
    }
    if (posA == SIZE_MAX) {
        size_t slot = (posB == 0) ? 1 : 0;
        replaced.emplace_back(slot, batch[slot]);
        batch[slot] = a;
        posA = slot;
    }
    if (posB == SIZE_MAX) {
        size_t slot = (posA == 0) ? 1 : 0;
        if (slot == posA) slot = 1;
        replaced.emplace_back(slot, batch[slot]);
        batch[slot] = b;
    }
    return replaced;
}

}  // namespace

double resolve_beta(const ReprConfig& cfg, uint64_t l, uint64_t c) {
    if (!cfg.autoOptimize) return cfg.beta;
    return optimize_beta((double)l / (double)c, BetaObjective::Exact).betaStar;
}

RunOutcome run_c3(const GroundTruth& truth, TeacherPool& pool, Rng& rng) {
    const uint64_t n = truth.config.n;
    const uint64_t l = pool.budget();
    if (l < 2) throw std::invalid_argument("batch-merge needs a budget of at least 2");
    const uint64_t labels0 = pool.labels_used(), teachers0 = pool.teachers_used();
    ContractionGraph g(n, matrix_threshold_for(l));
    RunOutcome out;
    while (!g.is_clique()) {
        uint64_t k = std::min<uint64_t>(l, g.node_count());
        auto batch = g.sample_roots(k, rng);
        ensure_progress(g, batch, rng);
        auto names = pool.query(batch);
        apply_response(g, batch, names);
        ++out.rounds;
    }
    fill_partition(g, n, out);
    out.labelsUsed = pool.labels_used() - labels0;
    out.teachersUsed = pool.teachers_used() - teachers0;
    return out;
}

RunOutcome run_representatives(const GroundTruth& truth, TeacherPool& pool,
                               const RepresentativeSet& reps, const ReprConfig& cfg, Rng& rng) {
    const uint64_t n = truth.config.n;
    const uint64_t c = truth.config.c;
    const uint64_t l = pool.budget();
    const uint64_t labels0 = pool.labels_used(), teachers0 = pool.teachers_used();
    double beta = resolve_beta(cfg, l, c);
    if (!(beta > 0.0) || !(beta < 1.0))
        throw std::invalid_argument("beta must lie in (0,1)");
    const uint64_t bRep = (uint64_t)std::floor(beta * (double)l);
    const uint64_t bReg = (uint64_t)std::floor((1.0 - beta) * (double)l);
    if (bRep < 1 || bReg < 1)
        throw std::invalid_argument("beta leaves no room for representatives or regular points");

    // classes by descending probability, ties by class id
    std::vector<uint32_t> classOrder(c);
    for (uint64_t k = 0; k < c; ++k) classOrder[k] = (uint32_t)k;
    std::stable_sort(classOrder.begin(), classOrder.end(), [&](uint32_t x, uint32_t y) {
        return reps.probs[x] > reps.probs[y];
    });

    // no clique queries here, so the dense endgame matrix would be pure
    // conversion overhead
    ContractionGraph g(n, 0);
    RunOutcome out;
    std::vector<uint8_t> finalized(n, 0);
    std::vector<uint32_t> inSetStamp(n, 0);
    std::vector<uint64_t> repRoots, remaining, batch;
    const uint64_t r = (c + bRep - 1) / bRep;
    for (uint64_t i = 0; i < r; ++i) {
        uint64_t setBegin = i * bRep;
        uint64_t setEnd = std::min<uint64_t>(c, setBegin + bRep);
        repRoots.clear();
        auto gen = (uint32_t)(i + 1);
        for (uint64_t s = setBegin; s < setEnd; ++s) {
            uint64_t root = g.find(reps.reps[classOrder[s]]);
            repRoots.push_back(root);
            inSetStamp[root] = gen;
        }
        remaining.clear();
        for (uint32_t root : g.roots())
            if (!finalized[root] && inSetStamp[root] != gen) remaining.push_back(root);
        // uniform random batch composition
        for (uint64_t j = remaining.size(); j > 1; --j)
            std::swap(remaining[j - 1], remaining[rng.below(j)]);

        uint64_t chunks = (remaining.size() + bReg - 1) / bReg;
        if (chunks == 0) chunks = 1;  // keep label accounting alive when only representatives remain
        for (uint64_t chunk = 0; chunk < chunks; ++chunk) {
            batch.clear();
            uint64_t lo = chunk * bReg, hi = std::min<uint64_t>(remaining.size(), lo + bReg);
            for (uint64_t j = lo; j < hi; ++j) batch.push_back(remaining[j]);
            for (uint64_t& root : repRoots) {
                root = g.find(root);
                batch.push_back(root);
            }
            auto names = pool.query(batch);
            apply_response(g, batch, names);
        }
        for (uint64_t s = setBegin; s < setEnd; ++s)
            finalized[g.find(reps.reps[classOrder[s]])] = 1;
        ++out.rounds;
    }
    for (uint32_t root : g.roots())
        if (!finalized[root])
            throw std::logic_error("representative pass left unlabeled super-nodes");
    fill_partition(g, n, out);
    out.labelsUsed = pool.labels_used() - labels0;
    out.teachersUsed = pool.teachers_used() - teachers0;
    return out;
}

namespace {

// Tag-group bookkeeping for the same-name batching algorithm: groups keyed
// by tag, buckets keyed by group size, O(1) member removal, uniform picks
// among equal-size groups.
class TagGroups {
public:
    static constexpr uint64_t kFreshTag = UINT64_MAX;

    TagGroups(uint64_t n) : tagOf_(n, kFreshTag), rootGroup_(n, kNone), rootPos_(n, kNone) {
        groups_.push_back({kFreshTag, {}, 0});
        auto& members = groups_[0].members;
        members.resize(n);
        for (uint64_t i = 0; i < n; ++i) {
            members[i] = (uint32_t)i;
            rootGroup_[i] = 0;
            rootPos_[i] = (uint32_t)i;
        }
        byTag_.emplace(kFreshTag, 0);
        bucket_insert(0);
    }

    uint64_t tag_of(uint64_t root) const { return tagOf_[root]; }

    void remove_member(uint64_t root) {
        uint32_t gi = rootGroup_[root];
        auto& mem = groups_[gi].members;
        bucket_remove(gi);
        uint32_t p = rootPos_[root];
        mem[p] = mem.back();
        rootPos_[mem[p]] = p;
        mem.pop_back();
        rootGroup_[root] = kNone;
        rootPos_[root] = kNone;
        if (mem.empty()) {
            byTag_.erase(groups_[gi].tag);
            freeList_.push_back(gi);
        } else {
            bucket_insert(gi);
        }
    }

    void add_member(uint64_t tag, uint64_t root) {
        uint32_t gi;
        auto it = byTag_.find(tag);
        if (it == byTag_.end()) {
            if (!freeList_.empty()) {
                gi = freeList_.back();
                freeList_.pop_back();
                groups_[gi].tag = tag;
                groups_[gi].members.clear();
            } else {
                gi = (uint32_t)groups_.size();
                groups_.push_back({tag, {}, 0});
            }
            byTag_.emplace(tag, gi);
        } else {
            gi = it->second;
            bucket_remove(gi);
        }
        rootGroup_[root] = gi;
        rootPos_[root] = (uint32_t)groups_[gi].members.size();
        groups_[gi].members.push_back((uint32_t)root);
        tagOf_[root] = tag;
        bucket_insert(gi);
    }

    // Fills a batch of exactly `want` super-nodes: whole largest groups
    // first (uniform among equal sizes), the final group truncated by a
    // uniform member draw. Members leave their groups.
    std::vector<uint64_t> assemble(uint64_t want, Rng& rng) {
        std::vector<uint64_t> batch;
        batch.reserve(want);
        std::vector<uint32_t> scratch;
        while (batch.size() < want) {
            auto it = std::prev(buckets_.end());
            uint64_t size = it->first;
            auto& vec = it->second;
            uint32_t gi = vec[rng.below(vec.size())];
            uint64_t need = want - batch.size();
            if (size <= need) {
                scratch = groups_[gi].members;
                for (uint32_t root : scratch) {
                    remove_member(root);
                    batch.push_back(root);
                }
            } else {
                for (uint64_t t = 0; t < need; ++t) {
                    auto& mem = groups_[gi].members;
                    uint32_t root = mem[rng.below(mem.size())];
                    remove_member(root);
                    batch.push_back(root);
                }
            }
        }
        return batch;
    }

private:
    struct Group {
        uint64_t tag;
        std::vector<uint32_t> members;
        uint32_t bucketPos;
    };

    void bucket_insert(uint32_t gi) {
        auto& vec = buckets_[groups_[gi].members.size()];
        groups_[gi].bucketPos = (uint32_t)vec.size();
        vec.push_back(gi);
    }

    void bucket_remove(uint32_t gi) {
        auto it = buckets_.find(groups_[gi].members.size());
        auto& vec = it->second;
        uint32_t p = groups_[gi].bucketPos;
        vec[p] = vec.back();
        groups_[vec[p]].bucketPos = p;
        vec.pop_back();
        if (vec.empty()) buckets_.erase(it);
    }

    std::vector<Group> groups_;
    std::vector<uint32_t> freeList_;
    std::unordered_map<uint64_t, uint32_t> byTag_;
    std::map<uint64_t, std::vector<uint32_t>> buckets_;
    std::vector<uint64_t> tagOf_;
    std::vector<uint32_t> rootGroup_;
    std::vector<uint32_t> rootPos_;
};

}  // namespace

RunOutcome run_c4(const GroundTruth& truth, TeacherPool& pool, Rng& rng) {
    if (pool.model().kind != NamingKind::PartiallyConsistent)
        throw std::invalid_argument("same-name batching needs a partially consistent pool");
    const uint64_t n = truth.config.n;
    const uint64_t l = pool.budget();
    if (l < 2) throw std::invalid_argument("same-name batching needs a budget of at least 2");
    const uint64_t labels0 = pool.labels_used(), teachers0 = pool.teachers_used();
    ContractionGraph g(n, matrix_threshold_for(l));
    TagGroups groups(n);
    RunOutcome out;
    while (!g.is_clique()) {
        uint64_t k = std::min<uint64_t>(l, g.node_count());
        auto batch = groups.assemble(k, rng);
        auto replaced = ensure_progress(g, batch, rng);
        for (auto& [slot, oldRoot] : replaced) {
            groups.add_member(groups.tag_of(oldRoot), oldRoot);  // swapped out, back to its group
            groups.remove_member(batch[slot]);                   // swapped in
        }
        auto names = pool.query(batch);
        auto merged = apply_response(g, batch, names);
        for (auto& [name, root] : merged) groups.add_member(name, root);
        ++out.rounds;
    }
    fill_partition(g, n, out);
    out.labelsUsed = pool.labels_used() - labels0;
    out.teachersUsed = pool.teachers_used() - teachers0;
    return out;
}

bool verify_partition(const RunOutcome& outcome, const GroundTruth& truth) {
    const uint64_t n = truth.config.n;
    if (outcome.partition.size() != n) return false;
    std::vector<uint32_t> fwd(n, kNone);   // recovered -> true
    std::vector<uint32_t> bwd(truth.config.c, kNone);
    for (uint64_t i = 0; i < n; ++i) {
        uint32_t rec = outcome.partition[i];
        uint32_t tru = truth.labels[i];
        if (rec >= n) return false;
        if (fwd[rec] == kNone) fwd[rec] = tru;
        else if (fwd[rec] != tru) return false;
        if (bwd[tru] == kNone) bwd[tru] = rec;
        else if (bwd[tru] != rec) return false;
    }
    return true;
}

}  // namespace labelfuse
