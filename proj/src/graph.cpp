#include "labelfuse/graph.hpp"

#include <algorithm>
#include <bit>

namespace labelfuse {

ContractionGraph::ContractionGraph(uint64_t n, uint64_t matrixThreshold)
    : n_(n), matrixThreshold_(matrixThreshold) {
    if (n == 0) throw std::invalid_argument("graph needs at least one instance");
    if (n >= UINT32_MAX) throw std::invalid_argument("instance count exceeds supported limit");
    parent_.resize(n);
    for (uint64_t i = 0; i < n; ++i) parent_[i] = (uint32_t)i;
    sizeOf_.assign(n, 1);
    rootList_ = parent_;
    rootPos_ = parent_;
    bmOf_.assign(n, kNone);
    stamp_.assign(n, 0);
    if (n <= matrixThreshold_) densify();
}

void ContractionGraph::check_id(uint64_t v) const {
    if (v >= n_) throw std::invalid_argument("instance id out of range");
}

uint64_t ContractionGraph::find(uint64_t v) const {
    check_id(v);
    uint32_t r = (uint32_t)v;
    while (parent_[r] != r) r = parent_[r];
    uint32_t cur = (uint32_t)v;
    while (parent_[cur] != r) {
        uint32_t next = parent_[cur];
        parent_[cur] = r;
        cur = next;
    }
    return r;
}

uint32_t ContractionGraph::root_of(uint64_t v) const { return (uint32_t)find(v); }

uint32_t ContractionGraph::stamp_begin() {
    if (++stampGen_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0u);
        stampGen_ = 1;
    }
    return stampGen_;
}

// ---- cohort lists ----

void ContractionGraph::list_add(uint32_t root, uint64_t cohort) {
    if (cohort > UINT32_MAX) throw std::length_error("separation event count exceeded");
    uint32_t idx = bmOf_[root];
    if (idx == kNone) {
        idx = (uint32_t)cohortLists_.size();
        cohortLists_.emplace_back();
        bmOf_[root] = idx;
    }
    // cohort ids only grow, so push_back keeps the list sorted
    cohortLists_[idx].push_back((uint32_t)cohort);
}

bool ContractionGraph::lists_intersect(uint32_t a, uint32_t b) const {
    uint32_t ia = bmOf_[a], ib = bmOf_[b];
    if (ia == kNone || ib == kNone) return false;
    const std::vector<uint32_t>& x = cohortLists_[ia];
    const std::vector<uint32_t>& y = cohortLists_[ib];
    // walk backward: recent cohorts are the likeliest shared ones
    size_t i = x.size(), j = y.size();
    while (i > 0 && j > 0) {
        uint32_t xi = x[i - 1], yj = y[j - 1];
        if (xi == yj) return true;
        if (xi > yj)
            --i;
        else
            --j;
    }
    return false;
}

void ContractionGraph::merge_lists(uint32_t winner, uint32_t loser) {
    uint32_t iw = bmOf_[winner], il = bmOf_[loser];
    if (il == kNone) return;
    if (iw == kNone) {
        bmOf_[winner] = il;
        bmOf_[loser] = kNone;
        return;
    }
    uint32_t big = iw, small = il;
    if (cohortLists_[big].size() < cohortLists_[small].size()) std::swap(big, small);
    std::vector<uint32_t>& dst = cohortLists_[big];
    std::vector<uint32_t>& src = cohortLists_[small];
    if (!src.empty()) {
        // backward in-place merge; winner capacity amortizes across merges
        size_t na = dst.size(), nb = src.size(), k = na + nb;
        dst.resize(k);
        bool dup = false;
        size_t i = na, j = nb;
        while (j > 0) {
            if (i > 0 && dst[i - 1] >= src[j - 1]) {
                if (dst[i - 1] == src[j - 1]) dup = true;
                dst[--k] = dst[--i];
            } else {
                dst[--k] = src[--j];
            }
        }
        // shared cohorts only appear when a separated pair is contracted,
        // which callers rule out; stay exact anyway
        if (dup) dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
    }
    src = {};
    bmOf_[winner] = big;
    bmOf_[loser] = kNone;
}

// ---- dense phase ----

uint64_t ContractionGraph::masked_popcount(const uint64_t* r) const {
    uint64_t total = 0;
    for (uint32_t w = 0; w < words_; ++w) total += (uint64_t)std::popcount(r[w] & valid_[w]);
    return total;
}

void ContractionGraph::densify() {
    uint64_t N = rootList_.size();
    words_ = (uint32_t)((N + 63) / 64);
    if (words_ == 0) words_ = 1;
    bits_.assign((size_t)N * words_, 0);
    valid_.assign(words_, 0);
    for (uint64_t s = 0; s < N; ++s) valid_[s >> 6] |= 1ull << (s & 63);
    slotOf_.assign(n_, kNone);
    rootOfSlot_.assign(rootList_.begin(), rootList_.end());
    for (uint64_t s = 0; s < N; ++s) slotOf_[rootList_[s]] = (uint32_t)s;
    live_ = N;
    unsep_ = N * (N - 1) / 2;
    if (!cohortLists_.empty() && cohortCount_ > 0) {
        // invert surviving cohort lists: members of one cohort are pairwise
        // separated, and no other pairs are. Bucket slots by cohort id
        // (counting sort) instead of comparison-sorting all entries.
        std::vector<uint32_t> off(cohortCount_ + 1, 0);
        for (uint64_t s = 0; s < N; ++s) {
            uint32_t idx = bmOf_[rootList_[s]];
            if (idx == kNone) continue;
            for (uint32_t c : cohortLists_[idx]) ++off[(size_t)c + 1];
        }
        for (size_t c = 1; c < off.size(); ++c) off[c] += off[c - 1];
        std::vector<uint32_t> slots(off.back());
        std::vector<uint32_t> cur(off.begin(), off.end() - 1);
        for (uint64_t s = 0; s < N; ++s) {
            uint32_t idx = bmOf_[rootList_[s]];
            if (idx == kNone) continue;
            for (uint32_t c : cohortLists_[idx]) slots[cur[(size_t)c]++] = (uint32_t)s;
        }
        for (uint64_t c = 0; c < cohortCount_; ++c) {
            for (uint32_t i = off[c]; i < off[c + 1]; ++i) {
                for (uint32_t j = i + 1; j < off[c + 1]; ++j) {
                    uint32_t a = slots[i], b = slots[j];
                    if (a == b) continue;
                    uint64_t& wa = bits_[(size_t)a * words_ + (b >> 6)];
                    if (!(wa & (1ull << (b & 63)))) {
                        wa |= 1ull << (b & 63);
                        bits_[(size_t)b * words_ + (a >> 6)] |= 1ull << (a & 63);
                        --unsep_;
                    }
                }
            }
        }
    }
    cohortLists_.clear();
    cohortLists_.shrink_to_fit();
    bmOf_ = {};
    witnessA_ = witnessB_ = kNone;
    dense_ = true;
}

void ContractionGraph::dense_contract(uint32_t winner, uint32_t loser) {
    uint32_t sw = slotOf_[winner], sl = slotOf_[loser];
    uint64_t* rw = row(sw);
    uint64_t* rl = row(sl);
    uint64_t unsepW = (live_ - 1) - masked_popcount(rw);
    uint64_t unsepL = (live_ - 1) - masked_popcount(rl);
    bool pairUnsep = !(rw[sl >> 6] & (1ull << (sl & 63)));
    unsep_ -= unsepW + unsepL - (pairUnsep ? 1 : 0);
    // keep the matrix symmetric: the loser's partners must now point at the
    // winner's slot too
    for (uint32_t w = 0; w < words_; ++w) {
        uint64_t m = rl[w] & valid_[w];
        while (m) {
            uint32_t x = w * 64 + (uint32_t)std::countr_zero(m);
            m &= m - 1;
            if (x != sw) row(x)[sw >> 6] |= 1ull << (sw & 63);
        }
    }
    for (uint32_t w = 0; w < words_; ++w) rw[w] |= rl[w];
    rw[sw >> 6] &= ~(1ull << (sw & 63));
    rw[sl >> 6] &= ~(1ull << (sl & 63));
    valid_[sl >> 6] &= ~(1ull << (sl & 63));
    slotOf_[loser] = kNone;
    --live_;
    unsep_ += (live_ - 1) - masked_popcount(rw);
}

// ---- public operations ----

uint64_t ContractionGraph::contract(uint64_t u, uint64_t v) {
    uint32_t ru = root_of(u), rv = root_of(v);
    if (ru == rv) return ru;
    uint32_t winner = ru, loser = rv;
    if (sizeOf_[loser] > sizeOf_[winner] ||
        (sizeOf_[loser] == sizeOf_[winner] && loser < winner))
        std::swap(winner, loser);
    parent_[loser] = winner;
    sizeOf_[winner] += sizeOf_[loser];
    uint32_t pos = rootPos_[loser];
    uint32_t last = rootList_.back();
    rootList_[pos] = last;
    rootPos_[last] = pos;
    rootList_.pop_back();
    if (dense_) {
        dense_contract(winner, loser);
    } else {
        merge_lists(winner, loser);
        if (rootList_.size() <= matrixThreshold_) densify();
    }
    return winner;
}

void ContractionGraph::separate(uint64_t u, uint64_t v) {
    uint32_t ru = root_of(u), rv = root_of(v);
    if (ru == rv) throw ConsistencyViolation(u, v);
    if (dense_) {
        uint32_t su = slotOf_[ru], sv = slotOf_[rv];
        uint64_t& w = row(su)[sv >> 6];
        if (!(w & (1ull << (sv & 63)))) {
            w |= 1ull << (sv & 63);
            row(sv)[su >> 6] |= 1ull << (su & 63);
            --unsep_;
        }
    } else {
        uint64_t cohort = cohortCount_++;
        list_add(ru, cohort);
        list_add(rv, cohort);
    }
}

void ContractionGraph::separate_all(const std::vector<uint64_t>& roots) {
    if (roots.size() < 2) return;
    uint32_t gen = stamp_begin();
    for (uint64_t r : roots) {
        check_id(r);
        uint32_t rr = root_of(r);
        if (rr != r) throw std::invalid_argument("separate_all expects current roots");
        if (stamp_[rr] == gen) throw ConsistencyViolation(r, r);
        stamp_[rr] = gen;
    }
    if (dense_) {
        std::vector<uint64_t> mask(words_, 0);
        for (uint64_t r : roots) {
            uint32_t s = slotOf_[(uint32_t)r];
            mask[s >> 6] |= 1ull << (s & 63);
        }
        uint64_t total = 0;
        for (uint64_t r : roots) {
            uint32_t s = slotOf_[(uint32_t)r];
            const uint64_t* rs = row(s);
            uint64_t self = 1ull << (s & 63);
            for (uint32_t w = 0; w < words_; ++w) {
                uint64_t m = mask[w] & ~rs[w];
                if (w == (s >> 6)) m &= ~self;
                total += (uint64_t)std::popcount(m);
            }
        }
        for (uint64_t r : roots) {
            uint32_t s = slotOf_[(uint32_t)r];
            uint64_t* rs = row(s);
            for (uint32_t w = 0; w < words_; ++w) rs[w] |= mask[w];
            rs[s >> 6] &= ~(1ull << (s & 63));
        }
        unsep_ -= total / 2;
    } else {
        uint64_t cohort = cohortCount_++;
        for (uint64_t r : roots) list_add((uint32_t)r, cohort);
    }
}

bool ContractionGraph::separated(uint64_t u, uint64_t v) const {
    uint32_t ru = root_of(u), rv = root_of(v);
    if (ru == rv) return false;
    if (dense_) {
        uint32_t su = slotOf_[ru], sv = slotOf_[rv];
        return (row(su)[sv >> 6] >> (sv & 63)) & 1ull;
    }
    return lists_intersect(ru, rv);
}

bool ContractionGraph::witness_valid() const {
    if (witnessA_ == kNone) return false;
    return parent_[witnessA_] == witnessA_ && parent_[witnessB_] == witnessB_ &&
           !separated(witnessA_, witnessB_);
}

std::optional<std::pair<uint64_t, uint64_t>> ContractionGraph::cohort_unseparated(Rng* rng) {
    uint64_t N = rootList_.size();
    if (N < 2) return std::nullopt;
    if (witness_valid()) return std::make_pair((uint64_t)witnessA_, (uint64_t)witnessB_);
    Rng* pr = rng ? rng : &probeRng_;
    for (int attempt = 0; attempt < 128; ++attempt) {
        uint32_t a = rootList_[pr->below(N)];
        uint32_t b = rootList_[pr->below(N)];
        if (a == b) continue;
        if (!lists_intersect(a, b)) {
            witnessA_ = a;
            witnessB_ = b;
            return std::make_pair((uint64_t)a, (uint64_t)b);
        }
    }
    // deterministic fallback; pays only when unseparated pairs are rare,
    // which in the large phase means the run is nearly done
    for (uint64_t i = 0; i < N; ++i) {
        for (uint64_t j = i + 1; j < N; ++j) {
            if (!lists_intersect(rootList_[i], rootList_[j])) {
                witnessA_ = rootList_[i];
                witnessB_ = rootList_[j];
                return std::make_pair((uint64_t)witnessA_, (uint64_t)witnessB_);
            }
        }
    }
    return std::nullopt;
}

bool ContractionGraph::is_clique() {
    if (dense_) return unsep_ == 0;
    return !cohort_unseparated(nullptr).has_value();
}

std::optional<std::pair<uint64_t, uint64_t>> ContractionGraph::find_unseparated_pair(Rng& rng) {
    if (!dense_) return cohort_unseparated(&rng);
    if (unsep_ == 0) return std::nullopt;
    uint64_t N = rootList_.size();
    for (int attempt = 0; attempt < 64 && N >= 2; ++attempt) {
        uint32_t a = rootList_[rng.below(N)];
        uint32_t b = rootList_[rng.below(N)];
        if (a == b) continue;
        if (!separated(a, b)) return std::make_pair((uint64_t)a, (uint64_t)b);
    }
    for (uint32_t s = 0; s < rootOfSlot_.size(); ++s) {
        if (!((valid_[s >> 6] >> (s & 63)) & 1ull)) continue;
        const uint64_t* rs = row(s);
        for (uint32_t w = 0; w < words_; ++w) {
            uint64_t cand = valid_[w] & ~rs[w];
            if (w == (s >> 6)) cand &= ~(1ull << (s & 63));
            if (cand) {
                uint32_t t = w * 64 + (uint32_t)std::countr_zero(cand);
                return std::make_pair((uint64_t)rootOfSlot_[s], (uint64_t)rootOfSlot_[t]);
            }
        }
    }
    return std::nullopt;
}

std::optional<std::pair<uint64_t, uint64_t>> ContractionGraph::unseparated_pair_within(
    const std::vector<uint64_t>& roots, Rng& rng) {
    size_t b = roots.size();
    if (b < 2) return std::nullopt;
    if (dense_) {
        std::vector<uint64_t> mask(words_, 0);
        for (uint64_t r : roots) {
            uint32_t s = slotOf_[root_of(r)];
            mask[s >> 6] |= 1ull << (s & 63);
        }
        for (uint64_t r : roots) {
            uint32_t s = slotOf_[root_of(r)];
            const uint64_t* rs = row(s);
            for (uint32_t w = 0; w < words_; ++w) {
                uint64_t cand = mask[w] & ~rs[w];
                if (w == (s >> 6)) cand &= ~(1ull << (s & 63));
                if (cand) {
                    uint32_t t = w * 64 + (uint32_t)std::countr_zero(cand);
                    return std::make_pair((uint64_t)rootOfSlot_[s], (uint64_t)rootOfSlot_[t]);
                }
            }
        }
        return std::nullopt;
    }
    for (size_t attempt = 0; attempt < 2 * b; ++attempt) {
        uint64_t x = roots[rng.below(b)];
        uint64_t y = roots[rng.below(b)];
        if (x == y) continue;
        if (!separated(x, y)) return std::make_pair(x, y);
    }
    for (size_t i = 0; i < b; ++i)
        for (size_t j = i + 1; j < b; ++j)
            if (!separated(roots[i], roots[j])) return std::make_pair(roots[i], roots[j]);
    return std::nullopt;
}

uint64_t ContractionGraph::sep_count() const {
    if (dense_) return live_ * (live_ - 1) / 2 - unsep_;
    uint64_t count = 0;
    uint64_t N = rootList_.size();
    for (uint64_t i = 0; i < N; ++i)
        for (uint64_t j = i + 1; j < N; ++j)
            if (lists_intersect(rootList_[i], rootList_[j])) ++count;
    return count;
}

std::vector<std::vector<uint64_t>> ContractionGraph::components() const {
    std::vector<uint32_t> compOf(n_, kNone);
    std::vector<std::vector<uint64_t>> comps;
    for (uint64_t i = 0; i < n_; ++i) {
        uint32_t r = (uint32_t)find(i);
        if (compOf[r] == kNone) {
            compOf[r] = (uint32_t)comps.size();
            comps.emplace_back();
        }
        comps[compOf[r]].push_back(i);
    }
    return comps;
}

std::vector<uint64_t> ContractionGraph::sample_roots(uint64_t k, Rng& rng) {
    uint64_t N = rootList_.size();
    if (k > N) throw std::invalid_argument("cannot sample more super-nodes than exist");
    std::vector<uint64_t> out;
    out.reserve(k);
    for (uint64_t i = 0; i < k; ++i) {
        uint64_t j = i + rng.below(N - i);
        uint32_t a = rootList_[i], b = rootList_[j];
        rootList_[i] = b;
        rootList_[j] = a;
        rootPos_[b] = (uint32_t)i;
        rootPos_[a] = (uint32_t)j;
        out.push_back(b);
    }
    return out;
}

}  // namespace labelfuse
