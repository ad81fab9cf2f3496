#include "labelfuse/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace labelfuse {

namespace {

// Teacher name encoding packs the class id into 24 bits (see teachers.cpp).
constexpr uint64_t kMaxClasses = 1ull << 24;

}  // namespace

void validate_config(const ProblemConfig& cfg) {
    if (cfg.c < 1) throw std::invalid_argument("c must be at least 1");
    if (cfg.n < cfg.c) throw std::invalid_argument("n must be at least c");
    if (cfg.c >= kMaxClasses) throw std::invalid_argument("c exceeds the supported class-count limit (2^24)");
    if (cfg.n >= UINT32_MAX) throw std::invalid_argument("n exceeds the supported instance-count limit");
    switch (cfg.dist.kind) {
        case DistKind::Uniform: break;
        case DistKind::Zipf:
            if (!(cfg.dist.zipfS >= 0.0) || !std::isfinite(cfg.dist.zipfS))
                throw std::invalid_argument("zipf exponent must be a nonnegative finite real");
            break;
        case DistKind::Explicit: {
            if (cfg.dist.probs.size() != cfg.c)
                throw std::invalid_argument("explicit probabilities must list one entry per class");
            double sum = 0.0;
            for (double p : cfg.dist.probs) {
                if (!(p > 0.0)) throw std::invalid_argument("explicit probabilities must all be positive");
                sum += p;
            }
            if (std::fabs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("explicit probabilities must sum to 1 within 1e-12");
            break;
        }
    }
}

std::vector<double> class_probabilities(const ProblemConfig& cfg) {
    validate_config(cfg);
    std::vector<double> probs(cfg.c);
    switch (cfg.dist.kind) {
        case DistKind::Uniform:
            std::fill(probs.begin(), probs.end(), 1.0 / (double)cfg.c);
            break;
        case DistKind::Zipf: {
            double norm = 0.0;
            for (uint64_t k = 0; k < cfg.c; ++k) {
                probs[k] = 1.0 / std::pow((double)(k + 1), cfg.dist.zipfS);
                norm += probs[k];
            }
            for (double& p : probs) p /= norm;
            break;
        }
        case DistKind::Explicit:
            probs = cfg.dist.probs;
            break;
    }
    return probs;
}

GroundTruth generate_problem(const ProblemConfig& cfg) {
    GroundTruth gt;
    gt.config = cfg;
    gt.classProbs = class_probabilities(cfg);
    const uint64_t n = cfg.n, c = cfg.c;

    // Inverse-CDF table for non-uniform draws.
    std::vector<double> cdf;
    if (cfg.dist.kind != DistKind::Uniform) {
        cdf.resize(c);
        double acc = 0.0;
        for (uint64_t k = 0; k < c; ++k) {
            acc += gt.classProbs[k];
            cdf[k] = acc;
        }
        cdf[c - 1] = 1.0;
    }

    Rng rng(cfg.seed);
    gt.labels.assign(n, 0);
    std::vector<uint8_t> seen(c);
    // Wholesale resampling keeps the draws i.i.d. conditioned on full
    // support; the cap turns a near-degenerate explicit distribution into an
    // error instead of a hang.
    for (uint64_t attempt = 0;; ++attempt) {
        if (attempt == 1000000)
            throw std::runtime_error("could not populate all classes; distribution too skewed for this n");
        std::fill(seen.begin(), seen.end(), (uint8_t)0);
        uint64_t distinct = 0;
        for (uint64_t i = 0; i < n; ++i) {
            uint32_t k;
            if (cfg.dist.kind == DistKind::Uniform) {
                k = (uint32_t)rng.below(c);
            } else {
                double u = rng.unit();
                k = (uint32_t)(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
                if (k >= c) k = (uint32_t)(c - 1);
            }
            gt.labels[i] = k;
            if (!seen[k]) {
                seen[k] = 1;
                ++distinct;
            }
        }
        if (distinct == c) break;
    }
    return gt;
}

RepresentativeSet representatives_of(const GroundTruth& gt) {
    const uint64_t c = gt.config.c;
    RepresentativeSet rs;
    rs.reps.assign(c, UINT64_MAX);
    rs.probs = gt.classProbs;
    uint64_t remaining = c;
    for (uint64_t i = 0; i < gt.labels.size() && remaining > 0; ++i) {
        uint32_t k = gt.labels[i];
        if (rs.reps[k] == UINT64_MAX) {
            rs.reps[k] = i;
            --remaining;
        }
    }
    if (remaining != 0) throw std::logic_error("ground truth does not cover all classes");
    return rs;
}

}  // namespace labelfuse
