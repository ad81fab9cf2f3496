#include "labelfuse/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "labelfuse/bounds.hpp"

namespace labelfuse {

IntegrityError::IntegrityError(uint64_t trial)
    : std::runtime_error("trial " + std::to_string(trial) +
                         " produced a partition that contradicts the ground truth"),
      trialIndex(trial) {}

unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const char* env = std::getenv("LABELFUSE_THREADS");
    if (!env || !*env) return hw;
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) return hw;
    return (unsigned)std::min<unsigned long>(v, 256);
}

namespace {

uint64_t budget_for(const ExperimentConfig& cfg) {
    if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha))
        throw std::invalid_argument("alpha must be positive and finite");
    auto l = (int64_t)std::llround(cfg.alpha * (double)cfg.problem.c);
    if (l < 2) throw std::invalid_argument("budget l = round(alpha*c) must be at least 2");
    return (uint64_t)l;
}

NamingModel model_for(const ExperimentConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::C4:
        case Algorithm::BaselineSplit:
            return NamingModel::partially_consistent(cfg.p);
        case Algorithm::C3:
        case Algorithm::Representatives:
        default:
            return cfg.p > 0.0 ? NamingModel::partially_consistent(cfg.p)
                               : NamingModel::uncoordinated();
    }
}

TrialResult run_one(const ExperimentConfig& cfg, uint64_t l, double betaUsed, uint64_t trial) {
    uint64_t trialSeed = Rng::derive_seed(cfg.masterSeed, trial);
    ProblemConfig pc = cfg.problem;
    pc.seed = Rng::derive_seed(trialSeed, 0);
    GroundTruth truth = generate_problem(pc);
    TeacherPool pool(truth, model_for(cfg), l, Rng::derive(trialSeed, 1));
    Rng algRng = Rng::derive(trialSeed, 2);

    RunOutcome out;
    switch (cfg.algorithm) {
        case Algorithm::C3:
            out = run_c3(truth, pool, algRng);
            break;
        case Algorithm::Representatives: {
            RepresentativeSet reps = representatives_of(truth);
            out = run_representatives(truth, pool, reps, ReprConfig::fixed(betaUsed), algRng);
            break;
        }
        case Algorithm::C4:
            out = run_c4(truth, pool, algRng);
            break;
        case Algorithm::BaselineSplit:
            out = baseline_split(truth, pool);
            break;
    }
    if (!verify_partition(out, truth)) throw IntegrityError(trial);
    TrialResult r;
    r.labelsUsed = out.labelsUsed;
    r.teachersUsed = out.teachersUsed;
    r.rounds = out.rounds;
    r.efficiency = (double)cfg.problem.n / (double)out.labelsUsed;
    return r;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg.problem);
    if (cfg.problem.n < 2)
        throw std::invalid_argument("experiments need n >= 2 (efficiency is undefined at n = 1)");
    if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
    if (cfg.algorithm == Algorithm::BaselineSplit && cfg.p != 1.0)
        throw std::invalid_argument("the split baseline is only correct at p = 1");
    const uint64_t l = budget_for(cfg);

    double betaUsed = 0.0;
    if (cfg.algorithm == Algorithm::Representatives)
        betaUsed = resolve_beta(cfg.repr, l, cfg.problem.c);

    std::vector<TrialResult> trials(cfg.trials);
    unsigned workers = (unsigned)std::min<uint64_t>(worker_count(), cfg.trials);
    if (workers <= 1) {
        for (uint64_t i = 0; i < cfg.trials; ++i) trials[i] = run_one(cfg, l, betaUsed, i);
    } else {
        std::atomic<uint64_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        std::vector<uint64_t> errorTrial(workers, UINT64_MAX);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (;;) {
                    uint64_t i = next.fetch_add(1);
                    if (i >= cfg.trials) return;
                    try {
                        trials[i] = run_one(cfg, l, betaUsed, i);
                    } catch (...) {
                        if (i < errorTrial[w]) {
                            errorTrial[w] = i;
                            errors[w] = std::current_exception();
                        }
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        uint64_t firstBad = UINT64_MAX;
        std::exception_ptr firstErr;
        for (unsigned w = 0; w < workers; ++w) {
            if (errorTrial[w] < firstBad) {
                firstBad = errorTrial[w];
                firstErr = errors[w];
            }
        }
        if (firstErr) std::rethrow_exception(firstErr);
    }

    ExperimentResult res;
    res.perTrial = std::move(trials);
    res.budget = l;
    res.betaUsed = betaUsed;
    res.alphaEffective = (double)l / (double)cfg.problem.c;

    double sumEff = 0.0, sumLabels = 0.0, sumRounds = 0.0;
    for (const auto& t : res.perTrial) {
        sumEff += t.efficiency;
        sumLabels += (double)t.labelsUsed;
        sumRounds += (double)t.rounds;
    }
    auto nt = (double)cfg.trials;
    res.meanEfficiency = sumEff / nt;
    res.meanLabels = sumLabels / nt;
    res.meanRounds = sumRounds / nt;
    res.ratioOfMeans = (double)cfg.problem.n / (sumLabels / nt);
    if (cfg.trials > 1) {
        double ss = 0.0;
        for (const auto& t : res.perTrial) {
            double d = t.efficiency - res.meanEfficiency;
            ss += d * d;
        }
        res.stdErr = std::sqrt(ss / (nt - 1.0)) / std::sqrt(nt);
    }
    res.ci95Low = res.meanEfficiency - 1.96 * res.stdErr;
    res.ci95High = res.meanEfficiency + 1.96 * res.stdErr;

    const double a = res.alphaEffective;
    res.upperValue = upper_bound(a);
    switch (cfg.algorithm) {
        case Algorithm::C3:
            res.boundValue = c3_bound(a);
            break;
        case Algorithm::Representatives:
            res.boundValue = representatives_bound_exact(a, betaUsed);
            break;
        case Algorithm::C4:
            res.boundValue = c4_bound(a, cfg.p);
            break;
        case Algorithm::BaselineSplit:
            res.boundValue = 1.0;
            break;
    }
    return res;
}

SweepTable sweep(const ExperimentConfig& base, std::vector<double> alphaGrid,
                 std::vector<double> pGrid) {
    if (alphaGrid.empty()) throw std::invalid_argument("alpha grid must be nonempty");
    if (pGrid.empty()) pGrid.push_back(base.p);
    std::sort(alphaGrid.begin(), alphaGrid.end());
    std::sort(pGrid.begin(), pGrid.end());
    SweepTable table;
    table.rows.reserve(alphaGrid.size() * pGrid.size());
    for (double a : alphaGrid) {
        for (double p : pGrid) {
            ExperimentConfig cfg = base;
            cfg.alpha = a;
            cfg.p = p;
            SweepRow row;
            row.alpha = a;
            row.p = p;
            row.result = run_experiment(cfg);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

RunOutcome baseline_split(const GroundTruth& truth, TeacherPool& pool) {
    if (pool.model().kind != NamingKind::PartiallyConsistent || pool.model().p != 1.0)
        throw std::invalid_argument("the split baseline is only correct at p = 1");
    const uint64_t n = truth.config.n;
    const uint64_t l = pool.budget();
    const uint64_t labels0 = pool.labels_used(), teachers0 = pool.teachers_used();
    RunOutcome out;
    out.partition.assign(n, UINT32_MAX);
    std::vector<uint32_t> denseOf(truth.config.c, UINT32_MAX);
    uint32_t nextId = 0;
    std::vector<uint64_t> batch;
    for (uint64_t at = 0; at < n; at += l) {
        uint64_t hi = std::min<uint64_t>(n, at + l);
        batch.clear();
        for (uint64_t i = at; i < hi; ++i) batch.push_back(i);
        auto names = pool.query(batch);
        for (uint64_t j = 0; j < batch.size(); ++j) {
            uint64_t name = names[j];  // p = 1, so this is the true class id
            if (denseOf[name] == UINT32_MAX) denseOf[name] = nextId++;
            out.partition[batch[j]] = denseOf[name];
        }
        ++out.rounds;
    }
    out.labelsUsed = pool.labels_used() - labels0;
    out.teachersUsed = pool.teachers_used() - teachers0;
    return out;
}

}  // namespace labelfuse
