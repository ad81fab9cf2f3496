#include <cinttypes>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "labelfuse/bounds.hpp"
#include "labelfuse/graph.hpp"
#include "labelfuse/harness.hpp"
#include "labelfuse/replay.hpp"

using namespace labelfuse;

namespace {

std::string f9(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.9g", v);
    return b;
}

std::string fg(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%g", v);
    return b;
}

double parse_double(const std::string& s, const char* what) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::invalid_argument(std::string("bad ") + what + ": " + s);
    return v;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    size_t at = 0;
    while (at <= s.size()) {
        size_t comma = s.find(',', at);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(parse_double(s.substr(at, comma - at), what));
        at = comma + 1;
    }
    return out;
}

// `from:to:steps` (linear), `logspace:from:to:steps` (geometric), a comma
// list, or a single value when allowScalar.
std::vector<double> parse_grid(const std::string& spec, bool allowScalar) {
    bool log = spec.rfind("logspace:", 0) == 0;
    std::string body = log ? spec.substr(9) : spec;
    if (body.find(':') == std::string::npos) {
        if (log) throw std::invalid_argument("logspace grid needs from:to:steps");
        if (!allowScalar && body.find(',') == std::string::npos)
            throw std::invalid_argument("expected a grid from:to:steps, got: " + spec);
        return parse_list(body, "grid value");
    }
    size_t c1 = body.find(':');
    size_t c2 = body.find(':', c1 + 1);
    if (c2 == std::string::npos || body.find(':', c2 + 1) != std::string::npos)
        throw std::invalid_argument("grid must be from:to:steps: " + spec);
    double from = parse_double(body.substr(0, c1), "grid start");
    double to = parse_double(body.substr(c1 + 1, c2 - c1 - 1), "grid end");
    double stepsD = parse_double(body.substr(c2 + 1), "grid steps");
    auto steps = (int64_t)stepsD;
    if ((double)steps != stepsD || steps < 2)
        throw std::invalid_argument("grid needs an integer step count of at least 2");
    if (!(from > 0.0) || !(to > from))
        throw std::invalid_argument("grid needs 0 < from < to");
    std::vector<double> out((size_t)steps);
    for (int64_t i = 0; i < steps; ++i) {
        double t = (double)i / (double)(steps - 1);
        out[(size_t)i] = log ? from * std::pow(to / from, t) : from + (to - from) * t;
    }
    return out;
}

struct BoundsOpts {
    std::string alphaSpec;
    std::string pSpec;
    std::string betaSpec = "auto";
    std::string configPath;
};

// key=value lines, '#' comments; keys name long options without the dashes.
// Options already given on the command line keep their values.
void apply_config(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    auto trim = [](const std::string& s) {
        size_t b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return std::string();
        size_t e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    };
    std::string line;
    uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string at = path + ":" + std::to_string(lineno) + ": ";
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(at + "expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) throw std::invalid_argument(at + "expected key=value");
        if (key == "config") throw std::invalid_argument(at + "config files cannot nest");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) throw std::invalid_argument(at + "unknown key: " + key);
        if (opt->count() > 0) continue;
        opt->add_result(val);
        opt->run_callback();
    }
}

void require_opts(CLI::App* sub, std::initializer_list<const char*> names) {
    for (const char* nm : names)
        if (sub->get_option(nm)->count() == 0)
            throw std::invalid_argument(std::string(nm) + " is required");
}

void run_bounds(const BoundsOpts& o) {
    std::vector<double> alphas = parse_grid(o.alphaSpec, false);
    std::vector<double> ps;
    if (!o.pSpec.empty()) ps = parse_list(o.pSpec, "p value");
    for (double p : ps)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
    bool autoBeta = o.betaSpec == "auto";
    double fixedBeta = 0.0;
    if (!autoBeta) {
        fixedBeta = parse_double(o.betaSpec, "beta");
        if (!(fixedBeta > 0.0 && fixedBeta < 1.0))
            throw std::invalid_argument("beta must lie in (0,1)");
    }
    std::string header = "alpha,c3,repr_theorem,repr_exact,beta_star,upper";
    for (double p : ps) header += ",c4_p" + fg(p);
    std::printf("%s\n", header.c_str());
    for (double a : alphas) {
        double reprT, reprE, betaStar;
        if (autoBeta) {
            reprT = optimize_beta(a, BetaObjective::Theorem).value;
            BetaOpt e = optimize_beta(a, BetaObjective::Exact);
            reprE = e.value;
            betaStar = e.betaStar;
        } else {
            reprT = representatives_bound(a, fixedBeta);
            reprE = representatives_bound_exact(a, fixedBeta);
            betaStar = fixedBeta;
        }
        std::string row = f9(a) + "," + f9(c3_bound(a)) + "," + f9(reprT) + "," + f9(reprE) +
                          "," + f9(betaStar) + "," + f9(upper_bound(a));
        for (double p : ps) row += "," + f9(c4_bound(a, p));
        std::printf("%s\n", row.c_str());
    }
}

struct SimOpts {
    std::string alg = "c3";
    uint64_t n = 0;
    uint64_t c = 0;
    std::string alphaSpec;
    std::string betaSpec = "auto";
    std::string pSpec;
    uint64_t trials = 1;
    uint64_t seed = 0;
    std::string dist = "uniform";
    double zipfS = 1.0;
    std::string configPath;
};

Algorithm algorithm_of(const std::string& s) {
    if (s == "c3") return Algorithm::C3;
    if (s == "repr") return Algorithm::Representatives;
    if (s == "c4") return Algorithm::C4;
    if (s == "baseline") return Algorithm::BaselineSplit;
    throw std::invalid_argument("unknown algorithm: " + s);
}

ExperimentConfig base_config(const SimOpts& o) {
    ExperimentConfig cfg;
    cfg.problem.n = o.n;
    cfg.problem.c = o.c;
    if (o.dist == "uniform")
        cfg.problem.dist = Distribution::uniform();
    else if (o.dist == "zipf")
        cfg.problem.dist = Distribution::zipf(o.zipfS);
    else
        throw std::invalid_argument("unknown distribution: " + o.dist);
    cfg.algorithm = algorithm_of(o.alg);
    if (o.betaSpec == "auto") {
        cfg.repr = ReprConfig::auto_optimized();
    } else {
        double b = parse_double(o.betaSpec, "beta");
        if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
        cfg.repr = ReprConfig::fixed(b);
    }
    cfg.trials = o.trials;
    cfg.masterSeed = o.seed;
    return cfg;
}

const char* kSimHeader =
    "alg,n,c,alpha,beta,p,trials,seed,mean_labels,mean_eff,stderr,ci_lo,ci_hi,bound,upper";

void print_sim_row(const SimOpts& o, double alpha, double p, const ExperimentResult& r) {
    std::printf("%s,%" PRIu64 ",%" PRIu64 ",%s,%s,%s,%" PRIu64 ",%" PRIu64 ",%s,%s,%s,%s,%s,%s,%s\n",
                o.alg.c_str(), o.n, o.c, f9(alpha).c_str(), f9(r.betaUsed).c_str(),
                f9(p).c_str(), o.trials, o.seed, f9(r.meanLabels).c_str(),
                f9(r.meanEfficiency).c_str(), f9(r.stdErr).c_str(), f9(r.ci95Low).c_str(),
                f9(r.ci95High).c_str(), f9(r.boundValue).c_str(), f9(r.upperValue).c_str());
}

void summarize(const SimOpts& o, double alpha, double p, const ExperimentResult& r, double ms) {
    std::fprintf(stderr,
                 "%s: n=%" PRIu64 " c=%" PRIu64 " l=%" PRIu64
                 " alpha=%g p=%g trials=%" PRIu64 " mean_eff=%.6g stderr=%.3g bound=%.6g "
                 "upper=%.6g (%.0f ms)\n",
                 o.alg.c_str(), o.n, o.c, r.budget, alpha, p, o.trials, r.meanEfficiency,
                 r.stdErr, r.boundValue, r.upperValue, ms);
}

void run_simulate(const SimOpts& o) {
    ExperimentConfig cfg = base_config(o);
    cfg.alpha = parse_double(o.alphaSpec, "alpha");
    cfg.p = o.pSpec.empty() ? 0.0 : parse_double(o.pSpec, "p");
    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult r = run_experiment(cfg);
    auto t1 = std::chrono::steady_clock::now();
    std::printf("%s\n", kSimHeader);
    print_sim_row(o, cfg.alpha, cfg.p, r);
    summarize(o, cfg.alpha, cfg.p, r,
              std::chrono::duration<double, std::milli>(t1 - t0).count());
}

void run_sweep(const SimOpts& o) {
    ExperimentConfig cfg = base_config(o);
    std::vector<double> alphas = parse_grid(o.alphaSpec, true);
    std::vector<double> ps;
    if (!o.pSpec.empty()) ps = parse_list(o.pSpec, "p value");
    auto t0 = std::chrono::steady_clock::now();
    SweepTable table = sweep(cfg, alphas, ps);
    auto t1 = std::chrono::steady_clock::now();
    std::printf("%s\n", kSimHeader);
    for (const SweepRow& row : table.rows) print_sim_row(o, row.alpha, row.p, row.result);
    std::fprintf(stderr, "sweep: %zu rows (%.0f ms)\n", table.rows.size(),
                 std::chrono::duration<double, std::milli>(t1 - t0).count());
}

struct ReplayOpts {
    std::string path;
    uint64_t n = 0;
    bool nSet = false;
    std::string dumpPath;
};

void run_replay(const ReplayOpts& o) {
    std::ifstream in(o.path);
    if (!in) throw std::invalid_argument("cannot open log file: " + o.path);
    std::optional<uint64_t> declared;
    if (o.nSet) declared = o.n;
    ReplayResult r = replay_log(in, declared);
    std::printf("n,labels,teachers,components\n");
    std::printf("%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%zu\n", r.n, r.labels, r.teachers,
                r.components.size());
    if (!o.dumpPath.empty()) {
        std::ofstream out(o.dumpPath);
        if (!out) throw std::invalid_argument("cannot open dump file: " + o.dumpPath);
        std::vector<uint64_t> comp(r.n, 0);
        for (size_t ci = 0; ci < r.components.size(); ++ci)
            for (uint64_t v : r.components[ci]) comp[v] = ci;
        for (uint64_t i = 0; i < r.n; ++i)
            out << i << '\t' << comp[i] << '\n';
    }
    std::fprintf(stderr, "replay: %" PRIu64 " labels from %" PRIu64 " teachers over %" PRIu64
                 " instances, %zu components\n",
                 r.labels, r.teachers, r.n, r.components.size());
}

void add_common(CLI::App* sub, SimOpts& o) {
    sub->add_option("--alg", o.alg, "algorithm: c3, repr, c4, baseline")
        ->check(CLI::IsMember({"c3", "repr", "c4", "baseline"}));
    sub->add_option("--n", o.n, "instance count");
    sub->add_option("--c", o.c, "class count");
    sub->add_option("--beta", o.betaSpec, "repr split: auto or a value in (0,1)");
    sub->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--dist", o.dist, "class distribution: uniform or zipf")
        ->check(CLI::IsMember({"uniform", "zipf"}));
    sub->add_option("--zipf-s", o.zipfS, "zipf exponent");
    sub->add_option("--config", o.configPath, "key=value config file; flags override it");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"label-fusion bounds and simulation toolkit"};
    app.require_subcommand(1);

    BoundsOpts bo;
    CLI::App* bounds = app.add_subcommand("bounds", "emit bound curves as CSV");
    bounds->add_option("--alpha", bo.alphaSpec, "grid from:to:steps or logspace:from:to:steps");
    bounds->add_option("--p", bo.pSpec, "comma list of consistency levels; adds c4_p columns");
    bounds->add_option("--beta", bo.betaSpec, "repr split: auto (optimize) or a value in (0,1)");
    bounds->add_option("--config", bo.configPath, "key=value config file; flags override it");

    SimOpts so;
    CLI::App* simulate = app.add_subcommand("simulate", "run one experiment, emit a CSV row");
    simulate->add_option("--alpha", so.alphaSpec, "budget ratio l/c");
    simulate->add_option("--p", so.pSpec, "name-consistency probability");
    add_common(simulate, so);

    SimOpts wo;
    CLI::App* sweepCmd = app.add_subcommand("sweep", "run an alpha/p grid, one CSV row per point");
    sweepCmd->add_option("--alpha", wo.alphaSpec, "grid from:to:steps, logspace:..., list, or value");
    sweepCmd->add_option("--p", wo.pSpec, "comma list of consistency levels");
    add_common(sweepCmd, wo);

    ReplayOpts ro;
    CLI::App* replay = app.add_subcommand("replay", "rebuild the graph from a label log");
    replay->add_option("log", ro.path, "log file: #l=<int> header, teacher<TAB>instance<TAB>name")
        ->required();
    auto* nOpt = replay->add_option("--n", ro.n, "declared instance count");
    replay->add_option("--dump-components", ro.dumpPath, "write instance<TAB>component lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (bounds->parsed()) {
            if (!bo.configPath.empty()) apply_config(bounds, bo.configPath);
            require_opts(bounds, {"--alpha"});
            run_bounds(bo);
        }
        if (simulate->parsed()) {
            if (!so.configPath.empty()) apply_config(simulate, so.configPath);
            require_opts(simulate, {"--alpha", "--n", "--c"});
            run_simulate(so);
        }
        if (sweepCmd->parsed()) {
            if (!wo.configPath.empty()) apply_config(sweepCmd, wo.configPath);
            require_opts(sweepCmd, {"--alpha", "--n", "--c"});
            run_sweep(wo);
        }
        if (replay->parsed()) {
            ro.nSet = nOpt->count() > 0;
            run_replay(ro);
        }
    } catch (const IntegrityError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ReplayInconsistency& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const ConsistencyViolation& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
