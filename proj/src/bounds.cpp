#include "labelfuse/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace labelfuse {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::domain_error("alpha must be a positive finite real");
}

void require_beta(double beta) {
    if (!(beta > 0.0) || !(beta < 1.0))
        throw std::domain_error("beta must lie in (0,1)");
}

// 1 - q(x) without cancellation: alternating series
// sum_{j>=1} (-1)^{j+1} x^j/(j+1)! for small x, else (x + expm1(-x))/x.
double q_complement(double x) {
    if (x < 0.5) {
        double term = x / 2.0;
        double s = term;
        for (int j = 2;; ++j) {
            term *= -x / (double)(j + 1);
            s += term;
            if (std::fabs(term) < 1e-18 * std::fabs(s)) return s;
        }
    }
    return (x + std::expm1(-x)) / x;
}

// Integer r for the exact representative form; 1/(alpha*beta) wobbles just
// above exact integers in floating point, and a blind ceil would then step
// onto the 1 - k*alpha*beta = 0 pole.
long long exact_r(double alpha, double beta) {
    double inv = 1.0 / (alpha * beta);
    double n = std::nearbyint(inv);
    long long r;
    if (std::fabs(inv - n) < 1e-9 * std::max(1.0, inv))
        r = (long long)n;
    else
        r = (long long)std::ceil(inv);
    return std::max(1ll, r);
}

}  // namespace

double q_function(double alpha) {
    require_alpha(alpha);
    if (alpha < 1e-4) return 1.0 - alpha / 2.0 + alpha * alpha / 6.0;
    return -std::expm1(-alpha) / alpha;
}

double expected_unique_exact(uint64_t c, uint64_t l, const std::vector<double>& probs) {
    if (c == 0 || probs.size() != c)
        throw std::domain_error("probs must hold one probability per class");
    if (l == 0) throw std::domain_error("l must be positive");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p > 0.0) || !(p <= 1.0)) throw std::domain_error("class probabilities must lie in (0,1]");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw std::domain_error("class probabilities must sum to 1");
    double expected = (double)c;
    for (double p : probs) {
        // (1-p)^l by binary exponentiation: portable bit-identical results.
        double base = 1.0 - p;
        double pw = 1.0;
        uint64_t e = l;
        while (e) {
            if (e & 1) pw *= base;
            base *= base;
            e >>= 1;
        }
        expected -= pw;
    }
    return expected;
}

double c3_bound(double alpha) {
    require_alpha(alpha);
    return q_complement(alpha);
}

double representatives_bound(double alpha, double beta) {
    require_alpha(alpha);
    require_beta(beta);
    double r = 1.0 / (alpha * beta);
    double x = alpha * (1.0 - beta);
    double qc = q_complement(x);
    double qv = 1.0 - qc;
    double oneMinusQr = qc < 1.0 ? -std::expm1(r * std::log1p(-qc)) : 1.0;
    double den = qc - (qv / r) * oneMinusQr;
    return (1.0 - beta) * qc * qc / den;
}

double representatives_bound_exact(double alpha, double beta) {
    require_alpha(alpha);
    require_beta(beta);
    long long r = exact_r(alpha, beta);
    double s = 0.0;
    double prod = 1.0;
    for (long long i = 0; i < r; ++i) {
        s += (1.0 - (double)i / (double)r) * prod;
        double den = 1.0 - (double)i * alpha * beta;
        if (den <= 0.0) break;
        prod *= q_function(alpha * (1.0 - beta) / den);
        if (prod * (double)(r - i) < 1e-16 * s) break;
    }
    return (1.0 - beta) / s;
}

double upper_bound(double alpha) {
    require_alpha(alpha);
    return std::min(1.0, 2.0 * alpha / (1.0 + alpha));
}

double c4_bound(double alpha, double p) {
    require_alpha(alpha);
    if (!(p >= 0.0) || !(p <= 1.0)) throw std::domain_error("p must lie in [0,1]");
    double num = -std::expm1(-alpha);
    double den = alpha + (std::exp(-alpha * (1.0 - p)) - std::exp(-alpha));
    return 1.0 - num / den;
}

BetaOpt optimize_beta(double alpha, BetaObjective objective) {
    require_alpha(alpha);
    auto f = [&](double b) {
        return objective == BetaObjective::Theorem ? representatives_bound(alpha, b)
                                                   : representatives_bound_exact(alpha, b);
    };
    const double lo = 1e-3, hi = 1.0 - 1e-3, step = 1e-3;
    double bestB = lo, bestV = -1.0;
    for (int k = 1;; ++k) {
        double b = k * step;
        if (b > hi + 1e-12) break;
        double v = f(b);
        if (v > bestV) {
            bestV = v;
            bestB = b;
        }
    }
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo2 = std::max(lo, bestB - step), hi2 = std::min(hi, bestB + step);
    double x1 = hi2 - gr * (hi2 - lo2), x2 = lo2 + gr * (hi2 - lo2);
    double f1 = f(x1), f2 = f(x2);
    while (hi2 - lo2 > 1e-6) {
        if (f1 < f2) {
            lo2 = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo2 + gr * (hi2 - lo2);
            f2 = f(x2);
        } else {
            hi2 = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi2 - gr * (hi2 - lo2);
            f1 = f(x1);
        }
    }
    double b = 0.5 * (lo2 + hi2);
    return {b, f(b)};
}

BoundCurve eval_bound_curve(BoundKind kind, const std::vector<double>& alphaGrid, double param) {
    if (alphaGrid.empty()) throw std::domain_error("alpha grid must be nonempty");
    for (size_t i = 1; i < alphaGrid.size(); ++i)
        if (!(alphaGrid[i] > alphaGrid[i - 1]))
            throw std::domain_error("alpha grid must be strictly increasing");
    BoundCurve curve{kind, alphaGrid, {}};
    curve.values.reserve(alphaGrid.size());
    for (double a : alphaGrid) {
        double v = 0.0;
        switch (kind) {
            case BoundKind::C3: v = c3_bound(a); break;
            case BoundKind::ReprTheorem:
                v = param > 0.0 ? representatives_bound(a, param)
                                : optimize_beta(a, BetaObjective::Theorem).value;
                break;
            case BoundKind::ReprExact:
                v = param > 0.0 ? representatives_bound_exact(a, param)
                                : optimize_beta(a, BetaObjective::Exact).value;
                break;
            case BoundKind::Upper: v = upper_bound(a); break;
            case BoundKind::C4: v = c4_bound(a, param); break;
        }
        curve.values.push_back(v);
    }
    return curve;
}

}  // namespace labelfuse
