#pragma once

// Test-side statistics utilities: chi-square p-values via the regularized
// incomplete gamma function, and a pooled two-sample chi-square test.
// Kept independent of the library under test.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "saqpe/sampler.hpp"

namespace stathelpers {

// Regularized lower incomplete gamma P(a, x) by series / continued fraction.
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // series representation
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction for Q, then P = 1 - Q
    double b = x + 1.0 - a;
    double c = 1e308;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

inline double chi_square_p_value(double statistic, double dof) {
    return 1.0 - gamma_p(dof / 2.0, statistic / 2.0);
}

// Two-sample chi-square over sparse bin counts, pooling bins until each
// pooled cell has at least `min_cell` combined counts. Returns the p-value.
inline double two_sample_chi_square(const saqpe::EmpiricalDistribution& a,
                                    const saqpe::EmpiricalDistribution& b,
                                    double min_cell = 10.0) {
    std::map<std::uint64_t, std::pair<double, double>> cells;
    for (const auto& [bin, c] : a.counts()) cells[bin].first += static_cast<double>(c);
    for (const auto& [bin, c] : b.counts()) cells[bin].second += static_cast<double>(c);

    double ka = static_cast<double>(a.total_shots());
    double kb = static_cast<double>(b.total_shots());
    double r1 = std::sqrt(kb / ka), r2 = std::sqrt(ka / kb);

    double stat = 0.0;
    std::size_t used = 0;
    double pool_a = 0.0, pool_b = 0.0;
    auto flush = [&](double ca, double cb) {
        double denom = ca + cb;
        if (denom <= 0.0) return;
        double diff = ca * r1 - cb * r2;
        stat += diff * diff / denom;
        ++used;
    };
    for (const auto& [bin, pair] : cells) {
        pool_a += pair.first;
        pool_b += pair.second;
        if (pool_a + pool_b >= min_cell) {
            flush(pool_a, pool_b);
            pool_a = pool_b = 0.0;
        }
    }
    flush(pool_a, pool_b);
    if (used < 2) return 1.0;
    return chi_square_p_value(stat, static_cast<double>(used - 1));
}

// Total-variation distance between an empirical distribution and a dense
// exact distribution on the same grid.
inline double total_variation(const saqpe::EmpiricalDistribution& emp,
                              const saqpe::QpeDistribution& exact) {
    const auto& dense = exact.dense();
    double tv = 0.0;
    for (std::uint64_t j = 0; j < dense.size(); ++j) {
        tv += std::fabs(emp.p_hat(j) - dense[j]);
    }
    return tv / 2.0;
}

}  // namespace stathelpers
