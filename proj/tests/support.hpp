#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "dlt/schmidt.hpp"

namespace dlt_test {

using dlt::SchmidtVector;

/// Uniform point on the probability simplex, sorted non-increasing.
inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64 &rng) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> w(n);
    for (auto &x : w) {
        x = expo(rng);
    }
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto &x : w) {
        x /= total;
    }
    std::sort(w.begin(), w.end(), std::greater<>());
    return w;
}

inline SchmidtVector from_squares(const std::vector<double> &sq) {
    return dlt::validate(sq, true, true);
}

inline bool same_squares(const SchmidtVector &a, const SchmidtVector &b, double tol = 1e-12) {
    for (std::size_t j = 0; j < a.n(); j++) {
        if (std::abs(a[j] * a[j] - b[j] * b[j]) > tol) {
            return false;
        }
    }
    return true;
}

struct Pair {
    SchmidtVector source;
    SchmidtVector target;
};

/// Target uniform on the simplex; source = D * target with D a random convex
/// combination of at least two permutation matrices, hence doubly stochastic, so
/// the source is majorized by the target by construction.
inline Pair random_feasible_pair(std::size_t n, std::mt19937_64 &rng) {
    for (;;) {
        auto target = random_simplex(n, rng);
        std::uniform_int_distribution<int> count(2, 5);
        int terms = count(rng);
        auto weights = random_simplex(static_cast<std::size_t>(terms), rng);
        std::vector<double> source(n, 0.0);
        std::vector<std::size_t> perm(n);
        for (int t = 0; t < terms; t++) {
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            for (std::size_t j = 0; j < n; j++) {
                source[perm[j]] += weights[static_cast<std::size_t>(t)] * target[j];
            }
        }
        Pair p{from_squares(source), from_squares(target)};
        // All drawn permutations can coincide, leaving source == target.
        if (!same_squares(p.source, p.target)) {
            return p;
        }
    }
}

/// Two independent uniform simplex points; majorization may or may not hold.
inline Pair random_pair(std::size_t n, std::mt19937_64 &rng) {
    return {from_squares(random_simplex(n, rng)), from_squares(random_simplex(n, rng))};
}

/// Direct tail-sum test in extended precision, sharing no code with the library.
inline bool naive_majorized(const std::vector<double> &source_amps, const std::vector<double> &target_amps,
                            double tol) {
    std::vector<long double> s, t;
    for (double a : source_amps) {
        s.push_back(static_cast<long double>(a) * a);
    }
    for (double a : target_amps) {
        t.push_back(static_cast<long double>(a) * a);
    }
    std::sort(s.begin(), s.end(), std::greater<>());
    std::sort(t.begin(), t.end(), std::greater<>());
    std::size_t n = s.size();
    for (std::size_t k = 0; k < n; k++) {
        long double ss = 0, tt = 0;
        for (std::size_t j = k; j < n; j++) {
            ss += s[j];
            tt += t[j];
        }
        long double margin = ss - tt;
        if (k == 0 ? std::fabs(static_cast<double>(margin)) > tol : static_cast<double>(margin) < -tol) {
            return false;
        }
    }
    return true;
}

}  // namespace dlt_test
