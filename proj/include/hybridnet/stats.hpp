#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace hybridnet {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n-1 denominator); 0 for a single observation.
inline double sample_stddev(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) throw std::invalid_argument("sample_stddev: empty sample");
    if (n == 1) return 0.0;
    const double m = mean(xs);
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

inline double stderr_of_mean(std::span<const double> xs) {
    return sample_stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Least-squares slope of y against x = 0, 1, ..., n-1.
template <typename T>
double lsq_slope(std::span<const T> ys) {
    const std::size_t n = ys.size();
    if (n < 2) throw std::invalid_argument("lsq_slope: need at least two points");
    const double xbar = 0.5 * static_cast<double>(n - 1);
    double ybar = 0;
    for (const T& y : ys) ybar += static_cast<double>(y);
    ybar /= static_cast<double>(n);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - xbar;
        num += dx * (static_cast<double>(ys[i]) - ybar);
        den += dx * dx;
    }
    return num / den;
}

/// Fractional ranks (1-based, ties get the average rank).
inline std::vector<double> fractional_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

/// Spearman rank correlation of two equally sized samples.
inline double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman: need two samples of equal size >= 2");
    const std::vector<double> ra = fractional_ranks(a);
    const std::vector<double> rb = fractional_ranks(b);
    const double ma = mean(ra), mb = mean(rb);
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    if (da == 0 || db == 0) throw std::invalid_argument("spearman: constant sample");
    return num / std::sqrt(da * db);
}

}  // namespace hybridnet
