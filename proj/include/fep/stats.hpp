#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fep/errors.hpp"

namespace fep {

struct ConfidenceInterval {
    double low = 0.0;
    double high = 1.0;
    double level = 0.95;
    int64_t x = 0;
    int64_t n = 0;
};

namespace detail {

// P(X <= k) for X ~ Binomial(n, p), summed over the smaller tail in log space.
inline double binom_cdf(int64_t k, int64_t n, double p) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    if (k > n / 2) return 1.0 - binom_cdf(n - k - 1, n, 1.0 - p);

    double log_p = std::log(p);
    double log_q = std::log1p(-p);
    std::vector<double> terms;
    terms.reserve(static_cast<size_t>(k) + 1);
    double log_c = 0.0;  // log C(n, i)
    for (int64_t i = 0; i <= k; ++i) {
        terms.push_back(log_c + static_cast<double>(i) * log_p +
                        static_cast<double>(n - i) * log_q);
        log_c += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(i + 1));
    }
    double mx = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - mx);
    return std::min(1.0, std::exp(mx) * sum);
}

// cdf(k; n, p) is strictly decreasing in p on (0,1); find p with cdf == target.
inline double invert_cdf(int64_t k, int64_t n, double target) {
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (binom_cdf(k, n, mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Exact binomial confidence interval.
inline ConfidenceInterval clopper_pearson(int64_t x, int64_t n, double level = 0.95) {
    if (n < 1) throw DomainError("clopper_pearson: n must be >= 1");
    if (x < 0 || x > n) throw DomainError("clopper_pearson: x must be in [0, n]");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("clopper_pearson: bad level");
    double alpha2 = (1.0 - level) / 2.0;
    ConfidenceInterval ci;
    ci.level = level;
    ci.x = x;
    ci.n = n;
    ci.low = x == 0 ? 0.0 : detail::invert_cdf(x - 1, n, 1.0 - alpha2);
    ci.high = x == n ? 1.0 : detail::invert_cdf(x, n, alpha2);
    return ci;
}

}  // namespace fep
