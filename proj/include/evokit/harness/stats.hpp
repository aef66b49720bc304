#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "evokit/errors.hpp"

namespace evokit {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw InsufficientData("mean of empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw InsufficientData("median of empty sample");
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Sample standard deviation (n-1 denominator).
inline double stdev(const std::vector<double>& v) {
    if (v.size() < 2) throw InsufficientData("stdev needs at least two samples");
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Coefficient of variation; 0 when the mean is 0 and the spread is 0.
inline double coefficient_of_variation(const std::vector<double>& v) {
    double m = mean(v);
    double s = stdev(v);
    if (s == 0.0) return 0.0;
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return s / std::abs(m);
}

namespace detail {

/// Regularized incomplete beta I_x(a,b) by Lentz's continued fraction.
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // use the symmetry relation where the fraction converges fast
    if (x > (a + 1.0) / (a + b + 2.0))
        return 1.0 - incomplete_beta(b, a, 1.0 - x);

    double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(log_front) / a;

    const double tiny = 1e-300;
    double f = 1.0, c = 1.0, d = 0.0;
    for (int i = 0; i <= 300; ++i) {
        int m = i / 2;
        double numerator;
        if (i == 0)
            numerator = 1.0;
        else if (i % 2 == 0)
            numerator = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        else
            numerator = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 + numerator * d;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        c = 1.0 + numerator / c;
        if (std::abs(c) < tiny) c = tiny;
        double delta = c * d;
        f *= delta;
        if (std::abs(1.0 - delta) < 1e-12) break;
    }
    return front * (f - 1.0);
}

}  // namespace detail

/// CDF of Student's t distribution with df degrees of freedom.
inline double student_t_cdf(double t, double df) {
    double x = df / (df + t * t);
    double p = 0.5 * detail::incomplete_beta(df / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - p : p;
}

/// Quantile of Student's t by bisection on the CDF, accurate well below 1e-3.
inline double student_t_quantile(double p, double df) {
    if (p <= 0.0 || p >= 1.0) throw ConfigError("t quantile level out of (0,1)");
    if (p == 0.5) return 0.0;
    double lo = -1e6, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct ConfidenceInterval {
    double level;
    double low;
    double high;
};

inline ConfidenceInterval confidence_interval(const std::vector<double>& samples, double level) {
    if (samples.size() < 2) throw InsufficientData("confidence interval needs >= 2 samples");
    if (level <= 0.0 || level >= 1.0) throw ConfigError("confidence level out of (0,1)");
    double m = mean(samples);
    double s = stdev(samples);
    double n = static_cast<double>(samples.size());
    double t = student_t_quantile(0.5 * (1.0 + level), n - 1.0);
    double half = t * s / std::sqrt(n);
    return {level, m - half, m + half};
}

struct TTestResult {
    double t;
    double df;
    double critical;  // two-sided quantile at the chosen alpha
    bool significant;
};

/// Welch's unequal-variance two-sample t-test, two-sided.
inline TTestResult two_sample_t_test(const std::vector<double>& a, const std::vector<double>& b,
                                     double alpha = 0.05) {
    if (a.size() < 2 || b.size() < 2) throw InsufficientData("t-test needs >= 2 samples each");
    double ma = mean(a), mb = mean(b);
    double va = stdev(a) * stdev(a), vb = stdev(b) * stdev(b);
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double se2 = va / na + vb / nb;
    TTestResult r{};
    if (se2 == 0.0) {
        r.t = 0.0;
        r.df = na + nb - 2.0;
    } else {
        r.t = (ma - mb) / std::sqrt(se2);
        r.df = se2 * se2 /
               (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    }
    r.critical = student_t_quantile(1.0 - alpha / 2.0, r.df);
    r.significant = std::abs(r.t) > r.critical;
    return r;
}

struct StatsSummary {
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
    double success_rate = 0.0;
    ConfidenceInterval ci{0.95, 0.0, 0.0};
};

inline StatsSummary summarize(const std::vector<double>& values, double success_rate,
                              double level = 0.95) {
    StatsSummary s;
    s.mean = mean(values);
    s.median = median(values);
    s.sd = values.size() >= 2 ? stdev(values) : 0.0;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    s.success_rate = success_rate;
    s.ci = values.size() >= 2 ? confidence_interval(values, level)
                              : ConfidenceInterval{level, s.mean, s.mean};
    return s;
}

}  // namespace evokit
