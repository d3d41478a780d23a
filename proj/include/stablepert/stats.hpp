#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stablepert::stats {

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
/// by series for x < a + 1 and continued fraction otherwise.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, Q = 1 - P.
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - lg);
        return 1.0 - p;
    }
    // Lentz continued fraction for Q.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double dd = 1.0 / b;
    double h = dd;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::fabs(dd) < tiny) dd = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        dd = 1.0 / dd;
        const double del = dd * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

/// Upper-tail p-value of a chi-square statistic with df degrees of freedom.
inline double chi_square_pvalue(double stat, int df) { return gamma_q(0.5 * df, 0.5 * stat); }

/// Pearson chi-square statistic from observed counts and expected
/// probabilities (scaled by the total count).
inline double chi_square_stat(const std::vector<double>& observed,
                              const std::vector<double>& expected_prob) {
    double n = 0.0;
    for (double o : observed) n += o;
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = n * expected_prob[i];
        if (e <= 0.0) throw std::invalid_argument("chi_square_stat: zero expected count");
        const double d = observed[i] - e;
        stat += d * d / e;
    }
    return stat;
}

/// Kolmogorov-Smirnov distance between a sample and a CDF.
template <class Cdf>
double ks_statistic(std::vector<double> sample, const Cdf& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - i / n));
        d = std::max(d, std::fabs((i + 1) / n - f));
    }
    return d;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = a + b x.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("linear_fit: need matching n >= 2");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.slope_se = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    return fit;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe r;
    r.n = xs.size();
    if (r.n == 0) return r;
    for (double x : xs) r.mean += x;
    r.mean /= static_cast<double>(r.n);
    if (r.n > 1) {
        double s2 = 0.0;
        for (double x : xs) s2 += (x - r.mean) * (x - r.mean);
        r.se = std::sqrt(s2 / (static_cast<double>(r.n) - 1) / static_cast<double>(r.n));
    }
    return r;
}

/// Standard error of a binomial proportion estimate.
inline double binomial_se(double p_hat, double n) {
    return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / n);
}

}  // namespace stablepert::stats
