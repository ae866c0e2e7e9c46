#include "ocp2d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocp2d {

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance: need at least 2 values");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

double std_error_iid(std::span<const double> xs) {
    return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

double std_error_batch_means(std::span<const double> xs, std::size_t n_batches) {
    if (xs.size() < 2 * n_batches) return std_error_iid(xs);
    const std::size_t bs = xs.size() / n_batches;
    std::vector<double> bm(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b)
        bm[b] = mean(xs.subspan(b * bs, bs));
    // variance of batch means / number of batches
    return std::sqrt(variance(bm) / static_cast<double>(n_batches));
}

double erlang_cdf(int k, double x) {
    if (k < 1) throw std::invalid_argument("erlang_cdf: shape must be >= 1");
    if (x <= 0.0) return 0.0;
    // 1 - e^{-x} sum_{i<k} x^i/i!, with the sum accumulated in log-safe steps
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < k; ++i) {
        term *= x / i;
        sum += term;
    }
    const double tail = sum * std::exp(-x);
    return tail >= 1.0 ? 0.0 : 1.0 - tail;
}

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double chi2_sf(double x, double dof) {
    if (x <= 0.0) return 1.0;
    return 1.0 - gamma_p(0.5 * dof, 0.5 * x);
}

double ks_distance_sorted(std::span<const double> sorted, double (*cdf)(double, const void*),
                          const void* ctx) {
    const std::size_t n = sorted.size();
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = cdf(sorted[i], ctx);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(F - lo), std::abs(F - hi)));
    }
    return d;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need matching samples, size >= 2");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

} // namespace ocp2d
