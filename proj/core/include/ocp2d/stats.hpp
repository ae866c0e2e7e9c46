#ifndef OCP2D_STATS_HPP
#define OCP2D_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

// Small statistics toolbox used by the samplers, observables, and tests.

namespace ocp2d {

double mean(std::span<const double> xs);
double variance(std::span<const double> xs); // unbiased (n-1)
double std_error_iid(std::span<const double> xs);

/// Standard error of the mean of a correlated series, batch-means estimate.
double std_error_batch_means(std::span<const double> xs, std::size_t n_batches = 32);

/// P(Gamma(k,1) <= x) for integer shape k >= 1 (Erlang closed form).
double erlang_cdf(int k, double x);

/// Regularized lower incomplete gamma P(a, x), series + continued fraction.
double gamma_p(double a, double x);

/// Chi-squared upper tail probability with dof degrees of freedom.
double chi2_sf(double x, double dof);

/// Kolmogorov-Smirnov distance between a sorted sample and a CDF.
double ks_distance_sorted(std::span<const double> sorted_sample, double (*cdf)(double, const void*),
                          const void* ctx);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares line through (x, y) pairs.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Deterministic pairwise summation (order-independent of chunking used by callers).
double pairwise_sum(std::span<const double> xs);

} // namespace ocp2d

#endif
