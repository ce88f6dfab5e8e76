#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace measfid {

using ScalarFunction = std::function<double(double)>;

struct Tolerance {
    double rel = 1e-8;
    double abs = 0.0;

    // Throws DomainError unless both are finite, nonnegative and at least one is positive.
    void validate() const;
    double target(double value) const;
};

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct TruncationBudget {
    double tail_mass = 1e-12;
    std::size_t n_max = 0;
    // Exact Poisson mass above n_max, always < tail_mass.
    double achieved_tail = 0.0;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kLn2 = 0.69314718055994530942;

// Maximum bisection depth for integrate_periodic.
inline constexpr int kMaxRefinementLevels = 20;

/// Adaptive Gauss-Kronrod (7/15) integration of f over one period [-pi, pi].
///
/// Intervals are bisected largest-error first until the summed error estimate
/// meets tol. An interval is never split below depth kMaxRefinementLevels; if
/// the tolerance is still unmet, NumericalError carries the best estimate.
IntegrationResult integrate_periodic(const ScalarFunction &f, const Tolerance &tol = {});

// Same scheme on an arbitrary finite interval.
IntegrationResult integrate_adaptive(const ScalarFunction &f, double lo, double hi,
                                     const Tolerance &tol = {});

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

// n-point Gauss-Hermite rule for the standard normal weight (weights sum to 1).
QuadratureRule gauss_hermite_normal(std::size_t n);

// Composite Gauss-Legendre rule on [lo, hi] with `panels` equal panels of `order` nodes.
QuadratureRule composite_gauss_legendre(double lo, double hi, std::size_t panels,
                                        std::size_t order);

/// Integral of f against the normal density N(mean, sigma^2), exact for
/// polynomials of degree < 2 * order.
double integrate_gaussian_weight(const ScalarFunction &f, double mean, double sigma, int order);

double log_gamma(double x);

// Smallest n_max whose Poisson(mean) upper tail P(N > n_max) is strictly below tail_mass.
TruncationBudget poisson_truncation(double mean, double tail_mass);

// x * log2(x) with the 0 * log 0 = 0 convention.
double xlog2x(double x);

} // namespace measfid
