#include "measfid/errors.hpp"
#include "measfid/numerics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace measfid;

namespace {

Tolerance tight(double rel = 1e-12, double abs = 1e-13) { return {rel, abs}; }

} // namespace

TEST(IntegratePeriodic, HalfAngleSquare) {
    const auto r = integrate_periodic([](double p) { return std::sin(0.5 * p) * std::sin(0.5 * p); }, {1e-10, 0.0});
    EXPECT_NEAR(r.value, kPi, 1e-10 * kPi);
    EXPECT_GE(r.error_estimate, 0.0);
    EXPECT_GE(r.evaluations, 1u);
}

TEST(IntegratePeriodic, OddHarmonicVanishes) {
    const auto r = integrate_periodic([](double p) { return std::cos(p); }, {1e-10, 1e-12});
    EXPECT_NEAR(r.value, 0.0, 1e-12);
}

TEST(IntegratePeriodic, NarrowBumpMatchesFineReference) {
    auto       f   = [](double p) { return std::exp(-(p - 1.0) * (p - 1.0) / 0.02); };
    const auto r   = integrate_periodic(f, tight());
    // A 15-node rule on 2^14 panels is far finer than anything the adaptive scheme needs.
    const auto ref = composite_gauss_legendre(-kPi, kPi, 1 << 14, 15);
    double     s   = 0.0;
    for(std::size_t i = 0; i < ref.nodes.size(); ++i) s += ref.weights[i] * f(ref.nodes[i]);
    EXPECT_NEAR(r.value, s, 1e-9);
    EXPECT_NEAR(r.value, oracle::trapezoid(f, -kPi, kPi, 200000), 1e-9);
}

TEST(IntegratePeriodic, Linearity) {
    auto       f  = [](double p) { return std::exp(std::cos(p)); };
    auto       g  = [](double p) { return p * p * std::sin(3.0 * p) + 1.0; };
    const auto rf = integrate_periodic(f, tight());
    const auto rg = integrate_periodic(g, tight());
    const auto rh = integrate_periodic([&](double p) { return 2.5 * f(p) - 0.75 * g(p); }, tight());
    EXPECT_NEAR(rh.value, 2.5 * rf.value - 0.75 * rg.value, 1e-10);
}

TEST(IntegratePeriodic, NonnegativeIntegrand) {
    const auto r = integrate_periodic([](double p) { return std::pow(std::sin(p), 40); }, tight());
    EXPECT_GE(r.value, 0.0);
}

TEST(IntegratePeriodic, NonConvergenceCarriesEstimate) {
    // A jump cannot be resolved to 1e-15 absolute within the depth cap.
    try {
        integrate_periodic([](double p) { return p > 0.123456789 ? 1.0 : 0.0; }, {1e-16, 1e-300});
        FAIL() << "expected NumericalError";
    } catch(const NumericalError &e) {
        EXPECT_NEAR(e.best_estimate(), kPi - 0.123456789, 1e-4);
        EXPECT_GT(e.error_bound(), 0.0);
    }
}

TEST(IntegratePeriodic, Deterministic) {
    auto f = [](double p) { return std::exp(std::sin(p)) * std::cos(2 * p) + 1.0; };
    EXPECT_EQ(integrate_periodic(f, tight()).value, integrate_periodic(f, tight()).value);
}

TEST(Tolerance, Validation) {
    EXPECT_THROW((Tolerance{0.0, 0.0}).validate(), DomainError);
    EXPECT_THROW((Tolerance{-1.0, 1.0}).validate(), DomainError);
    EXPECT_THROW((Tolerance{NAN, 1.0}).validate(), DomainError);
    EXPECT_NO_THROW((Tolerance{0.0, 1e-9}).validate());
}

TEST(GaussianWeight, Moments) {
    EXPECT_NEAR(integrate_gaussian_weight([](double) { return 1.0; }, 0.3, 2.0, 8), 1.0, 1e-14);
    EXPECT_NEAR(integrate_gaussian_weight([](double e) { return e; }, 0.0, 1.7, 8), 0.0, 1e-14);
    EXPECT_NEAR(integrate_gaussian_weight([](double e) { return e * e; }, 0.0, 1.7, 8), 1.7 * 1.7, 1e-13);
}

TEST(GaussianWeight, MomentsZeroToThreeAtOrderFour) {
    const double m = 0.4, s = 1.3;
    EXPECT_NEAR(integrate_gaussian_weight([](double) { return 1.0; }, m, s, 4), 1.0, 1e-15);
    EXPECT_NEAR(integrate_gaussian_weight([](double e) { return e; }, m, s, 4), m, 1e-15);
    EXPECT_NEAR(integrate_gaussian_weight([](double e) { return e * e; }, m, s, 4), m * m + s * s, 1e-14);
    EXPECT_NEAR(integrate_gaussian_weight([](double e) { return e * e * e; }, m, s, 4), m * m * m + 3 * m * s * s, 1e-14);
}

TEST(GaussianWeight, ExactBelowDegreeTwiceOrder) {
    // E[X^8] = 105 for a standard normal; a 5-point rule is exact up to degree 9.
    EXPECT_NEAR(integrate_gaussian_weight([](double e) { return std::pow(e, 8); }, 0.0, 1.0, 5), 105.0, 1e-11);
}

TEST(GaussianWeight, Preconditions) {
    EXPECT_THROW(integrate_gaussian_weight([](double) { return 1.0; }, 0.0, 0.0, 4), DomainError);
    EXPECT_THROW(integrate_gaussian_weight([](double) { return 1.0; }, 0.0, -1.0, 4), DomainError);
    EXPECT_THROW(integrate_gaussian_weight([](double) { return 1.0; }, 0.0, 1.0, 1), DomainError);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    const auto rule = gauss_legendre(6);
    double     s    = 0.0;
    for(std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 10);
    EXPECT_NEAR(s, 2.0 / 11.0, 1e-15);
}

TEST(LogGamma, KnownValues) {
    EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-15);
    EXPECT_NEAR(log_gamma(0.5), 0.5723649429247001, 1e-15);
    EXPECT_NEAR(log_gamma(11.0), oracle::log_factorial(10), 1e-12 * 15.1);
    EXPECT_NEAR(log_gamma(11.0), 15.1044125731, 1e-10);
    EXPECT_NEAR(log_gamma(171.0), oracle::log_factorial(170), 1e-12 * 706.6);
}

TEST(LogGamma, Recurrence) {
    for(double x : {0.5, 1.0, 2.5, 10.0}) {
        const double lhs = std::exp(log_gamma(x + 1.0));
        const double rhs = x * std::exp(log_gamma(x));
        EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(rhs)) << x;
    }
}

TEST(LogGamma, Domain) {
    EXPECT_THROW(log_gamma(0.0), DomainError);
    EXPECT_THROW(log_gamma(-2.5), DomainError);
}

TEST(PoissonTruncation, VacuumMean) { EXPECT_EQ(poisson_truncation(0.0, 1e-12).n_max, 0u); }

TEST(PoissonTruncation, MatchesCumulativeSum) {
    for(double mean : {0.5, 1.0, 3.0, 10.0, 40.0}) {
        const auto b = poisson_truncation(mean, 1e-12);
        EXPECT_EQ(b.n_max, oracle::poisson_cutoff(mean, 1e-12)) << mean;
        EXPECT_LT(b.achieved_tail, 1e-12);
    }
}

TEST(PoissonTruncation, MassCoversAllButTail) {
    for(double mean : {0.25, 2.0, 7.5}) {
        const auto b    = poisson_truncation(mean, 1e-10);
        double     mass = 0.0;
        for(std::size_t k = 0; k <= b.n_max; ++k)
            mass += std::exp(-mean + static_cast<double>(k) * std::log(mean) - oracle::log_factorial(static_cast<unsigned>(k)));
        EXPECT_GE(mass, 1.0 - 1e-10 - 1e-15) << mean;
    }
}

TEST(PoissonTruncation, NondecreasingInMean) {
    std::size_t last = 0;
    for(double mean = 0.0; mean <= 20.0; mean += 0.25) {
        const auto n = poisson_truncation(mean, 1e-12).n_max;
        EXPECT_GE(n, last) << mean;
        last = n;
    }
}

TEST(PoissonTruncation, Preconditions) {
    EXPECT_THROW(poisson_truncation(-1.0, 1e-12), DomainError);
    EXPECT_THROW(poisson_truncation(1.0, 0.0), DomainError);
    EXPECT_THROW(poisson_truncation(1.0, 1.0), DomainError);
}

TEST(Xlog2x, ZeroConvention) {
    EXPECT_EQ(xlog2x(0.0), 0.0);
    EXPECT_DOUBLE_EQ(xlog2x(0.5), -0.5);
}
