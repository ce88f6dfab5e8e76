#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace measfid {

/// Conditional law P(y | phi) over an enumerable outcome set y = 0..outcome_count()-1.
/// Countable outcome sets are truncated; truncation_tail() bounds the mass
/// left out, uniformly in phi.
class DiscreteChannel {
  public:
    virtual ~DiscreteChannel() = default;

    virtual std::size_t outcome_count() const = 0;
    // Natural log of P(y | phi); -infinity where the probability is zero.
    virtual double log_probability(std::size_t outcome, double phi) const = 0;
    virtual double probability(std::size_t outcome, double phi) const { return std::exp(log_probability(outcome, phi)); }
    virtual double truncation_tail() const { return 0.0; }
    virtual std::string outcome_label(std::size_t outcome) const { return std::to_string(outcome); }
};

// Axis-aligned box carrying all but `tail_mass` of the outcome density for every phase.
struct OutcomeDomain {
    std::vector<double> lo;
    std::vector<double> hi;
    double length_scale = 1.0; // smallest feature width of the density, sets panel width
    double tail_mass    = 0.0;
};

/// Conditional density p(y | phi) over real outcome vectors of fixed dimension.
class ContinuousChannel {
  public:
    virtual ~ContinuousChannel() = default;

    virtual std::size_t dimension() const = 0;
    virtual double log_pdf(std::span<const double> outcome, double phi) const = 0;
    double pdf(std::span<const double> outcome, double phi) const { return std::exp(log_pdf(outcome, phi)); }

    virtual OutcomeDomain integration_domain() const = 0;

    // Sampling support: map standard-normal draws to an outcome at phase phi.
    virtual std::size_t noise_dimension() const { return 0; }
    virtual void transform_noise(double phi, std::span<const double> standard_normals, std::span<double> outcome) const;
};

/// Discrete channel backed by a callable P(y | phi); convenient for ad hoc models.
class FunctionDiscreteChannel final : public DiscreteChannel {
  public:
    using Pmf = std::function<double(std::size_t, double)>;
    FunctionDiscreteChannel(std::size_t outcomes, Pmf pmf) : outcomes_(outcomes), pmf_(std::move(pmf)) {}

    std::size_t outcome_count() const override { return outcomes_; }
    double probability(std::size_t y, double phi) const override { return pmf_(y, phi); }
    double log_probability(std::size_t y, double phi) const override { return std::log(pmf_(y, phi)); }

  private:
    std::size_t outcomes_;
    Pmf         pmf_;
};

} // namespace measfid
