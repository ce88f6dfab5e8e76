#pragma once

#include "measfid/channel.hpp"
#include "measfid/information.hpp"
#include "measfid/phase_density.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace measfid {

/// Bayes' rule on a phase grid: posterior ∝ exp(log_likelihood(phi)) * prior(phi).
/// Works in the log domain so sharp likelihoods do not underflow. A uniform
/// prior is laid on a uniform grid of `grid_points`; a gridded prior keeps its
/// own grid. Throws ModelError if the likelihood vanishes on the prior's support.
PosteriorDensity posterior_from_log_likelihood(const PhasePrior &prior,
                                               const std::function<double(double)> &log_likelihood,
                                               std::size_t grid_points = kDefaultPhaseGridPoints);

PosteriorDensity posterior(const DiscreteChannel &channel, const PhasePrior &prior, std::size_t observed,
                           std::size_t grid_points = kDefaultPhaseGridPoints);
PosteriorDensity posterior(const ContinuousChannel &channel, const PhasePrior &prior,
                           std::span<const double> observed, std::size_t grid_points = kDefaultPhaseGridPoints);

// Folds posterior() over the observations, each posterior becoming the next prior.
PosteriorDensity recursive_update(const PhasePrior &prior, const DiscreteChannel &channel,
                                  std::span<const std::size_t> observations,
                                  std::size_t grid_points = kDefaultPhaseGridPoints);
PosteriorDensity recursive_update(const PhasePrior &prior, const ContinuousChannel &channel,
                                  std::span<const std::vector<double>> observations,
                                  std::size_t grid_points = kDefaultPhaseGridPoints);

struct PhaseEstimate {
    std::optional<double> circular_mean; // empty when the resultant length is below 1e-9
    double                resultant_length    = 0.0;
    double                circular_dispersion = 1.0; // 1 - resultant_length
    std::vector<double>   modes;                     // local maxima above half the global maximum
};

PhaseEstimate estimate_phase(const PosteriorDensity &posterior);

struct CandidateEvaluation {
    double                          xi = 0.0;
    std::optional<FidelityEstimate> fidelity;
    std::string                     error; // set when evaluation failed
};

struct FidelityOptimum {
    double                           best_xi   = 0.0;
    double                           best_bits = 0.0;
    std::vector<CandidateEvaluation> table; // ascending in xi
};

/// Exhaustive search for the apparatus parameter maximizing fidelity over a
/// finite candidate grid. Failed candidates stay in the table and are skipped;
/// ties go to the smallest xi. Throws NumericalError if every candidate fails.
FidelityOptimum optimize_fidelity(std::span<const double> candidates,
                                  const std::function<FidelityEstimate(double)> &evaluate, std::size_t workers = 1);

} // namespace measfid
