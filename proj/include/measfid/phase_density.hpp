#pragma once

#include "measfid/numerics.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace measfid {

inline constexpr std::size_t kDefaultPhaseGridPoints = 1024;

// n equally spaced phases -pi + 2 pi (j + 1) / n, j = 0..n-1, covering (-pi, pi].
std::vector<double> uniform_phase_grid(std::size_t n);

/// A nonnegative density over phase sampled on a strictly increasing grid in
/// (-pi, pi]. Integrals use the periodic trapezoid rule, including the wrap
/// segment from the last grid point back to the first.
class GriddedDensity {
  public:
    // Validates and requires the trapezoid integral to equal 1 within 1e-9.
    GriddedDensity(std::vector<double> grid, std::vector<double> density);

    // Scales nonnegative values to unit trapezoid integral. Throws ModelError if they sum to zero.
    static GriddedDensity normalized(std::vector<double> grid, std::vector<double> values);
    static GriddedDensity uniform(std::size_t n = kDefaultPhaseGridPoints);

    std::span<const double> grid() const { return grid_; }
    std::span<const double> density() const { return density_; }
    // Trapezoid weights: integral of f is sum_i weights[i] * f(grid[i]).
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return grid_.size(); }

    // Periodic linear interpolation between grid points.
    double density_at(double phi) const;
    double integral() const;

  private:
    std::vector<double> grid_;
    std::vector<double> density_;
    std::vector<double> weights_;
};

using PosteriorDensity = GriddedDensity;

/// Prior knowledge of the phase: either the analytic uniform density 1/(2 pi)
/// or a gridded density (a posterior can be fed back as the next prior).
class PhasePrior {
  public:
    static PhasePrior uniform() { return PhasePrior(); }
    PhasePrior(GriddedDensity gridded) : gridded_(std::move(gridded)) {}

    bool is_uniform() const { return !gridded_.has_value(); }
    const GriddedDensity *gridded() const { return gridded_ ? &*gridded_ : nullptr; }

    double density_at(double phi) const;

    /// Prior expectation of f. Uniform priors use adaptive periodic
    /// quadrature; gridded priors use their own trapezoid weights exactly,
    /// so the prior acts as a discrete measure on its grid.
    IntegrationResult expectation(const ScalarFunction &f, const Tolerance &tol) const;

    // The prior evaluated on a grid: its own grid if gridded, else a uniform grid of n points.
    GriddedDensity on_grid(std::size_t n = kDefaultPhaseGridPoints) const;

  private:
    PhasePrior() = default;
    std::optional<GriddedDensity> gridded_;
};

} // namespace measfid
