#include "measfid/bayes.hpp"

#include "measfid/errors.hpp"
#include "measfid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace measfid {

PosteriorDensity posterior_from_log_likelihood(const PhasePrior &prior,
                                               const std::function<double(double)> &log_likelihood,
                                               std::size_t grid_points) {
    const auto          base = prior.on_grid(grid_points);
    const auto          grid = base.grid();
    const auto          dens = base.density();
    std::vector<double> log_post(grid.size(), -std::numeric_limits<double>::infinity());
    double              peak = -std::numeric_limits<double>::infinity();
    for(std::size_t i = 0; i < grid.size(); ++i) {
        if(dens[i] <= 0.0) continue;
        const double ll = log_likelihood(grid[i]);
        if(std::isnan(ll)) throw NumericalError("log-likelihood is NaN", 0.0, 0.0);
        log_post[i] = ll + std::log(dens[i]);
        peak        = std::max(peak, log_post[i]);
    }
    if(peak == -std::numeric_limits<double>::infinity())
        throw ModelError("observation impossible under model: likelihood vanishes on the prior's support");

    std::vector<double> values(grid.size());
    for(std::size_t i = 0; i < grid.size(); ++i) values[i] = std::exp(log_post[i] - peak);
    return GriddedDensity::normalized(std::vector<double>(grid.begin(), grid.end()), std::move(values));
}

PosteriorDensity posterior(const DiscreteChannel &channel, const PhasePrior &prior, std::size_t observed,
                           std::size_t grid_points) {
    if(observed >= channel.outcome_count()) throw DomainError("observed outcome index out of range");
    return posterior_from_log_likelihood(
        prior, [&](double phi) { return channel.log_probability(observed, phi); }, grid_points);
}

PosteriorDensity posterior(const ContinuousChannel &channel, const PhasePrior &prior,
                           std::span<const double> observed, std::size_t grid_points) {
    if(observed.size() != channel.dimension()) throw DomainError("observed outcome has the wrong dimension");
    for(double v : observed)
        if(!std::isfinite(v)) throw DomainError("observed outcome must be finite");
    return posterior_from_log_likelihood(
        prior, [&](double phi) { return channel.log_pdf(observed, phi); }, grid_points);
}

PosteriorDensity recursive_update(const PhasePrior &prior, const DiscreteChannel &channel,
                                  std::span<const std::size_t> observations, std::size_t grid_points) {
    PhasePrior current = prior;
    for(std::size_t y : observations) current = PhasePrior(posterior(channel, current, y, grid_points));
    return current.on_grid(grid_points);
}

PosteriorDensity recursive_update(const PhasePrior &prior, const ContinuousChannel &channel,
                                  std::span<const std::vector<double>> observations, std::size_t grid_points) {
    PhasePrior current = prior;
    for(const auto &y : observations) current = PhasePrior(posterior(channel, current, y, grid_points));
    return current.on_grid(grid_points);
}

PhaseEstimate estimate_phase(const PosteriorDensity &posterior) {
    const auto grid = posterior.grid();
    const auto dens = posterior.density();
    const auto w    = posterior.weights();
    const auto n    = grid.size();

    std::complex<double> resultant{0.0, 0.0};
    for(std::size_t i = 0; i < n; ++i) resultant += w[i] * dens[i] * std::polar(1.0, grid[i]);

    PhaseEstimate est;
    est.resultant_length    = std::abs(resultant);
    est.circular_dispersion = 1.0 - est.resultant_length;
    if(est.resultant_length >= 1e-9) est.circular_mean = std::arg(resultant);

    // Local maxima on the circle; a plateau counts once, at its centre.
    const double peak = *std::max_element(dens.begin(), dens.end());
    auto         at   = [&](std::size_t i) { return dens[i % n]; };
    for(std::size_t i = 0; i < n && n > 1; ++i) {
        const double v = dens[i];
        if(!(v > at(i + n - 1)) || !(v > 0.5 * peak)) continue;
        std::size_t j = i;
        while(j - i + 1 < n && at(j + 1) == v) ++j;
        if(j - i + 1 < n && at(j + 1) < v) est.modes.push_back(grid[((i + j) / 2) % n]);
    }
    std::sort(est.modes.begin(), est.modes.end());
    return est;
}

FidelityOptimum optimize_fidelity(std::span<const double> candidates,
                                  const std::function<FidelityEstimate(double)> &evaluate, std::size_t workers) {
    if(candidates.empty()) throw DomainError("candidate grid is empty");
    FidelityOptimum out;
    out.table.resize(candidates.size());
    std::vector<double> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());

    parallel_for(sorted.size(), workers, [&](std::size_t i) {
        auto &row = out.table[i];
        row.xi    = sorted[i];
        try {
            row.fidelity = evaluate(sorted[i]);
        } catch(const std::exception &e) {
            row.error = e.what();
        }
    });

    bool found = false;
    for(const auto &row : out.table) {
        if(!row.fidelity) continue;
        if(!found || row.fidelity->bits > out.best_bits) {
            out.best_xi   = row.xi;
            out.best_bits = row.fidelity->bits;
            found         = true;
        }
    }
    if(!found) throw NumericalError("every candidate evaluation failed", 0.0, std::numeric_limits<double>::infinity());
    return out;
}

} // namespace measfid
