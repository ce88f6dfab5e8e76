#include "measfid/phase_density.hpp"

#include "measfid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace measfid {

std::vector<double> uniform_phase_grid(std::size_t n) {
    if(n == 0) throw DomainError("phase grid needs at least one point");
    std::vector<double> grid(n);
    const double        step = kTwoPi / static_cast<double>(n);
    for(std::size_t j = 0; j < n; ++j) grid[j] = -kPi + step * static_cast<double>(j + 1);
    grid.back() = kPi;
    return grid;
}

namespace {

    void check_grid(const std::vector<double> &grid, const std::vector<double> &values) {
        if(grid.empty()) throw DomainError("phase grid is empty");
        if(grid.size() != values.size()) throw DomainError("phase grid and density sizes differ");
        for(std::size_t i = 0; i < grid.size(); ++i) {
            if(!std::isfinite(grid[i]) || grid[i] <= -kPi || grid[i] > kPi)
                throw DomainError("phase grid point outside (-pi, pi]: " + std::to_string(grid[i]));
            if(i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("phase grid must be strictly increasing");
            if(!std::isfinite(values[i]) || values[i] < 0.0) throw DomainError("density must be finite and nonnegative");
        }
    }

    std::vector<double> trapezoid_weights(const std::vector<double> &grid) {
        const std::size_t n = grid.size();
        std::vector<double> w(n);
        if(n == 1) {
            w[0] = kTwoPi;
            return w;
        }
        auto gap = [&](std::size_t i) { return i + 1 < n ? grid[i + 1] - grid[i] : grid[0] + kTwoPi - grid[n - 1]; };
        for(std::size_t i = 0; i < n; ++i) w[i] = 0.5 * (gap(i) + gap(i == 0 ? n - 1 : i - 1));
        return w;
    }

    double weighted_sum(const std::vector<double> &w, const std::vector<double> &v) {
        double s = 0.0;
        for(std::size_t i = 0; i < w.size(); ++i) s += w[i] * v[i];
        return s;
    }

} // namespace

GriddedDensity::GriddedDensity(std::vector<double> grid, std::vector<double> density)
    : grid_(std::move(grid)), density_(std::move(density)) {
    check_grid(grid_, density_);
    weights_            = trapezoid_weights(grid_);
    const double total = weighted_sum(weights_, density_);
    if(std::abs(total - 1.0) > 1e-9) throw DomainError("phase density is not normalized: integral " + std::to_string(total));
}

GriddedDensity GriddedDensity::normalized(std::vector<double> grid, std::vector<double> values) {
    check_grid(grid, values);
    const double total = weighted_sum(trapezoid_weights(grid), values);
    if(!(total > 0.0)) throw ModelError("density vanishes on the whole phase grid");
    for(auto &v : values) v /= total;
    return GriddedDensity(std::move(grid), std::move(values));
}

GriddedDensity GriddedDensity::uniform(std::size_t n) {
    return GriddedDensity(uniform_phase_grid(n), std::vector<double>(n, 1.0 / kTwoPi));
}

double GriddedDensity::density_at(double phi) const {
    // Map into (-pi, pi].
    phi = std::remainder(phi, kTwoPi);
    if(phi <= -kPi) phi += kTwoPi;
    const std::size_t n = grid_.size();
    if(n == 1) return density_[0];
    auto it = std::lower_bound(grid_.begin(), grid_.end(), phi);
    std::size_t hi_idx, lo_idx;
    double      lo, hi;
    if(it == grid_.begin() || it == grid_.end()) {
        // Wrap segment between the last and first points.
        lo_idx = n - 1;
        hi_idx = 0;
        lo     = grid_[n - 1];
        hi     = grid_[0] + kTwoPi;
        if(phi < lo) phi += kTwoPi;
    } else {
        hi_idx = static_cast<std::size_t>(it - grid_.begin());
        lo_idx = hi_idx - 1;
        lo     = grid_[lo_idx];
        hi     = grid_[hi_idx];
    }
    const double t = (phi - lo) / (hi - lo);
    return (1.0 - t) * density_[lo_idx] + t * density_[hi_idx];
}

double GriddedDensity::integral() const { return weighted_sum(weights_, density_); }

double PhasePrior::density_at(double phi) const { return gridded_ ? gridded_->density_at(phi) : 1.0 / kTwoPi; }

IntegrationResult PhasePrior::expectation(const ScalarFunction &f, const Tolerance &tol) const {
    if(!gridded_) {
        auto r = integrate_periodic(f, {tol.rel, tol.abs * kTwoPi});
        r.value /= kTwoPi;
        r.error_estimate /= kTwoPi;
        return r;
    }
    const auto  grid = gridded_->grid();
    const auto  dens = gridded_->density();
    const auto  w    = gridded_->weights();
    double      sum  = 0.0;
    std::size_t evals = 0;
    for(std::size_t i = 0; i < grid.size(); ++i) {
        if(dens[i] == 0.0) continue;
        sum += w[i] * dens[i] * f(grid[i]);
        ++evals;
    }
    return {sum, 0.0, std::max<std::size_t>(evals, 1)};
}

GriddedDensity PhasePrior::on_grid(std::size_t n) const { return gridded_ ? *gridded_ : GriddedDensity::uniform(n); }

} // namespace measfid
