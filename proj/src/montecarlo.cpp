#include "measfid/montecarlo.hpp"

#include "measfid/errors.hpp"
#include "measfid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace measfid {

std::uint64_t CounterRng::mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double CounterRng::open_uniform() { return 1.0 - uniform(); }

double CounterRng::normal() {
    const double r = std::sqrt(-2.0 * std::log(open_uniform()));
    return r * std::cos(kTwoPi * uniform());
}

namespace {

    class PhaseSampler {
      public:
        explicit PhaseSampler(const PhasePrior &prior) {
            if(const auto *g = prior.gridded()) {
                grid_.assign(g->grid().begin(), g->grid().end());
                cumulative_.resize(grid_.size());
                double acc = 0.0;
                for(std::size_t i = 0; i < grid_.size(); ++i) {
                    acc += g->weights()[i] * g->density()[i];
                    cumulative_[i] = acc;
                }
                for(auto &c : cumulative_) c /= acc;
            }
        }

        double draw(CounterRng &rng) const {
            if(grid_.empty()) return -kPi + kTwoPi * rng.open_uniform();
            const double u  = rng.uniform();
            auto         it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            if(it == cumulative_.end()) --it;
            return grid_[static_cast<std::size_t>(it - cumulative_.begin())];
        }

      private:
        std::vector<double> grid_;
        std::vector<double> cumulative_;
    };

    void check_count(std::size_t n) {
        if(n == 0) throw DomainError("sample count must be positive");
    }

} // namespace

SampleBatch sample_outcomes(const DiscreteChannel &channel, const PhasePrior &prior, std::size_t n, std::uint64_t seed,
                            std::size_t workers) {
    check_count(n);
    const std::size_t count = channel.outcome_count();
    if(count == 0) throw DomainError("channel has no outcomes");
    const PhaseSampler phases(prior);

    SampleBatch batch;
    batch.seed = seed;
    batch.phi.resize(n);
    std::vector<std::size_t> outcomes(n);
    parallel_for(n, workers, [&](std::size_t i) {
        CounterRng   rng(seed, i * kDrawsPerSample);
        const double phi = phases.draw(rng);
        const double u   = rng.uniform();
        double       acc = 0.0;
        std::size_t  y   = 0;
        for(; y + 1 < count; ++y) {
            acc += channel.probability(y, phi);
            if(u < acc) break;
        }
        batch.phi[i] = phi;
        outcomes[i]  = y;
    });
    batch.outcomes = std::move(outcomes);
    return batch;
}

SampleBatch sample_outcomes(const ContinuousChannel &channel, const PhasePrior &prior, std::size_t n, std::uint64_t seed,
                            std::size_t workers) {
    check_count(n);
    const std::size_t dim   = channel.dimension();
    const std::size_t noise = channel.noise_dimension();
    if(noise == 0) throw DomainError("channel does not support outcome sampling");
    if(noise + 1 > kDrawsPerSample) throw DomainError("channel needs more random draws per sample than available");
    const PhaseSampler phases(prior);

    SampleBatch batch;
    batch.seed = seed;
    batch.phi.resize(n);
    ContinuousOutcomes out{dim, std::vector<double>(n * dim)};
    parallel_for(n, workers, [&](std::size_t i) {
        CounterRng          rng(seed, i * kDrawsPerSample);
        const double        phi = phases.draw(rng);
        std::vector<double> z(noise);
        for(auto &v : z) v = rng.normal();
        channel.transform_noise(phi, z, std::span<double>(out.values).subspan(i * dim, dim));
        batch.phi[i] = phi;
    });
    batch.outcomes = std::move(out);
    return batch;
}

namespace {

    struct CellTable {
        std::vector<std::size_t> cell_of_sample;
        std::vector<std::size_t> x_of_cell;
        std::vector<std::size_t> y_of_cell;
        std::size_t              x_count = 0;
        std::size_t              y_count = 0;
    };

    struct PlugIn {
        double      bits;
        std::size_t occupied_x;
        std::size_t occupied_y;
        std::size_t occupied_xy;
    };

    PlugIn plug_in(const CellTable &t, const std::vector<double> &counts) {
        std::vector<double> cx(t.x_count, 0.0), cy(t.y_count, 0.0);
        double              n = 0.0;
        for(std::size_t c = 0; c < counts.size(); ++c) {
            cx[t.x_of_cell[c]] += counts[c];
            cy[t.y_of_cell[c]] += counts[c];
            n += counts[c];
        }
        std::vector<double> terms;
        terms.reserve(counts.size());
        std::size_t occupied = 0;
        for(std::size_t c = 0; c < counts.size(); ++c) {
            if(counts[c] == 0.0) continue;
            ++occupied;
            terms.push_back(counts[c] / n * std::log2(counts[c] * n / (cx[t.x_of_cell[c]] * cy[t.y_of_cell[c]])));
        }
        std::sort(terms.begin(), terms.end());
        const auto nonzero = [](const std::vector<double> &v) {
            return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double c) { return c > 0.0; }));
        };
        return {std::accumulate(terms.begin(), terms.end(), 0.0), nonzero(cx), nonzero(cy), occupied};
    }

    std::size_t phi_bin(double phi, std::size_t bins) {
        const double t = (phi + kPi) / kTwoPi * static_cast<double>(bins);
        return std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, std::floor(t))));
    }

    // Outcome category per sample, plus the number of categories.
    std::pair<std::vector<std::size_t>, std::size_t> outcome_categories(const SampleBatch &batch,
                                                                        const OutcomeBinning &binning,
                                                                        std::string &spec) {
        const std::size_t n = batch.size();
        std::vector<std::size_t> cat(n);
        if(const auto *discrete = std::get_if<std::vector<std::size_t>>(&batch.outcomes)) {
            if(!std::holds_alternative<DiscreteIdentity>(binning)) throw DomainError("discrete outcomes need identity binning");
            if(discrete->size() != n) throw DomainError("batch outcome count mismatch");
            std::map<std::size_t, std::size_t> ids;
            for(std::size_t i = 0; i < n; ++i) cat[i] = ids.try_emplace((*discrete)[i], ids.size()).first->second;
            spec += " outcome:identity";
            return {std::move(cat), ids.size()};
        }
        const auto &cont = std::get<ContinuousOutcomes>(batch.outcomes);
        const auto *axes = std::get_if<AxisBins>(&binning);
        if(axes == nullptr || axes->bins.size() != cont.dimension) throw DomainError("continuous outcomes need one bin count per axis");
        if(cont.values.size() != n * cont.dimension) throw DomainError("batch outcome count mismatch");
        std::size_t categories = 1;
        spec += " outcome:";
        for(std::size_t a = 0; a < cont.dimension; ++a) {
            const std::size_t b = axes->bins[a];
            if(b < 2) throw DomainError("outcome bins must be at least 2 per axis");
            spec += (a ? "x" : "") + std::to_string(b);
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for(std::size_t i = 0; i < n; ++i) {
                lo = std::min(lo, cont.values[i * cont.dimension + a]);
                hi = std::max(hi, cont.values[i * cont.dimension + a]);
            }
            const double width = hi > lo ? (hi - lo) / static_cast<double>(b) : 1.0;
            for(std::size_t i = 0; i < n; ++i) {
                const double t   = (cont.values[i * cont.dimension + a] - lo) / width;
                const auto   idx = std::min(b - 1, static_cast<std::size_t>(std::max(0.0, std::floor(t))));
                cat[i]           = cat[i] * b + idx;
            }
            categories *= b;
        }
        return {std::move(cat), categories};
    }

} // namespace

MiEstimate mi_plugin(const SampleBatch &batch, std::size_t phi_bins, const OutcomeBinning &binning) {
    const std::size_t n = batch.size();
    if(n == 0) throw DomainError("sample batch is empty");
    if(phi_bins < 2) throw DomainError("phase bins must be at least 2");

    MiEstimate est;
    est.samples  = n;
    est.bin_spec = "phi:" + std::to_string(phi_bins);
    auto [cat, y_count] = outcome_categories(batch, binning, est.bin_spec);

    CellTable table;
    table.x_count = phi_bins;
    table.y_count = y_count;
    table.cell_of_sample.resize(n);
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> cells;
    for(std::size_t i = 0; i < n; ++i) {
        const auto key      = std::make_pair(phi_bin(batch.phi[i], phi_bins), cat[i]);
        auto [it, inserted] = cells.try_emplace(key, cells.size());
        if(inserted) {
            table.x_of_cell.push_back(key.first);
            table.y_of_cell.push_back(key.second);
        }
        table.cell_of_sample[i] = it->second;
    }
    // Outcome categories are sparse for per-axis binning; compact them.
    std::map<std::size_t, std::size_t> y_ids;
    for(auto &y : table.y_of_cell) y = y_ids.try_emplace(y, y_ids.size()).first->second;
    table.y_count = y_ids.size();

    std::vector<double> total(cells.size(), 0.0);
    for(std::size_t i = 0; i < n; ++i) total[table.cell_of_sample[i]] += 1.0;
    const auto full = plug_in(table, total);

    est.bits              = full.bits;
    est.miller_madow_bits = full.bits + (static_cast<double>(full.occupied_x) + static_cast<double>(full.occupied_y) -
                                         static_cast<double>(full.occupied_xy) - 1.0) /
                                            (2.0 * static_cast<double>(n) * kLn2);
    est.degenerate = full.occupied_x < 2 || full.occupied_y < 2;
    if(est.degenerate || n < kBatchFolds) {
        est.std_error      = std::numeric_limits<double>::infinity();
        est.jackknife_bits = est.bits;
        return est;
    }

    // Delete-one-fold jackknife over contiguous folds.
    std::vector<double> leave_out(kBatchFolds);
    for(std::size_t k = 0; k < kBatchFolds; ++k) {
        std::vector<double> counts = total;
        const std::size_t   begin  = k * n / kBatchFolds;
        const std::size_t   end    = (k + 1) * n / kBatchFolds;
        for(std::size_t i = begin; i < end; ++i) counts[table.cell_of_sample[i]] -= 1.0;
        leave_out[k] = plug_in(table, counts).bits;
    }
    const double folds = static_cast<double>(kBatchFolds);
    const double mean  = std::accumulate(leave_out.begin(), leave_out.end(), 0.0) / folds;
    double       ss    = 0.0;
    for(double v : leave_out) ss += (v - mean) * (v - mean);
    est.std_error      = std::sqrt((folds - 1.0) / folds * ss);
    est.jackknife_bits = folds * full.bits - (folds - 1.0) * mean;
    return est;
}

} // namespace measfid
