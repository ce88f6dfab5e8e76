#pragma once

#include "measfid/channel.hpp"
#include "measfid/phase_density.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace measfid {

/// SplitMix64 (Steele, Lea & Flood 2014) in counter mode: draw t of a stream
/// is mix64(key + (t + 1) * 0x9e3779b97f4a7c15), where key = mix64(seed).
/// Any draw can be computed independently, so sharded sampling reproduces the
/// serial stream exactly. Transforms to uniforms and normals use no library
/// distributions.
class CounterRng {
  public:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    static std::uint64_t mix64(std::uint64_t z);

    CounterRng(std::uint64_t seed, std::uint64_t position) : key_(mix64(seed)), counter_(position) {}

    std::uint64_t next() { return mix64(key_ + (++counter_) * kGamma); }
    double        uniform();      // [0, 1), 53-bit resolution
    double        open_uniform(); // (0, 1]
    double        normal();       // Box-Muller, one variate per call

  private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

// Draws consumed per sample; sample i owns draws [i * kDrawsPerSample, (i + 1) * kDrawsPerSample).
inline constexpr std::uint64_t kDrawsPerSample = 8;

struct ContinuousOutcomes {
    std::size_t         dimension = 0;
    std::vector<double> values; // row-major, one row per sample
};

struct SampleBatch {
    std::uint64_t                                              seed = 0;
    std::vector<double>                                        phi;
    std::variant<std::vector<std::size_t>, ContinuousOutcomes> outcomes;

    std::size_t size() const { return phi.size(); }
};

/// n i.i.d. draws of (phi, y): phi from the prior (gridded priors as a
/// discrete measure on their grid), y by inverse CDF over the channel's
/// outcomes. Outcomes in the truncated tail fall on the last enumerated outcome.
SampleBatch sample_outcomes(const DiscreteChannel &channel, const PhasePrior &prior, std::size_t n,
                            std::uint64_t seed, std::size_t workers = 1);
// Continuous outcomes come from the channel's noise transform of standard normals.
SampleBatch sample_outcomes(const ContinuousChannel &channel, const PhasePrior &prior, std::size_t n,
                            std::uint64_t seed, std::size_t workers = 1);

struct DiscreteIdentity {};
struct AxisBins {
    std::vector<std::size_t> bins; // per outcome axis
};
using OutcomeBinning = std::variant<DiscreteIdentity, AxisBins>;

inline constexpr std::size_t kDefaultPhiBins     = 64;
inline constexpr std::size_t kDefaultOutcomeBins = 32;
inline constexpr std::size_t kBatchFolds         = 10;

struct MiEstimate {
    double      bits              = 0.0; // plug-in estimate
    double      std_error         = 0.0; // delete-one-fold jackknife over kBatchFolds folds
    double      miller_madow_bits = 0.0; // plug-in + Miller-Madow correction
    double      jackknife_bits    = 0.0; // fold-jackknife bias-corrected estimate
    bool        degenerate        = false; // all mass in one phase or outcome bin
    std::size_t samples           = 0;
    std::string bin_spec;
};

/// Plug-in mutual information of the binned empirical joint. Phase uses
/// phi_bins equal bins on (-pi, pi]; continuous outcomes use equal-width bins
/// spanning the sample minimum and maximum per axis.
MiEstimate mi_plugin(const SampleBatch &batch, std::size_t phi_bins, const OutcomeBinning &binning);

} // namespace measfid
