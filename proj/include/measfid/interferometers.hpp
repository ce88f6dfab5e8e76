#pragma once

#include "measfid/channel.hpp"
#include "measfid/information.hpp"
#include "measfid/numerics.hpp"
#include "measfid/phase_density.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace measfid {

// Energies are dimensionless, in units of the photon energy.

inline constexpr double kDefaultTailMass = 1e-12;

// Coherent state |alpha> into port a, vacuum into port b; eta = |alpha|^2.
struct CoherentMzModel {
    double eta = 0.0;
    void   validate() const;
};

struct PhotonPair {
    std::size_t n_c = 0;
    std::size_t n_d = 0;
    auto        operator<=>(const PhotonPair &) const = default;
};

struct EnergyPair {
    double e_c = 0.0;
    double e_d = 0.0;
};

// Outcomes with n_c + n_d <= n_max are laid out by total photon number, then n_c.
std::size_t photon_pair_index(PhotonPair pair);
PhotonPair  photon_pair_at(std::size_t index);
std::size_t photon_pair_count(std::size_t n_max);

struct QuantumPmf {
    TruncationBudget    budget;
    std::vector<double> probabilities; // indexed by photon_pair_index

    double at(PhotonPair pair) const;
    double total() const;
};

/// Photon-count distribution at the two output ports:
/// P(n_c, n_d | phi) = e^-eta eta^(n_c+n_d) / (n_c! n_d!) sin^(2 n_c)(phi/2) cos^(2 n_d)(phi/2),
/// evaluated in the log domain for n_c + n_d <= budget.n_max.
QuantumPmf quantum_mz_pmf(const CoherentMzModel &model, double phi, const TruncationBudget &budget);

class QuantumMzChannel final : public DiscreteChannel {
  public:
    explicit QuantumMzChannel(CoherentMzModel model, double tail_mass = kDefaultTailMass);

    std::size_t outcome_count() const override { return log_weights_.size(); }
    double      log_probability(std::size_t outcome, double phi) const override;
    double      truncation_tail() const override { return budget_.achieved_tail; }
    std::string outcome_label(std::size_t outcome) const override;

    const TruncationBudget &budget() const { return budget_; }
    const CoherentMzModel  &model() const { return model_; }

  private:
    CoherentMzModel     model_;
    TruncationBudget    budget_;
    std::vector<double> log_weights_; // -eta + n log eta - log n_c! - log n_d!
};

/// Fidelity of the coherent-input interferometer in bits. For the uniform
/// prior each (n_c, n_d) term uses the closed-form phase marginal
/// Gamma(n_c+1/2) Gamma(n_d+1/2) / (pi (n_c+n_d)!) and one periodic quadrature
/// of the log-weighted integrand. Other priors go through the generic
/// discrete-outcome engine.
FidelityEstimate quantum_mz_fidelity(double eta, const PhasePrior &prior, const Tolerance &tol = {},
                                     double tail_mass = kDefaultTailMass);

EnergyPair classical_mz_output(double e_in, double phi);

/// Noiseless classical interferometer on a discrete phase grid
/// phi_k = pi k / n_phi, k = -(n_phi-1)..n_phi, with input energies n * delta_e,
/// n = 0..n_e, drawn from input_pmf.
struct IdealClassicalMz {
    std::size_t         n_phi   = 1;
    std::size_t         n_e     = 1;
    double              delta_e = 1.0;
    std::vector<double> input_pmf; // n_e + 1 entries

    void   validate() const;
    double phase(int k) const;
    std::vector<int> phase_indices() const;

    static IdealClassicalMz monochromatic(std::size_t n_phi, std::size_t n_e, std::size_t level, double delta_e = 1.0);
};

// Merged outcome: every (n, k) with equal (E_c, E_d) maps to the same key.
// n = 0 gives (0, 0) for all k; otherwise k and -k collide.
struct IdealOutcome {
    std::size_t n       = 0;
    std::size_t abs_k   = 0;
    EnergyPair  energies;
    auto        operator<=>(const IdealOutcome &o) const { return std::tie(n, abs_k) <=> std::tie(o.n, o.abs_k); }
    bool        operator==(const IdealOutcome &o) const { return n == o.n && abs_k == o.abs_k; }
};

struct IdealClassicalJoint {
    std::vector<int>          phase_indices; // row labels k
    std::vector<IdealOutcome> outcomes;      // column labels
    JointPmf                  joint{0, 0};
};

IdealClassicalJoint ideal_classical_joint(const IdealClassicalMz &model);
double              ideal_classical_fidelity(const IdealClassicalMz &model);

// Gaussian measurement noise of width delta on each output port energy.
struct NoisyClassicalMz {
    double e_in  = 0.0;
    double delta = 1.0;
    void   validate() const;
};

// p(E_c, E_d | phi) = N(E_c; E sin^2(phi/2), delta^2) N(E_d; E cos^2(phi/2), delta^2).
double noisy_classical_pdf(const NoisyClassicalMz &model, double phi, EnergyPair outcome);

class NoisyClassicalChannel final : public ContinuousChannel {
  public:
    // Outcome box padding beyond the reachable means, in units of delta.
    static constexpr double kTailPadding = 8.0;

    explicit NoisyClassicalChannel(NoisyClassicalMz model);

    std::size_t   dimension() const override { return 2; }
    double        log_pdf(std::span<const double> outcome, double phi) const override;
    OutcomeDomain integration_domain() const override;
    std::size_t   noise_dimension() const override { return 2; }
    void transform_noise(double phi, std::span<const double> standard_normals, std::span<double> outcome) const override;

    const NoisyClassicalMz &model() const { return model_; }

  private:
    NoisyClassicalMz model_;
};

FidelityEstimate noisy_classical_fidelity(double e_in, double delta, const PhasePrior &prior,
                                          const Tolerance &tol = {});

struct SweepRow {
    double                          eta = 0.0;
    std::optional<FidelityEstimate> coherent;
    std::optional<FidelityEstimate> classical;
    std::string                     error;
};

// eta = 0.25 j for j = 0..20.
std::vector<double> default_sweep_grid();

/// Quantum vs classical comparison at matched energy: per eta, H_coh(eta) and
/// H_class(E = eta, delta = sqrt(eta)) with the uniform prior. At eta = 0 the
/// classical noise width vanishes and no information passes, so the row holds 0.
/// Row failures are recorded and the sweep continues; rows keep input order.
std::vector<SweepRow> fig1_sweep(std::span<const double> eta_grid, const Tolerance &tol = {}, std::size_t workers = 1);

} // namespace measfid
