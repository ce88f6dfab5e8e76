#include "measfid/interferometers.hpp"

#include "measfid/errors.hpp"
#include "measfid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>

namespace measfid {

namespace {

    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    // n * log(x) with 0 * log 0 = 0.
    double n_log(std::size_t n, double x) { return n == 0 ? 0.0 : static_cast<double>(n) * std::log(x); }

    // log of sin^(2 n_c)(phi/2) cos^(2 n_d)(phi/2).
    double log_split(std::size_t n_c, std::size_t n_d, double phi) {
        const double s = std::abs(std::sin(0.5 * phi));
        const double c = std::abs(std::cos(0.5 * phi));
        return 2.0 * (n_log(n_c, s) + n_log(n_d, c));
    }

    double log_count_weight(double eta, std::size_t n_c, std::size_t n_d) {
        const std::size_t n = n_c + n_d;
        if(eta == 0.0) return n == 0 ? 0.0 : kNegInf;
        return -eta + n_log(n, eta) - log_gamma(static_cast<double>(n_c) + 1.0) - log_gamma(static_cast<double>(n_d) + 1.0);
    }

} // namespace

void CoherentMzModel::validate() const {
    if(!std::isfinite(eta) || eta < 0.0) throw DomainError("eta must be finite and nonnegative");
}

std::size_t photon_pair_index(PhotonPair pair) {
    const std::size_t n = pair.n_c + pair.n_d;
    return n * (n + 1) / 2 + pair.n_c;
}

PhotonPair photon_pair_at(std::size_t index) {
    auto n = static_cast<std::size_t>((std::sqrt(8.0 * static_cast<double>(index) + 1.0) - 1.0) / 2.0);
    while(n * (n + 1) / 2 > index) --n;
    while((n + 1) * (n + 2) / 2 <= index) ++n;
    const std::size_t n_c = index - n * (n + 1) / 2;
    return {n_c, n - n_c};
}

std::size_t photon_pair_count(std::size_t n_max) { return (n_max + 1) * (n_max + 2) / 2; }

double QuantumPmf::at(PhotonPair pair) const {
    const auto i = photon_pair_index(pair);
    return i < probabilities.size() ? probabilities[i] : 0.0;
}

double QuantumPmf::total() const {
    double s = 0.0;
    for(double p : probabilities) s += p;
    return s;
}

QuantumPmf quantum_mz_pmf(const CoherentMzModel &model, double phi, const TruncationBudget &budget) {
    model.validate();
    if(!std::isfinite(phi)) throw DomainError("phase must be finite");
    QuantumPmf pmf;
    pmf.budget = budget;
    pmf.probabilities.resize(photon_pair_count(budget.n_max));
    for(std::size_t i = 0; i < pmf.probabilities.size(); ++i) {
        const auto   pair = photon_pair_at(i);
        const double lw   = log_count_weight(model.eta, pair.n_c, pair.n_d);
        pmf.probabilities[i] = lw == kNegInf ? 0.0 : std::exp(lw + log_split(pair.n_c, pair.n_d, phi));
    }
    return pmf;
}

QuantumMzChannel::QuantumMzChannel(CoherentMzModel model, double tail_mass)
    : model_(model), budget_((model.validate(), poisson_truncation(model.eta, tail_mass))) {
    log_weights_.resize(photon_pair_count(budget_.n_max));
    for(std::size_t i = 0; i < log_weights_.size(); ++i) {
        const auto pair = photon_pair_at(i);
        log_weights_[i] = log_count_weight(model_.eta, pair.n_c, pair.n_d);
    }
}

double QuantumMzChannel::log_probability(std::size_t outcome, double phi) const {
    const double lw = log_weights_.at(outcome);
    if(lw == kNegInf) return kNegInf;
    const auto pair = photon_pair_at(outcome);
    return lw + log_split(pair.n_c, pair.n_d, phi);
}

std::string QuantumMzChannel::outcome_label(std::size_t outcome) const {
    const auto pair = photon_pair_at(outcome);
    return "(" + std::to_string(pair.n_c) + "," + std::to_string(pair.n_d) + ")";
}

FidelityEstimate quantum_mz_fidelity(double eta, const PhasePrior &prior, const Tolerance &tol, double tail_mass) {
    const CoherentMzModel model{eta};
    model.validate();
    tol.validate();
    if(!prior.is_uniform()) return fidelity_discrete_outcomes(QuantumMzChannel(model, tail_mass), prior, tol);

    const auto        budget = poisson_truncation(eta, tail_mass);
    if(budget.achieved_tail > std::max(tol.abs, tol.rel))
        throw NumericalError("photon-number truncation tail " + std::to_string(budget.achieved_tail) + " exceeds the tolerance",
                             0.0, std::numeric_limits<double>::infinity());
    const std::size_t count  = photon_pair_count(budget.n_max);
    const auto        uniform = PhasePrior::uniform();

    FidelityEstimate est;
    est.truncation_order = count;
    est.truncation_tail  = budget.achieved_tail;
    double error         = 0.0;

    for(std::size_t i = 0; i < count; ++i) {
        const auto   pair = photon_pair_at(i);
        const double lw   = log_count_weight(eta, pair.n_c, pair.n_d);
        if(lw == kNegInf) continue;
        const auto n = static_cast<double>(pair.n_c + pair.n_d);
        // log of pi n! / (Gamma(n_c + 1/2) Gamma(n_d + 1/2)), the inverse phase-averaged split factor.
        const double log_ratio = std::log(kPi) + log_gamma(n + 1.0) - log_gamma(static_cast<double>(pair.n_c) + 0.5) -
                                 log_gamma(static_cast<double>(pair.n_d) + 0.5);
        const double marginal = std::exp(lw - log_ratio);

        const Tolerance term_tol{tol.rel, tol.abs / static_cast<double>(count) + 1e-3 * tol.rel * marginal};
        try {
            const auto r = uniform.expectation(
                [&](double phi) {
                    const double ls = log_split(pair.n_c, pair.n_d, phi);
                    if(ls == kNegInf) return 0.0;
                    return std::exp(lw + ls) * (log_ratio + ls) / kLn2;
                },
                term_tol);
            est.bits += r.value;
            error += r.error_estimate;
            est.evaluations += r.evaluations;
        } catch(const NumericalError &e) {
            throw NumericalError("coherent fidelity quadrature failed at " + std::to_string(pair.n_c) + "," +
                                     std::to_string(pair.n_d) + ": " + e.what(),
                                 est.bits, std::numeric_limits<double>::infinity());
        }
    }
    est.numeric_error = error + tail_information_allowance(budget.achieved_tail);
    return est;
}

EnergyPair classical_mz_output(double e_in, double phi) {
    if(!std::isfinite(e_in) || e_in < 0.0) throw DomainError("input energy must be finite and nonnegative");
    const double s2 = std::pow(std::sin(0.5 * phi), 2);
    return {e_in * s2, e_in - e_in * s2};
}

void IdealClassicalMz::validate() const {
    if(n_phi == 0) throw DomainError("n_phi must be positive");
    if(n_e == 0) throw DomainError("n_e must be positive");
    if(!(delta_e > 0.0) || !std::isfinite(delta_e)) throw DomainError("energy step must be positive");
    if(input_pmf.size() != n_e + 1) throw DomainError("input pmf needs n_e + 1 entries");
    double total = 0.0;
    for(double p : input_pmf) {
        if(!std::isfinite(p) || p < 0.0) throw DomainError("input pmf entries must be nonnegative");
        total += p;
    }
    if(std::abs(total - 1.0) > 1e-12) throw DomainError("input pmf does not sum to 1");
}

double IdealClassicalMz::phase(int k) const { return kPi * static_cast<double>(k) / static_cast<double>(n_phi); }

std::vector<int> IdealClassicalMz::phase_indices() const {
    std::vector<int> ks;
    const int        n = static_cast<int>(n_phi);
    for(int k = -(n - 1); k <= n; ++k) ks.push_back(k);
    return ks;
}

IdealClassicalMz IdealClassicalMz::monochromatic(std::size_t n_phi, std::size_t n_e, std::size_t level, double delta_e) {
    if(level > n_e) throw DomainError("energy level exceeds n_e");
    IdealClassicalMz m{n_phi, n_e, delta_e, std::vector<double>(n_e + 1, 0.0)};
    m.input_pmf[level] = 1.0;
    m.validate();
    return m;
}

IdealClassicalJoint ideal_classical_joint(const IdealClassicalMz &model) {
    model.validate();
    IdealClassicalJoint out;
    out.phase_indices = model.phase_indices();
    const double phase_p = 1.0 / static_cast<double>(out.phase_indices.size());

    std::map<IdealOutcome, std::size_t> columns;
    std::vector<JointPmf::Cell>         cells;
    for(std::size_t row = 0; row < out.phase_indices.size(); ++row) {
        const int k = out.phase_indices[row];
        for(std::size_t n = 0; n <= model.n_e; ++n) {
            if(model.input_pmf[n] == 0.0) continue;
            IdealOutcome key{n, n == 0 ? 0 : static_cast<std::size_t>(std::abs(k)), {}};
            key.energies   = classical_mz_output(static_cast<double>(n) * model.delta_e, model.phase(key.n == 0 ? 0 : k));
            auto [it, inserted] = columns.try_emplace(key, columns.size());
            if(inserted) out.outcomes.push_back(key);
            cells.push_back({row, it->second, phase_p * model.input_pmf[n]});
        }
    }
    out.joint = JointPmf(out.phase_indices.size(), out.outcomes.size());
    for(const auto &c : cells) out.joint.add(c.x, c.y, c.p);
    return out;
}

double ideal_classical_fidelity(const IdealClassicalMz &model) { return mutual_information_finite(ideal_classical_joint(model).joint); }

void NoisyClassicalMz::validate() const {
    if(!std::isfinite(e_in) || e_in < 0.0) throw DomainError("input energy must be finite and nonnegative");
    if(!std::isfinite(delta) || !(delta > 0.0)) throw DomainError("noise width delta must be positive");
}

double noisy_classical_pdf(const NoisyClassicalMz &model, double phi, EnergyPair outcome) {
    const double y[2] = {outcome.e_c, outcome.e_d};
    return NoisyClassicalChannel(model).pdf(y, phi);
}

NoisyClassicalChannel::NoisyClassicalChannel(NoisyClassicalMz model) : model_(model) { model_.validate(); }

double NoisyClassicalChannel::log_pdf(std::span<const double> outcome, double phi) const {
    const double s2 = std::pow(std::sin(0.5 * phi), 2);
    const double dc = outcome[0] - model_.e_in * s2;
    const double dd = outcome[1] - (model_.e_in - model_.e_in * s2);
    const double v  = model_.delta * model_.delta;
    return -(dc * dc + dd * dd) / (2.0 * v) - std::log(kTwoPi * v);
}

OutcomeDomain NoisyClassicalChannel::integration_domain() const {
    // Reference sweep of the port means over phase.
    double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    double hi[2] = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for(double phi : uniform_phase_grid(256)) {
        const auto e = classical_mz_output(model_.e_in, phi);
        lo[0] = std::min(lo[0], e.e_c), hi[0] = std::max(hi[0], e.e_c);
        lo[1] = std::min(lo[1], e.e_d), hi[1] = std::max(hi[1], e.e_d);
    }
    const double pad = kTailPadding * model_.delta;
    OutcomeDomain d;
    d.lo           = {lo[0] - pad, lo[1] - pad};
    d.hi           = {hi[0] + pad, hi[1] + pad};
    d.length_scale = model_.delta;
    // Two-sided normal tail beyond kTailPadding sigma, on each axis.
    d.tail_mass = 2.0 * std::erfc(kTailPadding / std::sqrt(2.0));
    return d;
}

void NoisyClassicalChannel::transform_noise(double phi, std::span<const double> z, std::span<double> outcome) const {
    const auto mean = classical_mz_output(model_.e_in, phi);
    outcome[0]      = mean.e_c + model_.delta * z[0];
    outcome[1]      = mean.e_d + model_.delta * z[1];
}

FidelityEstimate noisy_classical_fidelity(double e_in, double delta, const PhasePrior &prior, const Tolerance &tol) {
    return fidelity_continuous_outcomes(NoisyClassicalChannel({e_in, delta}), prior, tol);
}

std::vector<double> default_sweep_grid() {
    std::vector<double> grid;
    for(int j = 0; j <= 20; ++j) grid.push_back(0.25 * j);
    return grid;
}

std::vector<SweepRow> fig1_sweep(std::span<const double> eta_grid, const Tolerance &tol, std::size_t workers) {
    for(double eta : eta_grid)
        if(!std::isfinite(eta) || eta < 0.0) throw DomainError("sweep eta values must be finite and nonnegative");
    tol.validate();

    std::vector<SweepRow> rows(eta_grid.size());
    const auto            prior = PhasePrior::uniform();
    parallel_for(rows.size(), workers, [&](std::size_t i) {
        auto &row = rows[i];
        row.eta   = eta_grid[i];
        try {
            row.coherent = quantum_mz_fidelity(row.eta, prior, tol);
            if(row.eta == 0.0)
                row.classical = FidelityEstimate{};
            else
                row.classical = noisy_classical_fidelity(row.eta, std::sqrt(row.eta), prior, tol);
        } catch(const std::exception &e) {
            row.error = e.what();
        }
    });
    return rows;
}

} // namespace measfid
