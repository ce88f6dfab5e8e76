#include "measfid/information.hpp"

#include "measfid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace measfid {

JointPmf JointPmf::dense(std::size_t x_count, std::size_t y_count, const std::vector<double> &table) {
    if(table.size() != x_count * y_count) throw DomainError("dense joint table has the wrong size");
    JointPmf joint(x_count, y_count);
    for(std::size_t x = 0; x < x_count; ++x)
        for(std::size_t y = 0; y < y_count; ++y) joint.add(x, y, table[x * y_count + y]);
    return joint;
}

void JointPmf::add(std::size_t x, std::size_t y, double p) {
    if(x >= x_count_ || y >= y_count_) throw DomainError("joint cell index out of range");
    if(!std::isfinite(p) || p < 0.0) throw DomainError("joint probabilities must be finite and nonnegative");
    if(p > 0.0) cells_.push_back({x, y, p});
}

JointPmf JointPmf::transposed() const {
    JointPmf t(y_count_, x_count_);
    t.cells_.reserve(cells_.size());
    for(const auto &c : cells_) t.cells_.push_back({c.y, c.x, c.p});
    return t;
}

std::vector<double> JointPmf::x_marginal() const {
    std::vector<double> m(x_count_, 0.0);
    for(const auto &c : cells_) m[c.x] += c.p;
    return m;
}

std::vector<double> JointPmf::y_marginal() const {
    std::vector<double> m(y_count_, 0.0);
    for(const auto &c : cells_) m[c.y] += c.p;
    return m;
}

double mutual_information_finite(const JointPmf &joint) {
    double total = 0.0;
    for(const auto &c : joint.cells()) total += c.p;
    if(std::abs(total - 1.0) > 1e-12)
        throw DomainError("joint pmf is not normalized: deficit " + std::to_string(1.0 - total));

    const auto px = joint.x_marginal();
    const auto py = joint.y_marginal();
    std::vector<double> terms;
    terms.reserve(joint.cells().size());
    for(const auto &c : joint.cells()) terms.push_back(c.p * std::log2(c.p / (px[c.x] * py[c.y])));
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for(double t : terms) sum += t;
    return sum;
}

double tail_information_allowance(double tail_mass) {
    if(tail_mass <= 0.0) return 0.0;
    return tail_mass * std::max(1.0, -std::log2(tail_mass));
}

FidelityEstimate fidelity_discrete_outcomes(const DiscreteChannel &channel, const PhasePrior &prior,
                                            const Tolerance &tol) {
    tol.validate();
    const double tail = channel.truncation_tail();
    if(tail > std::max(tol.abs, tol.rel))
        throw NumericalError("channel truncation tail " + std::to_string(tail) + " exceeds the tolerance", 0.0,
                             std::numeric_limits<double>::infinity());

    const std::size_t count = channel.outcome_count();
    FidelityEstimate  est;
    est.truncation_order = count;
    est.truncation_tail  = tail;
    double error         = 0.0;

    for(std::size_t y = 0; y < count; ++y) {
        try {
            const auto marginal =
                prior.expectation([&](double phi) { return channel.probability(y, phi); }, {0.1 * tol.rel, 0.0});
            est.evaluations += marginal.evaluations;
            if(!(marginal.value > 0.0)) continue;
            const double log_m = std::log(marginal.value);

            const Tolerance kl_tol{tol.rel, tol.abs / static_cast<double>(count) + 1e-3 * tol.rel * marginal.value};
            const auto      kl = prior.expectation(
                [&](double phi) {
                    const double lp = channel.log_probability(y, phi);
                    if(lp == -std::numeric_limits<double>::infinity()) return 0.0;
                    return std::exp(lp) * (lp - log_m) / kLn2;
                },
                kl_tol);
            est.evaluations += kl.evaluations;
            est.bits += kl.value;
            error += kl.error_estimate + marginal.error_estimate / kLn2;
        } catch(const NumericalError &e) {
            throw NumericalError("fidelity quadrature failed at outcome " + channel.outcome_label(y) + ": " + e.what(),
                                 est.bits, std::numeric_limits<double>::infinity());
        }
    }
    est.numeric_error = error + tail_information_allowance(tail);
    return est;
}

namespace {

    struct GridPass {
        double      value       = 0.0;
        double      inner_error = 0.0;
        std::size_t evaluations = 0;
    };

    GridPass continuous_pass(const ContinuousChannel &channel, const PhasePrior &prior, const Tolerance &tol,
                             const std::vector<QuadratureRule> &axes) {
        const std::size_t dim = axes.size();
        GridPass          pass;
        std::vector<std::size_t> index(dim, 0);
        std::vector<double>      y(dim);

        for(;;) {
            double weight = 1.0;
            for(std::size_t a = 0; a < dim; ++a) {
                y[a] = axes[a].nodes[index[a]];
                weight *= axes[a].weights[index[a]];
            }

            const auto marginal = prior.expectation([&](double phi) { return channel.pdf(y, phi); }, {0.1 * tol.rel, 0.0});
            pass.evaluations += marginal.evaluations;
            if(marginal.value > 0.0) {
                const double log_m = std::log(marginal.value);
                const auto   kl    = prior.expectation(
                    [&](double phi) {
                        const double lp = channel.log_pdf(y, phi);
                        if(lp == -std::numeric_limits<double>::infinity()) return 0.0;
                        return std::exp(lp) * (lp - log_m) / kLn2;
                    },
                    {tol.rel, 1e-3 * tol.rel * marginal.value});
                pass.evaluations += kl.evaluations;
                pass.value += weight * kl.value;
                pass.inner_error += weight * (kl.error_estimate + marginal.error_estimate / kLn2);
            }

            std::size_t a = 0;
            for(; a < dim; ++a) {
                if(++index[a] < axes[a].nodes.size()) break;
                index[a] = 0;
            }
            if(a == dim) break;
        }
        return pass;
    }

} // namespace

FidelityEstimate fidelity_continuous_outcomes(const ContinuousChannel &channel, const PhasePrior &prior,
                                              const Tolerance &tol, const ContinuousQuadratureOptions &options) {
    tol.validate();
    const auto        domain = channel.integration_domain();
    const std::size_t dim    = channel.dimension();
    if(dim == 0 || domain.lo.size() != dim || domain.hi.size() != dim)
        throw DomainError("channel integration domain does not match its dimension");
    if(!(domain.length_scale > 0.0)) throw DomainError("channel length scale must be positive");

    std::vector<QuadratureRule> coarse, fine;
    std::size_t                 max_panels = 0;
    for(std::size_t a = 0; a < dim; ++a) {
        const double      width  = domain.hi[a] - domain.lo[a];
        const auto        panels = static_cast<std::size_t>(
            std::max(1.0, std::ceil(options.panels_per_scale * width / domain.length_scale)));
        if(2 * panels > options.max_panels_per_axis)
            throw NumericalError("outcome grid needs " + std::to_string(2 * panels) +
                                     " panels per axis, above the budget of " +
                                     std::to_string(options.max_panels_per_axis),
                                 0.0, std::numeric_limits<double>::infinity());
        coarse.push_back(composite_gauss_legendre(domain.lo[a], domain.hi[a], panels, options.order));
        fine.push_back(composite_gauss_legendre(domain.lo[a], domain.hi[a], 2 * panels, options.order));
        max_panels = std::max(max_panels, 2 * panels);
    }

    GridPass lo_pass, hi_pass;
    try {
        lo_pass = continuous_pass(channel, prior, tol, coarse);
        hi_pass = continuous_pass(channel, prior, tol, fine);
    } catch(const NumericalError &e) {
        throw NumericalError(std::string("continuous fidelity quadrature failed: ") + e.what(), hi_pass.value,
                             std::numeric_limits<double>::infinity());
    }

    FidelityEstimate est;
    est.bits             = hi_pass.value;
    est.truncation_order = max_panels * options.order;
    est.truncation_tail  = domain.tail_mass;
    est.evaluations      = lo_pass.evaluations + hi_pass.evaluations;
    est.numeric_error    = std::abs(hi_pass.value - lo_pass.value) + hi_pass.inner_error +
                        tail_information_allowance(domain.tail_mass);
    return est;
}

} // namespace measfid
