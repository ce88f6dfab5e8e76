#pragma once

#include "measfid/channel.hpp"
#include "measfid/numerics.hpp"
#include "measfid/phase_density.hpp"

#include <cstddef>
#include <vector>

namespace measfid {

/// Finite joint pmf over (x, y), stored as a list of nonzero cells.
class JointPmf {
  public:
    struct Cell {
        std::size_t x;
        std::size_t y;
        double      p;
    };

    JointPmf(std::size_t x_count, std::size_t y_count) : x_count_(x_count), y_count_(y_count) {}

    // Row-major dense table, x_count rows by y_count columns.
    static JointPmf dense(std::size_t x_count, std::size_t y_count, const std::vector<double> &table);

    void add(std::size_t x, std::size_t y, double p);
    JointPmf transposed() const;

    std::size_t x_count() const { return x_count_; }
    std::size_t y_count() const { return y_count_; }
    const std::vector<Cell> &cells() const { return cells_; }

    std::vector<double> x_marginal() const;
    std::vector<double> y_marginal() const;

  private:
    std::size_t       x_count_;
    std::size_t       y_count_;
    std::vector<Cell> cells_;
};

/// Mutual information in bits, sum P(x,y) log2[P(x,y) / (P(x) P(y))] with
/// 0 log 0 = 0. Terms are summed in sorted order so the result is exactly
/// symmetric under transposition. Throws DomainError if the cells are
/// negative or do not sum to 1 within 1e-12.
double mutual_information_finite(const JointPmf &joint);

struct FidelityEstimate {
    double      bits             = 0.0;
    double      numeric_error    = 0.0; // bits
    std::size_t truncation_order = 0;   // outcomes (discrete) or nodes per axis (continuous)
    double      truncation_tail  = 0.0; // outcome probability mass not covered
    std::size_t evaluations      = 0;   // channel evaluations
};

// Information allowance for outcome mass t left out of a sum: t * max(1, log2(1/t)).
double tail_information_allowance(double tail_mass);

/// Fidelity of a discrete-outcome channel for a continuous phase:
/// H = sum_y E_phi[ P(y|phi) log2( P(y|phi) / E_phi'[P(y|phi')] ) ].
/// Throws NumericalError if the channel's truncation tail exceeds the tolerance.
FidelityEstimate fidelity_discrete_outcomes(const DiscreteChannel &channel, const PhasePrior &prior,
                                            const Tolerance &tol = {});

struct ContinuousQuadratureOptions {
    std::size_t order              = 10; // Gauss-Legendre nodes per panel
    double      panels_per_scale   = 1.0;
    std::size_t max_panels_per_axis = 400;
};

/// Fidelity of a continuous-outcome channel. The outcome integral runs over the
/// channel's integration domain on a product composite Gauss-Legendre grid;
/// at each node the marginal density and the Kullback-Leibler integrand are
/// prior expectations over phase. The grid is evaluated at two panel
/// densities and their difference enters numeric_error.
FidelityEstimate fidelity_continuous_outcomes(const ContinuousChannel &channel, const PhasePrior &prior,
                                              const Tolerance &tol = {}, const ContinuousQuadratureOptions &options = {});

} // namespace measfid
