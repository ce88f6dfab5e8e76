#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace measfid {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Finite-dimensional quantum state. Construction checks Hermiticity and unit
/// trace within 1e-12 and eigenvalues >= -1e-12.
class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix rho);
    static DensityMatrix pure(const ComplexVector &psi);

    Eigen::Index dimension() const { return rho_.rows(); }
    const ComplexMatrix &matrix() const { return rho_; }

  private:
    ComplexMatrix rho_;
};

/// Measurement operators, one per outcome: each Hermitian positive
/// semidefinite within 1e-12, summing to the identity within 1e-10.
class Povm {
  public:
    explicit Povm(std::vector<ComplexMatrix> elements);
    static Povm projective(const ComplexMatrix &unitary_basis);

    std::size_t size() const { return elements_.size(); }
    Eigen::Index dimension() const { return elements_.front().rows(); }
    const ComplexMatrix &operator[](std::size_t i) const { return elements_[i]; }

  private:
    std::vector<ComplexMatrix> elements_;
};

// p(y) = tr(rho Pi(y)); round-off negatives down to -1e-12 are clamped to 0.
std::vector<double> povm_probabilities(const DensityMatrix &state, const Povm &povm);

struct DerivativeOptions {
    double step               = 1e-5;
    double richardson_tolerance = 1e-6; // max |F(h) - F(h/2)|, scaled by max(1, F)
};

/// Classical family x -> P(y|x). Without an analytic derivative, central
/// differences at h and h/2 are Richardson-combined.
struct ClassicalFamily {
    std::function<std::vector<double>(double)> pmf;
    std::function<std::vector<double>(double)> derivative; // optional
    DerivativeOptions                          finite_difference;
};

struct ClassicalFisherResult {
    double                   value = 0.0;
    bool                     divergent = false; // some P(y|x0) = 0 with dP/dx != 0
    std::vector<std::size_t> divergent_outcomes;
    double                   richardson_gap = 0.0;
};

ClassicalFisherResult classical_fisher(const ClassicalFamily &family, double x0);

struct QuantumFamily {
    std::function<DensityMatrix(double)> state;
    std::function<ComplexMatrix(double)> derivative; // optional
    DerivativeOptions                    finite_difference;
};

struct SldResult {
    ComplexMatrix sld;
    double        fisher_value   = 0.0;
    double        residual       = 0.0; // Frobenius norm of d(rho) - (L rho + rho L)/2 on the support
    double        richardson_gap = 0.0;
};

inline constexpr double kSldNullThreshold   = 1e-12;
inline constexpr double kSldResidualLimit   = 1e-8;

/// Solves d(rho)/dx = (L rho + rho L)/2 in the eigenbasis of rho. Components
/// with p_i + p_j <= kSldNullThreshold are set to zero. Throws NumericalError
/// when the residual on the support exceeds kSldResidualLimit.
SldResult symmetric_log_derivative(const DensityMatrix &state, const ComplexMatrix &derivative);

SldResult quantum_fisher(const QuantumFamily &family, double x0);

// Variance lower bound 1/F; +infinity when F = 0.
double cramer_rao_bound(double fisher_value);

} // namespace measfid
