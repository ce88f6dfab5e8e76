#include "measfid/fisher.hpp"

#include "measfid/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace measfid {

namespace {

    double hermitian_defect(const ComplexMatrix &m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

    double min_eigenvalue(const ComplexMatrix &m) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    }

} // namespace

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
    if(rho_.rows() == 0 || rho_.rows() != rho_.cols()) throw DomainError("density matrix must be square and nonempty");
    if(!rho_.allFinite()) throw DomainError("density matrix has non-finite entries");
    if(hermitian_defect(rho_) > 1e-12) throw DomainError("density matrix is not Hermitian");
    const std::complex<double> tr = rho_.trace();
    if(std::abs(tr - 1.0) > 1e-12) throw DomainError("density matrix trace is " + std::to_string(tr.real()));
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
    if(min_eigenvalue(rho_) < -1e-12) throw DomainError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const ComplexVector &psi) {
    const double norm = psi.norm();
    if(!(norm > 0.0)) throw DomainError("state vector is zero");
    const ComplexVector unit = psi / norm;
    return DensityMatrix(unit * unit.adjoint());
}

Povm::Povm(std::vector<ComplexMatrix> elements) : elements_(std::move(elements)) {
    if(elements_.empty()) throw DomainError("POVM has no elements");
    const Eigen::Index d   = elements_.front().rows();
    ComplexMatrix      sum = ComplexMatrix::Zero(d, d);
    for(std::size_t i = 0; i < elements_.size(); ++i) {
        auto &e = elements_[i];
        if(e.rows() != d || e.cols() != d) throw DomainError("POVM elements differ in dimension");
        if(hermitian_defect(e) > 1e-12) throw DomainError("POVM element " + std::to_string(i) + " is not Hermitian");
        e = 0.5 * (e + e.adjoint()).eval();
        if(min_eigenvalue(e) < -1e-12) throw DomainError("POVM element " + std::to_string(i) + " is not positive semidefinite");
        sum += e;
    }
    if((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError("POVM elements do not sum to the identity");
}

Povm Povm::projective(const ComplexMatrix &basis) {
    std::vector<ComplexMatrix> elements;
    for(Eigen::Index k = 0; k < basis.cols(); ++k) elements.push_back(basis.col(k) * basis.col(k).adjoint());
    return Povm(std::move(elements));
}

std::vector<double> povm_probabilities(const DensityMatrix &state, const Povm &povm) {
    if(state.dimension() != povm.dimension()) throw DomainError("state and POVM dimensions differ");
    std::vector<double> p(povm.size());
    for(std::size_t y = 0; y < povm.size(); ++y) {
        const double v = (state.matrix() * povm[y]).trace().real();
        if(v < -1e-12) throw NumericalError("negative outcome probability " + std::to_string(v), v, 0.0);
        p[y] = std::max(v, 0.0);
    }
    return p;
}

namespace {

    constexpr double kDivergenceSlope = 1e-10;

    ClassicalFisherResult fisher_from(const std::vector<double> &p, const std::vector<double> &dp) {
        if(p.size() != dp.size()) throw DomainError("pmf and derivative lengths differ");
        ClassicalFisherResult r;
        for(std::size_t y = 0; y < p.size(); ++y) {
            if(!std::isfinite(p[y]) || p[y] < 0.0) throw DomainError("pmf entries must be finite and nonnegative");
            if(p[y] > 0.0) {
                r.value += dp[y] * dp[y] / p[y];
            } else if(std::abs(dp[y]) > kDivergenceSlope) {
                r.divergent = true;
                r.divergent_outcomes.push_back(y);
            }
        }
        if(r.divergent) r.value = std::numeric_limits<double>::infinity();
        return r;
    }

    std::vector<double> central_difference(const std::function<std::vector<double>(double)> &pmf, double x0, double h) {
        const auto plus  = pmf(x0 + h);
        const auto minus = pmf(x0 - h);
        if(plus.size() != minus.size()) throw DomainError("pmf length changes with x");
        std::vector<double> d(plus.size());
        for(std::size_t i = 0; i < d.size(); ++i) d[i] = (plus[i] - minus[i]) / (2.0 * h);
        return d;
    }

    void check_richardson(double gap, double value, const DerivativeOptions &opt) {
        if(gap > opt.richardson_tolerance * std::max(1.0, std::abs(value)))
            throw NumericalError("finite-difference Fisher information is unstable: F(h) and F(h/2) differ by " +
                                     std::to_string(gap),
                                 value, gap);
    }

} // namespace

ClassicalFisherResult classical_fisher(const ClassicalFamily &family, double x0) {
    if(!family.pmf) throw DomainError("classical family has no pmf");
    const auto p = family.pmf(x0);
    if(family.derivative) return fisher_from(p, family.derivative(x0));

    const auto &opt = family.finite_difference;
    if(!(opt.step > 0.0)) throw DomainError("finite-difference step must be positive");
    const auto d1 = central_difference(family.pmf, x0, opt.step);
    const auto d2 = central_difference(family.pmf, x0, 0.5 * opt.step);
    std::vector<double> extrapolated(d1.size());
    for(std::size_t i = 0; i < d1.size(); ++i) extrapolated[i] = (4.0 * d2[i] - d1[i]) / 3.0;

    auto result = fisher_from(p, extrapolated);
    if(!result.divergent) {
        result.richardson_gap = std::abs(fisher_from(p, d1).value - fisher_from(p, d2).value);
        check_richardson(result.richardson_gap, result.value, opt);
    }
    return result;
}

SldResult symmetric_log_derivative(const DensityMatrix &state, const ComplexMatrix &derivative) {
    const ComplexMatrix &rho = state.matrix();
    if(derivative.rows() != rho.rows() || derivative.cols() != rho.cols())
        throw DomainError("state derivative has the wrong shape");
    const ComplexMatrix drho = 0.5 * (derivative + derivative.adjoint());

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho);
    const ComplexMatrix &v = solver.eigenvectors();
    const auto          &p = solver.eigenvalues();
    const Eigen::Index   d = rho.rows();

    const ComplexMatrix drho_eig = v.adjoint() * drho * v;
    ComplexMatrix       sld_eig  = ComplexMatrix::Zero(d, d);
    for(Eigen::Index i = 0; i < d; ++i)
        for(Eigen::Index j = 0; j < d; ++j)
            if(p[i] + p[j] > kSldNullThreshold) sld_eig(i, j) = 2.0 * drho_eig(i, j) / (p[i] + p[j]);

    SldResult r;
    r.sld          = v * sld_eig * v.adjoint();
    r.sld          = 0.5 * (r.sld + r.sld.adjoint()).eval();
    r.fisher_value = std::max(0.0, (rho * r.sld * r.sld).trace().real());

    ComplexMatrix residual = v.adjoint() * (drho - 0.5 * (r.sld * rho + rho * r.sld)) * v;
    for(Eigen::Index i = 0; i < d; ++i)
        for(Eigen::Index j = 0; j < d; ++j)
            if(p[i] + p[j] <= kSldNullThreshold) residual(i, j) = 0.0;
    r.residual = residual.norm();
    if(!(r.residual <= kSldResidualLimit))
        throw NumericalError("SLD residual " + std::to_string(r.residual) + " exceeds " + std::to_string(kSldResidualLimit),
                             r.fisher_value, r.residual);
    return r;
}

SldResult quantum_fisher(const QuantumFamily &family, double x0) {
    if(!family.state) throw DomainError("quantum family has no state map");
    const DensityMatrix rho = family.state(x0);
    if(family.derivative) return symmetric_log_derivative(rho, family.derivative(x0));

    const auto &opt = family.finite_difference;
    if(!(opt.step > 0.0)) throw DomainError("finite-difference step must be positive");
    auto diff = [&](double h) -> ComplexMatrix {
        return (family.state(x0 + h).matrix() - family.state(x0 - h).matrix()) / (2.0 * h);
    };
    const ComplexMatrix d1 = diff(opt.step);
    const ComplexMatrix d2 = diff(0.5 * opt.step);

    auto result           = symmetric_log_derivative(rho, (4.0 * d2 - d1) / 3.0);
    result.richardson_gap = std::abs(symmetric_log_derivative(rho, d1).fisher_value -
                                     symmetric_log_derivative(rho, d2).fisher_value);
    check_richardson(result.richardson_gap, result.fisher_value, opt);
    return result;
}

double cramer_rao_bound(double fisher_value) {
    if(std::isnan(fisher_value) || fisher_value < 0.0) throw DomainError("Fisher information must be nonnegative");
    if(fisher_value == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / fisher_value;
}

} // namespace measfid
