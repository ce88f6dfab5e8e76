#include "measfid/numerics.hpp"

#include "measfid/errors.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace measfid {

void Tolerance::validate() const {
    if(!std::isfinite(rel) || !std::isfinite(abs)) throw DomainError("tolerance must be finite");
    if(rel < 0.0 || abs < 0.0) throw DomainError("tolerance must be nonnegative");
    if(rel == 0.0 && abs == 0.0) throw DomainError("tolerance needs rel > 0 or abs > 0");
}

double Tolerance::target(double value) const { return std::max(abs, rel * std::abs(value)); }

namespace {

    // Kronrod 15-point abscissae (descending, last is the centre) and weights,
    // with the embedded 7-point Gauss weights for the odd-indexed abscissae.
    constexpr std::array<double, 8> kXgk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    constexpr std::array<double, 8> kWgk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    constexpr std::array<double, 4> kWg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    struct Segment {
        double lo;
        double hi;
        double value;
        double error;
        int    depth;
        bool   operator<(const Segment &other) const { return error < other.error; }
    };

    Segment gk15(const ScalarFunction &f, double lo, double hi, int depth) {
        const double centre = 0.5 * (lo + hi);
        const double half   = 0.5 * (hi - lo);
        const double fc     = f(centre);
        double       resg   = fc * kWg[3];
        double       resk   = fc * kWgk[7];
        double       resabs = std::abs(resk);

        std::array<double, 7> f1{}, f2{};
        for(std::size_t j = 0; j < 7; ++j) {
            const double dx = half * kXgk[j];
            f1[j]           = f(centre - dx);
            f2[j]           = f(centre + dx);
            const double s  = f1[j] + f2[j];
            resk += kWgk[j] * s;
            resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
            if(j % 2 == 1) resg += kWg[j / 2] * s;
        }
        const double mean   = 0.5 * resk;
        double       resasc = kWgk[7] * std::abs(fc - mean);
        for(std::size_t j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

        const double scale = std::abs(half);
        resk *= half;
        resg *= half;
        resabs *= scale;
        resasc *= scale;

        // QUADPACK's error heuristic.
        double err = std::abs(resk - resg);
        if(resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        constexpr double eps = std::numeric_limits<double>::epsilon();
        if(resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
        if(!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
        return {lo, hi, resk, err, depth};
    }

    constexpr std::size_t kMaxSegments = 4000;

} // namespace

IntegrationResult integrate_adaptive(const ScalarFunction &f, double lo, double hi, const Tolerance &tol) {
    tol.validate();
    if(!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) throw DomainError("integration interval must be finite with hi > lo");

    std::priority_queue<Segment> open;
    std::vector<Segment>         frozen; // at maximum depth, cannot be split further
    std::size_t                  evaluations = 0;

    auto first = gk15(f, lo, hi, 0);
    evaluations += 15;
    double total = first.value;
    double error = first.error;
    open.push(first);

    while(error > tol.target(total)) {
        if(open.empty() || open.size() + frozen.size() >= kMaxSegments) {
            throw NumericalError("adaptive quadrature did not converge: error " + std::to_string(error) + " after " +
                                     std::to_string(evaluations) + " evaluations",
                                 total, error);
        }
        Segment worst = open.top();
        open.pop();
        if(worst.depth >= kMaxRefinementLevels) {
            frozen.push_back(worst);
            continue;
        }
        const double mid   = 0.5 * (worst.lo + worst.hi);
        auto         left  = gk15(f, worst.lo, mid, worst.depth + 1);
        auto         right = gk15(f, mid, worst.hi, worst.depth + 1);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        open.push(left);
        open.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    double value = 0.0, err = 0.0;
    for(const auto &s : frozen) value += s.value, err += s.error;
    while(!open.empty()) {
        value += open.top().value;
        err += open.top().error;
        open.pop();
    }
    if(!std::isfinite(value)) throw NumericalError("integrand is not finite on the domain", value, err);
    return {value, err, evaluations};
}

IntegrationResult integrate_periodic(const ScalarFunction &f, const Tolerance &tol) {
    return integrate_adaptive(f, -kPi, kPi, tol);
}

QuadratureRule gauss_legendre(std::size_t n) {
    if(n == 0) throw DomainError("Gauss-Legendre order must be positive");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for(std::size_t i = 0; i < m; ++i) {
        double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for(int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for(std::size_t j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1              = p0;
                p0 = ((2.0 * static_cast<double>(j) - 1.0) * z * p1 - (static_cast<double>(j) - 1.0) * p2) / static_cast<double>(j);
            }
            dp             = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z               = z1 - p0 / dp;
            if(std::abs(z - z1) < 1e-15) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0, p1 = 0.0;
        for(std::size_t j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1              = p0;
            p0 = ((2.0 * static_cast<double>(j) - 1.0) * z * p1 - (static_cast<double>(j) - 1.0) * p2) / static_cast<double>(j);
        }
        dp                      = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
        const double w          = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i]           = -z;
        rule.nodes[n - 1 - i]   = z;
        rule.weights[i]         = w;
        rule.weights[n - 1 - i] = w;
    }
    if(n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

QuadratureRule gauss_hermite_normal(std::size_t n) {
    if(n == 0) throw DomainError("Gauss-Hermite order must be positive");
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
    for(Eigen::Index k = 0; k < sub.size(); ++k) sub[k] = std::sqrt(static_cast<double>(k + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if(solver.info() != Eigen::Success) throw NumericalError("Gauss-Hermite eigen-solve failed", 0.0, 0.0);

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for(std::size_t i = 0; i < n; ++i) {
        const auto idx  = static_cast<Eigen::Index>(i);
        rule.nodes[i]   = solver.eigenvalues()[idx];
        const double v0 = solver.eigenvectors()(0, idx);
        rule.weights[i] = v0 * v0;
    }
    // Symmetrize: the exact rule is odd-symmetric.
    for(std::size_t i = 0; i < n / 2; ++i) {
        const double x          = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
        const double w          = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
        rule.nodes[i]           = -x;
        rule.nodes[n - 1 - i]   = x;
        rule.weights[i]         = w;
        rule.weights[n - 1 - i] = w;
    }
    if(n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

QuadratureRule composite_gauss_legendre(double lo, double hi, std::size_t panels, std::size_t order) {
    if(!(hi > lo) || panels == 0) throw DomainError("composite rule needs hi > lo and at least one panel");
    const auto     base  = gauss_legendre(order);
    const double   width = (hi - lo) / static_cast<double>(panels);
    QuadratureRule rule;
    rule.nodes.reserve(panels * order);
    rule.weights.reserve(panels * order);
    for(std::size_t p = 0; p < panels; ++p) {
        const double a = lo + width * static_cast<double>(p);
        for(std::size_t i = 0; i < order; ++i) {
            rule.nodes.push_back(a + 0.5 * width * (base.nodes[i] + 1.0));
            rule.weights.push_back(0.5 * width * base.weights[i]);
        }
    }
    return rule;
}

double integrate_gaussian_weight(const ScalarFunction &f, double mean, double sigma, int order) {
    if(!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive and finite");
    if(order < 2) throw DomainError("Gaussian-weight order must be at least 2");
    const auto rule = gauss_hermite_normal(static_cast<std::size_t>(order));
    double     sum  = 0.0;
    for(std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mean + sigma * rule.nodes[i]);
    return sum;
}

double log_gamma(double x) {
    if(!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma needs a positive finite argument");
    return boost::math::lgamma(x);
}

TruncationBudget poisson_truncation(double mean, double tail_mass) {
    if(!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite and nonnegative");
    if(!(tail_mass > 0.0 && tail_mass < 1.0)) throw DomainError("tail mass must lie in (0, 1)");
    // P(N > n) for N ~ Poisson(mean) is the regularized lower incomplete gamma P(n + 1, mean).
    auto tail = [mean](std::size_t n) { return mean == 0.0 ? 0.0 : boost::math::gamma_p(static_cast<double>(n) + 1.0, mean); };

    std::size_t hi = 1;
    while(tail(hi) >= tail_mass) hi *= 2;
    std::size_t lo = 0;
    if(tail(lo) < tail_mass) return {tail_mass, 0, tail(0)};
    // Invariant: tail(lo) >= tail_mass > tail(hi).
    while(hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (tail(mid) < tail_mass ? hi : lo) = mid;
    }
    return {tail_mass, hi, tail(hi)};
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

} // namespace measfid
