// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "measfid/bayes.hpp"
#include "measfid/fisher.hpp"
#include "measfid/information.hpp"
#include "measfid/interferometers.hpp"
#include "measfid/montecarlo.hpp"
#include "measfid/parallel.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace measfid;
using cd = std::complex<double>;

namespace {

struct Outcome {
    bool        pass;
    std::string detail;
};

int failures = 0;

void criterion(const std::string &name, const std::function<Outcome()> &check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome    r;
    try {
        r = check();
    } catch(const std::exception &e) {
        r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if(!r.pass) ++failures;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << name << " -- " << r.detail << " (" << secs << " s)" << std::endl;
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// Shared across the ordering and monotonicity criteria.
std::vector<SweepRow> sweep_rows;
double                sweep_seconds = 0.0;

const std::vector<SweepRow> &default_sweep() {
    if(sweep_rows.empty()) {
        const auto t = std::chrono::steady_clock::now();
        sweep_rows   = fig1_sweep(default_sweep_grid(), {}, default_worker_count());
        sweep_seconds = seconds_since(t);
    }
    return sweep_rows;
}

Outcome vacuum_limit() {
    const auto   t   = std::chrono::steady_clock::now();
    const auto   est = quantum_mz_fidelity(0.0, PhasePrior::uniform());
    const double s   = seconds_since(t);
    return {std::abs(est.bits) <= 1e-6 && s < 1.0, "H_coh(0) = " + fmt(est.bits) + " bits in " + fmt(s) + " s"};
}

Outcome sweep_ordering() {
    const auto &rows = default_sweep();
    bool        ok   = true;
    std::string detail;
    for(double eta : {0.5, 1.0, 2.0, 3.0, 4.0, 5.0}) {
        const auto it = std::find_if(rows.begin(), rows.end(), [&](const SweepRow &r) { return r.eta == eta; });
        if(it == rows.end() || !it->error.empty()) return {false, "missing row eta=" + fmt(eta)};
        ok = ok && it->coherent->bits > it->classical->bits;
        detail += "eta=" + fmt(eta) + ": " + fmt(it->coherent->bits) + ">" + fmt(it->classical->bits) + "; ";
    }
    ok = ok && sweep_seconds < 600.0;
    return {ok, detail + "sweep " + fmt(sweep_seconds) + " s"};
}

Outcome monotonicity() {
    const auto &rows      = default_sweep();
    bool        ok        = rows.size() == 21;
    double      max_error = 0.0;
    for(std::size_t i = 0; i < rows.size(); ++i) {
        if(!rows[i].error.empty()) return {false, "row failed: " + rows[i].error};
        max_error = std::max({max_error, rows[i].coherent->numeric_error, rows[i].classical->numeric_error});
        if(i > 0) {
            ok = ok && rows[i].coherent->bits >= rows[i - 1].coherent->bits;
            ok = ok && rows[i].classical->bits >= rows[i - 1].classical->bits;
        }
    }
    ok = ok && max_error < 1e-3;
    return {ok, "21 rows nondecreasing in both columns, max numeric_error " + fmt(max_error)};
}

Outcome oracle_equivalence() {
    const auto        prior   = PhasePrior::uniform();
    const std::size_t workers = default_worker_count();
    const std::size_t n       = 1000000;

    const auto q_exact = quantum_mz_fidelity(1.0, prior);
    const auto q_mc = mi_plugin(sample_outcomes(QuantumMzChannel({1.0}), prior, n, 12345, workers), kDefaultPhiBins, DiscreteIdentity{});
    const auto c_exact = noisy_classical_fidelity(1.0, 1.0, prior);
    const auto c_mc    = mi_plugin(sample_outcomes(NoisyClassicalChannel({1.0, 1.0}), prior, n, 12345, workers), kDefaultPhiBins,
                                   AxisBins{{24, 24}});

    auto agrees = [](double exact, const MiEstimate &mc) {
        const double d = std::abs(mc.jackknife_bits - exact);
        return !mc.degenerate && d <= 3.0 * mc.std_error && d <= 0.05;
    };
    const bool ok = agrees(q_exact.bits, q_mc) && agrees(c_exact.bits, c_mc);
    return {ok, "quantum " + fmt(q_exact.bits) + " vs " + fmt(q_mc.jackknife_bits) + " +- " + fmt(q_mc.std_error) + "; classical " +
                    fmt(c_exact.bits) + " vs " + fmt(c_mc.jackknife_bits) + " +- " + fmt(c_mc.std_error)};
}

Outcome closed_form_channels() {
    const double e   = 0.11;
    const double hb  = -e * std::log2(e) - (1 - e) * std::log2(1 - e);
    const double bsc = mutual_information_finite(JointPmf::dense(2, 2, {0.5 * (1 - e), 0.5 * e, 0.5 * e, 0.5 * (1 - e)}));

    ClassicalFamily bern{[](double x) { return std::vector<double>{1 - x, x}; }, [](double) { return std::vector<double>{-1.0, 1.0}; }, {}};
    const double    fb = classical_fisher(bern, 0.5).value;

    const auto      budget = poisson_truncation(2.0, 1e-15);
    ClassicalFamily pois{[&](double x) {
                             std::vector<double> p(budget.n_max + 10);
                             for(std::size_t k = 0; k < p.size(); ++k)
                                 p[k] = std::exp(-x + static_cast<double>(k) * std::log(x) - std::lgamma(static_cast<double>(k) + 1));
                             return p;
                         },
                         {},
                         {}};
    const double    fp = classical_fisher(pois, 2.0).value;

    const bool ok = std::abs(bsc - (1 - hb)) <= 1e-10 && std::abs(fb - 4.0) <= 1e-9 && std::abs(fp - 0.5) <= 1e-6;
    return {ok, "BSC " + fmt(bsc) + ", Bernoulli F " + fmt(fb) + ", Poisson F " + fmt(fp)};
}

Outcome normalization_battery() {
    double worst_deficit = 0.0;
    for(double eta : {0.5, 1.0, 4.0}) {
        const auto budget = poisson_truncation(eta, kDefaultTailMass);
        for(int j = 0; j < 64; ++j) {
            const double phi = -kPi + kTwoPi * (j + 1) / 64.0;
            worst_deficit    = std::max(worst_deficit, 1.0 - quantum_mz_pmf({eta}, phi, budget).total());
        }
    }
    double worst_pdf = 0.0;
    for(auto [e, delta] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.3}, std::pair{0.5, 0.05}}) {
        const NoisyClassicalChannel ch({e, delta});
        for(double phi : {-2.0, 0.0, 0.7, kPi}) {
            // Gaussian-weight quadrature centered on the means is exact for the product normal.
            const auto   mean = classical_mz_output(e, phi);
            const double mass = integrate_gaussian_weight(
                [&](double ec) {
                    return integrate_gaussian_weight(
                        [&](double ed) {
                            const double y[2] = {ec, ed};
                            const double g    = std::exp(-0.5 * ((ec - mean.e_c) * (ec - mean.e_c) + (ed - mean.e_d) * (ed - mean.e_d)) /
                                                         (delta * delta)) /
                                             (2 * kPi * delta * delta);
                            return ch.pdf(y, phi) / g;
                        },
                        mean.e_d, delta, 8);
                },
                mean.e_c, delta, 8);
            worst_pdf = std::max(worst_pdf, std::abs(mass - 1.0));
        }
    }
    const bool ok = worst_deficit <= 1e-10 && worst_pdf <= 1e-10;
    return {ok, "pmf worst deficit " + fmt(worst_deficit) + ", pdf worst |mass-1| " + fmt(worst_pdf)};
}

ComplexMatrix random_complex(std::mt19937_64 &rng, Eigen::Index d) {
    std::normal_distribution<double> n;
    ComplexMatrix                    a(d, d);
    for(Eigen::Index i = 0; i < d; ++i)
        for(Eigen::Index j = 0; j < d; ++j) a(i, j) = cd(n(rng), n(rng));
    return a;
}

double worst_sld_residual = 0.0;

Outcome quantum_dominates_classical() {
    std::mt19937_64                        rng(777);
    std::uniform_real_distribution<double> u(0.02, 1.0);
    double                                 worst = INFINITY;
    for(int trial = 0; trial < 100; ++trial) {
        const Eigen::Index d = 2 + trial % 2;
        // rho(x) = U(x) rho0 U(x)^dagger with U(x) = exp(-i x G).
        Eigen::VectorXd p(d);
        for(Eigen::Index i = 0; i < d; ++i) p(i) = u(rng);
        p /= p.sum();
        const ComplexMatrix q    = Eigen::HouseholderQR<ComplexMatrix>(random_complex(rng, d)).householderQ();
        const ComplexMatrix rho0 = q * p.cast<cd>().asDiagonal() * q.adjoint();
        const ComplexMatrix a    = random_complex(rng, d);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (a + a.adjoint()));
        const ComplexMatrix v = es.eigenvectors();
        const Eigen::VectorXd w = es.eigenvalues();
        auto state = [=](double x) {
            Eigen::VectorXcd ph(d);
            for(Eigen::Index i = 0; i < d; ++i) ph(i) = std::exp(cd(0.0, -x * w(i)));
            const ComplexMatrix uu = v * ph.asDiagonal() * v.adjoint();
            const ComplexMatrix r  = uu * rho0 * uu.adjoint();
            return DensityMatrix(0.5 * (r + r.adjoint()));
        };
        // Random rank-one POVM normalized to completeness.
        const std::size_t          outcomes = static_cast<std::size_t>(d) + 1 + trial % 3;
        std::vector<ComplexMatrix> raw;
        ComplexMatrix              total = ComplexMatrix::Zero(d, d);
        for(std::size_t k = 0; k < outcomes; ++k) {
            const Eigen::VectorXcd col = random_complex(rng, d).col(0);
            raw.push_back(col * col.adjoint());
            total += raw.back();
        }
        const ComplexMatrix s = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(total).operatorInverseSqrt();
        for(auto &m : raw) {
            const ComplexMatrix e = s * m * s;
            m                     = 0.5 * (e + e.adjoint());
        }
        const Povm   povm(raw);
        const double x0 = 0.1 * trial;
        const auto   fq = quantum_fisher({state, {}, {}}, x0);
        worst_sld_residual = std::max(worst_sld_residual, fq.residual);
        const auto fc      = classical_fisher({[&](double x) { return povm_probabilities(state(x), povm); }, {}, {}}, x0);
        worst              = std::min(worst, fq.fisher_value - fc.value);
    }
    return {worst >= -1e-6, "min(F_q - F_c) over 100 families = " + fmt(worst)};
}

Outcome sld_residual() {
    QuantumFamily qubit{[](double x) {
                            ComplexVector v(2);
                            v << std::cos(0.5 * x), std::sin(0.5 * x);
                            return DensityMatrix::pure(v);
                        },
                        {},
                        {}};
    double worst_f = 0.0;
    for(double x : {0.0, 0.3, 1.0, 2.5}) {
        const auto r       = quantum_fisher(qubit, x);
        worst_f            = std::max(worst_f, std::abs(r.fisher_value - 1.0));
        worst_sld_residual = std::max(worst_sld_residual, r.residual);
    }
    const bool ok = worst_sld_residual <= 1e-8 && worst_f <= 1e-8;
    return {ok, "max residual " + fmt(worst_sld_residual) + ", max |F_q - 1| " + fmt(worst_f)};
}

Outcome posterior_two_peaks() {
    const NoisyClassicalChannel ch({1.0, 0.01});
    const double                obs[2] = {0.5, 0.5};
    const auto                  post   = posterior(ch, PhasePrior::uniform(), obs, 2048);
    const auto                  est    = estimate_phase(post);
    const double                step   = kTwoPi / 2048;
    auto near = [&](double target) {
        return std::any_of(est.modes.begin(), est.modes.end(), [&](double m) { return std::abs(std::remainder(m - target, kTwoPi)) <= step; });
    };
    std::string modes;
    for(double m : est.modes) modes += fmt(m) + " ";
    return {est.modes.size() == 2 && near(kPi / 2) && near(-kPi / 2), "modes " + modes};
}

Outcome bayes_recursion() {
    std::mt19937_64                        rng(4242);
    std::uniform_real_distribution<double> u(-0.2, 1.2);
    const NoisyClassicalChannel            ch({1.0, 0.25});
    double                                 worst = 0.0;
    for(int trial = 0; trial < 5; ++trial) {
        std::vector<std::vector<double>> obs(5);
        for(auto &o : obs) o = {u(rng), u(rng)};
        const auto seq   = recursive_update(PhasePrior::uniform(), ch, obs, 1024);
        const auto batch = posterior_from_log_likelihood(
            PhasePrior::uniform(),
            [&](double phi) {
                double s = 0.0;
                for(const auto &o : obs) s += ch.log_pdf(o, phi);
                return s;
            },
            1024);
        auto perm = obs;
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto permuted = recursive_update(PhasePrior::uniform(), ch, perm, 1024);
        for(std::size_t i = 0; i < seq.size(); ++i)
            worst = std::max({worst, std::abs(seq.density()[i] - batch.density()[i]), std::abs(seq.density()[i] - permuted.density()[i])});
    }
    return {worst <= 1e-10, "max pointwise difference " + fmt(worst)};
}

Outcome ideal_enumeration() {
    const double h1 = ideal_classical_fidelity(IdealClassicalMz::monochromatic(1, 2, 1));
    const double h2 = ideal_classical_fidelity(IdealClassicalMz::monochromatic(2, 2, 1));
    bool         bounded = true;
    for(std::size_t n_phi = 1; n_phi <= 16; ++n_phi) {
        auto model      = IdealClassicalMz::monochromatic(n_phi, 3, 2);
        model.input_pmf = {0.1, 0.2, 0.3, 0.4};
        bounded = bounded && ideal_classical_fidelity(model) <= std::log2(2.0 * static_cast<double>(n_phi)) + 1e-12;
        bounded = bounded && ideal_classical_fidelity(IdealClassicalMz::monochromatic(n_phi, 3, 3)) <=
                                 std::log2(2.0 * static_cast<double>(n_phi)) + 1e-12;
    }
    const bool ok = std::abs(h1 - 1.0) <= 1e-15 && std::abs(h2 - 1.5) <= 1e-15 && bounded;
    return {ok, "N_phi=1: " + fmt(h1) + ", N_phi=2: " + fmt(h2) + ", bound log2(2 N_phi) " + (bounded ? "holds" : "violated")};
}

std::string capture(const std::string &command) {
    std::string out;
    FILE       *p = popen(command.c_str(), "r");
    if(p == nullptr) return out;
    std::array<char, 4096> buf{};
    std::size_t            n;
    while((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    pclose(p);
    return out;
}

Outcome determinism(const std::string &binary) {
    const std::vector<std::string> commands = {
        binary + " mc-check --target classical --n 100000 --seed 31337",
        binary + " mc-check --target quantum --n 100000 --seed 31337",
        binary + " sweep --eta-min 0 --eta-max 2 --steps 3",
        binary + " posterior --e-c 0.3 --e-d 0.6 --e 1 --delta 0.1 --grid 512 2>/dev/null",
    };
    for(const auto &c : commands) {
        const auto a = capture(c);
        const auto b = capture(c);
        if(a.empty() || a != b) return {false, "output differs or is empty for: " + c};
    }
    return {true, "4 invocations byte-identical across two runs"};
}

} // namespace

int main(int argc, char **argv) {
    if(argc < 2) {
        std::cerr << "usage: acceptance <path to measfid executable>\n";
        return 2;
    }
    const std::string binary = argv[1];
    criterion("vacuum limit", vacuum_limit);
    criterion("quantum above classical over the sweep", sweep_ordering);
    criterion("monotone sweep columns", monotonicity);
    criterion("quadrature agrees with sampling", oracle_equivalence);
    criterion("closed-form channels", closed_form_channels);
    criterion("normalization battery", normalization_battery);
    criterion("quantum Fisher dominates classical", quantum_dominates_classical);
    criterion("SLD residual and pure qubit", sld_residual);
    criterion("posterior two-peak structure", posterior_two_peaks);
    criterion("Bayes recursion", bayes_recursion);
    criterion("ideal classical enumeration", ideal_enumeration);
    criterion("CLI determinism", [&] { return determinism(binary); });
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
