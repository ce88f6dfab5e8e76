#include "measfid/cli.hpp"

#include "measfid/bayes.hpp"
#include "measfid/csv.hpp"
#include "measfid/errors.hpp"
#include "measfid/fisher.hpp"
#include "measfid/interferometers.hpp"
#include "measfid/montecarlo.hpp"
#include "measfid/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

namespace measfid {

namespace {

    class UsageError : public std::runtime_error {
      public:
        using std::runtime_error::runtime_error;
    };

    class IoError : public std::runtime_error {
      public:
        using std::runtime_error::runtime_error;
    };

    struct RunConfig {
        std::string   command;
        double        eta        = 1.0;
        double        e_in       = 1.0;
        double        delta      = 1.0;
        double        e_c        = 0.5;
        double        e_d        = 0.5;
        double        eta_min    = 0.0;
        double        eta_max    = 5.0;
        std::size_t   steps      = 21;
        std::size_t   grid       = 2048;
        double        x0         = 0.5;
        double        step       = 1e-5;
        std::string   model      = "bernoulli";
        std::string   target     = "quantum";
        std::size_t   samples    = 1000000;
        std::uint64_t seed       = 12345;
        std::size_t   phi_bins   = kDefaultPhiBins;
        std::size_t   outcome_bins = 24;
        double        tail_mass  = kDefaultTailMass;
        Tolerance     tol;
        std::string   out        = "-";
        std::string   config;
    };

    void require(bool ok, const std::string &message) {
        if(!ok) throw UsageError(message);
    }

    void add_tolerance(CLI::App *app, RunConfig &cfg) {
        app->add_option("--rel-tol", cfg.tol.rel, "Relative tolerance")->capture_default_str();
        app->add_option("--abs-tol", cfg.tol.abs, "Absolute tolerance (bits)")->capture_default_str();
    }

    void add_out(CLI::App *app, RunConfig &cfg) {
        app->add_option("--out", cfg.out, "Output CSV path, '-' for standard output")->capture_default_str();
    }

    void validate_tolerance(const Tolerance &tol) {
        try {
            tol.validate();
        } catch(const DomainError &e) {
            throw UsageError(e.what());
        }
    }

    std::string join_doubles(const std::vector<double> &v) {
        std::string s;
        for(std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
        return s;
    }

    std::string cmd_fidelity_quantum(const RunConfig &cfg) {
        require(std::isfinite(cfg.eta) && cfg.eta >= 0.0, "--eta must be a finite nonnegative number");
        require(cfg.tail_mass > 0.0 && cfg.tail_mass < 1.0, "--tail-mass must lie in (0, 1)");
        validate_tolerance(cfg.tol);
        const auto est = quantum_mz_fidelity(cfg.eta, PhasePrior::uniform(), cfg.tol, cfg.tail_mass);
        CsvTable   t({"eta", "h_coh_bits", "h_coh_err", "truncation_order", "truncation_tail"});
        t.add_row({format_double(cfg.eta), format_double(est.bits), format_double(est.numeric_error),
                   std::to_string(est.truncation_order), format_double(est.truncation_tail)});
        return t.str();
    }

    std::string cmd_fidelity_classical(const RunConfig &cfg) {
        require(std::isfinite(cfg.e_in) && cfg.e_in >= 0.0, "--e must be a finite nonnegative number");
        require(std::isfinite(cfg.delta) && cfg.delta > 0.0, "--delta must be positive");
        validate_tolerance(cfg.tol);
        const auto est = noisy_classical_fidelity(cfg.e_in, cfg.delta, PhasePrior::uniform(), cfg.tol);
        CsvTable   t({"e", "delta", "h_class_bits", "h_class_err"});
        t.add_row({format_double(cfg.e_in), format_double(cfg.delta), format_double(est.bits),
                   format_double(est.numeric_error)});
        return t.str();
    }

    std::string cmd_sweep(const RunConfig &cfg, std::ostream &err, int &status) {
        require(std::isfinite(cfg.eta_min) && cfg.eta_min >= 0.0, "--eta-min must be nonnegative");
        require(std::isfinite(cfg.eta_max) && cfg.eta_max > cfg.eta_min, "--eta-max must exceed --eta-min");
        require(cfg.steps >= 2, "--steps must be at least 2");
        validate_tolerance(cfg.tol);
        std::vector<double> etas(cfg.steps);
        for(std::size_t i = 0; i < cfg.steps; ++i)
            etas[i] = cfg.eta_min + (cfg.eta_max - cfg.eta_min) * static_cast<double>(i) / static_cast<double>(cfg.steps - 1);
        etas.back() = cfg.eta_max;

        const auto rows = fig1_sweep(etas, cfg.tol, default_worker_count());
        CsvTable   t({"eta", "h_coh_bits", "h_class_bits", "h_coh_err", "h_class_err"});
        for(const auto &r : rows) {
            if(!r.error.empty()) {
                err << "sweep row eta=" << format_double(r.eta) << " failed: " << r.error << '\n';
                status = kExitNumeric;
                const std::string nan = "nan";
                t.add_row({format_double(r.eta), nan, nan, nan, nan});
                continue;
            }
            t.add_row({format_double(r.eta), format_double(r.coherent->bits), format_double(r.classical->bits),
                       format_double(r.coherent->numeric_error), format_double(r.classical->numeric_error)});
        }
        return t.str();
    }

    std::string cmd_posterior(const RunConfig &cfg, std::ostream &err) {
        for(double v : {cfg.e_c, cfg.e_d}) require(std::isfinite(v), "observed energies must be finite");
        require(std::isfinite(cfg.e_in) && cfg.e_in >= 0.0, "--e must be a finite nonnegative number");
        require(std::isfinite(cfg.delta) && cfg.delta > 0.0, "--delta must be positive");
        require(cfg.grid >= 8, "--grid must be at least 8");

        const NoisyClassicalChannel channel({cfg.e_in, cfg.delta});
        const double                observed[2] = {cfg.e_c, cfg.e_d};
        const auto                  post        = posterior(channel, PhasePrior::uniform(), observed, cfg.grid);
        const auto                  summary     = estimate_phase(post);

        CsvTable t({"phi", "density"});
        for(std::size_t i = 0; i < post.size(); ++i) t.add_row({format_double(post.grid()[i]), format_double(post.density()[i])});
        err << "# circular_mean=" << (summary.circular_mean ? format_double(*summary.circular_mean) : std::string("undefined"))
            << " dispersion=" << format_double(summary.circular_dispersion) << " modes=" << join_doubles(summary.modes) << '\n';
        return t.str();
    }

    std::string cmd_fisher(const RunConfig &cfg) {
        require(std::isfinite(cfg.x0), "--x0 must be finite");
        require(cfg.step > 0.0, "--step must be positive");
        CsvTable t({"model", "x0", "kind", "fisher", "cramer_rao_bound", "richardson_gap"});
        auto     emit = [&](const std::string &kind, double f, double gap) {
            t.add_row({cfg.model, format_double(cfg.x0), kind, format_double(f), format_double(cramer_rao_bound(f)),
                           format_double(gap)});
        };
        const DerivativeOptions fd{cfg.step, 1e-6};

        if(cfg.model == "bernoulli") {
            require(cfg.x0 >= 0.0 && cfg.x0 <= 1.0, "bernoulli needs --x0 in [0, 1]");
            ClassicalFamily fam{[](double x) { return std::vector<double>{1.0 - x, x}; },
                                [](double) { return std::vector<double>{-1.0, 1.0}; }, fd};
            const auto      r = classical_fisher(fam, cfg.x0);
            emit("classical", r.value, r.richardson_gap);
        } else if(cfg.model == "poisson") {
            require(cfg.x0 > 0.0, "poisson needs --x0 > 0");
            const auto  budget = poisson_truncation(cfg.x0, 1e-14);
            auto        pmf    = [budget](double x) {
                std::vector<double> p(budget.n_max + 1);
                for(std::size_t k = 0; k <= budget.n_max; ++k)
                    p[k] = std::exp(-x + static_cast<double>(k) * std::log(x) - log_gamma(static_cast<double>(k) + 1.0));
                return p;
            };
            ClassicalFamily fam{pmf,
                                [pmf](double x) {
                                    auto p = pmf(x);
                                    for(std::size_t k = 0; k < p.size(); ++k) p[k] *= static_cast<double>(k) / x - 1.0;
                                    return p;
                                },
                                fd};
            const auto      r = classical_fisher(fam, cfg.x0);
            emit("classical", r.value, r.richardson_gap);
        } else if(cfg.model == "quantum-mz") {
            require(std::isfinite(cfg.eta) && cfg.eta >= 0.0, "--eta must be nonnegative");
            const CoherentMzModel model{cfg.eta};
            const auto            budget = poisson_truncation(cfg.eta, cfg.tail_mass);
            ClassicalFamily       fam{[=](double phi) { return quantum_mz_pmf(model, phi, budget).probabilities; }, {}, fd};
            const auto            r = classical_fisher(fam, cfg.x0);
            emit("classical", r.value, r.richardson_gap);
        } else if(cfg.model == "pure-qubit") {
            auto psi = [](double x) {
                ComplexVector v(2);
                v << std::cos(0.5 * x), std::sin(0.5 * x);
                return v;
            };
            QuantumFamily qfam{[psi](double x) { return DensityMatrix::pure(psi(x)); }, {}, fd};
            const auto    q = quantum_fisher(qfam, cfg.x0);
            emit("quantum", q.fisher_value, q.richardson_gap);
            const auto      z = Povm::projective(ComplexMatrix::Identity(2, 2));
            ClassicalFamily cfam{[&](double x) { return povm_probabilities(DensityMatrix::pure(psi(x)), z); }, {}, fd};
            const auto      c = classical_fisher(cfam, cfg.x0);
            emit("classical", c.value, c.richardson_gap);
        } else {
            throw UsageError("unknown --model '" + cfg.model + "' (bernoulli, poisson, quantum-mz, pure-qubit)");
        }
        return t.str();
    }

    std::string cmd_mc_check(const RunConfig &cfg, int &status) {
        require(cfg.samples >= 10000, "--n must be at least 10000");
        require(cfg.phi_bins >= 2 && cfg.outcome_bins >= 2, "bin counts must be at least 2");
        validate_tolerance(cfg.tol);
        const auto        prior   = PhasePrior::uniform();
        const std::size_t workers = default_worker_count();

        FidelityEstimate analytic;
        MiEstimate       mc;
        std::string      label;
        if(cfg.target == "quantum") {
            require(std::isfinite(cfg.eta) && cfg.eta >= 0.0, "--eta must be nonnegative");
            analytic = quantum_mz_fidelity(cfg.eta, prior, cfg.tol, cfg.tail_mass);
            const QuantumMzChannel channel({cfg.eta}, cfg.tail_mass);
            mc    = mi_plugin(sample_outcomes(channel, prior, cfg.samples, cfg.seed, workers), cfg.phi_bins, DiscreteIdentity{});
            label = "quantum eta=" + format_double(cfg.eta);
        } else if(cfg.target == "classical") {
            require(std::isfinite(cfg.e_in) && cfg.e_in >= 0.0, "--e must be nonnegative");
            require(std::isfinite(cfg.delta) && cfg.delta > 0.0, "--delta must be positive");
            analytic = noisy_classical_fidelity(cfg.e_in, cfg.delta, prior, cfg.tol);
            const NoisyClassicalChannel channel({cfg.e_in, cfg.delta});
            mc    = mi_plugin(sample_outcomes(channel, prior, cfg.samples, cfg.seed, workers), cfg.phi_bins,
                              AxisBins{{cfg.outcome_bins, cfg.outcome_bins}});
            label = "classical e=" + format_double(cfg.e_in) + " delta=" + format_double(cfg.delta);
        } else {
            throw UsageError("unknown --target '" + cfg.target + "' (quantum, classical)");
        }

        const double diff = std::abs(mc.jackknife_bits - analytic.bits);
        const bool   pass = !mc.degenerate && diff <= 3.0 * mc.std_error && diff <= 0.05;
        if(!pass) status = kExitNumeric;
        CsvTable t({"target", "analytic_bits", "analytic_err", "mc_bits", "mc_plugin_bits", "mc_miller_madow_bits",
                    "std_error", "samples", "seed", "bins", "verdict"});
        t.add_row({label, format_double(analytic.bits), format_double(analytic.numeric_error), format_double(mc.jackknife_bits),
                   format_double(mc.bits), format_double(mc.miller_madow_bits), format_double(mc.std_error),
                   std::to_string(cfg.samples), std::to_string(cfg.seed), mc.bin_spec, pass ? "PASS" : "FAIL"});
        return t.str();
    }

    struct Cli {
        std::unique_ptr<CLI::App> app;
        CLI::App                 *fidelity_quantum   = nullptr;
        CLI::App                 *fidelity_classical = nullptr;
        CLI::App                 *sweep              = nullptr;
        CLI::App                 *posterior          = nullptr;
        CLI::App                 *fisher             = nullptr;
        CLI::App                 *mc_check           = nullptr;
    };

    Cli build_cli(RunConfig &cfg) {
        Cli cli;
        cli.app = std::make_unique<CLI::App>("Measurement fidelity toolkit: Shannon mutual information of interferometric phase measurements");
        auto &app = *cli.app;
        app.require_subcommand(1);
        app.add_option("--config", cfg.config, "File of 'key = value' lines preloading flags");

        auto *fid = app.add_subcommand("fidelity", "Fidelity of one interferometer model");
        fid->require_subcommand(1);
        fid->fallthrough();

        cli.fidelity_quantum = fid->add_subcommand("quantum", "Coherent-state quantum interferometer");
        cli.fidelity_quantum->add_option("--eta", cfg.eta, "Mean photon number")->capture_default_str();
        cli.fidelity_quantum->add_option("--tail-mass", cfg.tail_mass, "Poisson truncation tail")->capture_default_str();
        add_tolerance(cli.fidelity_quantum, cfg);
        add_out(cli.fidelity_quantum, cfg);

        cli.fidelity_classical = fid->add_subcommand("classical", "Classical interferometer with Gaussian energy noise");
        cli.fidelity_classical->add_option("--e", cfg.e_in, "Input energy (photon-energy units)")->capture_default_str();
        cli.fidelity_classical->add_option("--delta", cfg.delta, "Noise width")->capture_default_str();
        add_tolerance(cli.fidelity_classical, cfg);
        add_out(cli.fidelity_classical, cfg);

        cli.sweep = app.add_subcommand("sweep", "Quantum vs classical fidelity over eta (classical E = eta, delta = sqrt(eta))");
        cli.sweep->add_option("--eta-min", cfg.eta_min)->capture_default_str();
        cli.sweep->add_option("--eta-max", cfg.eta_max)->capture_default_str();
        cli.sweep->add_option("--steps", cfg.steps)->capture_default_str();
        add_tolerance(cli.sweep, cfg);
        add_out(cli.sweep, cfg);

        cli.posterior = app.add_subcommand("posterior", "Phase posterior after one noisy classical measurement");
        cli.posterior->add_option("--e-c", cfg.e_c, "Observed energy in port c")->capture_default_str();
        cli.posterior->add_option("--e-d", cfg.e_d, "Observed energy in port d")->capture_default_str();
        cli.posterior->add_option("--e", cfg.e_in, "Input energy")->capture_default_str();
        cli.posterior->add_option("--delta", cfg.delta, "Noise width")->capture_default_str();
        cli.posterior->add_option("--grid", cfg.grid, "Phase grid points")->capture_default_str();
        add_out(cli.posterior, cfg);

        cli.fisher = app.add_subcommand("fisher", "Fisher information and Cramer-Rao bound of a built-in family");
        cli.fisher->add_option("--model", cfg.model, "bernoulli, poisson, quantum-mz or pure-qubit")->capture_default_str();
        cli.fisher->add_option("--x0", cfg.x0, "Parameter value")->capture_default_str();
        cli.fisher->add_option("--eta", cfg.eta, "Mean photon number (quantum-mz)")->capture_default_str();
        cli.fisher->add_option("--step", cfg.step, "Finite-difference step")->capture_default_str();
        cli.fisher->add_option("--tail-mass", cfg.tail_mass, "Poisson truncation tail (quantum-mz)")->capture_default_str();
        add_out(cli.fisher, cfg);

        cli.mc_check = app.add_subcommand("mc-check", "Cross-check quadrature fidelity against a Monte Carlo estimate");
        cli.mc_check->add_option("--target", cfg.target, "quantum or classical")->capture_default_str();
        cli.mc_check->add_option("--eta", cfg.eta)->capture_default_str();
        cli.mc_check->add_option("--e", cfg.e_in)->capture_default_str();
        cli.mc_check->add_option("--delta", cfg.delta)->capture_default_str();
        cli.mc_check->add_option("--n", cfg.samples, "Number of samples")->capture_default_str();
        cli.mc_check->add_option("--seed", cfg.seed)->capture_default_str();
        cli.mc_check->add_option("--phi-bins", cfg.phi_bins)->capture_default_str();
        cli.mc_check->add_option("--outcome-bins", cfg.outcome_bins, "Bins per energy axis (classical)")->capture_default_str();
        cli.mc_check->add_option("--tail-mass", cfg.tail_mass)->capture_default_str();
        add_tolerance(cli.mc_check, cfg);
        add_out(cli.mc_check, cfg);
        return cli;
    }

    std::map<std::string, std::string> read_config(const std::string &path) {
        std::ifstream in(path);
        if(!in) throw IoError("cannot read config file " + path);
        std::map<std::string, std::string> pairs;
        std::string                        line;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        for(int lineno = 1; std::getline(in, line); ++lineno) {
            line = trim(line.substr(0, line.find('#')));
            if(line.empty()) continue;
            const auto eq = line.find('=');
            if(eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
            pairs[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return pairs;
    }

    CLI::App *leaf_subcommand(CLI::App *app) {
        for(;;) {
            auto subs = app->get_subcommands();
            if(subs.empty()) return app;
            app = subs.front();
        }
    }

    void parse(Cli &cli, std::vector<std::string> args) {
        std::reverse(args.begin(), args.end());
        cli.app->parse(args);
    }

    void write_output(const std::string &path, const std::string &text, std::ostream &out) {
        if(path == "-") {
            out << text;
            return;
        }
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if(!file) throw IoError("cannot open " + path + " for writing");
        file << text;
        file.close();
        if(!file) throw IoError("failed writing " + path);
    }

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    RunConfig cfg;
    Cli       cli = build_cli(cfg);
    try {
        parse(cli, args);
        if(!cfg.config.empty()) {
            // Re-parse with config keys appended for flags the command line left unset.
            const auto          pairs = read_config(cfg.config);
            CLI::App           *leaf  = leaf_subcommand(cli.app.get());
            std::vector<std::string> merged = args;
            for(const auto *opt : leaf->get_options()) {
                if(opt->count() > 0) continue;
                for(const auto &name : opt->get_lnames()) {
                    if(auto it = pairs.find(name); it != pairs.end()) merged.push_back("--" + name + "=" + it->second);
                }
            }
            cfg = RunConfig{};
            cli = build_cli(cfg);
            parse(cli, merged);
        }
    } catch(const CLI::CallForHelp &e) {
        return cli.app->exit(e, out, err);
    } catch(const CLI::CallForAllHelp &e) {
        return cli.app->exit(e, out, err);
    } catch(const CLI::ParseError &e) {
        cli.app->exit(e, out, err);
        return kExitUsage;
    } catch(const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch(const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }

    int status = kExitOk;
    try {
        std::string text;
        if(cli.fidelity_quantum->parsed())
            text = cmd_fidelity_quantum(cfg);
        else if(cli.fidelity_classical->parsed())
            text = cmd_fidelity_classical(cfg);
        else if(cli.sweep->parsed())
            text = cmd_sweep(cfg, err, status);
        else if(cli.posterior->parsed())
            text = cmd_posterior(cfg, err);
        else if(cli.fisher->parsed())
            text = cmd_fisher(cfg);
        else if(cli.mc_check->parsed())
            text = cmd_mc_check(cfg, status);
        write_output(cfg.out, text, out);
    } catch(const UsageError &e) {
        err << "error: " << e.what() << "\n" << cli.app->help();
        return kExitUsage;
    } catch(const DomainError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch(const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch(const NumericalError &e) {
        err << "numerical failure: " << e.what() << " (best estimate " << format_double(e.best_estimate())
            << ", error bound " << format_double(e.error_bound()) << ")\n";
        return kExitNumeric;
    } catch(const ModelError &e) {
        err << "model failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return status;
}

} // namespace measfid
