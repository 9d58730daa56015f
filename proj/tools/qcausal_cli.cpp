#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcausal/qcausal.hpp"

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;

const std::set<std::string> kStrategies = {"classical",      "coherent",  "singlet",
                                           "reference",      "seq_bound", "indefinite_bound"};

// "-" selects stdout; anything else is opened as a file
class OutSink {
public:
    explicit OutSink(const std::string &path) {
        if (path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::invalid_argument("cannot open output file: " + path);
        }
    }
    std::ostream &stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

int cmd_curve(std::size_t d, std::size_t n_max, std::size_t n_step,
              std::vector<std::string> strategy_args, const std::string &out_path) {
    if (d < 2) throw std::invalid_argument("curve: --d must be at least 2");
    if (n_max < 1) throw std::invalid_argument("curve: --n-max must be at least 1");
    if (n_step < 1) throw std::invalid_argument("curve: --n-step must be at least 1");

    std::set<std::string> chosen;
    if (strategy_args.empty()) {
        chosen = kStrategies;
    } else {
        for (const auto &s : strategy_args) {
            if (!kStrategies.count(s))
                throw std::invalid_argument("curve: unknown strategy '" + s + "'");
            chosen.insert(s);
        }
    }

    OutSink sink(out_path);
    std::ostream &os = sink.stream();
    os << "n,d,strategy,p_err,log2_p_err\n";
    for (const auto &strat : chosen) {  // std::set gives (strategy, n) sort order
        for (std::size_t n = 1; n <= n_max; n += n_step) {
            double p = 0.0, l2 = 0.0;
            if (strat == "classical") {
                p = qcausal::p_classical(n, d);
                l2 = qcausal::log2_p_classical(n, d);
            } else if (strat == "coherent") {
                p = qcausal::p_coherent(n, d);
                l2 = qcausal::log2_p_coherent(n, d);
            } else if (strat == "singlet") {
                if (n < d) {
                    std::cerr << "curve: singlet skipped at n=" << n
                              << " (fewer uses than one group of d)\n";
                    continue;
                }
                p = qcausal::p_singlet(n, d);
                l2 = qcausal::log2_p_singlet(n, d);
            } else if (strat == "reference") {
                if (n % d != 0) {
                    std::cerr << "curve: reference skipped at n=" << n
                              << " (d does not divide n)\n";
                    continue;
                }
                p = qcausal::p_reference(n, d);
                l2 = qcausal::log2_p_reference(n, d);
            } else if (strat == "seq_bound") {
                p = qcausal::seq_lower_bound(n, d);
                l2 = qcausal::log2_seq_lower_bound(n, d);
            } else {
                p = qcausal::indefinite_lower_bound(n, d);
                l2 = qcausal::log2_indefinite_lower_bound(n, d);
            }
            os << n << "," << d << "," << strat << "," << qcausal::format_double(p) << ","
               << qcausal::format_double(l2) << "\n";
        }
    }
    os.flush();
    return 0;
}

int cmd_verify(double tol_override, bool fault_inject) {
    qcausal::VerifyOptions opt;
    opt.fault_inject_multiplicity = fault_inject;
    opt.tol_override = tol_override;
    if (fault_inject)
        std::cerr << "verify: fault injection active (multiplicity at n=4, d=2 forced to 3)\n";

    const auto checks = qcausal::run_acceptance_checks(opt);
    bool all_pass = true;
    for (const auto &c : checks) {
        std::cout << std::left << std::setw(34) << c.name << " expected=" << std::setw(28)
                  << c.expected << " actual=" << std::setw(28) << c.actual << " tol=" << std::setw(16)
                  << c.tolerance << (c.pass ? " PASS" : " FAIL") << "\n";
        all_pass = all_pass && c.pass;
    }
    std::cout.flush();
    return all_pass ? 0 : kExitChecksFailed;
}

int cmd_simulate(std::size_t d, std::size_t n, std::uint64_t trials, std::uint64_t seed,
                 const std::string &out_path) {
    if (trials < 100) throw std::invalid_argument("simulate: --trials must be at least 100");
    const auto opt = qcausal::classical_optimum(d, n);

    qcausal::Rng rng(seed);
    const auto mc = qcausal::monte_carlo_classical(d, n, opt.best_inputs, trials, rng);

    std::string pattern;
    for (std::size_t sym : opt.best_inputs) pattern += static_cast<char>('0' + sym);
    const double closed = opt.error_probability;
    const double se = *mc.std_err;
    const double z = se > 0.0 ? (mc.error_probability - closed) / se : 0.0;

    OutSink sink(out_path);
    std::ostream &os = sink.stream();
    os << "n,d,inputs_pattern,trials,p_hat,std_err,p_closed_form,z_score\n";
    os << n << "," << d << "," << pattern << "," << trials << ","
       << qcausal::format_double(mc.error_probability) << "," << qcausal::format_double(se) << ","
       << qcausal::format_double(closed) << "," << qcausal::format_double(z) << "\n";
    os.flush();
    return 0;
}

int cmd_claim(std::size_t d, double threshold) {
    const auto res = qcausal::claim_crossover(d, threshold);
    std::cout << "quantum_n=" << res.n_quantum << "\n";
    std::cout << "quantum_p=" << qcausal::format_double(res.p_quantum) << "\n";
    std::cout << "classical_n=" << res.n_classical << "\n";
    std::cout << "classical_p=" << qcausal::format_double(res.p_classical) << "\n";
    std::cout.flush();
    return 0;
}

int cmd_info() {
    std::cout << "qcausal 1.0.0\n";
    std::cout << "quantum vs classical discrimination of causal hypotheses\n";
    std::cout << "strategies: classical coherent singlet reference seq_bound indefinite_bound\n";
    std::cout << "subcommands: curve verify simulate claim info\n";
    std::cout.flush();
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"quantum vs classical discrimination of causal hypotheses"};
    app.require_subcommand(1);

    auto *curve = app.add_subcommand("curve", "error probability curves as CSV");
    std::size_t curve_d = 2, curve_nmax = 0, curve_step = 1;
    std::vector<std::string> curve_strats;
    std::string curve_out = "-";
    curve->add_option("--d", curve_d, "symbol dimension")->required();
    curve->add_option("--n-max", curve_nmax, "largest number of uses")->required();
    curve->add_option("--n-step", curve_step, "stride through n");
    curve->add_option("--strategy", curve_strats, "strategy to include (repeatable)");
    curve->add_option("--out", curve_out, "output path, - for stdout");

    auto *verify = app.add_subcommand("verify", "run the acceptance checks");
    double verify_tol = 0.0;
    bool verify_fault = false;
    verify->add_option("--threshold", verify_tol, "loosen comparison tolerances to this value");
    verify->add_flag("--fault-inject", verify_fault)->group("");

    auto *simulate = app.add_subcommand("simulate", "Monte Carlo classical discrimination as CSV");
    std::size_t sim_d = 2, sim_n = 0;
    std::uint64_t sim_trials = 100000, sim_seed = 0;
    std::string sim_out = "-";
    simulate->add_option("--d", sim_d, "symbol dimension")->required();
    simulate->add_option("--n", sim_n, "number of uses")->required();
    simulate->add_option("--trials", sim_trials, "number of Monte Carlo trials (at least 100)");
    simulate->add_option("--seed", sim_seed, "random seed");
    simulate->add_option("--out", sim_out, "output path, - for stdout");

    auto *claim = app.add_subcommand("claim", "smallest n meeting an error threshold");
    std::size_t claim_d = 2;
    double claim_threshold = 1e-6;
    claim->add_option("--d", claim_d, "symbol dimension");
    claim->add_option("--threshold", claim_threshold, "target error probability");

    auto *info = app.add_subcommand("info", "describe this tool");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (curve->parsed())
            return cmd_curve(curve_d, curve_nmax, curve_step, curve_strats, curve_out);
        if (verify->parsed()) return cmd_verify(verify_tol, verify_fault);
        if (simulate->parsed()) return cmd_simulate(sim_d, sim_n, sim_trials, sim_seed, sim_out);
        if (claim->parsed()) return cmd_claim(claim_d, claim_threshold);
        if (info->parsed()) return cmd_info();
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitChecksFailed;
    }
    return kExitUsage;
}
