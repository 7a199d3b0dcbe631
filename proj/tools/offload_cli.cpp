// offload: optimal spectrum-trading contracts for UAV offloading.
//
//   offload solve        --config PATH [--out DIR] [--no-kcap] [--threads N]
//   offload sweep        --config PATH [--out DIR] [--no-kcap] [--threads N]
//   offload oracle-check [--config PATH] [--seed N] [--instances N] [--corrupt-tiebreak]
//   offload dump-config  --config PATH
//
// Exit codes: 0 success, 1 validation error, 2 oracle mismatch, 3 I/O error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "offload/error.hpp"
#include "offload/experiments.hpp"
#include "offload/scenario.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitMismatch = 2;
constexpr int kExitIo = 3;

struct Flags {
    std::string config;
    std::string out;
    bool no_kcap = false;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
    std::optional<int> instances;
    bool corrupt_tiebreak = false;
};

offload::ScenarioConfig load(const Flags& f, bool require_ladder) {
    offload::ScenarioConfig c = f.config.empty() ? offload::ScenarioConfig{}
                                                 : offload::load_config(f.config, require_ladder);
    if (f.no_kcap) c.k_cap = false;
    if (f.threads) c.threads = *f.threads;
    if (!f.out.empty()) c.output_dir = f.out;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal spectrum-trading contracts between an MBS and UAV operators"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&f](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", f.config, "scenario YAML file");
        if (config_required) opt->required();
        sub->add_option("--threads", f.threads, "worker threads")->check(CLI::Range(1, 256));
        sub->add_flag("--no-kcap", f.no_kcap, "disable the saturation cap on per-type channels");
    };

    auto* solve = app.add_subcommand("solve", "solve one scenario for each configured objective");
    add_common(solve, true);
    solve->add_option("--out", f.out, "output directory (overrides output.dir)");

    auto* sweep = app.add_subcommand("sweep", "solve both objectives at every sweep value");
    add_common(sweep, true);
    sweep->add_option("--out", f.out, "output directory (overrides output.dir)");

    auto* oracle = app.add_subcommand("oracle-check", "compare the DP against exhaustive search");
    add_common(oracle, false);
    oracle->add_option("--seed", f.seed, "base seed (default 1)");
    oracle->add_option("--instances", f.instances, "number of random instances (default 200)")
        ->check(CLI::NonNegativeNumber);
    oracle->add_flag("--corrupt-tiebreak", f.corrupt_tiebreak,
                     "negative control: resolve DP ties toward larger choices");

    auto* dump = app.add_subcommand("dump-config", "print the canonical form of a config");
    dump->add_option("--config", f.config, "scenario YAML file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version are successful exits; usage errors are validation errors.
        return app.exit(e) == 0 ? 0 : kExitValidation;
    }

    try {
        if (solve->parsed()) {
            const auto c = load(f, true);
            offload::run_solve(c, c.output_dir, std::cout);
        } else if (sweep->parsed()) {
            const auto c = load(f, true);
            offload::run_sweep(c, c.output_dir, std::cout);
        } else if (oracle->parsed()) {
            const auto c = load(f, false);
            offload::OracleConfig o = c.oracle;
            if (f.seed) o.seed = *f.seed;
            if (f.instances) o.instances = *f.instances;
            offload::SolverOptions options = c.solver_options();
            if (f.corrupt_tiebreak) options.tie_break = offload::TieBreak::PreferLarger;
            const auto report = offload::run_oracle_check(o, options, std::cout);
            return report.passed() ? 0 : kExitMismatch;
        } else if (dump->parsed()) {
            std::cout << offload::dump_config(offload::load_config(f.config, false));
        }
    } catch (const offload::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const offload::ConfigError& e) {
        std::cerr << "config error: " << (f.config.empty() ? "" : f.config + ": ") << e.what() << '\n';
        return kExitValidation;
    } catch (const offload::SearchSpaceError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return kExitValidation;
    } catch (const offload::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
