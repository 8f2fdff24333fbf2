// lmce: batch front end for the solver and verification suites.
//
//   lmce solve|verify|sweep --config <path> [--out <dir>] [--seed <u64>]
//   lmce report --input <dir> [--out <dir>]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 solver non-convergence,
// 3 invalid input.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lmce/error.hpp"
#include "lmce/io.hpp"
#include "lmce/run.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string input;
    std::optional<std::uint64_t> seed;
};

void print_summary(const lmce::RunReport& report, const std::string& dir) {
    for (const auto& e : report.checks) {
        std::cout << (e.pass ? "PASS " : "FAIL ") << e.name << "  lhs=" << lmce::format_number(e.lhs)
                  << " rhs=" << lmce::format_number(e.rhs);
        if (!e.note.empty()) std::cout << "  (" << e.note << ")";
        std::cout << '\n';
    }
    if (report.solve) {
        std::cout << "solve: converged=" << (report.solve->converged ? "yes" : "no")
                  << " iterations=" << report.solve->iterations
                  << " residual=" << lmce::format_number(report.solve->final_residual) << '\n';
    }
    std::cout << "wrote " << dir << " (exit " << report.exit_code << ")\n";
}

int run_command(const std::string& command, const Options& opt) {
    if (command == "report") {
        std::string input = opt.input;
        if (input.empty() && !opt.config.empty()) input = lmce::load_config(opt.config).input;
        if (input.empty()) throw std::invalid_argument("report: --input <dir> is required");
        const std::string out = opt.out.empty() ? input : opt.out;
        const lmce::CsvTable table = lmce::cmd_report(input);
        lmce::write_text(std::filesystem::path(out) / "consolidated.csv", lmce::to_csv(table));
        std::cout << "merged " << table.rows.size() << " rows into " << out << "/consolidated.csv\n";
        return lmce::kExitOk;
    }

    lmce::RunConfig cfg = lmce::load_config(opt.config);
    if (!opt.out.empty()) cfg.out = opt.out;
    if (opt.seed) cfg.seed = *opt.seed;

    lmce::RunReport report;
    if (command == "solve") report = lmce::cmd_solve(cfg);
    else if (command == "verify") report = lmce::cmd_verify(cfg);
    else report = lmce::cmd_sweep(cfg);
    lmce::write_run_outputs(report, cfg.out);
    print_summary(report, cfg.out);
    return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for the 2D Lagrangian mean curvature equation"};
    app.require_subcommand(1, 1);
    Options opt;

    for (const char* name : {"solve", "verify", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config, "key=value or JSON config file")->required();
        sub->add_option("--out", opt.out, "output directory (overrides config)");
        sub->add_option("--seed", opt.seed, "rng seed (overrides config)");
    }
    auto* report = app.add_subcommand("report", "merge CSV tables below a directory");
    report->add_option("--input", opt.input, "directory to merge");
    report->add_option("--config", opt.config, "config file supplying 'input'");
    report->add_option("--out", opt.out, "where consolidated.csv goes (default: input)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return lmce::kExitInvalidInput;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run_command(command, opt);
    } catch (const lmce::NonConvergenceError& e) {
        std::cerr << "lmce: " << e.what() << '\n';
        return lmce::kExitNonConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << "lmce: invalid input: " << e.what() << '\n';
        return lmce::kExitInvalidInput;
    } catch (const lmce::PreconditionError& e) {
        std::cerr << "lmce: invalid input: " << e.what() << '\n';
        return lmce::kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "lmce: " << e.what() << '\n';
        return lmce::kExitInvalidInput;
    }
}
