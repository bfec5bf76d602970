// qbl: command-line front end for the experiment harness.
//
//   qbl list
//   qbl run <experiment> [options]
//   qbl suite <name> [options]        same as `run suite:<name>`
//
// Exit status: 0 all checks passed, 1 a check failed, 2 bad configuration.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbl/qbl.hpp"

namespace {

struct Options {
    std::string experiment;
    std::optional<std::uint64_t> seed;
    std::string dims;
    std::string exponents;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> trials;
    std::optional<double> tolerance;
    std::optional<double> theta;
    std::string budget;
    std::string output;
    std::string config;
    std::vector<std::string> spaces;
    std::string method;
    std::optional<unsigned> threads;
    bool json = false;
};

void add_run_options(CLI::App *cmd, Options &o) {
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--dim,--dims", o.dims, "Dimension(s), comma separated");
    cmd->add_option("--exponents", o.exponents, "Exponents (p, theta, r or beta), comma separated");
    cmd->add_option("--samples", o.samples, "Monte-Carlo / sampling size");
    cmd->add_option("--trials", o.trials, "Number of trials");
    cmd->add_option("--tolerance", o.tolerance, "Tolerance for pass/fail checks");
    cmd->add_option("--theta", o.theta, "Interpolation parameter");
    cmd->add_option("--budget", o.budget, "Search budget: random_starts,refine_evals");
    cmd->add_option("--output", o.output, "Write the report here (.json or .csv)");
    cmd->add_option("--config", o.config, "Config file; its keys override flags");
    cmd->add_option("--space", o.spaces, "Space specification, repeatable (e.g. \"lp dim=2 p=0.5\")");
    cmd->add_option("--method", o.method, "Method selector (volume: auto|exact|monte-carlo)");
    cmd->add_option("--threads", o.threads, "Worker threads (never changes values)");
    cmd->add_flag("--json", o.json, "Print the full JSON report to stdout");
}

qbl::ExperimentConfig build_config(const Options &o) {
    qbl::ExperimentConfig c;
    c.experiment = o.experiment;
    if (o.seed)
        c.seed = *o.seed;
    if (!o.dims.empty())
        qbl::set_config_value(c, "dims", o.dims);
    if (!o.exponents.empty())
        qbl::set_config_value(c, "exponents", o.exponents);
    c.samples = o.samples;
    if (o.trials)
        c.trials = static_cast<std::size_t>(*o.trials);
    c.tolerance = o.tolerance;
    c.theta = o.theta;
    if (!o.budget.empty())
        qbl::set_config_value(c, "budget", o.budget);
    c.output = o.output;
    for (const std::string &s : o.spaces)
        c.spaces.push_back(qbl::SpaceSpec::parse(s));
    c.method = o.method;
    if (o.threads)
        c.threads = *o.threads;
    if (!o.config.empty())
        c = qbl::load_config(o.config, std::move(c));
    return c;
}

void print_catalogue() {
    for (const qbl::ExperimentInfo &e : qbl::list_experiments()) {
        std::cout << e.name << (e.observational ? "  [observational]" : "") << "\n    " << e.summary << "\n";
        for (const auto &[key, doc] : e.parameters)
            std::cout << "      --" << key << ": " << doc << "\n";
    }
}

int run_experiment(const Options &o) {
    const qbl::ExperimentConfig cfg = build_config(o);
    const qbl::ExperimentReport report = qbl::run(cfg);
    if (!cfg.output.empty())
        report.write(cfg.output);
    if (o.json) {
        std::cout << report.to_json().dump(2) << "\n";
    } else {
        std::cout << report.experiment << ": " << report.records.size() << " records, "
                  << report.verdicts.size() - report.failures() << "/" << report.verdicts.size()
                  << " checks passed";
        std::printf(" (%.2f s)\n", report.wall_clock_seconds);
        if (report.observational)
            std::cout << "note: " << report.note << "\n";
        if (report.records.size() <= 20)
            for (const qbl::Json &r : report.records)
                std::cout << "  " << r.dump() << "\n";
        for (const qbl::Verdict &v : report.verdicts)
            if (!v.pass)
                std::cout << "FAIL " << v.name << ": " << v.detail << "\n";
    }
    return report.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"qbl: finite-dimensional quasi-normed space laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(QBL_VERSION));

    Options opts;
    CLI::App *list = app.add_subcommand("list", "List experiments and their parameters");
    CLI::App *run = app.add_subcommand("run", "Run one experiment");
    run->add_option("experiment", opts.experiment, "Experiment name (see `qbl list`)")->required();
    add_run_options(run, opts);
    CLI::App *suite = app.add_subcommand("suite", "Run a suite, e.g. `qbl suite horn`");
    suite->add_option("name", opts.experiment, "Suite name without the suite: prefix")->required();
    add_run_options(suite, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    if (list->parsed()) {
        print_catalogue();
        return 0;
    }
    if (suite->parsed() && opts.experiment.rfind("suite:", 0) != 0)
        opts.experiment = "suite:" + opts.experiment;
    try {
        return run_experiment(opts);
    } catch (const qbl::Error &e) {
        std::cerr << "qbl: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "qbl: " << e.what() << "\n";
        return 2;
    }
}
