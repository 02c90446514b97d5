#include "abmcalib/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <string>
#include <vector>

namespace {

void handle_interrupt(int) {
    abmcalib::cli::interrupt_flag().store(true);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian calibration of activity-based transport simulators"};
    app.require_subcommand(1);

    std::string config_path = "config.json";
    std::string init_dir = ".";
    std::string params_path;
    std::vector<std::string> from_csv;
    bool force = false;
    abmcalib::cli::CalibrateOptions calibrate_options;
    std::uint64_t seed = 0;
    std::size_t runs = 0;

    CLI::App* init = app.add_subcommand("init", "write a config template, space file and example targets");
    init->add_option("path", init_dir, "directory to initialize")->capture_default_str();
    init->add_flag("--force", force, "overwrite existing files");

    CLI::App* calibrate = app.add_subcommand("calibrate", "run the optimization loop");
    calibrate->add_option("--config", config_path, "configuration file")->capture_default_str();
    calibrate->add_flag("--resume", calibrate_options.resume, "continue from existing archives");
    calibrate->add_flag("--force", calibrate_options.force, "discard existing run artifacts");
    CLI::Option* seed_opt = calibrate->add_option("--seed", seed, "override the master seed");
    CLI::Option* runs_opt = calibrate->add_option("--runs", runs, "override the number of runs");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score one parameter file and print the cost");
    evaluate->add_option("--config", config_path, "configuration file")->capture_default_str();
    evaluate->add_option("--params", params_path, "name,value parameter file")->required();

    CLI::App* pareto = app.add_subcommand("pareto", "rebuild the nondominated-set report");
    pareto->add_option("--config", config_path, "configuration file")->capture_default_str();
    pareto->add_option("--from", from_csv, "evaluate-format CSV files instead of run archives");

    CLI::App* report = app.add_subcommand("report", "summarize run archives");
    report->add_option("--config", config_path, "configuration file")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    std::signal(SIGINT, handle_interrupt);
    std::signal(SIGTERM, handle_interrupt);

    if (init->parsed()) {
        return abmcalib::cli::cmd_init(init_dir, force);
    }
    if (calibrate->parsed()) {
        if (*seed_opt) calibrate_options.seed = seed;
        if (*runs_opt) calibrate_options.runs = runs;
        return abmcalib::cli::cmd_calibrate(config_path, calibrate_options);
    }
    if (evaluate->parsed()) {
        return abmcalib::cli::cmd_evaluate(config_path, params_path);
    }
    if (pareto->parsed()) {
        return abmcalib::cli::cmd_pareto(config_path, from_csv);
    }
    if (report->parsed()) {
        return abmcalib::cli::cmd_report(config_path);
    }
    return abmcalib::cli::kExitFailure;
}
