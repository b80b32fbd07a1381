// qrc — command-line driver for the two-oscillator reservoir experiments.
//
// Subcommands:
//   run              one experiment -> features/weights/predictions/metrics/manifest
//   sweep            one experiment per sweep value -> sweep.csv + per-point bundles
//   calibrate-drive  report the drive scale for the configured task
//   validate         physics-invariant suite (no task numbers)
//   gen-data         write train/test dataset CSVs only
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include "qrc/checks.hpp"
#include "qrc/config.hpp"
#include "qrc/experiment.hpp"
#include "qrc/version.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out_dir;
    bool print_config = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_file, "Configuration file (key = value with [sections])");
    cmd->add_option("--set", args.overrides, "Override, e.g. --set mixer.g=3.1e7")->take_all();
    cmd->add_option("--out", args.out_dir, "Output directory (overrides experiment.output_dir)");
    cmd->add_flag("--print-config", args.print_config, "Print the resolved configuration and exit");
}

qrc::ExperimentConfig load_config(const CommonArgs& args) {
    qrc::ExperimentConfig config;
    if (!args.config_file.empty()) {
        std::ifstream in(args.config_file);
        if (!in) {
            throw qrc::ConfigError("cannot open config file '" + args.config_file + "'");
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        qrc::apply_config_text(config, buffer.str(), args.config_file);
    }
    for (const std::string& o : args.overrides) {
        qrc::apply_config_override(config, o);
    }
    if (!args.out_dir.empty()) {
        config.output_dir = args.out_dir;
    }
    config.validate();
    return config;
}

std::filesystem::path resolve_output_dir(const qrc::ExperimentConfig& config) {
    std::filesystem::path dir = config.output_dir;
    if (dir.is_relative()) {
        if (const char* root = std::getenv("QRC_OUTPUT_ROOT")) {
            dir = std::filesystem::path(root) / dir;
        }
    }
    return dir;
}

int cmd_run(const CommonArgs& args) {
    const qrc::ExperimentConfig config = load_config(args);
    if (args.print_config) {
        std::cout << qrc::serialize_config(config, true);
        return 0;
    }
    const std::filesystem::path outdir = resolve_output_dir(config);
    const qrc::ExperimentResult result = qrc::run_experiment(config, outdir);
    if (config.task == "sine_square") {
        std::printf("accuracy %.6f  rmse_paper %.6g  rmse_standard %.6g\n", result.metrics.accuracy,
                    result.metrics.rmse.paper, result.metrics.rmse.standard);
    } else {
        std::printf("delays %d..%d  mean log error %.4f\n", config.delay_min, config.delay_max,
                    result.metrics.log_error.mean());
    }
    if (config.reservoir == "quantum") {
        std::printf("calibration scale %.6g  mean occupation %.3f/%.3f  max edge %.3g\n",
                    result.metrics.calibration_scale, result.metrics.diagnostics.mean_occupation_a,
                    result.metrics.diagnostics.mean_occupation_b,
                    result.metrics.diagnostics.max_edge_population);
    }
    std::printf("results in %s\n", outdir.string().c_str());
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    const qrc::ExperimentConfig config = load_config(args);
    if (args.print_config) {
        std::cout << qrc::serialize_config(config, true);
        return 0;
    }
    const std::filesystem::path outdir = resolve_output_dir(config);
    const auto rows = qrc::run_sweep(config, outdir);
    std::printf("%-12s %-14s %-12s\n", "value", "mean_accuracy", "log_err_10_100");
    for (const auto& r : rows) {
        std::printf("%-12g %-14.6f %-12.4f\n", r.value, r.mean_accuracy, r.mean_log_error_10_100);
    }
    std::printf("sweep table in %s\n", (outdir / "sweep.csv").string().c_str());
    return 0;
}

int cmd_calibrate(const CommonArgs& args) {
    const qrc::ExperimentConfig config = load_config(args);
    const qrc::TaskData task = qrc::prepare_task(config);
    qrc::CalibrationOptions options;
    const double target = config.resolved_calibration_target();
    options.target_low = 0.9 * target;
    options.target_high = 1.1 * target;
    options.truncation_guard = config.resolved_truncation_guard();
    const qrc::CalibrationResult result = qrc::calibrate_drive(task.all_inputs, config.mixer(), options);
    std::printf("task %s: scale %.8g\n", config.task.c_str(), result.scale);
    std::printf("eps0_a %.8g -> %.8g\n", config.eps0_a, result.config.eps0_a);
    std::printf("eps0_b %.8g -> %.8g\n", config.eps0_b, result.config.eps0_b);
    std::printf("max mean occupation %.4f (band %.3f..%.3f), max edge population %.3g (guard %.3g)\n",
                result.achieved_metric, options.target_low, options.target_high,
                result.max_edge_population, config.resolved_truncation_guard());
    std::printf("iterations %d\n", result.iterations);
    return 0;
}

int cmd_validate(const CommonArgs& args) {
    const qrc::ExperimentConfig config = load_config(args);
    const auto checks = qrc::physics_invariant_suite(config.mixer());
    bool all_pass = true;
    for (const auto& c : checks) {
        std::printf("%-32s %s  measured %.6g (threshold %.6g)%s%s\n", c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.measured, c.threshold,
                    c.detail.empty() ? "" : "  -- ", c.detail.c_str());
        all_pass = all_pass && c.pass;
    }
    return all_pass ? 0 : 3;
}

int cmd_gen_data(const CommonArgs& args) {
    const qrc::ExperimentConfig config = load_config(args);
    const std::filesystem::path outdir = resolve_output_dir(config);
    const qrc::TaskData task = qrc::prepare_task(config);
    qrc::atomic_write(outdir / "train.csv", qrc::dataset_csv(task.train));
    qrc::atomic_write(outdir / "test.csv", qrc::dataset_csv(task.test));
    std::printf("wrote %s and %s\n", (outdir / "train.csv").string().c_str(),
                (outdir / "test.csv").string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum reservoir computing on two parametrically coupled oscillators"};
    app.set_version_flag("--version", qrc::kVersion);
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, cal_args, val_args, gen_args;
    add_common(app.add_subcommand("run", "Run one experiment"), run_args);
    add_common(app.add_subcommand("sweep", "Run a parameter sweep"), sweep_args);
    add_common(app.add_subcommand("calibrate-drive", "Calibrate the drive amplitude"), cal_args);
    add_common(app.add_subcommand("validate", "Run the physics-invariant suite"), val_args);
    add_common(app.add_subcommand("gen-data", "Generate dataset CSVs"), gen_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("run")) return cmd_run(run_args);
        if (app.got_subcommand("sweep")) return cmd_sweep(sweep_args);
        if (app.got_subcommand("calibrate-drive")) return cmd_calibrate(cal_args);
        if (app.got_subcommand("validate")) return cmd_validate(val_args);
        if (app.got_subcommand("gen-data")) return cmd_gen_data(gen_args);
    } catch (const qrc::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 2;
}
