// experiment.hpp — End-to-end pipelines: dataset preparation, reservoir
// feature extraction, readout training, metric evaluation, result bundles on
// disk, and parameter sweeps over a worker pool.

#pragma once

#include "qrc/baselines.hpp"
#include "qrc/config.hpp"
#include "qrc/csv.hpp"
#include "qrc/features.hpp"
#include "qrc/mixer.hpp"
#include "qrc/readout.hpp"
#include "qrc/tasks.hpp"
#include "qrc/version.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace qrc {

struct TaskData {
    Dataset train;
    Dataset test;
    std::vector<double> all_inputs;  // train then test, in reservoir order
};

inline TaskData prepare_task(const ExperimentConfig& config) {
    config.validate();
    TaskData task;
    if (config.task == "sine_square") {
        Dataset full = gen_sine_square(config.train_waveforms + config.test_waveforms, config.seed);
        const Eigen::Index n_train = 8 * config.train_waveforms;
        const Eigen::Index n_test = 8 * config.test_waveforms;
        task.train.kind = task.test.kind = full.kind;
        task.train.seed = task.test.seed = full.seed;
        task.train.inputs = full.inputs.head(n_train);
        task.train.targets = full.targets.leftCols(n_train);
        task.test.inputs = full.inputs.segment(n_train, n_test);
        task.test.targets = full.targets.middleCols(n_train, n_test);
    } else {
        MackeyGlassConfig mg;
        mg.beta = config.mg_beta;
        mg.gamma = config.mg_gamma;
        mg.tau = config.mg_tau;
        mg.exponent = config.mg_exponent;
        mg.integration_step = config.mg_step;
        mg.warmup = config.mg_warmup;
        mg.length = config.train_len + config.test_len + config.delay_max;
        mg.initial_value = config.mg_x0;
        const RealVector series = gen_mackey_glass(mg);
        std::vector<int> delays;
        for (int d = config.delay_min; d <= config.delay_max; ++d) delays.push_back(d);
        auto [train, test] = make_delay_targets(series, delays, config.train_len, config.test_len);
        task.train = std::move(train);
        task.test = std::move(test);
    }
    task.all_inputs.assign(task.train.inputs.data(),
                           task.train.inputs.data() + task.train.inputs.size());
    task.all_inputs.insert(task.all_inputs.end(), task.test.inputs.data(),
                           task.test.inputs.data() + task.test.inputs.size());
    return task;
}

struct QuantumFeatures {
    FeatureMatrix full;  // complete basis-state readout plus bias row
    ReservoirDiagnostics diagnostics;
    double calibration_scale = 1.0;
    double eps0_a = 0.0;
    double eps0_b = 0.0;
};

// Calibrate the drive (when enabled) and stream the whole input sequence once
// with the complete basis-state readout; narrower readouts are row subsets.
inline QuantumFeatures quantum_features(const ExperimentConfig& config,
                                        std::span<const double> inputs) {
    MixerConfig mixer = config.mixer();
    QuantumFeatures out;
    if (config.calibrate) {
        CalibrationOptions cal;
        const double target = config.resolved_calibration_target();
        cal.target_low = 0.9 * target;
        cal.target_high = 1.1 * target;
        cal.truncation_guard = config.resolved_truncation_guard();
        const CalibrationResult res = calibrate_drive(inputs, mixer, cal);
        mixer = res.config;
        out.calibration_scale = res.scale;
    }
    out.eps0_a = mixer.eps0_a;
    out.eps0_b = mixer.eps0_b;
    ReservoirOptions options;
    options.bias_row = config.bias_row;
    options.truncation_guard = config.resolved_truncation_guard();
    ReadoutSpec full{mixer.spec.cutoff_a, mixer.spec.cutoff_b};
    ReservoirResult run = run_reservoir(inputs, mixer, full, options);
    out.full = std::move(run.features);
    out.diagnostics = run.diagnostics;
    return out;
}

// Rows of the full feature matrix belonging to a narrower readout (plus bias).
inline FeatureMatrix extract_readout(const FeatureMatrix& full, const ReadoutSpec& readout,
                                     const FockSpec& spec) {
    readout.validate(spec);
    FeatureMatrix sub;
    const int count = readout.count();
    sub.values.resize(count + (full.has_bias ? 1 : 0), full.values.cols());
    Eigen::Index r = 0;
    for (int na = 0; na <= readout.max_na; ++na) {
        for (int nb = 0; nb <= readout.max_nb; ++nb) {
            sub.values.row(r++) = full.values.row(spec.joint_index(na, nb));
        }
    }
    sub.names = readout_names(readout);
    if (full.has_bias) {
        sub.values.row(r) = full.values.row(full.values.rows() - 1);
        sub.names.push_back("bias");
        sub.has_bias = true;
    }
    return sub;
}

struct ExperimentMetrics {
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    RmseResult rmse;
    RealVector log_error;  // per delay, mean log10 |error|
    RealVector log_rmse;   // per delay, log10 rmse
    std::vector<int> delays;
    double calibration_scale = 1.0;
    ReservoirDiagnostics diagnostics;
    double wall_seconds = 0.0;
};

struct ExperimentResult {
    ExperimentMetrics metrics;
    FeatureMatrix features;  // at the configured readout
    FeatureMatrix quantum_full;  // complete basis readout (quantum runs only)
    ReadoutWeights weights;
    RealMatrix test_predictions;
    TaskData task;
    ExperimentConfig resolved;  // post-calibration, reproducible as-is
};

inline ExperimentResult run_point(const ExperimentConfig& config, const TaskData& task) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.task = task;
    result.resolved = config;
    result.resolved.g = config.resolved_g();
    result.resolved.calibration_target = config.resolved_calibration_target();

    if (config.reservoir == "quantum") {
        QuantumFeatures qf = quantum_features(config, task.all_inputs);
        result.metrics.calibration_scale = qf.calibration_scale;
        result.metrics.diagnostics = qf.diagnostics;
        result.resolved.eps0_a = qf.eps0_a;
        result.resolved.eps0_b = qf.eps0_b;
        result.resolved.calibrate = false;  // manifest reproduces without re-calibrating
        result.features =
            extract_readout(qf.full, ReadoutSpec{config.max_na, config.max_nb}, config.mixer().spec);
        result.quantum_full = std::move(qf.full);
    } else if (config.reservoir == "static") {
        StaticReservoirParams p;
        p.size = config.static_size;
        p.seed = config.static_seed;
        p.input_scale = config.input_scale;
        p.recurrent_scale = config.recurrent_scale;
        p.literal_broadcast = config.literal_broadcast;
        result.features = static_features(task.all_inputs, p, config.bias_row);
    } else {
        STOParams p;
        p.size = config.sto_size;
        p.seed = config.sto_seed;
        p.gamma_damping = config.sto_gamma;
        p.q_nonlinearity = config.sto_q;
        p.sigma = config.sto_sigma;
        p.input_gain = config.sto_input_gain;
        p.input_bias = config.sto_input_bias;
        p.dt = config.sto_dt;
        p.interval = config.segment;
        p.initial_power = config.sto_p0;
        p.w_low = config.sto_w_low;
        p.w_high = config.sto_w_high;
        result.features = sto_features(task.all_inputs, p, config.bias_row);
    }

    const auto n_train = static_cast<Eigen::Index>(task.train.inputs.size());
    const auto n_test = static_cast<Eigen::Index>(task.test.inputs.size());
    FitOptions fit_options{config.sv_cutoff, config.ridge};
    result.weights = fit(result.features.values.leftCols(n_train), task.train.targets, fit_options);
    result.test_predictions = predict(result.weights, result.features.values.rightCols(n_test));

    if (config.task == "sine_square") {
        const std::span<const double> pred(result.test_predictions.data(),
                                           static_cast<std::size_t>(n_test));
        const std::span<const double> target(task.test.targets.data(),
                                             static_cast<std::size_t>(n_test));
        result.metrics.accuracy = classification_accuracy(pred, target, config.threshold);
        result.metrics.rmse = rmse(pred, target);
    } else {
        result.metrics.delays = task.test.delays;
        result.metrics.log_error = log_error_curve(result.test_predictions, task.test.targets);
        result.metrics.log_rmse = log_rmse_curve(result.test_predictions, task.test.targets);
    }
    result.metrics.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

// ------------------------------ result bundle ---------------------------------

inline std::string metrics_csv(const ExperimentMetrics& m) {
    std::string out = "metric,delay,value\n";
    if (!std::isnan(m.accuracy)) {
        out += "accuracy,," + format_double(m.accuracy) + "\n";
        out += "rmse_paper,," + format_double(m.rmse.paper) + "\n";
        out += "rmse_standard,," + format_double(m.rmse.standard) + "\n";
    }
    for (Eigen::Index i = 0; i < m.log_error.size(); ++i) {
        out += "log_error," + std::to_string(m.delays[static_cast<std::size_t>(i)]) + "," +
               format_double(m.log_error(i)) + "\n";
        out += "log_rmse," + std::to_string(m.delays[static_cast<std::size_t>(i)]) + "," +
               format_double(m.log_rmse(i)) + "\n";
    }
    out += "calibration_scale,," + format_double(m.calibration_scale) + "\n";
    out += "mean_occupation_a,," + format_double(m.diagnostics.mean_occupation_a) + "\n";
    out += "mean_occupation_b,," + format_double(m.diagnostics.mean_occupation_b) + "\n";
    out += "max_edge_population,," + format_double(m.diagnostics.max_edge_population) + "\n";
    out += "wall_seconds,," + format_double(m.wall_seconds) + "\n";
    return out;
}

inline std::string predictions_csv(const ExperimentResult& r) {
    std::string out = "index,input";
    const Dataset& test = r.task.test;
    if (test.delays.empty()) {
        out += ",target,prediction";
    } else {
        for (int d : test.delays) out += ",target_" + std::to_string(d);
        for (int d : test.delays) out += ",pred_" + std::to_string(d);
    }
    out += '\n';
    for (Eigen::Index i = 0; i < test.inputs.size(); ++i) {
        out += std::to_string(i) + ',' + format_double(test.inputs(i));
        for (Eigen::Index row = 0; row < test.targets.rows(); ++row) {
            out += ',' + format_double(test.targets(row, i));
        }
        for (Eigen::Index row = 0; row < r.test_predictions.rows(); ++row) {
            out += ',' + format_double(r.test_predictions(row, i));
        }
        out += '\n';
    }
    return out;
}

inline std::string manifest_text(const ExperimentResult& r) {
    std::string out = "# qrc " + std::string(kVersion) + " run manifest\n";
    out += "# reproduce with: qrc run --config <this file>\n";
    out += "# wall_seconds = " + format_double(r.metrics.wall_seconds) + "\n";
    out += "# calibration_scale = " + format_double(r.metrics.calibration_scale) + "\n";
    out += serialize_config(r.resolved, true);
    return out;
}

inline void write_bundle(const ExperimentResult& result, const std::filesystem::path& outdir) {
    atomic_write(outdir / "features.csv", feature_matrix_csv(result.features));
    atomic_write(outdir / "weights.csv", weights_csv(result.weights, result.features.names));
    atomic_write(outdir / "predictions.csv", predictions_csv(result));
    atomic_write(outdir / "metrics.csv", metrics_csv(result.metrics));
    atomic_write(outdir / "manifest.cfg", manifest_text(result));
}

// Full pipeline: prepare the task, run the configured reservoir + readout, and
// write features.csv, weights.csv, predictions.csv, metrics.csv and
// manifest.cfg into `outdir`.
inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       const std::filesystem::path& outdir) {
    const TaskData task = prepare_task(config);
    ExperimentResult result = run_point(config, task);
    write_bundle(result, outdir);
    return result;
}

// --------------------------------- sweeps -------------------------------------

struct SweepRow {
    double value = 0.0;
    double mean_accuracy = std::numeric_limits<double>::quiet_NaN();
    double std_accuracy = 0.0;
    double rmse_paper = std::numeric_limits<double>::quiet_NaN();
    double mean_log_error_10_100 = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Fixed-size worker pool; tasks indexed 0..n-1, exceptions collected per task.
inline void parallel_for_tasks(int workers, int n_tasks,
                               const std::function<void(int)>& body,
                               std::vector<std::exception_ptr>& errors) {
    errors.assign(static_cast<std::size_t>(n_tasks), nullptr);
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 2;
    }
    workers = std::min(workers, n_tasks);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
}

inline double mean_tail_log_error(const ExperimentMetrics& m, int from_delay) {
    double acc = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < m.log_error.size(); ++i) {
        if (m.delays[static_cast<std::size_t>(i)] >= from_delay) {
            acc += m.log_error(i);
            ++count;
        }
    }
    return count > 0 ? acc / count : std::numeric_limits<double>::quiet_NaN();
}

} // namespace detail

// One experiment per sweep value (axis = neurons | g | kappa | delay), dataset
// generated once and shared. Results land in outdir/sweep.csv plus one result
// bundle per point; per-point failures leave the other points' output intact.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                       const std::filesystem::path& outdir) {
    config.validate();
    if (config.sweep_values.empty()) {
        throw ConfigError("run_sweep: sweep.values is empty");
    }
    std::vector<SweepRow> rows(config.sweep_values.size());
    std::vector<std::exception_ptr> errors;

    if (config.sweep_axis == "neurons" && config.reservoir == "quantum") {
        // One full-readout reservoir pass per dataset seed serves every count.
        std::vector<std::exception_ptr> seed_errors;
        std::vector<std::vector<double>> acc_matrix(
            static_cast<std::size_t>(config.sweep_seeds));
        detail::parallel_for_tasks(
            config.workers, config.sweep_seeds,
            [&](int s) {
                ExperimentConfig point = config;
                point.seed = config.seed + static_cast<std::uint64_t>(s);
                const TaskData task = prepare_task(point);
                QuantumFeatures qf = quantum_features(point, task.all_inputs);
                const auto n_train = static_cast<Eigen::Index>(task.train.inputs.size());
                const auto n_test = static_cast<Eigen::Index>(task.test.inputs.size());
                for (double value : point.sweep_values) {
                    const int count = static_cast<int>(std::llround(value));
                    const int side = static_cast<int>(std::llround(std::sqrt(double(count))));
                    if (side * side != count) {
                        throw ConfigError("neuron sweep values must be perfect squares, got " +
                                          std::to_string(count));
                    }
                    FeatureMatrix sub = extract_readout(qf.full, ReadoutSpec{side - 1, side - 1},
                                                        point.mixer().spec);
                    const ReadoutWeights w =
                        fit(sub.values.leftCols(n_train), task.train.targets,
                            FitOptions{point.sv_cutoff, point.ridge});
                    const RealMatrix pred = predict(w, sub.values.rightCols(n_test));
                    acc_matrix[static_cast<std::size_t>(s)].push_back(classification_accuracy(
                        {pred.data(), static_cast<std::size_t>(n_test)},
                        {task.test.targets.data(), static_cast<std::size_t>(n_test)},
                        point.threshold));
                }
            },
            seed_errors);
        for (const auto& e : seed_errors) {
            if (e) std::rethrow_exception(e);
        }
        for (std::size_t v = 0; v < config.sweep_values.size(); ++v) {
            double mean = 0.0;
            for (const auto& seeds : acc_matrix) mean += seeds[v];
            mean /= static_cast<double>(acc_matrix.size());
            double var = 0.0;
            for (const auto& seeds : acc_matrix) var += (seeds[v] - mean) * (seeds[v] - mean);
            rows[v] = SweepRow{config.sweep_values[v], mean,
                               std::sqrt(var / static_cast<double>(acc_matrix.size())),
                               std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN()};
        }
    } else if (config.sweep_axis == "neurons") {
        const TaskData task = prepare_task(config);
        std::vector<int> sizes;
        for (double v : config.sweep_values) sizes.push_back(static_cast<int>(std::llround(v)));
        const auto table = baseline_sweep(task.train, task.test, sizes,
                                          config.reservoir == "static" ? BaselineKind::Static
                                                                       : BaselineKind::Sto,
                                          config.sweep_seeds, config.sweep_base_seed);
        for (std::size_t v = 0; v < table.size(); ++v) {
            rows[v] = SweepRow{static_cast<double>(table[v].size), table[v].mean_accuracy,
                               table[v].std_accuracy, std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN()};
        }
    } else if (config.sweep_axis == "delay") {
        ExperimentConfig point = config;
        point.task = "mackey_glass";
        point.delay_min = 1;
        point.delay_max = 1;
        for (double v : config.sweep_values) {
            point.delay_max = std::max(point.delay_max, static_cast<int>(std::llround(v)));
        }
        const TaskData task = prepare_task(point);
        const ExperimentResult res = run_point(point, task);
        for (std::size_t v = 0; v < config.sweep_values.size(); ++v) {
            const int d = static_cast<int>(std::llround(config.sweep_values[v]));
            SweepRow row;
            row.value = d;
            for (std::size_t k = 0; k < res.metrics.delays.size(); ++k) {
                if (res.metrics.delays[k] == d) {
                    row.mean_log_error_10_100 = res.metrics.log_error(static_cast<Eigen::Index>(k));
                }
            }
            rows[v] = row;
        }
    } else {
        // g or kappa: one full experiment per point
        const TaskData task = prepare_task(config);
        detail::parallel_for_tasks(
            config.workers, static_cast<int>(config.sweep_values.size()),
            [&](int i) {
                const double value = config.sweep_values[static_cast<std::size_t>(i)];
                ExperimentConfig point = config;
                if (config.sweep_axis == "g") {
                    point.g = value;
                } else {
                    point.kappa_a = config.kappa_a * value;
                    point.kappa_b = config.kappa_b * value;
                }
                const ExperimentResult res = run_point(point, task);
                SweepRow row;
                row.value = value;
                row.mean_accuracy = res.metrics.accuracy;
                row.rmse_paper = res.metrics.rmse.paper;
                if (res.metrics.log_error.size() > 0) {
                    row.mean_log_error_10_100 = detail::mean_tail_log_error(res.metrics, 10);
                }
                rows[static_cast<std::size_t>(i)] = row;
                atomic_write(outdir / ("point_" + format_double(value)) / "metrics.csv",
                             metrics_csv(res.metrics));
            },
            errors);
    }

    std::string csv = "value,mean_accuracy,std_accuracy,rmse_paper,mean_log_error_10_100\n";
    for (const SweepRow& r : rows) {
        csv += format_double(r.value) + ',' + format_double(r.mean_accuracy) + ',' +
               format_double(r.std_accuracy) + ',' + format_double(r.rmse_paper) + ',' +
               format_double(r.mean_log_error_10_100) + '\n';
    }
    atomic_write(outdir / "sweep.csv", csv);
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

} // namespace qrc
