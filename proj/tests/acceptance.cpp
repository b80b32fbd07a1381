// Acceptance suite: one pass/fail line per criterion, exit 0 only if all pass.
//
//   1  sine/square, 16 neurons: accuracy >= 0.99 on the held-out test set
//   2  sine/square,  9 neurons: accuracy >= 0.99 and rmse_paper <= 0.05
//   3  neuron-count crossings: quantum(~9) < dynamic(~24) < static(~40),
//      each within +-30%, averaged over 5 seeds
//   4  Mackey-Glass: (a) delay/log-error Spearman > 0.8 (delays 1-50,
//      window-5 smoothing), (b) doubling kappa raises the mean log error over
//      delays 10-100, (c) g/4 raises it
//   5  physics invariants (trace, positivity, normalization, swap period,
//      decay law, RK4 order)
//   6  readout oracles (pseudoinverse identities, normal equations, RMSE
//      definition relation)
//   7  Mackey-Glass generator: fixed point to 1e-12 over 1e4 steps;
//      twin-trajectory separation > 0.05 within 500 samples from a 1e-6
//      perturbation

#include "qrc/checks.hpp"
#include "qrc/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <numeric>
#include <random>
#include <string>
#include <vector>

using namespace qrc;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// centered moving average, window shrinking at the edges
RealVector smooth_window5(const RealVector& v) {
    RealVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, i - 2);
        const Eigen::Index hi = std::min<Eigen::Index>(v.size() - 1, i + 2);
        out(i) = v.segment(lo, hi - lo + 1).mean();
    }
    return out;
}

double spearman(const RealVector& y) {
    const auto n = static_cast<std::size_t>(y.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return y(static_cast<Eigen::Index>(a)) < y(static_cast<Eigen::Index>(b));
    });
    std::vector<double> rank(n);
    for (std::size_t pos = 0; pos < n;) {
        std::size_t end = pos;
        while (end + 1 < n && y(static_cast<Eigen::Index>(order[end + 1])) ==
                                  y(static_cast<Eigen::Index>(order[pos]))) {
            ++end;
        }
        const double mean_rank = 0.5 * (pos + end) + 1.0;
        for (std::size_t k = pos; k <= end; ++k) rank[order[k]] = mean_rank;
        pos = end + 1;
    }
    // x is the delay index 1..n (already sorted, ranks 1..n)
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = rank[i] - static_cast<double>(i + 1);
        d2 += d * d;
    }
    return 1.0 - 6.0 * d2 / (static_cast<double>(n) * (static_cast<double>(n) * n - 1.0));
}

double accuracy_for_readout(const FeatureMatrix& full, const TaskData& task, int side,
                            const ExperimentConfig& config) {
    FeatureMatrix sub = extract_readout(full, ReadoutSpec{side - 1, side - 1}, config.mixer().spec);
    const auto n_train = static_cast<Eigen::Index>(task.train.inputs.size());
    const auto n_test = static_cast<Eigen::Index>(task.test.inputs.size());
    const ReadoutWeights w = fit(sub.values.leftCols(n_train), task.train.targets,
                                 FitOptions{config.sv_cutoff, config.ridge});
    const RealMatrix pred = predict(w, sub.values.rightCols(n_test));
    return classification_accuracy({pred.data(), static_cast<std::size_t>(n_test)},
                                   {task.test.targets.data(), static_cast<std::size_t>(n_test)},
                                   config.threshold);
}

template <typename Rows>
int crossing_size(const Rows& rows, double threshold = 0.99) {
    for (const auto& r : rows) {
        if (r.mean_accuracy >= threshold) return static_cast<int>(r.size);
    }
    return -1;
}

struct QuantumSweepResult {
    std::vector<int> counts;
    std::vector<double> mean_accuracy;
};

} // namespace

// --------------------------- criteria 1 + 2 + 3 -------------------------------

static void run_sine_square_criteria() {
    ExperimentConfig config;  // defaults: quantum, sine_square, 16 neurons, seed 42
    const std::filesystem::path outdir = "acceptance_out/sine_square_16";

    ExperimentResult seed42;
    try {
        seed42 = run_experiment(config, outdir);
    } catch (const std::exception& e) {
        report(1, false, std::string("sine/square run failed: ") + e.what());
        report(2, false, "skipped (criterion 1 run failed)");
        report(3, false, "skipped (criterion 1 run failed)");
        return;
    }

    // truncation validity at the operating point: re-run a representative
    // stretch with the cutoff raised to 9 photons; the measured features must
    // be insensitive to the cutoff
    double truncation_shift = 1.0;
    try {
        const std::size_t probe_len = 200;
        std::vector<double> probe(seed42.task.all_inputs.begin(),
                                  seed42.task.all_inputs.begin() + probe_len);
        ExperimentConfig wide = seed42.resolved;  // calibrated eps0, calibrate = false
        ReservoirOptions opt;
        opt.truncation_guard = 0.0;
        MixerConfig m7 = wide.mixer();
        MixerConfig m9 = wide.mixer();
        m9.spec = FockSpec{9, 9};
        const auto run7 = run_reservoir(probe, m7, ReadoutSpec{3, 3}, opt);
        const auto run9 = run_reservoir(probe, m9, ReadoutSpec{3, 3}, opt);
        truncation_shift = (run7.features.values - run9.features.values).cwiseAbs().maxCoeff();
    } catch (const std::exception& e) {
        std::printf("     (cutoff-9 convergence probe failed: %s)\n", e.what());
    }

    report(1, seed42.metrics.accuracy >= 0.99 && truncation_shift < 1e-4,
           "sine/square 16 neurons: accuracy " + fmt(seed42.metrics.accuracy) +
               " (>= 0.99 required; rmse_paper " + fmt(seed42.metrics.rmse.paper) +
               ", calibration scale " + fmt(seed42.metrics.calibration_scale) +
               ", cutoff-9 feature shift " + fmt(truncation_shift) + " < 1e-4)");

    // criterion 2: 9-neuron readout of the same reservoir trajectory
    {
        FeatureMatrix sub = extract_readout(seed42.quantum_full, ReadoutSpec{2, 2}, config.mixer().spec);
        const auto n_train = static_cast<Eigen::Index>(seed42.task.train.inputs.size());
        const auto n_test = static_cast<Eigen::Index>(seed42.task.test.inputs.size());
        const ReadoutWeights w = fit(sub.values.leftCols(n_train), seed42.task.train.targets);
        const RealMatrix pred = predict(w, sub.values.rightCols(n_test));
        const double acc =
            classification_accuracy({pred.data(), static_cast<std::size_t>(n_test)},
                                    {seed42.task.test.targets.data(), static_cast<std::size_t>(n_test)});
        const RmseResult r = rmse({pred.data(), static_cast<std::size_t>(n_test)},
                                  {seed42.task.test.targets.data(), static_cast<std::size_t>(n_test)});
        report(2, acc >= 0.99 && r.paper <= 0.05,
               "sine/square 9 neurons: accuracy " + fmt(acc) + " (>= 0.99), rmse_paper " +
                   fmt(r.paper) + " (<= 0.05)");
    }

    // criterion 3: three sweeps, 5 seeds each
    const std::vector<int> quantum_counts{1, 4, 9, 16, 25};
    QuantumSweepResult quantum;
    quantum.counts = quantum_counts;
    quantum.mean_accuracy.assign(quantum_counts.size(), 0.0);

    // seed 42 reuses the criterion-1 trajectory; 43..46 run here, reusing the
    // calibrated drive (the waveform statistics are seed-independent)
    std::vector<std::vector<double>> acc(5);
    for (std::size_t k = 0; k < quantum_counts.size(); ++k) {
        acc[0].push_back(
            accuracy_for_readout(seed42.quantum_full, seed42.task, static_cast<int>(std::sqrt(
                                      static_cast<double>(quantum_counts[k]))), config));
    }
    ExperimentConfig calibrated = config;
    calibrated.calibrate = false;
    calibrated.eps0_a = seed42.resolved.eps0_a;
    calibrated.eps0_b = seed42.resolved.eps0_b;
    std::vector<std::future<std::vector<double>>> futures;
    for (int s = 1; s <= 4; ++s) {
        futures.push_back(std::async(std::launch::async, [&, s]() {
            ExperimentConfig point = calibrated;
            point.seed = config.seed + static_cast<std::uint64_t>(s);
            const TaskData task = prepare_task(point);
            QuantumFeatures qf = quantum_features(point, task.all_inputs);
            std::vector<double> out;
            for (int count : quantum_counts) {
                out.push_back(accuracy_for_readout(
                    qf.full, task, static_cast<int>(std::sqrt(static_cast<double>(count))), point));
            }
            return out;
        }));
    }
    bool quantum_ok = true;
    std::string quantum_error;
    for (std::size_t s = 0; s < futures.size(); ++s) {
        try {
            acc[s + 1] = futures[s].get();
        } catch (const std::exception& e) {
            quantum_ok = false;
            quantum_error = e.what();
        }
    }

    if (!quantum_ok) {
        report(3, false, std::string("quantum sweep failed: ") + quantum_error);
        return;
    }
    for (std::size_t k = 0; k < quantum_counts.size(); ++k) {
        double mean = 0.0;
        for (const auto& seeds : acc) mean += seeds[k];
        quantum.mean_accuracy[k] = mean / static_cast<double>(acc.size());
    }
    int quantum_cross = -1;
    for (std::size_t k = 0; k < quantum_counts.size(); ++k) {
        if (quantum.mean_accuracy[k] >= 0.99) {
            quantum_cross = quantum_counts[k];
            break;
        }
    }

    const TaskData task42 = seed42.task;
    const std::vector<int> static_sizes{16, 24, 32, 40, 48, 56, 64};
    const std::vector<int> sto_sizes{8, 12, 16, 20, 24, 28, 32, 40};
    const auto static_table =
        baseline_sweep(task42.train, task42.test, static_sizes, BaselineKind::Static, 5, 1);
    const auto sto_table =
        baseline_sweep(task42.train, task42.test, sto_sizes, BaselineKind::Sto, 5, 1);
    const int static_cross = crossing_size(static_table);
    const int sto_cross = crossing_size(sto_table);

    std::string detail = "crossings: quantum " + std::to_string(quantum_cross) + " (paper 9, band 6.3..11.7), dynamic " +
                         std::to_string(sto_cross) + " (paper 24, band 16.8..31.2), static " +
                         std::to_string(static_cross) + " (paper 40, band 28..52)";
    detail += "; quantum acc";
    for (std::size_t k = 0; k < quantum_counts.size(); ++k) {
        detail += " " + std::to_string(quantum_counts[k]) + ":" + fmt(quantum.mean_accuracy[k]);
    }
    const bool in_bands = quantum_cross >= 7 && quantum_cross <= 11 && sto_cross >= 17 &&
                          sto_cross <= 31 && static_cross >= 28 && static_cross <= 52;
    const bool ordered = quantum_cross > 0 && sto_cross > 0 && static_cross > 0 &&
                         quantum_cross < sto_cross && sto_cross < static_cross;
    report(3, in_bands && ordered, detail);
}

// -------------------------------- criterion 4 ---------------------------------

static void run_mackey_glass_criterion() {
    ExperimentConfig base;
    base.task = "mackey_glass";
    try {
        const TaskData task = prepare_task(base);

        auto run_with = [&](double kappa_mul, double g_div) {
            ExperimentConfig point = base;
            point.kappa_a *= kappa_mul;
            point.kappa_b *= kappa_mul;
            point.g = base.resolved_g() / g_div;
            return run_point(point, task);
        };

        auto fut_base = std::async(std::launch::async, run_with, 1.0, 1.0);
        auto fut_kappa = std::async(std::launch::async, run_with, 2.0, 1.0);
        const ExperimentResult res_base = fut_base.get();
        write_bundle(res_base, "acceptance_out/mackey_glass_base");
        auto fut_g = std::async(std::launch::async, run_with, 1.0, 4.0);
        const ExperimentResult res_kappa = fut_kappa.get();
        const ExperimentResult res_g = fut_g.get();

        const RealVector smoothed = smooth_window5(res_base.metrics.log_error.head(50));
        const double rho = spearman(smoothed);

        auto tail_mean = [](const ExperimentResult& r) {
            return detail::mean_tail_log_error(r.metrics, 10);
        };
        const double base_tail = tail_mean(res_base);
        const double kappa_tail = tail_mean(res_kappa);
        const double g_tail = tail_mean(res_g);

        const bool pass_a = rho > 0.8;
        const bool pass_b = kappa_tail > base_tail;
        const bool pass_c = g_tail > base_tail;
        report(4, pass_a && pass_b && pass_c,
               std::string("Mackey-Glass: (a) Spearman ") + fmt(rho) + " (> 0.8 required, " +
                   (pass_a ? "ok" : "FAIL") + "); (b) kappa x2 mean log error d10-100 " +
                   fmt(kappa_tail) + " vs base " + fmt(base_tail) + " (" +
                   (pass_b ? "raised, ok" : "not raised, FAIL") + "); (c) g/4 " + fmt(g_tail) +
                   " vs base " + fmt(base_tail) + " (" + (pass_c ? "raised, ok" : "not raised, FAIL") +
                   ")");
    } catch (const std::exception& e) {
        report(4, false, std::string("Mackey-Glass pipeline failed: ") + e.what());
    }
}

// ------------------------------- criterion 5 ----------------------------------

static void run_physics_criterion() {
    ExperimentConfig config;
    config.task = "mackey_glass";  // default g = 2*pi*20 MHz, the documented base point
    try {
        const auto checks = physics_invariant_suite(config.mixer());
        bool all = true;
        std::string detail = "physics invariants:";
        for (const auto& c : checks) {
            all = all && c.pass;
            detail += " " + c.name + "=" + fmt(c.measured) + (c.pass ? "(ok)" : "(FAIL)");
        }
        report(5, all, detail);
    } catch (const std::exception& e) {
        report(5, false, std::string("physics suite failed: ") + e.what());
    }
}

// ------------------------------- criterion 6 ----------------------------------

static void run_readout_criterion() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_matrix = [&](Eigen::Index rows, Eigen::Index cols) {
        RealMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
        }
        return m;
    };
    auto pinv = [](const RealMatrix& f) {
        Eigen::JacobiSVD<RealMatrix> svd(f, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(svd.singularValues().size());
        for (Eigen::Index k = 0; k < inv.size(); ++k) {
            if (svd.singularValues()(k) > 1e-12 * svd.singularValues()(0)) {
                inv(k) = 1.0 / svd.singularValues()(k);
            }
        }
        return RealMatrix(svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose());
    };

    double worst_identity = 0.0;
    double worst_normal = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto rows = static_cast<Eigen::Index>(2 + rng() % 6);
        const auto cols = static_cast<Eigen::Index>(rows + 1 + rng() % 10);
        RealMatrix f = random_matrix(rows, cols);
        if (trial % 4 == 0) f.row(rows - 1) = f.row(0);
        const RealMatrix fp = pinv(f);
        worst_identity = std::max(worst_identity, (f * fp * f - f).cwiseAbs().maxCoeff());
        worst_identity = std::max(worst_identity, (fp * f * fp - fp).cwiseAbs().maxCoeff());
        if (trial % 4 != 0) {  // full-rank cases: compare with the normal equations
            const RealMatrix y = random_matrix(2, cols);
            const ReadoutWeights w = fit(f, y);
            const RealMatrix w_ref = y * f.transpose() * (f * f.transpose()).inverse();
            worst_normal = std::max(worst_normal, (w.values - w_ref).cwiseAbs().maxCoeff());
        }
    }

    double worst_relation = 0.0;
    for (int n : {2, 7, 100, 1000}) {
        std::vector<double> pred(static_cast<std::size_t>(n)), target(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            pred[i] = gauss(rng);
            target[i] = gauss(rng);
        }
        const RmseResult r = rmse(pred, target);
        worst_relation = std::max(
            worst_relation, std::abs(r.paper * std::sqrt(static_cast<double>(n)) - r.standard) /
                                 r.standard);
    }

    const bool pass = worst_identity < 1e-10 && worst_normal < 1e-10 && worst_relation <= 1e-15;
    report(6, pass,
           "readout oracles: pseudoinverse identities " + fmt(worst_identity) +
               " (< 1e-10), normal equations " + fmt(worst_normal) +
               " (< 1e-10), rmse relation rel. error " + fmt(worst_relation) + " (<= 1e-15)");
}

// ------------------------------- criterion 7 ----------------------------------

static void run_generator_criterion() {
    MackeyGlassConfig fixed;
    fixed.initial_value = 1.0;
    fixed.warmup = 0;
    fixed.length = 1000;  // 1e4 integration steps at step 0.1
    const RealVector at_fixed_point = gen_mackey_glass(fixed);
    const double fp_err = (at_fixed_point.array() - 1.0).abs().maxCoeff();

    MackeyGlassConfig twin;  // generator defaults: x0 = 1.2, warmup 1000
    twin.length = 500;
    MackeyGlassConfig twin_perturbed = twin;
    twin_perturbed.initial_value = twin.initial_value + 1e-6;
    const RealVector a = gen_mackey_glass(twin);
    const RealVector b = gen_mackey_glass(twin_perturbed);
    const double separation = (a - b).cwiseAbs().maxCoeff();

    const bool pass = fp_err < 1e-12 && separation > 0.05;
    report(7, pass,
           "generator: fixed-point drift " + fmt(fp_err) + " (< 1e-12, " +
               (fp_err < 1e-12 ? "ok" : "FAIL") + "); twin separation within 500 samples " +
               fmt(separation) + " (> 0.05 required, " + (separation > 0.05 ? "ok" : "FAIL") +
               ": a 1e-6 perturbation grows at the measured Lyapunov rate ~0.005/sample and "
               "cannot reach 0.05 in warmup+500 samples; see decisions ledger)");
}

int main() {
    std::printf("acceptance suite (tolerances fixed in code)\n");
    run_sine_square_criteria();
    run_mackey_glass_criterion();
    run_physics_criterion();
    run_readout_criterion();
    run_generator_criterion();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criterion(s) failed\n", g_failures);
    }
    return g_failures == 0 ? 0 : 1;
}
