// baselines.hpp — Classical comparison reservoirs: a static random-ReLU layer
// with one step of input memory, and a bank of spin-torque-style nonlinear
// auto-oscillators integrated per input interval.

#pragma once

#include "qrc/errors.hpp"
#include "qrc/features.hpp"
#include "qrc/fock.hpp"
#include "qrc/readout.hpp"
#include "qrc/tasks.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qrc {

// ------------------------------ static ReLU ----------------------------------

struct StaticReservoirParams {
    int size = 40;
    std::uint64_t seed = 1;
    double input_scale = 1.0;
    double recurrent_scale = 0.1;
    // Feed the previous input through the first column of W_res instead of the
    // embedded W_res (W_in x(t-1)) product.
    bool literal_broadcast = false;
};

// y(t) = ReLU(W_in x(t) + W_res (W_in x(t-1))), x(-1) = 0.
inline FeatureMatrix static_features(std::span<const double> inputs,
                                     const StaticReservoirParams& params, bool bias_row = true) {
    if (params.size < 1) {
        throw std::invalid_argument("static_features: size must be >= 1");
    }
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    RealVector w_in(params.size);
    for (int i = 0; i < params.size; ++i) w_in(i) = params.input_scale * uni(rng);
    RealMatrix w_res(params.size, params.size);
    for (int i = 0; i < params.size; ++i) {
        for (int j = 0; j < params.size; ++j) w_res(i, j) = params.recurrent_scale * uni(rng);
    }
    const RealVector memory_map = params.literal_broadcast ? RealVector(w_res.col(0))
                                                           : RealVector(w_res * w_in);

    FeatureMatrix fm;
    fm.values.resize(params.size, static_cast<Eigen::Index>(inputs.size()));
    double x_prev = 0.0;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        fm.values.col(static_cast<Eigen::Index>(t)) =
            (w_in * inputs[t] + memory_map * x_prev).cwiseMax(0.0);
        x_prev = inputs[t];
    }
    fm.names.reserve(static_cast<std::size_t>(params.size) + 1);
    for (int i = 0; i < params.size; ++i) fm.names.push_back("relu_" + std::to_string(i));
    if (bias_row) fm.append_bias_row();
    return fm;
}

// --------------------------- spin-torque oscillators --------------------------

struct STOParams {
    double gamma_damping = 6e6;  // 1/s
    double q_nonlinearity = 2.0;
    double sigma = 1.2e7;        // drive-to-rate conversion, 1/s per unit current
    int size = 24;
    std::uint64_t seed = 1;
    double dt = 0.5e-9;          // integrator step (s)
    double input_gain = 1.0;     // current per unit input
    double input_bias = 1.5;     // DC operating point; keeps the power alive
    double interval = 100e-9;    // s per input point
    double initial_power = 0.3;
    double w_low = 0.5;          // per-oscillator input-coupling range
    double w_high = 1.5;

    void validate() const {
        if (size < 1) throw std::invalid_argument("STOParams: size must be >= 1");
        if (gamma_damping <= 0.0) throw std::invalid_argument("STOParams: damping must be positive");
        if (dt <= 0.0 || dt * gamma_damping > 0.05) {
            throw std::invalid_argument("STOParams: dt * gamma_damping must be in (0, 0.05]");
        }
        if (interval <= 0.0) throw std::invalid_argument("STOParams: interval must be positive");
    }
};

// dp/dt = 2 (-Gamma (1 + Q p) + W_in I sigma (1 - p)) p, one power variable per
// oscillator, current I = input_gain (input_bias + x) held over each interval.
inline FeatureMatrix sto_features(std::span<const double> inputs, const STOParams& params,
                                  bool bias_row = true) {
    params.validate();
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> uni(params.w_low, params.w_high);
    RealVector w(params.size);
    for (int i = 0; i < params.size; ++i) w(i) = uni(rng);

    const auto steps = static_cast<int>(std::round(params.interval / params.dt));
    const double h = params.interval / steps;
    RealVector p = RealVector::Constant(params.size, params.initial_power);
    RealVector k1(params.size), k2(params.size), k3(params.size), k4(params.size);

    FeatureMatrix fm;
    fm.values.resize(params.size, static_cast<Eigen::Index>(inputs.size()));
    const double gamma = params.gamma_damping;
    const double q = params.q_nonlinearity;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        const double current = params.input_gain * (params.input_bias + inputs[t]);
        const RealVector drive = (params.sigma * current) * w;
        const auto rhs = [&](const RealVector& pw) {
            return (2.0 * (-gamma * (1.0 + q * pw.array()) +
                           drive.array() * (1.0 - pw.array())) * pw.array()).matrix();
        };
        for (int s = 0; s < steps; ++s) {
            k1 = rhs(p);
            k2 = rhs(p + (0.5 * h) * k1);
            k3 = rhs(p + (0.5 * h) * k2);
            k4 = rhs(p + h * k3);
            p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        // negated form so NaN from an unstable step is also caught
        if (!((p.array() >= -1e-9).all() && (p.array() <= 1.0 + 1e-9).all())) {
            throw InstabilityError("sto_features: power left [0,1] at sample " + std::to_string(t) +
                                   " (dt too large for the drive)");
        }
        p = p.cwiseMax(0.0).cwiseMin(1.0);
        fm.values.col(static_cast<Eigen::Index>(t)) = p;
    }
    fm.names.reserve(static_cast<std::size_t>(params.size) + 1);
    for (int i = 0; i < params.size; ++i) fm.names.push_back("sto_" + std::to_string(i));
    if (bias_row) fm.append_bias_row();
    return fm;
}

// ------------------------------ accuracy sweep --------------------------------

enum class BaselineKind { Static, Sto };

struct SweepPoint {
    int size = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
};

// For each reservoir size: generate `n_seeds` seeded baselines, train the
// linear readout on the train split, and evaluate accuracy on the test split.
inline std::vector<SweepPoint> baseline_sweep(const Dataset& train, const Dataset& test,
                                              std::span<const int> sizes, BaselineKind kind,
                                              int n_seeds = 5, std::uint64_t base_seed = 1) {
    if (train.targets.rows() != 1 || test.targets.rows() != 1) {
        throw std::invalid_argument("baseline_sweep: expected single-row classification targets");
    }
    std::vector<double> all_inputs(train.inputs.data(), train.inputs.data() + train.inputs.size());
    all_inputs.insert(all_inputs.end(), test.inputs.data(), test.inputs.data() + test.inputs.size());
    const auto n_train = static_cast<Eigen::Index>(train.inputs.size());
    const auto n_test = static_cast<Eigen::Index>(test.inputs.size());

    std::vector<SweepPoint> table;
    table.reserve(sizes.size());
    for (int size : sizes) {
        std::vector<double> accs;
        accs.reserve(static_cast<std::size_t>(n_seeds));
        for (int s = 0; s < n_seeds; ++s) {
            FeatureMatrix fm;
            if (kind == BaselineKind::Static) {
                StaticReservoirParams p;
                p.size = size;
                p.seed = base_seed + static_cast<std::uint64_t>(s);
                fm = static_features(all_inputs, p);
            } else {
                STOParams p;
                p.size = size;
                p.seed = base_seed + static_cast<std::uint64_t>(s);
                fm = sto_features(all_inputs, p);
            }
            const ReadoutWeights w = fit(fm.values.leftCols(n_train), train.targets);
            const RealMatrix pred = predict(w, fm.values.rightCols(n_test));
            accs.push_back(classification_accuracy(
                std::span<const double>(pred.data(), static_cast<std::size_t>(pred.cols())),
                std::span<const double>(test.targets.data(),
                                        static_cast<std::size_t>(test.targets.cols()))));
        }
        double mean = 0.0;
        for (double a : accs) mean += a;
        mean /= static_cast<double>(accs.size());
        double var = 0.0;
        for (double a : accs) var += (a - mean) * (a - mean);
        var /= static_cast<double>(accs.size());
        table.push_back({size, mean, std::sqrt(var)});
    }
    return table;
}

} // namespace qrc
