// tasks.hpp — Benchmark task generators: sine/square waveform classification
// and Mackey-Glass delay-differential chaotic series with delay targets.

#pragma once

#include "qrc/fock.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qrc {

struct Dataset {
    RealVector inputs;
    RealMatrix targets;       // one row per output (class row, or one per delay)
    std::vector<int> delays;  // populated for prediction tasks
    std::string kind;
    std::uint64_t seed = 0;
    std::map<std::string, double> metadata;
};

// --------------------------- sine / square ----------------------------------

inline const std::array<double, 8>& sine_waveform() {
    static const std::array<double, 8> w = [] {
        const double s = std::sqrt(0.5);
        return std::array<double, 8>{0.0, s, 1.0, s, 0.0, -s, -1.0, -s};
    }();
    return w;
}

inline const std::array<double, 8>& square_waveform() {
    static const std::array<double, 8> w{1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0};
    return w;
}

// Random sequence of sine/square waveforms, 8 points each; per-point target is
// 1 for sine and 0 for square.
inline Dataset gen_sine_square(int n_waveforms, std::uint64_t seed) {
    if (n_waveforms < 1) {
        throw std::invalid_argument("gen_sine_square: need at least one waveform");
    }
    std::mt19937_64 rng(seed);
    Dataset ds;
    ds.kind = "sine_square";
    ds.seed = seed;
    ds.inputs.resize(8 * n_waveforms);
    ds.targets.resize(1, 8 * n_waveforms);
    for (int w = 0; w < n_waveforms; ++w) {
        const bool is_sine = (rng() & 1ull) != 0;
        const auto& shape = is_sine ? sine_waveform() : square_waveform();
        for (int k = 0; k < 8; ++k) {
            ds.inputs(8 * w + k) = shape[static_cast<std::size_t>(k)];
            ds.targets(0, 8 * w + k) = is_sine ? 1.0 : 0.0;
        }
    }
    ds.metadata["n_waveforms"] = n_waveforms;
    return ds;
}

// ----------------------------- Mackey-Glass ---------------------------------

struct MackeyGlassConfig {
    double beta = 0.2;
    double gamma = 0.1;
    double tau = 17.0;         // delay, in sample units
    double exponent = 10.0;
    double integration_step = 0.1;  // must divide 1.0
    int warmup = 1000;         // discarded samples
    int length = 2200;         // emitted samples
    double initial_value = 1.2;
    std::uint64_t seed = 0;    // unused: the generator is deterministic

    void validate() const {
        if (integration_step <= 0.0 || integration_step > 1.0) {
            throw std::invalid_argument("MackeyGlassConfig: integration_step must be in (0, 1]");
        }
        const double per = 1.0 / integration_step;
        if (std::abs(per - std::round(per)) > 1e-9) {
            throw std::invalid_argument("MackeyGlassConfig: integration_step must divide 1.0");
        }
        if (tau <= 0.0 || warmup < 0 || length < 1) {
            throw std::invalid_argument("MackeyGlassConfig: invalid tau/warmup/length");
        }
    }
};

// Integrates dx/dt = beta x(t-tau) / (1 + x(t-tau)^p) - gamma x(t) with
// fixed-step RK4 and a ring of past values; mid-step delayed values come from
// cubic Hermite interpolation of the stored (value, derivative) history, which
// keeps the halving error of emitted samples at the 1e-7 level (plain linear
// interpolation is ~3e-5 and fails the convergence requirement).
// Constant initial history x = initial_value; one sample per unit time after
// the warmup is discarded.
inline RealVector gen_mackey_glass(const MackeyGlassConfig& config) {
    config.validate();
    const double h = config.integration_step;
    const auto per_sample = static_cast<int>(std::round(1.0 / h));
    const auto n_lag_f = config.tau / h;
    const auto n_lag = static_cast<std::ptrdiff_t>(std::round(n_lag_f));
    if (std::abs(n_lag_f - static_cast<double>(n_lag)) > 1e-9) {
        throw std::invalid_argument("gen_mackey_glass: tau must be a multiple of integration_step");
    }
    const std::ptrdiff_t n_steps =
        static_cast<std::ptrdiff_t>(config.warmup + config.length) * per_sample;

    std::vector<double> value(static_cast<std::size_t>(n_steps + n_lag + 1));
    std::vector<double> deriv(static_cast<std::size_t>(n_steps + n_lag + 1));

    const auto f = [&](double x, double x_lag) {
        return config.beta * x_lag / (1.0 + std::pow(x_lag, config.exponent)) - config.gamma * x;
    };

    for (std::ptrdiff_t k = 0; k <= n_lag; ++k) {
        value[static_cast<std::size_t>(k)] = config.initial_value;
    }
    const double d0 = f(config.initial_value, config.initial_value);
    for (std::ptrdiff_t k = 0; k <= n_lag; ++k) {
        deriv[static_cast<std::size_t>(k)] = d0;
    }

    const auto history = [&](double pos) {
        const auto k0 = static_cast<std::ptrdiff_t>(std::floor(pos));
        const double t = pos - static_cast<double>(k0);
        if (t == 0.0) {
            return value[static_cast<std::size_t>(k0)];
        }
        const double x0 = value[static_cast<std::size_t>(k0)];
        const double x1 = value[static_cast<std::size_t>(k0 + 1)];
        const double m0 = deriv[static_cast<std::size_t>(k0)] * h;
        const double m1 = deriv[static_cast<std::size_t>(k0 + 1)] * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * x0 + (t3 - 2.0 * t2 + t) * m0 +
               (-2.0 * t3 + 3.0 * t2) * x1 + (t3 - t2) * m1;
    };

    for (std::ptrdiff_t s = 0; s < n_steps; ++s) {
        const std::ptrdiff_t k = n_lag + s;
        const double x = value[static_cast<std::size_t>(k)];
        const double lag0 = value[static_cast<std::size_t>(k - n_lag)];
        const double lag_half = history(static_cast<double>(k - n_lag) + 0.5);
        const double lag1 = value[static_cast<std::size_t>(k + 1 - n_lag)];
        const double k1 = f(x, lag0);
        const double k2 = f(x + 0.5 * h * k1, lag_half);
        const double k3 = f(x + 0.5 * h * k2, lag_half);
        const double k4 = f(x + h * k3, lag1);
        const double next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        value[static_cast<std::size_t>(k + 1)] = next;
        deriv[static_cast<std::size_t>(k + 1)] = f(next, lag1);
    }

    RealVector out(config.length);
    const std::ptrdiff_t start = n_lag + static_cast<std::ptrdiff_t>(config.warmup) * per_sample;
    for (int i = 0; i < config.length; ++i) {
        out(i) = value[static_cast<std::size_t>(start + static_cast<std::ptrdiff_t>(i) * per_sample)];
    }
    return out;
}

// --------------------------- delay targets ----------------------------------

// Pairs input i with targets series[i + d] for each delay d; contiguous train
// then test split.
inline std::pair<Dataset, Dataset> make_delay_targets(const RealVector& series,
                                                      std::span<const int> delays, int train_len,
                                                      int test_len) {
    if (delays.empty() || train_len < 1 || test_len < 1) {
        throw std::invalid_argument("make_delay_targets: need delays and positive lengths");
    }
    int max_delay = 0;
    for (int d : delays) {
        if (d < 0) throw std::invalid_argument("make_delay_targets: negative delay");
        max_delay = std::max(max_delay, d);
    }
    if (series.size() < train_len + test_len + max_delay) {
        throw std::invalid_argument("make_delay_targets: series length " +
                                    std::to_string(series.size()) + " < " +
                                    std::to_string(train_len + test_len + max_delay));
    }
    const auto build = [&](int offset, int len) {
        Dataset ds;
        ds.kind = "mackey_glass";
        ds.inputs = series.segment(offset, len);
        ds.targets.resize(static_cast<Eigen::Index>(delays.size()), len);
        ds.delays.assign(delays.begin(), delays.end());
        for (Eigen::Index r = 0; r < ds.targets.rows(); ++r) {
            for (int i = 0; i < len; ++i) {
                ds.targets(r, i) = series(offset + i + delays[static_cast<std::size_t>(r)]);
            }
        }
        return ds;
    };
    return {build(0, train_len), build(train_len, test_len)};
}

} // namespace qrc
