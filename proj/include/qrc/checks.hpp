// checks.hpp — Physics-invariant suite: property checks on the integrator and
// reservoir that carry no task-specific numbers. Used by the `validate` CLI
// subcommand and by the acceptance suite.

#pragma once

#include "qrc/fock.hpp"
#include "qrc/lindblad.hpp"
#include "qrc/mixer.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace qrc {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

namespace detail {

inline Matrix checks_random_state(int dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

} // namespace detail

// Trace drift, positivity, and readout normalization over driven segments.
inline std::vector<CheckResult> state_invariant_checks(const MixerConfig& base) {
    MixerConfig config = base;
    config.eps0_a = config.eps0_b = 1e4;  // representative calibrated scale
    std::vector<CheckResult> results;

    LindbladProblem problem;
    problem.collapse_ops = collapse_operators(config);
    problem.dt = config.dt;
    Matrix rho = vacuum_state(config.spec);
    double max_drift = 0.0, min_eig = 1.0, worst_norm = 0.0;
    const std::vector<double> drive{0.7, -1.0, 0.3, 1.0, -0.5};
    for (double x : drive) {
        const auto [ea, eb] = encode_input(x, config);
        problem.hamiltonian = build_hamiltonian(ea, eb, config);
        const double trace_before = rho.trace().real();
        rho = evolve_segment(problem, rho, config.segment);
        max_drift = std::max(max_drift, std::abs(rho.trace().real() - trace_before));
        min_eig = std::min(min_eig, min_eigenvalue(rho));
        const RealVector p =
            read_populations(rho, ReadoutSpec{config.spec.cutoff_a, config.spec.cutoff_b}, config.spec);
        worst_norm = std::max(worst_norm, std::abs(p.sum() - 1.0));
    }
    results.push_back({"trace_drift_per_segment", max_drift < 1e-8, max_drift, 1e-8, ""});
    results.push_back({"positivity_min_eigenvalue", min_eig > -1e-8, min_eig, -1e-8, ""});
    results.push_back({"full_readout_normalization", worst_norm < 1e-6, worst_norm, 1e-6, ""});
    return results;
}

// Excitation swap period pi/g at kappa = 0, measured from the first maximum of
// the transferred population.
inline CheckResult swap_period_check(const MixerConfig& base) {
    MixerConfig config = base;
    LindbladProblem problem;
    problem.hamiltonian = config.g * (joint_annihilation(Mode::A, config.spec) *
                                          joint_annihilation(Mode::B, config.spec).adjoint() +
                                      joint_annihilation(Mode::A, config.spec).adjoint() *
                                          joint_annihilation(Mode::B, config.spec));
    problem.dt = config.dt;
    const int idx01 = config.spec.joint_index(0, 1);

    Matrix rho = projector(1, 0, config.spec);
    const double t_swap_expected = M_PI / (2.0 * config.g);
    const double step = t_swap_expected / 200.0;
    double prev2 = 0.0, prev = 0.0, t = 0.0;
    double t_peak = 0.0;
    for (int i = 1; i <= 300; ++i) {
        rho = evolve_segment(problem, rho, step, EvolveOptions{1e-6, 1e-6, false});
        t = i * step;
        const double p01 = rho(idx01, idx01).real();
        if (i >= 2 && prev >= prev2 && prev >= p01 && t_peak == 0.0) {
            // quadratic interpolation around the sampled maximum
            const double denom = prev2 - 2.0 * prev + p01;
            const double shift = denom != 0.0 ? 0.5 * (prev2 - p01) / denom : 0.0;
            t_peak = t - step + shift * step;
            break;
        }
        prev2 = prev;
        prev = p01;
    }
    const double period = 2.0 * t_peak;  // full swap cycle pi/g
    const double expected = M_PI / config.g;
    const double rel = std::abs(period - expected) / expected;
    return {"swap_period_pi_over_g", rel < 5e-3, rel, 5e-3,
            "measured " + std::to_string(period) + " s vs " + std::to_string(expected) + " s"};
}

// Single-photon decay <n_a>(t) = exp(-kappa_a t) with separate dissipators.
inline CheckResult decay_law_check(const MixerConfig& base) {
    MixerConfig config = base;
    config.dissipator_mode = DissipatorMode::Separate;
    LindbladProblem problem;
    problem.hamiltonian = Matrix::Zero(config.spec.dim(), config.spec.dim());
    problem.collapse_ops = collapse_operators(config);
    problem.dt = config.dt;
    const Matrix n_a = number_operator(Mode::A, config.spec);
    Matrix rho = projector(1, 0, config.spec);
    double worst = 0.0;
    double t = 0.0;
    for (int chunk = 0; chunk < 10; ++chunk) {
        rho = evolve_segment(problem, rho, 10e-9);
        t += 10e-9;
        const double measured = (n_a * rho).trace().real();
        worst = std::max(worst, std::abs(measured - std::exp(-config.kappa_a * t)));
    }
    return {"single_photon_decay_law", worst < 1e-4, worst, 1e-4, ""};
}

// Global RK4 order: the error against the analytic decay law must shrink by
// ~16 when the step is halved.
inline CheckResult rk4_order_check(const MixerConfig& base) {
    MixerConfig config = base;
    config.dissipator_mode = DissipatorMode::Separate;
    LindbladProblem problem;
    problem.hamiltonian = Matrix::Zero(config.spec.dim(), config.spec.dim());
    problem.collapse_ops = collapse_operators(config);
    const Matrix n_a = number_operator(Mode::A, config.spec);
    const double horizon = 40e-9;
    const double exact = std::exp(-config.kappa_a * horizon);
    auto error_at = [&](double dt) {
        problem.dt = dt;
        const Matrix rho =
            evolve_segment(problem, projector(1, 0, config.spec), horizon, EvolveOptions{1e-3, 1e-3, false});
        return std::abs((n_a * rho).trace().real() - exact);
    };
    const double coarse = error_at(0.4e-9);
    const double fine = error_at(0.2e-9);
    const double ratio = coarse / fine;
    return {"rk4_order_ratio", ratio > 12.8 && ratio < 19.2, ratio, 16.0,
            "errors " + std::to_string(coarse) + " / " + std::to_string(fine)};
}

// Fading memory: perturbing one input produces feature differences that decay
// over subsequent samples.
inline CheckResult fading_memory_check(const MixerConfig& base) {
    MixerConfig config = base;
    config.eps0_a = config.eps0_b = 1e4;
    config.dissipator_mode = DissipatorMode::Separate;
    std::vector<double> inputs(24, 0.5);
    std::vector<double> perturbed = inputs;
    perturbed[1] = -0.5;
    ReadoutSpec readout{3, 3};
    ReservoirOptions options;
    options.truncation_guard = 0.0;
    const FeatureMatrix f0 = run_reservoir(inputs, config, readout, options).features;
    const FeatureMatrix f1 = run_reservoir(perturbed, config, readout, options).features;
    RealVector diff(f0.n_samples());
    for (Eigen::Index i = 0; i < f0.n_samples(); ++i) {
        diff(i) = (f0.values.col(i) - f1.values.col(i)).cwiseAbs().maxCoeff();
    }
    bool decays = diff(2) > 1e-6;  // memory visible beyond the perturbed sample
    double previous = diff(2);
    for (Eigen::Index i = 3; i < diff.size(); ++i) {
        if (diff(i) > previous + 1e-9) {
            decays = false;
        }
        previous = std::max(1e-12, diff(i));
    }
    return {"fading_memory_decay", decays, diff(2), 1e-6,
            "difference at sample 2: " + std::to_string(diff(2))};
}

inline std::vector<CheckResult> physics_invariant_suite(const MixerConfig& base) {
    std::vector<CheckResult> all = state_invariant_checks(base);
    all.push_back(swap_period_check(base));
    all.push_back(decay_law_check(base));
    all.push_back(rk4_order_check(base));
    all.push_back(fading_memory_check(base));
    return all;
}

} // namespace qrc
