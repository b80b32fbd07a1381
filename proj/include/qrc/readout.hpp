// readout.hpp — One-shot linear readout: pseudoinverse training, prediction,
// and the evaluation metrics used by the benchmark tasks.

#pragma once

#include "qrc/fock.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrc {

struct ReadoutWeights {
    RealMatrix values;  // n_outputs x n_features
};

struct FitOptions {
    double sv_cutoff = 1e-12;  // relative singular-value cutoff
    double ridge = 0.0;        // optional Tikhonov term; 0 keeps the pure pseudoinverse
};

// Minimal-norm least-squares fit W = Y F^+ via SVD of the feature matrix
// (features x samples). With ridge > 0 solves W = Y F^T (F F^T + ridge I)^-1.
inline ReadoutWeights fit(const RealMatrix& features, const RealMatrix& targets,
                          const FitOptions& options = {}) {
    if (features.rows() == 0 || features.cols() == 0) {
        throw std::invalid_argument("fit: empty feature matrix");
    }
    if (targets.cols() != features.cols()) {
        throw std::invalid_argument("fit: targets have " + std::to_string(targets.cols()) +
                                    " samples but features have " + std::to_string(features.cols()));
    }
    if (options.ridge > 0.0) {
        RealMatrix gram = features * features.transpose();
        gram.diagonal().array() += options.ridge;
        return {targets * features.transpose() * gram.inverse()};
    }
    Eigen::JacobiSVD<RealMatrix> svd(features, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = options.sv_cutoff * sv(0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > cutoff) inv(k) = 1.0 / sv(k);
    }
    // F^+ = V S^+ U^T, so W = Y F^+ = Y V S^+ U^T
    return {targets * svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose()};
}

inline RealMatrix predict(const ReadoutWeights& weights, const RealMatrix& features) {
    if (weights.values.cols() != features.rows()) {
        throw std::invalid_argument("predict: weights expect " + std::to_string(weights.values.cols()) +
                                    " features, got " + std::to_string(features.rows()));
    }
    return weights.values * features;
}

inline double classification_accuracy(std::span<const double> pred, std::span<const double> target,
                                      double threshold = 0.5) {
    if (pred.empty() || pred.size() != target.size()) {
        throw std::invalid_argument("classification_accuracy: empty or mismatched sequences");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if ((pred[i] >= threshold) == (target[i] >= 0.5)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

struct RmseResult {
    double paper = 0.0;     // (1/N) sqrt(sum of squared errors)
    double standard = 0.0;  // sqrt(mean squared error)
};

inline RmseResult rmse(std::span<const double> pred, std::span<const double> target) {
    if (pred.empty() || pred.size() != target.size()) {
        throw std::invalid_argument("rmse: empty or mismatched sequences");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - target[i];
        ss += e * e;
    }
    const double n = static_cast<double>(pred.size());
    return {std::sqrt(ss) / n, std::sqrt(ss / n)};
}

inline constexpr double kLogErrorFloor = 1e-12;

// Per-row mean of log10(|error| + floor); one row per trained delay.
inline RealVector log_error_curve(const RealMatrix& pred, const RealMatrix& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw std::invalid_argument("log_error_curve: shape mismatch");
    }
    RealVector curve(pred.rows());
    for (Eigen::Index r = 0; r < pred.rows(); ++r) {
        double acc = 0.0;
        for (Eigen::Index c = 0; c < pred.cols(); ++c) {
            acc += std::log10(std::abs(pred(r, c) - target(r, c)) + kLogErrorFloor);
        }
        curve(r) = acc / static_cast<double>(pred.cols());
    }
    return curve;
}

// log10 of the per-row standard RMSE; the alternative reading of the same figure.
inline RealVector log_rmse_curve(const RealMatrix& pred, const RealMatrix& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw std::invalid_argument("log_rmse_curve: shape mismatch");
    }
    RealVector curve(pred.rows());
    for (Eigen::Index r = 0; r < pred.rows(); ++r) {
        double ss = 0.0;
        for (Eigen::Index c = 0; c < pred.cols(); ++c) {
            const double e = pred(r, c) - target(r, c);
            ss += e * e;
        }
        curve(r) = 0.5 * std::log10(ss / static_cast<double>(pred.cols()) + kLogErrorFloor * kLogErrorFloor);
    }
    return curve;
}

} // namespace qrc
