// features.hpp — Feature matrices produced by the reservoirs (neurons x samples).

#pragma once

#include "qrc/fock.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qrc {

struct FeatureMatrix {
    RealMatrix values;               // n_features x n_samples, bias row last when present
    std::vector<std::string> names;  // one per feature row
    bool has_bias = false;

    Eigen::Index n_features() const { return values.rows(); }
    Eigen::Index n_samples() const { return values.cols(); }

    void append_bias_row() {
        if (has_bias) {
            throw std::invalid_argument("FeatureMatrix: bias row already present");
        }
        values.conservativeResize(values.rows() + 1, Eigen::NoChange);
        values.row(values.rows() - 1).setOnes();
        names.push_back("bias");
        has_bias = true;
    }
};

} // namespace qrc
