// fock.hpp — Operators on truncated single-mode and two-mode bosonic Fock spaces.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qrc {

using Complex = std::complex<double>;

// Row-major storage so the banded integrator kernels stream contiguous rows.
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

enum class Mode { A, B };

// Truncated two-mode Fock space: photon numbers 0..cutoff per mode.
// Joint basis states are ordered row-major over (n_a, n_b).
struct FockSpec {
    int cutoff_a = 7;
    int cutoff_b = 7;

    int dim_a() const { return cutoff_a + 1; }
    int dim_b() const { return cutoff_b + 1; }
    int dim() const { return dim_a() * dim_b(); }

    int joint_index(int n_a, int n_b) const { return n_a * dim_b() + n_b; }

    void validate() const {
        if (cutoff_a < 1 || cutoff_b < 1) {
            throw std::invalid_argument("FockSpec: cutoffs must be >= 1, got " +
                                        std::to_string(cutoff_a) + "/" + std::to_string(cutoff_b));
        }
    }
};

// Single-mode annihilation operator: a|n> = sqrt(n)|n-1>, truncated at `cutoff` photons.
inline Matrix annihilation(int cutoff) {
    if (cutoff < 1) {
        throw std::invalid_argument("annihilation: cutoff must be >= 1, got " + std::to_string(cutoff));
    }
    const int d = cutoff + 1;
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n <= cutoff; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

inline Matrix kronecker(const Matrix& lhs, const Matrix& rhs) {
    Matrix out(lhs.rows() * rhs.rows(), lhs.cols() * rhs.cols());
    for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
        for (Eigen::Index j = 0; j < lhs.cols(); ++j) {
            out.block(i * rhs.rows(), j * rhs.cols(), rhs.rows(), rhs.cols()) = lhs(i, j) * rhs;
        }
    }
    return out;
}

// Embed a single-mode operator into the joint space: op_a -> op (x) I_b, op_b -> I_a (x) op_b.
inline Matrix embed(const Matrix& op, Mode mode, const FockSpec& spec) {
    spec.validate();
    const int own = (mode == Mode::A) ? spec.dim_a() : spec.dim_b();
    if (op.rows() != own || op.cols() != own) {
        throw std::invalid_argument("embed: operator is " + std::to_string(op.rows()) + "x" +
                                    std::to_string(op.cols()) + " but mode dimension is " +
                                    std::to_string(own));
    }
    if (mode == Mode::A) {
        return kronecker(op, Matrix::Identity(spec.dim_b(), spec.dim_b()));
    }
    return kronecker(Matrix::Identity(spec.dim_a(), spec.dim_a()), op);
}

inline Matrix joint_annihilation(Mode mode, const FockSpec& spec) {
    return embed(annihilation(mode == Mode::A ? spec.cutoff_a : spec.cutoff_b), mode, spec);
}

inline Matrix number_operator(Mode mode, const FockSpec& spec) {
    const Matrix a = joint_annihilation(mode, spec);
    return a.adjoint() * a;
}

// Projector |n_a n_b><n_a n_b| on the joint space.
inline Matrix projector(int n_a, int n_b, const FockSpec& spec) {
    spec.validate();
    if (n_a < 0 || n_a > spec.cutoff_a || n_b < 0 || n_b > spec.cutoff_b) {
        throw std::invalid_argument("projector: (" + std::to_string(n_a) + "," + std::to_string(n_b) +
                                    ") outside cutoffs " + std::to_string(spec.cutoff_a) + "/" +
                                    std::to_string(spec.cutoff_b));
    }
    Matrix p = Matrix::Zero(spec.dim(), spec.dim());
    const int k = spec.joint_index(n_a, n_b);
    p(k, k) = 1.0;
    return p;
}

// Vacuum density matrix |0,0><0,0|.
inline Matrix vacuum_state(const FockSpec& spec) {
    return projector(0, 0, spec);
}

} // namespace qrc
