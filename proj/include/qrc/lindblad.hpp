// lindblad.hpp — Master-equation integration for piecewise-constant Hamiltonians.
//
// The right-hand side is
//     drho/dt = -i[H, rho] + sum_k ( C_k rho C_k^+ - 1/2 {C_k^+ C_k, rho} ).
// The reference implementation (lindblad_rhs) uses plain dense products.
// The segment integrator evolves the same equation with classical fixed-step
// RK4, rewriting the generator as
//     drho/dt = A rho + (A rho)^+ + sum_k C_k rho C_k^+ ,  A = -iH - 1/2 sum_k C_k^+ C_k,
// which is valid for Hermitian rho, and applying A and C_k as banded matrices
// (H and C here only populate a handful of diagonals in the joint index).

#pragma once

#include "qrc/errors.hpp"
#include "qrc/fock.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

namespace qrc {

inline double hermiticity_error(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

struct LindbladProblem {
    Matrix hamiltonian;                // rad/s
    std::vector<Matrix> collapse_ops;  // sqrt(rad/s)
    double dt = 0.05e-9;               // integrator step (s)

    void validate() const {
        const Eigen::Index d = hamiltonian.rows();
        if (d == 0 || hamiltonian.cols() != d) {
            throw std::invalid_argument("LindbladProblem: Hamiltonian must be square and non-empty");
        }
        if (hermiticity_error(hamiltonian) > 1e-10 * std::max(1.0, hamiltonian.cwiseAbs().maxCoeff())) {
            throw std::invalid_argument("LindbladProblem: Hamiltonian is not Hermitian");
        }
        for (const Matrix& c : collapse_ops) {
            if (c.rows() != d || c.cols() != d) {
                throw std::invalid_argument("LindbladProblem: collapse operator dimension mismatch");
            }
        }
        if (!(dt > 0.0)) {
            throw std::invalid_argument("LindbladProblem: dt must be positive");
        }
    }
};

// Reference dense evaluation of the master-equation right-hand side.
inline Matrix lindblad_rhs(const LindbladProblem& problem, const Matrix& rho) {
    const Eigen::Index d = problem.hamiltonian.rows();
    if (rho.rows() != d || rho.cols() != d) {
        throw std::invalid_argument("lindblad_rhs: state dimension mismatch");
    }
    const Complex i_unit(0.0, 1.0);
    Matrix out = -i_unit * (problem.hamiltonian * rho - rho * problem.hamiltonian);
    for (const Matrix& c : problem.collapse_ops) {
        const Matrix cd = c.adjoint();
        const Matrix cdc = cd * c;
        out += c * rho * cd - 0.5 * (cdc * rho + rho * cdc);
    }
    return out;
}

// ----------------------------- banded kernels --------------------------------

// A square matrix stored as its nonzero diagonals: entries (i, i + offset).
// apply_left accumulates M * X, apply_right_adjoint accumulates X * M^+.
class BandedMatrix {
public:
    BandedMatrix() = default;

    static BandedMatrix from_dense(const Matrix& m) {
        BandedMatrix out;
        out.dim_ = static_cast<int>(m.rows());
        for (int off = -(out.dim_ - 1); off <= out.dim_ - 1; ++off) {
            const int lo = std::max(0, -off);
            const int hi = out.dim_ - 1 - std::max(0, off);
            bool any = false;
            for (int i = lo; i <= hi && !any; ++i) {
                any = m(i, i + off) != Complex(0.0, 0.0);
            }
            if (!any) continue;
            Band band;
            band.offset = off;
            band.first_row = lo;
            band.coeff = Vector::Zero(hi - lo + 1);
            for (int i = lo; i <= hi; ++i) {
                band.coeff(i - lo) = m(i, i + off);
            }
            out.bands_.push_back(std::move(band));
        }
        return out;
    }

    int dim() const { return dim_; }
    std::size_t band_count() const { return bands_.size(); }

    template <typename F>
    void visit(F&& f) const {
        for (const Band& b : bands_) {
            f(b.offset, b.first_row, b.coeff);
        }
    }

    Matrix to_dense() const {
        Matrix m = Matrix::Zero(dim_, dim_);
        for (const Band& b : bands_) {
            for (Eigen::Index k = 0; k < b.coeff.size(); ++k) {
                const int i = b.first_row + static_cast<int>(k);
                m(i, i + b.offset) = b.coeff(k);
            }
        }
        return m;
    }

    // out += M * x.  Row i of the result picks up coeff(i) * x.row(i + offset).
    void apply_left(const Matrix& x, Matrix& out) const {
        const int n = dim_;
        for (const Band& b : bands_) {
            const int rows = static_cast<int>(b.coeff.size());
            for (int k = 0; k < rows; ++k) {
                const int i = b.first_row + k;
                axpy_row(b.coeff(k), x.data() + static_cast<std::ptrdiff_t>(i + b.offset) * n,
                         out.data() + static_cast<std::ptrdiff_t>(i) * n, n);
            }
        }
    }

    // out += x * M^+.  Column j of the result picks up conj(coeff(j)) * x.col(j + offset).
    void apply_right_adjoint(const Matrix& x, Matrix& out) const {
        const int n = dim_;
        for (const Band& b : bands_) {
            const int cols = static_cast<int>(b.coeff.size());
            const int j0 = b.first_row;
            for (int i = 0; i < n; ++i) {
                const Complex* xr = x.data() + static_cast<std::ptrdiff_t>(i) * n;
                Complex* yr = out.data() + static_cast<std::ptrdiff_t>(i) * n;
                mulconj_row(b.coeff.data(), xr + j0 + b.offset, yr + j0, cols);
            }
        }
    }

private:
    struct Band {
        int offset = 0;
        int first_row = 0;
        Vector coeff;
    };

    // y[0..n) += a * x[0..n)
    static void axpy_row(Complex a, const Complex* x, Complex* y, int n) {
        const double ar = a.real(), ai = a.imag();
        const double* xd = reinterpret_cast<const double*>(x);
        double* yd = reinterpret_cast<double*>(y);
        for (int k = 0; k < n; ++k) {
            const double xr = xd[2 * k], xi = xd[2 * k + 1];
            yd[2 * k] += ar * xr - ai * xi;
            yd[2 * k + 1] += ar * xi + ai * xr;
        }
    }

    // y[0..n) += x[0..n) * conj(c[0..n))
    static void mulconj_row(const Complex* c, const Complex* x, Complex* y, int n) {
        const double* cd = reinterpret_cast<const double*>(c);
        const double* xd = reinterpret_cast<const double*>(x);
        double* yd = reinterpret_cast<double*>(y);
        for (int k = 0; k < n; ++k) {
            const double cr = cd[2 * k], ci = -cd[2 * k + 1];
            const double xr = xd[2 * k], xi = xd[2 * k + 1];
            yd[2 * k] += cr * xr - ci * xi;
            yd[2 * k + 1] += cr * xi + ci * xr;
        }
    }

    int dim_ = 0;
    std::vector<Band> bands_;
};

// Precomputed banded form of the generator for one constant-Hamiltonian stretch.
// The evaluation is organized row-by-row so each right-hand side costs only a
// few full passes over the state regardless of the number of bands.
class LindbladGenerator {
public:
    explicit LindbladGenerator(const LindbladProblem& problem) {
        problem.validate();
        dim_ = static_cast<int>(problem.hamiltonian.rows());
        const Complex i_unit(0.0, 1.0);
        Matrix a_eff = -i_unit * problem.hamiltonian;
        for (const Matrix& c : problem.collapse_ops) {
            a_eff -= 0.5 * (c.adjoint() * c);
            collapse_.push_back(pack(BandedMatrix::from_dense(c)));
        }
        a_eff_packed_ = pack(BandedMatrix::from_dense(a_eff));
        row_.resize(dim_);
    }

    int dim() const { return dim_; }

    // out = A rho + (A rho)^+ + sum_k C_k rho C_k^+   (rho assumed Hermitian)
    void rhs(const Matrix& rho, Matrix& out) {
        const int n = dim_;
        // out = A rho, one output row at a time
        for (int i = 0; i < n; ++i) {
            Complex* acc = out.data() + static_cast<std::ptrdiff_t>(i) * n;
            std::fill(acc, acc + n, Complex(0.0, 0.0));
            for (const PackedBand& b : a_eff_packed_) {
                if (i < b.first_row || i > b.last_row) continue;
                axpy_row(b.coeff[i - b.first_row],
                         rho.data() + static_cast<std::ptrdiff_t>(i + b.offset) * n, acc, n);
            }
        }
        add_adjoint_in_place(out);
        // out += C rho C^+, again row-local: row i of C rho combines rho rows,
        // the right factor C^+ then shifts columns within that row.
        for (const Packed& c : collapse_) {
            for (int i = 0; i < n; ++i) {
                Complex* tmp = row_.data();
                std::fill(tmp, tmp + n, Complex(0.0, 0.0));
                for (const PackedBand& b : c) {
                    if (i < b.first_row || i > b.last_row) continue;
                    axpy_row(b.coeff[i - b.first_row],
                             rho.data() + static_cast<std::ptrdiff_t>(i + b.offset) * n, tmp, n);
                }
                Complex* outr = out.data() + static_cast<std::ptrdiff_t>(i) * n;
                for (const PackedBand& b : c) {
                    mulconj_row(b.coeff, tmp + b.first_row + b.offset, outr + b.first_row,
                                b.last_row - b.first_row + 1);
                }
            }
        }
    }

private:
    struct PackedBand {
        int offset = 0;
        int first_row = 0;
        int last_row = 0;
        const Complex* coeff = nullptr;
    };
    using Packed = std::vector<PackedBand>;

    Packed pack(const BandedMatrix& m) {
        Packed packed;
        m.visit([&](int offset, int first_row, const Vector& coeff) {
            coeff_pool_.push_back(coeff);
            packed.push_back(PackedBand{offset, first_row,
                                        first_row + static_cast<int>(coeff.size()) - 1,
                                        coeff_pool_.back().data()});
        });
        return packed;
    }

    // y[0..n) += a * x[0..n)
    static void axpy_row(Complex a, const Complex* x, Complex* y, int n) {
        const double ar = a.real(), ai = a.imag();
        const double* xd = reinterpret_cast<const double*>(x);
        double* yd = reinterpret_cast<double*>(y);
        for (int k = 0; k < n; ++k) {
            const double xr = xd[2 * k], xi = xd[2 * k + 1];
            yd[2 * k] += ar * xr - ai * xi;
            yd[2 * k + 1] += ar * xi + ai * xr;
        }
    }

    // y[0..n) += x[0..n) * conj(c[0..n))
    static void mulconj_row(const Complex* c, const Complex* x, Complex* y, int n) {
        const double* cd = reinterpret_cast<const double*>(c);
        const double* xd = reinterpret_cast<const double*>(x);
        double* yd = reinterpret_cast<double*>(y);
        for (int k = 0; k < n; ++k) {
            const double cr = cd[2 * k], ci = -cd[2 * k + 1];
            const double xr = xd[2 * k], xi = xd[2 * k + 1];
            yd[2 * k] += cr * xr - ci * xi;
            yd[2 * k + 1] += cr * xi + ci * xr;
        }
    }

    static void add_adjoint_in_place(Matrix& m) {
        const int n = static_cast<int>(m.rows());
        for (int i = 0; i < n; ++i) {
            m(i, i) = Complex(2.0 * m(i, i).real(), 0.0);
            for (int j = i + 1; j < n; ++j) {
                const Complex s = m(i, j) + std::conj(m(j, i));
                m(i, j) = s;
                m(j, i) = std::conj(s);
            }
        }
    }

    int dim_ = 0;
    std::deque<Vector> coeff_pool_;  // stable addresses for PackedBand::coeff
    Packed a_eff_packed_;
    std::vector<Packed> collapse_;
    Vector row_;
};

struct EvolveOptions {
    double trace_tolerance = 1e-6;       // drift over the segment
    double positivity_tolerance = 1e-6;  // allowed negative eigenvalue magnitude
    bool check_positivity = true;        // eigenvalue check at segment end
};

namespace detail {

inline void hermitize(Matrix& rho) {
    const int n = static_cast<int>(rho.rows());
    for (int i = 0; i < n; ++i) {
        rho(i, i) = Complex(rho(i, i).real(), 0.0);
        for (int j = i + 1; j < n; ++j) {
            const Complex s = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
            rho(i, j) = s;
            rho(j, i) = std::conj(s);
        }
    }
}

inline void rk4_step(LindbladGenerator& gen, Matrix& rho, double h, Matrix& k1, Matrix& k2,
                     Matrix& k3, Matrix& k4, Matrix& tmp) {
    gen.rhs(rho, k1);
    tmp = rho + (0.5 * h) * k1;
    gen.rhs(tmp, k2);
    tmp = rho + (0.5 * h) * k2;
    gen.rhs(tmp, k3);
    tmp = rho + h * k3;
    gen.rhs(tmp, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    hermitize(rho);
}

} // namespace detail

// Advance the state through one constant-Hamiltonian segment of the given
// duration. The step is problem.dt; a shorter final step absorbs any
// remainder. The output is re-Hermitized every step; trace and positivity
// are checked at the segment end.
inline Matrix evolve_segment(const LindbladProblem& problem, Matrix rho, double duration,
                             const EvolveOptions& options = {}) {
    problem.validate();
    const Eigen::Index d = problem.hamiltonian.rows();
    if (rho.rows() != d || rho.cols() != d) {
        throw std::invalid_argument("evolve_segment: state dimension mismatch");
    }
    if (duration < 0.0) {
        throw std::invalid_argument("evolve_segment: duration must be >= 0");
    }
    if (duration == 0.0) {
        return rho;
    }

    LindbladGenerator gen(problem);
    const double trace0 = rho.trace().real();

    auto n_full = static_cast<long long>(std::floor(duration / problem.dt * (1.0 + 1e-12)));
    double remainder = duration - static_cast<double>(n_full) * problem.dt;
    if (remainder < 1e-9 * problem.dt) {
        remainder = 0.0;
    }

    Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);
    for (long long s = 0; s < n_full; ++s) {
        detail::rk4_step(gen, rho, problem.dt, k1, k2, k3, k4, tmp);
    }
    if (remainder > 0.0) {
        detail::rk4_step(gen, rho, remainder, k1, k2, k3, k4, tmp);
    }

    // negated comparisons so NaN from a blown-up integration also lands here
    const double drift = std::abs(rho.trace().real() - trace0);
    if (!(drift <= options.trace_tolerance)) {
        throw IntegratorDivergenceError("evolve_segment: trace drift " + std::to_string(drift) +
                                        " exceeds tolerance (dt too large for the rates?)");
    }
    if (options.check_positivity) {
        const double lambda_min = min_eigenvalue(rho);
        if (!(lambda_min >= -options.positivity_tolerance)) {
            throw PositivityViolationError("evolve_segment: eigenvalue " + std::to_string(lambda_min) +
                                           " below positivity tolerance");
        }
    }
    return rho;
}

} // namespace qrc
