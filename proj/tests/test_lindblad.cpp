#include <catch2/catch_amalgamated.hpp>

#include "qrc/fock.hpp"
#include "qrc/lindblad.hpp"

#include <cmath>
#include <random>

using namespace qrc;

namespace {

constexpr double kTwoPi = 6.283185307179586;
const double kKappaA = kTwoPi * 17e6;
const double kKappaB = kTwoPi * 21e6;
const double kG = kTwoPi * 20e6;

Matrix random_density_matrix(int dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            g(i, j) = Complex(gauss(rng), gauss(rng));
        }
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

LindbladProblem decay_problem(const FockSpec& spec, bool joint, double dt = 0.05e-9) {
    Matrix a = joint_annihilation(Mode::A, spec);
    Matrix b = joint_annihilation(Mode::B, spec);
    LindbladProblem p;
    p.hamiltonian = Matrix::Zero(spec.dim(), spec.dim());
    if (joint) {
        p.collapse_ops = {std::sqrt(kKappaA) * a + std::sqrt(kKappaB) * b};
    } else {
        p.collapse_ops = {std::sqrt(kKappaA) * a, std::sqrt(kKappaB) * b};
    }
    p.dt = dt;
    return p;
}

LindbladProblem conversion_problem(const FockSpec& spec, double g, double dt = 0.05e-9) {
    Matrix a = joint_annihilation(Mode::A, spec);
    Matrix b = joint_annihilation(Mode::B, spec);
    LindbladProblem p;
    p.hamiltonian = g * (a * b.adjoint() + a.adjoint() * b);
    p.collapse_ops = {};
    p.dt = dt;
    return p;
}

} // namespace

TEST_CASE("right-hand side basics") {
    FockSpec spec{7, 7};

    SECTION("vacuum is annihilated by the dissipator") {
        LindbladProblem p = decay_problem(spec, true);
        Matrix rhs = lindblad_rhs(p, vacuum_state(spec));
        CHECK(rhs.cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("single-photon decay rate d<n_a>/dt = -kappa_a") {
        LindbladProblem p = decay_problem(spec, false);
        Matrix rho = projector(1, 0, spec);
        Matrix rhs = lindblad_rhs(p, rho);
        const double dn_dt = (number_operator(Mode::A, spec) * rhs).trace().real();
        CHECK(dn_dt == Catch::Approx(-kKappaA).epsilon(1e-12));
    }
    SECTION("trace-free on random Hermitian unit-trace states") {
        LindbladProblem p = decay_problem(spec, true);
        p.hamiltonian = conversion_problem(spec, kG).hamiltonian;
        for (unsigned seed : {1u, 2u, 3u}) {
            Matrix rho = random_density_matrix(spec.dim(), seed);
            Matrix rhs = lindblad_rhs(p, rho);
            const double scale = rhs.cwiseAbs().maxCoeff();
            CHECK(std::abs(rhs.trace().real()) < 1e-12 * scale);
        }
    }
    SECTION("dimension mismatch rejected") {
        LindbladProblem p = decay_problem(spec, true);
        CHECK_THROWS_AS(lindblad_rhs(p, Matrix::Zero(9, 9)), std::invalid_argument);
    }
}

TEST_CASE("banded generator equals the dense right-hand side") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int dim = 20;

    auto random_banded = [&](std::initializer_list<int> offsets) {
        Matrix m = Matrix::Zero(dim, dim);
        for (int off : offsets) {
            for (int i = std::max(0, -off); i <= dim - 1 - std::max(0, off); ++i) {
                m(i, i + off) = Complex(gauss(rng), gauss(rng));
            }
        }
        return m;
    };

    for (int trial = 0; trial < 5; ++trial) {
        Matrix h = random_banded({0, 2, 5});
        h = (h + Matrix(h.adjoint())).eval();
        LindbladProblem p{h, {random_banded({1, -3}), random_banded({0, 4})}, 1.0};
        LindbladGenerator gen(p);
        Matrix rho = random_density_matrix(dim, 100 + trial);
        Matrix fast(dim, dim);
        gen.rhs(rho, fast);
        Matrix ref = lindblad_rhs(p, rho);
        const double scale = ref.cwiseAbs().maxCoeff();
        CHECK((fast - ref).cwiseAbs().maxCoeff() < 1e-12 * scale);
    }
}

TEST_CASE("banded matrix roundtrip and products") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(12, 12), x(12, 12);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            m(i, j) = Complex(gauss(rng), gauss(rng));
            x(i, j) = Complex(gauss(rng), gauss(rng));
        }
    }
    BandedMatrix banded = BandedMatrix::from_dense(m);
    CHECK((banded.to_dense() - m).cwiseAbs().maxCoeff() == 0.0);

    Matrix left = Matrix::Zero(12, 12);
    banded.apply_left(x, left);
    CHECK((left - m * x).cwiseAbs().maxCoeff() < 1e-13 * left.cwiseAbs().maxCoeff());

    Matrix right = Matrix::Zero(12, 12);
    banded.apply_right_adjoint(x, right);
    CHECK((right - x * m.adjoint()).cwiseAbs().maxCoeff() < 1e-13 * right.cwiseAbs().maxCoeff());
}

TEST_CASE("segment evolution") {
    FockSpec spec{7, 7};

    SECTION("zero duration is the identity") {
        LindbladProblem p = decay_problem(spec, true);
        Matrix rho = random_density_matrix(spec.dim(), 7);
        Matrix out = evolve_segment(p, rho, 0.0);
        CHECK((out - rho).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("two-mode excitation swap at t = pi/(2g)") {
        LindbladProblem p = conversion_problem(spec, kG);
        Matrix rho = evolve_segment(p, projector(1, 0, spec), M_PI / (2.0 * kG));
        const int idx01 = spec.joint_index(0, 1);
        CHECK(rho(idx01, idx01).real() == Catch::Approx(1.0).margin(1e-6));
        // oracle: exact two-level solution P01(t) = sin^2(g t) in the
        // single-excitation subspace
        for (double frac : {0.25, 0.6}) {
            const double t = frac * M_PI / kG;
            Matrix r = evolve_segment(p, projector(1, 0, spec), t);
            const double expected = std::sin(kG * t) * std::sin(kG * t);
            CHECK(r(idx01, idx01).real() == Catch::Approx(expected).margin(1e-8));
        }
    }

    SECTION("single-photon decay law <n_a>(t) = exp(-kappa_a t)") {
        LindbladProblem p = decay_problem(spec, false);
        Matrix n_a = number_operator(Mode::A, spec);
        Matrix rho = projector(1, 0, spec);
        double t = 0.0;
        for (int chunk = 0; chunk < 5; ++chunk) {
            rho = evolve_segment(p, rho, 20e-9);
            t += 20e-9;
            const double occ = (n_a * rho).trace().real();
            CHECK(occ == Catch::Approx(std::exp(-kKappaA * t)).margin(1e-4));
        }
    }

    SECTION("trace and hermiticity preserved under drive") {
        Matrix a = joint_annihilation(Mode::A, spec);
        Matrix b = joint_annihilation(Mode::B, spec);
        const Complex iu(0.0, 1.0);
        LindbladProblem p = decay_problem(spec, true);
        p.hamiltonian = kG * (a * b.adjoint() + a.adjoint() * b) +
                        iu * 8e3 * std::sqrt(2.0 * kKappaA) * (a - Matrix(a.adjoint())) +
                        iu * 8e3 * std::sqrt(2.0 * kKappaB) * (b - Matrix(b.adjoint()));
        Matrix rho = vacuum_state(spec);
        for (int seg = 0; seg < 3; ++seg) {
            rho = evolve_segment(p, rho, 100e-9);
            CHECK(std::abs(rho.trace().real() - 1.0) < 1e-8);
            CHECK(hermiticity_error(rho) < 1e-10);
            CHECK(min_eigenvalue(rho) > -1e-8);
        }
    }

    SECTION("halving dt changes occupations by < 1e-6") {
        Matrix a = joint_annihilation(Mode::A, spec);
        Matrix b = joint_annihilation(Mode::B, spec);
        const Complex iu(0.0, 1.0);
        LindbladProblem p = decay_problem(spec, true);
        p.hamiltonian = kG * (a * b.adjoint() + a.adjoint() * b) +
                        iu * 1e4 * std::sqrt(2.0 * kKappaA) * (a - Matrix(a.adjoint())) +
                        iu * 1e4 * std::sqrt(2.0 * kKappaB) * (b - Matrix(b.adjoint()));
        Matrix coarse = evolve_segment(p, vacuum_state(spec), 100e-9);
        p.dt = 0.025e-9;
        Matrix fine = evolve_segment(p, vacuum_state(spec), 100e-9);
        const double dp = (coarse.diagonal() - fine.diagonal()).cwiseAbs().maxCoeff();
        CHECK(dp < 1e-6);
    }

    SECTION("with separate dissipators every state relaxes to vacuum") {
        // populations decay as exp(-n kappa t) with a cascade from above, so
        // reaching 1e-6 from a generic mixed state takes ~16/kappa; 20/kappa
        // leaves margin
        LindbladProblem p = decay_problem(spec, false);
        Matrix rho = random_density_matrix(spec.dim(), 21);
        const double horizon = 20.0 / std::min(kKappaA, kKappaB);
        rho = evolve_segment(p, rho, 0.5 * horizon);
        rho = evolve_segment(p, rho, 0.5 * horizon);
        for (int k = 1; k < spec.dim(); ++k) {
            CHECK(rho(k, k).real() < 1e-6);
        }
        CHECK(rho(0, 0).real() == Catch::Approx(1.0).margin(1e-6));
    }

    SECTION("conversion conserves total photon number without dissipation") {
        LindbladProblem p = conversion_problem(spec, kG);
        Matrix n_tot = number_operator(Mode::A, spec) + number_operator(Mode::B, spec);
        Matrix rho = projector(2, 1, spec);
        const double n0 = (n_tot * rho).trace().real();
        for (int seg = 0; seg < 2; ++seg) {
            rho = evolve_segment(p, rho, 100e-9);
            CHECK(std::abs((n_tot * rho).trace().real() - n0) < 1e-8);
        }
    }

    SECTION("deterministic for identical inputs") {
        LindbladProblem p = decay_problem(spec, true);
        p.hamiltonian = conversion_problem(spec, kG).hamiltonian;
        Matrix rho = random_density_matrix(spec.dim(), 3);
        Matrix r1 = evolve_segment(p, rho, 30e-9);
        Matrix r2 = evolve_segment(p, rho, 30e-9);
        CHECK((r1 - r2).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("integrator error reporting") {
    FockSpec spec{3, 3};

    SECTION("unstable step is flagged as divergence") {
        // kappa * dt far beyond the RK4 stability region
        LindbladProblem p = decay_problem(spec, false, 40e-9);
        Matrix rho = random_density_matrix(spec.dim(), 9);
        CHECK_THROWS_AS(evolve_segment(p, rho, 4000e-9), IntegratorDivergenceError);
    }

    SECTION("non-positive states are flagged") {
        LindbladProblem p;
        p.hamiltonian = Matrix::Zero(spec.dim(), spec.dim());
        p.dt = 1e-9;
        Matrix rho = Matrix::Zero(spec.dim(), spec.dim());
        rho(0, 0) = 1.5;
        rho(1, 1) = -0.5;
        CHECK_THROWS_AS(evolve_segment(p, rho, 1e-9), PositivityViolationError);
    }

    SECTION("non-Hermitian Hamiltonian rejected") {
        LindbladProblem p;
        p.hamiltonian = Matrix::Zero(4, 4);
        p.hamiltonian(0, 1) = Complex(0.0, 1.0);
        p.dt = 1e-9;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
}
