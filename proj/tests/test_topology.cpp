#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "moire/topology.hpp"

using namespace moire;
using std::numbers::pi;

TEST_CASE("gap closure is reported with its k-point") {
    ModelParams p;
    p.alpha = p.beta = p.U = 0;
    p.h = 0.5;
    // A single band out of a degenerate pair cannot be isolated.
    const KGrid g = make_kgrid(4, 4, build_lattice());
    CHECK_THROWS_WITH_AS(berry_links(p, g, 1, 3.0), doctest::Contains("at k ="), NumericalError);
}

TEST_CASE("link fluxes are gauge invariant") {
    ModelParams p = reference_params(0.1);
    p.U = 1.0;
    const BlochSolver solver(p, 5.0);
    const KGrid g = make_kgrid(6, 6, build_lattice());
    BandFrames f = compute_frames(solver, g, 2);
    const Eigen::MatrixXd before = fluxes_from_frames(f, solver.basis());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-pi, pi);
    for (auto& frame : f.frames)
        for (Eigen::Index c = 0; c < frame.cols(); ++c) frame.col(c) *= std::polar(1.0, u(rng));
    // Also mix the two bands by a random unitary.
    for (auto& frame : f.frames) {
        const double t = u(rng);
        Eigen::Matrix2cd rot;
        rot << std::cos(t), -std::sin(t) * std::polar(1.0, 0.3), std::sin(t) * std::polar(1.0, -0.3), std::cos(t);
        frame = (frame * rot).eval();
    }
    const Eigen::MatrixXd after = fluxes_from_frames(f, solver.basis());
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Chern number of the reference bands") {
    const ModelParams p = reference_params(0.08);
    const BlochSolver solver(p, 6.0);
    const CurvatureField a = berry_links(solver, make_kgrid(9, 9, build_lattice()), 1);
    CHECK(a.chern == 0);
    CHECK(std::abs(a.total - a.chern) < 1e-6);
    CHECK(a.min_gap > 0);
    for (Eigen::Index i = 0; i < a.plaquette_flux.size(); ++i) {
        CHECK(a.plaquette_flux(i) > -pi);
        CHECK(a.plaquette_flux(i) <= pi);
    }
}

TEST_CASE("oddness check") {
    ModelParams p = reference_params(0.1);
    p.U = 2.0;
    const OddnessReport skipped = curvature_oddness_check(p, make_kgrid(4, 4, build_lattice()), 1, 4.0);
    CHECK(skipped.skipped);
    CHECK(skipped.notice.find("U = 0") != std::string::npos);

    p.U = 0.0;
    KGrid shifted = make_kgrid(4, 4, build_lattice());
    for (auto& k : shifted.points) k += Vec2(0.05, 0.0);
    CHECK_THROWS_AS(curvature_oddness_check(p, shifted, 1, 4.0), ValidationError);

    const OddnessReport r = curvature_oddness_check(p, make_kgrid(6, 6, build_lattice()), 2, 5.0);
    CHECK_FALSE(r.skipped);
    // |F(k) + F(-k)| can never exceed twice the largest flux.
    CHECK(r.defect <= 2.0 * r.max_flux + 1e-12);
    CHECK(r.max_flux > 0.0);
}
