#include <doctest.h>

#include <cmath>
#include <numbers>

#include "moire/singlewell.hpp"
#include "oracles.hpp"

using namespace moire;
using std::numbers::pi;

TEST_CASE("cutoff profile") {
    const CutoffSpec chi;
    CHECK(chi(0.0) == 1.0);
    CHECK(chi(0.3) == 1.0);
    CHECK(chi(0.45) == 0.0);
    CHECK(chi(2.0) == 0.0);
    double last = 1.0;
    for (double r = 0.3; r <= 0.45; r += 0.001) {
        CHECK(chi(r) <= last + 1e-15);
        last = chi(r);
    }
    // C^2: one-sided second differences vanish at both ends.
    const double e = 1e-6;
    CHECK(std::abs(chi(0.3 + 2 * e) - 2 * chi(0.3 + e) + chi(0.3)) / (e * e) < 1e-1);
    CHECK(std::abs(chi(0.45) - 2 * chi(0.45 - e) + chi(0.45 - 2 * e)) / (e * e) < 1e-1);
}

TEST_CASE("problem validation") {
    WellProblem wp;
    wp.params = reference_params(0.1);
    wp.n = 32;
    CHECK_THROWS_AS(assemble_well(wp), ValidationError);
    wp.n = 64;
    wp.L = 0.6;
    CHECK_THROWS_AS(wp.validate(), ValidationError);
    wp.L = 1.5;
    wp.chi.delta2 = 1.2;
    CHECK_THROWS_AS(wp.validate(), ValidationError);
}

TEST_CASE("assembled operator is Hermitian with the right size") {
    WellProblem wp;
    wp.params = reference_params(0.1);
    wp.params.U = 0.3;
    wp.n = 64;
    const SparseMatrixC a = assemble_well(wp);
    CHECK(a.rows() == 2 * 64 * 64);
    const SparseMatrixC d = a - SparseMatrixC(a.adjoint());
    double worst = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (SparseMatrixC::InnerIterator it(d, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    CHECK(worst == 0.0);
}

TEST_CASE("empty box reproduces the discrete Dirichlet spectrum") {
    WellProblem wp;
    wp.params = reference_params(0.1);
    wp.n = 96;
    wp.fill_wells = false;
    wp.potential = [](const Vec2&) { return Mat2c::Zero().eval(); };
    const WellSpectrum s = well_eigs(wp, 4);
    const auto exact = oracle::discrete_box_levels(0.01, 96, wp.step(), 2);
    // Two layers double every level.
    CHECK(std::abs(s.values(0) - exact[0]) < 1e-10);
    CHECK(std::abs(s.values(1) - exact[0]) < 1e-10);
    CHECK(std::abs(s.values(2) - exact[1]) < 1e-10);
    const double continuum = 2 * 0.01 * std::pow(pi / (2 * wp.L), 2);
    CHECK(std::abs(s.values(0) - continuum) / continuum < 0.02);
}

TEST_CASE("harmonic potential gives the oscillator ground state") {
    const double c1 = 40.0, c2 = 70.0, h = 0.05;
    WellProblem wp;
    wp.params = reference_params(h);
    wp.n = 256;
    wp.fill_wells = false;
    wp.potential = [&](const Vec2& x) {
        Mat2c m = Mat2c::Zero();
        m(0, 0) = -1.0 + c1 * x.x() * x.x() + c2 * x.y() * x.y();
        m(1, 1) = m(0, 0) + 10.0;
        return m;
    };
    const WellSpectrum s = well_eigs(wp, 3);
    const double e1 = -1.0 + h * (std::sqrt(c1) + std::sqrt(c2));
    CHECK(std::abs(s.values(0) - e1) / std::abs(e1) < 0.01);
    CHECK(s.values(0) < s.values(1));
    CHECK(s.values(1) < s.values(2));
    CHECK(s.residuals.maxCoeff() <= 1e-8);
}

TEST_CASE("reference well: floor bound and second-order convergence") {
    WellProblem wp;
    wp.params = reference_params(0.1);
    wp.n = 64;
    const WellSpectrum coarse = well_eigs(wp, 1);
    CHECK(coarse.values(0) >= -6.0 - 1e-9);
    CHECK(well_floor(wp) >= -6.0 - 1e-12);

    const RichardsonEstimate r = well_richardson(wp);
    CHECK(r.levels[0] == coarse.values(0));
    CHECK(r.observed_ratio >= 3.5);
    CHECK(r.observed_ratio <= 4.5);
    // Levels rise towards the continuum value; the budget is far below the raw FD error.
    CHECK(r.levels[0] < r.levels[1]);
    CHECK(r.extrapolated > r.levels[2]);
    CHECK(r.budget < 0.1 * (r.levels[2] - r.levels[1]));
}
