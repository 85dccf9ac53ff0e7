#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "moire/blochpw.hpp"
#include "oracles.hpp"

using namespace moire;
using std::numbers::pi;

namespace {
ModelParams zero_potential(double h) {
    ModelParams p;
    p.alpha = p.beta = p.U = 0;
    p.h = h;
    return p;
}

double spectrum_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::vector<Vec2> random_ks(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-6, 6);
    std::vector<Vec2> ks;
    for (int i = 0; i < n; ++i) ks.emplace_back(u(rng), u(rng));
    return ks;
}
}  // namespace

TEST_CASE("plane-wave basis") {
    const Lattice lat = build_lattice();
    const PlaneWaveBasis b(3.0, lat);
    CHECK(b.dim() == 2 * static_cast<Eigen::Index>(b.size()));
    CHECK(b.gvecs().front() == std::make_pair(0, 0));
    double last = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto [m, n] = b.gvecs()[i];
        const double norm = lat.dual(m, n).norm();
        CHECK(norm <= 3.0 * lat.g1.norm() + 1e-9);
        CHECK(norm >= last - 1e-9);
        last = norm;
        CHECK(b.find(-m, -n) >= 0);
        CHECK(b.find(m, n) == static_cast<long>(i));
    }
    // Brute-force count of dual vectors inside the disc.
    std::size_t count = 0;
    for (int m = -10; m <= 10; ++m)
        for (int n = -10; n <= 10; ++n) count += lat.dual(m, n).norm() <= 3.0 * lat.g1.norm() + 1e-9;
    CHECK(b.size() == count);
    CHECK_THROWS_AS(PlaneWaveBasis(0.0, lat), ValidationError);
}

TEST_CASE("Bloch matrix structure") {
    const Lattice lat = build_lattice();
    const PlaneWaveBasis basis(2.0, lat);
    const Vec2 k(0.4, -1.1);
    SUBCASE("free particle is diagonal") {
        const ModelParams p = zero_potential(0.3);
        const BlochMatrix m = assemble_bloch(p, k, basis, fourier_table(p, lat));
        for (std::size_t i = 0; i < basis.size(); ++i) {
            const double kin = 0.09 * (basis.cartesian(i) + k).squaredNorm();
            for (int a = 0; a < 2; ++a) {
                const auto r = static_cast<Eigen::Index>(2 * i + a);
                CHECK(std::abs(m.entries(r, r) - cplx(kin)) < 1e-12);
            }
        }
        Eigen::MatrixXcd off = m.entries;
        off.diagonal().setZero();
        CHECK(off.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("Hermitian and equal to the sparse assembly") {
        ModelParams p = reference_params(0.2);
        p.U = 0.4;
        p.alpha = 0.8;
        const FourierTable t = fourier_table(p, lat);
        const BlochMatrix m = assemble_bloch(p, k, basis, t);
        CHECK((m.entries - m.entries.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * m.entries.cwiseAbs().maxCoeff());
        const Eigen::MatrixXcd s = Eigen::MatrixXcd(assemble_bloch_sparse(p, k, basis, t));
        CHECK((s - m.entries).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("matrix elements match cell quadrature") {
        ModelParams p = reference_params(0.2);
        p.U = 0.7;
        const BlochMatrix m = assemble_bloch(p, k, basis, fourier_table(p, lat));
        const double h2 = p.h * p.h;
        for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{4}}) {
            for (std::size_t j : {std::size_t{0}, std::size_t{2}, std::size_t{5}, std::size_t{9}}) {
                const Vec2 g = basis.cartesian(i);
                const Vec2 gp = basis.cartesian(j);
                for (int a = 0; a < 2; ++a) {
                    for (int b = 0; b < 2; ++b) {
                        const cplx q = oracle::cell_average(lat.v1, lat.v2, 64, [&](const Vec2& x) {
                            const double kin = (i == j && a == b) ? h2 * (gp + k).squaredNorm() : 0.0;
                            return std::polar(1.0, -g.dot(x)) * (kin + assemble_V(x, p)(a, b)) *
                                   std::polar(1.0, gp.dot(x));
                        });
                        CHECK(std::abs(m.entries(static_cast<Eigen::Index>(2 * i + a),
                                                 static_cast<Eigen::Index>(2 * j + b)) -
                                       q) < 1e-10);
                    }
                }
            }
        }
    }
}

TEST_CASE("free-particle bands along a path") {
    const ModelParams p = zero_potential(0.5);
    const Lattice lat = build_lattice();
    const KPath path = kpath(std::vector<std::string>{"G", "K", "M", "G"}, 6, lat);
    BandOptions opt;
    opt.nbands = 2;
    const BandStructure bs = bands_on(path.points, p, 3.0, opt);
    const PlaneWaveBasis basis(3.0, lat);
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        double best = 1e300;
        for (std::size_t q = 0; q < basis.size(); ++q)
            best = std::min(best, (basis.cartesian(q) + path.points[i]).squaredNorm());
        CHECK(std::abs(bs.energies(static_cast<Eigen::Index>(i), 0) - 0.25 * best) < 1e-12);
        CHECK(std::abs(bs.energies(static_cast<Eigen::Index>(i), 1) - 0.25 * best) < 1e-12);
    }
}

TEST_CASE("spectral symmetries of the Bloch fibres") {
    const Lattice lat = build_lattice();
    ModelParams p = reference_params(0.3);
    const BlochSolver solver(p, 8.0);
    for (const Vec2& k : random_ks(4, 21)) {
        const Eigen::VectorXd e = solver.solve(k, 6).values;
        CHECK(spectrum_gap(e, solver.solve(-k, 6).values) < 1e-10);
        CHECK(spectrum_gap(e, solver.solve(Vec2(k.x(), -k.y()), 6).values) < 1e-10);
    }
    SUBCASE("decoupled layers are rotation symmetric") {
        ModelParams q = p;
        q.beta = 0;
        const BlochSolver s(q, 8.0);
        const Mat2 R = rotation_2pi3();
        for (const Vec2& k : random_ks(3, 22)) CHECK(spectrum_gap(s.solve(k, 6).values, s.solve(R * k, 6).values) < 1e-10);
    }
    SUBCASE("shift by a dual vector at a generous cutoff") {
        const BlochSolver big(p, 12.0);
        const Vec2 k(0.3, 0.8);
        CHECK(spectrum_gap(big.solve(k, 4).values, big.solve(k + lat.g1, 4).values) < 1e-10);
    }
}

TEST_CASE("variational bounds") {
    ModelParams p = reference_params(0.1);
    p.U = 0.5;
    const Vec2 k(0.9, 0.2);
    const double floor = wells_audit(p, 96).minima.front().value;
    Eigen::VectorXd previous;
    for (double gc : {2.0, 3.0, 4.0, 6.0}) {
        const BlochSolver s(p, gc);
        const Eigen::VectorXd e = s.solve(k, 5).values;
        if (previous.size() > 0) {
            for (int i = 0; i < 5; ++i) CHECK(e(i) <= previous(i) + 1e-12);
        }
        CHECK(e(0) >= floor - 1e-9);
        CHECK(e(0) >= s.spectral_floor());
        previous = e;
    }
}

TEST_CASE("dense and sparse routes agree; workers do not change results") {
    const ModelParams p = reference_params(0.05);
    const BlochSolver s(p, 8.0);
    const Vec2 k(1.0, -0.4);
    const EigenResult d = s.solve(k, 4, SolverKind::dense);
    const EigenResult sp = s.solve(k, 4, SolverKind::sparse);
    CHECK(spectrum_gap(d.values, sp.values) < 1e-10);
    CHECK(sp.residuals.maxCoeff() <= 1e-10 * sp.operator_norm);

    const KGrid g = make_kgrid(3, 3, build_lattice());
    BandOptions one;
    one.nbands = 3;
    BandOptions four = one;
    four.workers = 4;
    const BandStructure a = s.bands_on(g.points, one);
    const BandStructure b = s.bands_on(g.points, four);
    CHECK((a.energies.array() == b.energies.array()).all());
    for (Eigen::Index r = 0; r < a.energies.rows(); ++r)
        for (Eigen::Index c = 1; c < a.energies.cols(); ++c) CHECK(a.energies(r, c) >= a.energies(r, c - 1));
}

TEST_CASE("convergence study") {
    const ModelParams free = zero_potential(0.3);
    const auto rows = convergence_study(free, Vec2(0.2, 0.1), {1.0, 2.0, 3.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].delta == 0.0);
    CHECK(rows[2].delta == 0.0);
    for (const auto& r : rows) CHECK(r.dim == PlaneWaveBasis(r.gcut, build_lattice()).dim());
    CHECK_THROWS_AS(convergence_study(free, Vec2::Zero(), {1.0, 2.0}), ValidationError);

    const auto ref = convergence_study(reference_params(0.1), Vec2::Zero(), {3.0, 4.0, 5.0, 6.0, 7.0});
    for (std::size_t i = 2; i < ref.size(); ++i) CHECK(ref[i].delta <= ref[i - 1].delta);
}
