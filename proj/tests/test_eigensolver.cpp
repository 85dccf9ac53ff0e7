#include <doctest.h>

#include <thread>

#include "moire/eigensolver.hpp"
#include "moire/parallel.hpp"
#include "oracles.hpp"

using namespace moire;

TEST_CASE("dense solver on small matrices") {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
    d.diagonal() << 3.0, -1.0, 2.0, 0.5;
    const EigenResult r = dense_hermitian_eigs(d, 4);
    CHECK(r.values(0) == -1.0);
    CHECK(r.values(1) == 0.5);
    CHECK(r.values(2) == 2.0);
    CHECK(r.values(3) == 3.0);

    Eigen::MatrixXcd x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    const EigenResult s = dense_hermitian_eigs(x, 2);
    CHECK(s.values(0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(s.values(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(dense_hermitian_eigs(x, 3), ValidationError);
}

TEST_CASE("dense solver agrees with Jacobi rotations") {
    const Eigen::MatrixXcd a = oracle::random_hermitian(30, 11);
    const auto ref = oracle::hermitian_eigenvalues(a);
    const EigenResult r = dense_hermitian_eigs(a, 30);
    for (int i = 0; i < 30; ++i) CHECK(std::abs(r.values(i) - ref[static_cast<std::size_t>(i)]) < 1e-11);
    const Eigen::MatrixXcd gram = r.vectors.adjoint() * r.vectors;
    CHECK((gram - Eigen::MatrixXcd::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.residuals.maxCoeff() <= 1e-10 * r.operator_norm);
}

TEST_CASE("phase fixing makes the largest entry real and positive") {
    const Eigen::MatrixXcd a = oracle::random_hermitian(12, 12);
    const EigenResult r = dense_hermitian_eigs(a, 3);
    for (int j = 0; j < 3; ++j) {
        Eigen::Index i = 0;
        r.vectors.col(j).cwiseAbs().maxCoeff(&i);
        CHECK(std::abs(r.vectors(i, j).imag()) < 1e-15);
        CHECK(r.vectors(i, j).real() > 0);
    }
}

TEST_CASE("sparse shift-invert matches the dense solver") {
    // 1D Laplacian plus a random diagonal, complexified by a unitary diagonal similarity.
    const int n = 800;
    std::vector<Eigen::Triplet<cplx>> t;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<cplx> phase(n);
    for (int i = 0; i < n; ++i) phase[static_cast<std::size_t>(i)] = std::polar(1.0, 3.0 * u(rng));
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0 + u(rng));
        if (i + 1 < n) {
            const cplx off = -std::conj(phase[static_cast<std::size_t>(i)]) * phase[static_cast<std::size_t>(i + 1)];
            t.emplace_back(i, i + 1, off);
            t.emplace_back(i + 1, i, std::conj(off));
        }
    }
    SparseMatrixC a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    const EigenResult s = sparse_lowest_eigs(a, 5, -1.0);
    const EigenResult d = dense_hermitian_eigs(Eigen::MatrixXcd(a), 5);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(s.values(i) - d.values(i)) < 1e-10);
    CHECK(s.residuals.maxCoeff() <= 1e-10 * s.operator_norm);

    // A lower bound that is too high is detected by the factorisation and widened.
    const EigenResult w = sparse_lowest_eigs(a, 2, d.values(0) + 0.5);
    CHECK(std::abs(w.values(0) - d.values(0)) < 1e-10);
}

TEST_CASE("worker resolution and parallel loop") {
    CHECK(resolve_workers(3) == 3);
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) throw NumericalError("boom");
                                 }),
                    NumericalError);
}
