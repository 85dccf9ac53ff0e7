#include "moire/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <lapacke.h>

namespace moire {

namespace {

Eigen::VectorXd residual_norms(const Eigen::MatrixXcd& av, const Eigen::MatrixXcd& v, const Eigen::VectorXd& w) {
    Eigen::VectorXd r(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) r(i) = (av.col(i) - w(i) * v.col(i)).norm();
    return r;
}

/// Orthonormalise the columns of w against the orthonormal columns of v and among themselves.
/// Columns that vanish under projection are dropped.
Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& v, Eigen::MatrixXcd w) {
    for (int pass = 0; pass < 2; ++pass) {
        if (v.cols() > 0) w -= v * (v.adjoint() * w);
    }
    std::vector<Eigen::VectorXcd> kept;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        Eigen::VectorXcd c = w.col(j);
        const double before = c.norm();
        if (before == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : kept) c -= q * q.dot(c);
            if (v.cols() > 0) c -= v * (v.adjoint() * c);
        }
        const double after = c.norm();
        if (after <= 1e-10 * before) continue;
        kept.push_back(c / after);
    }
    Eigen::MatrixXcd out(w.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = kept[j];
    return out;
}

}  // namespace

double norm_inf(const Eigen::MatrixXcd& a) {
    return a.rows() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

double norm_inf(const SparseMatrixC& a) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(a, k); it; ++it) rows(it.row()) += std::abs(it.value());
    }
    return rows.size() == 0 ? 0.0 : rows.maxCoeff();
}

void fix_phases(Eigen::MatrixXcd& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        Eigen::Index imax = 0;
        double amax = -1.0;
        for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
            const double a = std::abs(vectors(i, j));
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        if (amax > 0.0) vectors.col(j) *= std::conj(vectors(imax, j)) / amax;
    }
}

EigenResult dense_hermitian_eigs(const Eigen::MatrixXcd& a, int nev, double tol) {
    const auto n = static_cast<lapack_int>(a.rows());
    if (a.cols() != a.rows()) throw ValidationError("dense_hermitian_eigs: matrix must be square");
    if (nev < 1 || nev > n) throw ValidationError("dense_hermitian_eigs: need 1 <= nev <= dim");

    Eigen::MatrixXcd work = a;
    std::vector<double> w(static_cast<std::size_t>(n));
    Eigen::MatrixXcd z(n, nev);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', n, reinterpret_cast<lapack_complex_double*>(work.data()), n, 0.0, 0.0, 1,
        nev, 0.0, &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()), n, isuppz.data());
    if (info != 0 || found != nev) {
        throw NumericalError("zheevr failed: info=" + std::to_string(info) + ", found " + std::to_string(found) +
                             " of " + std::to_string(nev) + " eigenpairs");
    }

    EigenResult res;
    res.values = Eigen::Map<Eigen::VectorXd>(w.data(), nev);
    res.vectors = std::move(z);
    fix_phases(res.vectors);
    const Eigen::MatrixXcd full = a.selfadjointView<Eigen::Lower>();
    res.residuals = residual_norms(full * res.vectors, res.vectors, res.values);
    res.operator_norm = norm_inf(full);
    res.iterations = 1;
    const double bound = tol * std::max(res.operator_norm, 1.0);
    for (int i = 0; i < nev; ++i) {
        if (!(res.residuals(i) <= bound)) {
            throw NumericalError("dense eigensolver residual " + std::to_string(res.residuals(i)) +
                                 " exceeds bound " + std::to_string(bound) + " for pair " + std::to_string(i));
        }
    }
    return res;
}

EigenResult sparse_lowest_eigs(const SparseMatrixC& a, int nev, double lower_bound, const SparseEigOptions& opt) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw ValidationError("sparse_lowest_eigs: matrix must be square");
    if (nev < 1 || nev > n) throw ValidationError("sparse_lowest_eigs: need 1 <= nev <= dim");

    const int block = static_cast<int>(std::min<Eigen::Index>(n, opt.block > 0 ? opt.block : nev + 2));
    const int max_basis = static_cast<int>(std::min<Eigen::Index>(n, opt.max_basis > 0 ? opt.max_basis : 6 * block));
    if (n <= opt.dense_below || max_basis >= n) {
        return dense_hermitian_eigs(Eigen::MatrixXcd(a), nev, opt.tol);
    }

    SparseMatrixC identity(n, n);
    identity.setIdentity();
    Eigen::SimplicialLLT<SparseMatrixC, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
    double margin = std::max(opt.shift_margin, 1e-8);
    double sigma = lower_bound - margin;
    llt.analyzePattern(SparseMatrixC(a - sigma * identity));
    for (int attempt = 0;; ++attempt) {
        llt.factorize(SparseMatrixC(a - sigma * identity));
        if (llt.info() == Eigen::Success) break;
        if (attempt >= 8) {
            throw NumericalError("shifted operator is not positive definite; lower bound " +
                                 std::to_string(lower_bound) + " is not below the spectrum");
        }
        margin *= 4.0;
        sigma = lower_bound - margin;
    }

    const double norm_a = norm_inf(a);
    const double bound = opt.tol * std::max(norm_a, 1.0);

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd x(n, block);
    for (Eigen::Index j = 0; j < block; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = cplx(gauss(rng), gauss(rng));
    }

    EigenResult res;
    res.operator_norm = norm_a;
    for (int cycle = 1; cycle <= opt.max_cycles; ++cycle) {
        Eigen::MatrixXcd v = orthonormalize(Eigen::MatrixXcd(n, 0), x);
        Eigen::MatrixXcd w = v;
        while (v.cols() + block <= max_basis && w.cols() > 0) {
            w = orthonormalize(v, llt.solve(w));
            if (w.cols() == 0) break;
            Eigen::MatrixXcd grown(n, v.cols() + w.cols());
            grown << v, w;
            v.swap(grown);
        }

        const Eigen::MatrixXcd av = a * v;
        Eigen::MatrixXcd proj = v.adjoint() * av;
        proj = 0.5 * (proj + proj.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(proj);
        if (es.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz projection failed");

        const Eigen::Index keep = std::min<Eigen::Index>(block, v.cols());
        const Eigen::MatrixXcd ritz = v * es.eigenvectors().leftCols(keep);
        const Eigen::MatrixXcd aritz = av * es.eigenvectors().leftCols(keep);
        const Eigen::VectorXd theta = es.eigenvalues().head(keep);
        const Eigen::VectorXd r = residual_norms(aritz, ritz, theta);

        res.iterations = cycle;
        if (keep >= nev && r.head(nev).maxCoeff() <= bound) {
            res.values = theta.head(nev);
            res.vectors = ritz.leftCols(nev);
            res.residuals = r.head(nev);
            fix_phases(res.vectors);
            return res;
        }
        x = ritz;
    }
    throw NumericalError("shift-invert block Krylov did not converge in " + std::to_string(opt.max_cycles) +
                         " cycles (dim " + std::to_string(n) + ", nev " + std::to_string(nev) + ")");
}

}  // namespace moire
