#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "moire/types.hpp"

namespace moire {

using SparseMatrixC = Eigen::SparseMatrix<cplx>;

/// Lowest eigenpairs of a Hermitian operator, ascending.
struct EigenResult {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;     ///< columns, orthonormal, phase-fixed
    Eigen::VectorXd residuals;    ///< ||A v - lambda v|| per pair
    double operator_norm = 0.0;   ///< infinity-norm bound used by the residual contract
    int iterations = 0;
};

/// Infinity norm (max absolute row sum); an upper bound on the spectral norm.
double norm_inf(const Eigen::MatrixXcd& a);
double norm_inf(const SparseMatrixC& a);

/// Rotate each column so its largest-magnitude entry (first on ties) is real and positive.
void fix_phases(Eigen::MatrixXcd& vectors);

/// nev smallest eigenpairs of a dense Hermitian matrix (lower triangle referenced).
///
/// Householder tridiagonalisation plus MRRR through LAPACK zheevr. Throws NumericalError
/// when LAPACK reports failure or a residual exceeds tol * ||A||.
EigenResult dense_hermitian_eigs(const Eigen::MatrixXcd& a, int nev, double tol = 1e-10);

struct SparseEigOptions {
    double tol = 1e-10;        ///< residual tolerance relative to ||A||_inf
    double shift_margin = 0.05;
    int block = 0;             ///< Krylov block size; 0 picks nev + 2
    int max_basis = 0;         ///< Krylov basis columns per cycle; 0 picks 6 * block
    int max_cycles = 400;
    std::uint64_t seed = 0x5eed;
    int dense_below = 200;     ///< use the dense solver for smaller problems
};

/// nev smallest eigenpairs of a sparse Hermitian matrix with spectrum bounded below by
/// `lower_bound`.
///
/// Restarted block Krylov iteration on (A - sigma)^{-1}, sigma = lower_bound - margin, with
/// Rayleigh-Ritz on A itself. The sparse Cholesky factorisation doubles as a positivity
/// check: if it fails the margin is doubled and the shift retried.
EigenResult sparse_lowest_eigs(const SparseMatrixC& a, int nev, double lower_bound,
                               const SparseEigOptions& opt = {});

}  // namespace moire
