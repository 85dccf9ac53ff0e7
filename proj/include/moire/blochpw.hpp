#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "moire/eigensolver.hpp"
#include "moire/lattice.hpp"
#include "moire/potential.hpp"

namespace moire {

/// Plane waves exp(i <g, x>) with |g| <= gcut * |g1|; each carries two layer components.
class PlaneWaveBasis {
public:
    PlaneWaveBasis(double gcut, const Lattice& lat);

    double gcut() const { return gcut_; }
    std::size_t size() const { return gvecs_.size(); }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(2 * gvecs_.size()); }

    /// Integer dual coordinates (m, n) of plane wave i; sorted by |g|, then m, then n.
    const std::vector<std::pair<int, int>>& gvecs() const { return gvecs_; }
    const Vec2& cartesian(std::size_t i) const { return cart_[i]; }

    /// Index of m g1 + n g2 in the basis, or -1.
    long find(int m, int n) const;

private:
    double gcut_;
    std::vector<std::pair<int, int>> gvecs_;
    std::vector<Vec2> cart_;
    int bound_ = 0;
    std::vector<long> lookup_;
};

/// Galerkin matrix of H_k = h^2 (D + k)^2 + V in the plane-wave basis.
/// Row/column 2 i + a is plane wave i in layer a.
struct BlochMatrix {
    Vec2 k = Vec2::Zero();
    Eigen::MatrixXcd entries;

    Eigen::Index dim() const { return entries.rows(); }
};

BlochMatrix assemble_bloch(const ModelParams& p, const Vec2& k, const PlaneWaveBasis& basis, const FourierTable& table);
SparseMatrixC assemble_bloch_sparse(const ModelParams& p, const Vec2& k, const PlaneWaveBasis& basis,
                                    const FourierTable& table);

/// nev lowest eigenpairs of a Bloch matrix (dense route).
EigenResult hermitian_eigs(const BlochMatrix& m, int nev);

enum class SolverKind { automatic, dense, sparse };

struct BandOptions {
    int nbands = 4;
    bool want_vectors = false;
    SolverKind solver = SolverKind::automatic;
    int workers = 1;
};

struct BandStructure {
    std::vector<Vec2> kpoints;
    Eigen::MatrixXd energies;   ///< [n_k x n_bands], ascending per row
    Eigen::MatrixXd residuals;  ///< [n_k x n_bands]
    std::vector<Eigen::MatrixXcd> vectors;  ///< per k, only when requested
    ModelParams params;
    double gcut = 0.0;
    Eigen::Index dim = 0;
};

/// Caches the Fourier table, basis and a lower spectral bound for repeated k-point solves.
class BlochSolver {
public:
    BlochSolver(const ModelParams& p, double gcut);

    const ModelParams& params() const { return params_; }
    const PlaneWaveBasis& basis() const { return basis_; }
    const FourierTable& table() const { return table_; }
    const Lattice& lattice() const { return lattice_; }
    /// Lower bound on every Bloch eigenvalue (sampled potential floor minus a safety margin).
    double spectral_floor() const { return floor_; }

    EigenResult solve(const Vec2& k, int nev, SolverKind solver = SolverKind::automatic) const;
    BandStructure bands_on(const std::vector<Vec2>& kset, const BandOptions& opt) const;

private:
    ModelParams params_;
    Lattice lattice_;
    PlaneWaveBasis basis_;
    FourierTable table_;
    double floor_;
};

BandStructure bands_on(const std::vector<Vec2>& kset, const ModelParams& p, double gcut, const BandOptions& opt);

struct ConvergenceRow {
    double gcut = 0.0;
    Eigen::Index dim = 0;
    Eigen::VectorXd energies;  ///< lowest levels at this cutoff
    double delta = 0.0;        ///< max |change| against the previous cutoff; 0 for the first row
};

/// Lowest `nlevels` eigenvalues of H_k against an ascending sequence of cutoffs (at least 3).
std::vector<ConvergenceRow> convergence_study(const ModelParams& p, const Vec2& k, const std::vector<double>& gcuts,
                                              int nlevels = 1);

/// Smallest cutoff start, start + step, ... whose lowest `nlevels` Gamma-point eigenvalues
/// differ from the previous cutoff by less than tol. Throws NumericalError past max_gcut.
double converged_cutoff(const ModelParams& p, double tol = 1e-9, int nlevels = 1, double start = 6.0,
                        double step = 2.0, double max_gcut = 64.0);

}  // namespace moire
