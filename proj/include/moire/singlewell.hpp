#pragma once

#include <array>
#include <functional>

#include "moire/eigensolver.hpp"
#include "moire/potential.hpp"

namespace moire {

/// Radial cutoff: 1 for r <= delta1, 0 for r >= delta2, C^2 quintic smoothstep between.
struct CutoffSpec {
    double delta1 = 0.3;
    double delta2 = 0.45;

    double operator()(double r) const;
};

/// -h^2 Laplacian + V + (1 - chi) on the box [-L, L]^2 with Dirichlet walls, sampled on
/// n x n interior nodes of spacing 2L / (n + 1).
struct WellProblem {
    ModelParams params;
    double L = 1.5;
    int n = 256;
    CutoffSpec chi;
    /// Fill the other wells with (1 - chi). Off only for closed-form checks.
    bool fill_wells = true;
    /// Replaces assemble_V when set.
    std::function<Mat2c(const Vec2&)> potential;

    void validate() const;
    double step() const { return 2.0 * L / (n + 1); }
    Vec2 node(int i, int j) const { return Vec2(-L + (i + 1) * step(), -L + (j + 1) * step()); }
    /// Unknown of component a at node (i, j).
    Eigen::Index index(int i, int j, int a) const { return (static_cast<Eigen::Index>(i) * n + j) * 2 + a; }
    /// Potential block at x including the well filler.
    Mat2c block(const Vec2& x) const;
};

/// Recommended grid size for a given h: finer grids once the oscillator length shrinks.
int default_well_points(double h);

/// Sparse Hermitian operator of dimension 2 n^2.
SparseMatrixC assemble_well(const WellProblem& wp);

/// Minimum over the nodes of the smallest eigenvalue of the potential block; a lower bound
/// on the spectrum since the discrete Laplacian is positive.
double well_floor(const WellProblem& wp);

struct WellSpectrum {
    Eigen::VectorXd values;
    Eigen::VectorXd residuals;  ///< relative to ||A||_inf
    double L = 0.0;
    int n = 0;
    int iterations = 0;
};

WellSpectrum well_eigs(const WellProblem& wp, int nev);

/// Lowest eigenvalue on nested grids n, 2n+1, 4n+3 (spacing halves each time).
struct RichardsonEstimate {
    std::array<double, 3> levels{};   ///< coarse, mid, fine
    double extrapolated = 0.0;        ///< second-order extrapolation of mid and fine
    double budget = 0.0;              ///< distance to the coarse/mid extrapolant; bounds the error left
    double observed_ratio = 0.0;      ///< (mid - coarse) / (fine - mid), 4 for a clean second-order scheme
};

RichardsonEstimate well_richardson(const WellProblem& wp);

}  // namespace moire
