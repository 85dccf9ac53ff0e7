#pragma once

#include <string>
#include <vector>

#include "moire/blochpw.hpp"

namespace moire {

/// Orthonormal eigenvector frames of the lowest bands on a k-grid plus the next eigenvalue,
/// which decides whether the band group is isolated.
struct BandFrames {
    KGrid grid;
    int nbands = 0;
    std::vector<Eigen::MatrixXcd> frames;  ///< per grid index, dim x nbands
    Eigen::MatrixXd energies;              ///< [n_k x (nbands + 1)]
};

BandFrames compute_frames(const BlochSolver& solver, const KGrid& grid, int nbands, int workers = 1);

struct CurvatureField {
    KGrid grid;
    int nbands = 0;
    Eigen::MatrixXd plaquette_flux;  ///< [n1 x n2], each in (-pi, pi]
    double total = 0.0;              ///< sum of fluxes / 2 pi
    int chern = 0;
    double min_gap = 0.0;
    Vec2 min_gap_k = Vec2::Zero();
};

/// Link-variable fluxes of a frame field. Frames past the cell edge are obtained from the
/// frames at the opposite edge by relabelling plane waves (k + g -> k).
Eigen::MatrixXd fluxes_from_frames(const BandFrames& frames, const PlaneWaveBasis& basis);

/// Berry fluxes and Chern number of the lowest nbands. Throws NumericalError naming k when the
/// gap above the group falls to 1e-8 or less.
CurvatureField berry_links(const BlochSolver& solver, const KGrid& grid, int nbands, int workers = 1);
CurvatureField berry_links(const ModelParams& p, const KGrid& grid, int nbands, double gcut, int workers = 1);

struct OddnessReport {
    bool skipped = false;
    std::string notice;
    double defect = 0.0;    ///< max |flux(P) + flux(-P)|
    double max_flux = 0.0;  ///< max |flux|
};

/// Checks flux(-P) = -flux(P) on a grid closed under k -> -k. Skipped (with notice) for U != 0.
OddnessReport curvature_oddness_check(const ModelParams& p, const KGrid& grid, int nbands, double gcut,
                                      int workers = 1);
OddnessReport curvature_oddness(const CurvatureField& field, const ModelParams& p);

}  // namespace moire
