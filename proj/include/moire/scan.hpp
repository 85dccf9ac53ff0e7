#pragma once

#include <string>
#include <vector>

#include "moire/blochpw.hpp"

namespace moire {

/// Least-squares fit ln w = a - b / h.
struct ExpFit {
    double a = 0.0;
    double b = 0.0;
    double r2 = 0.0;
    int used = 0;  ///< points kept after dropping widths below 1e-12
};

ExpFit exp_fit(const std::vector<double>& h, const std::vector<double>& w);

struct WidthTable {
    std::vector<double> h;
    Eigen::MatrixXd widths;  ///< [n_h x n_bands]
    double gcut = 0.0;
    Eigen::Index dim = 0;
};

/// max_k E_i - min_k E_i over the grid. gcut <= 0 picks a cutoff converged at the smallest h.
WidthTable band_widths(const ModelParams& p, const std::vector<double>& h_list, const KGrid& grid, int nbands,
                       double gcut = 0.0, int workers = 1);

/// Widths of a computed band structure, one per band.
Eigen::VectorXd widths_of(const BandStructure& bs);

struct FlatbandAudit {
    Eigen::VectorXd widths;
    double min_width = 0.0;
    int narrowest_band = 0;  ///< 1-based
};

FlatbandAudit flatband_audit(const ModelParams& p, int nbands, const KGrid& grid, double gcut = 0.0,
                             int workers = 1);

struct ScanResult {
    WidthTable table;
    std::vector<ExpFit> fits;  ///< per band; a band with fewer than 4 usable widths gets used = 0
    double S0 = 0.0;
    double ratio = 0.0;  ///< fits[0].b / S0
    std::vector<std::string> warnings;
};

/// Widths, per-band fits and the b / S0 diagnostic (warning only outside [0.3, 2.2]).
ScanResult run_scan(const ModelParams& p, const std::vector<double>& h_list, const KGrid& grid, int nbands,
                    double gcut, double S0, int workers = 1);

/// Cutoff tolerance used for width measurements: widths reach 1e-11 at the smallest default h.
inline constexpr double kWidthCutoffTol = 1e-12;

}  // namespace moire
