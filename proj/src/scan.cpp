#include "moire/scan.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace moire {

ExpFit exp_fit(const std::vector<double>& h, const std::vector<double>& w) {
    if (h.size() != w.size()) throw ValidationError("h and width lists differ in length");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0)) throw ValidationError("h must be positive");
        if (!(w[i] > 0.0)) throw ValidationError("band width must be positive for an exponential fit");
        if (w[i] < 1e-12) continue;
        xs.push_back(1.0 / h[i]);
        ys.push_back(std::log(w[i]));
    }
    if (xs.size() < 4) throw ValidationError("exponential fit needs at least 4 widths above 1e-12");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw ValidationError("exponential fit needs distinct h values");
    ExpFit f;
    f.used = static_cast<int>(xs.size());
    const double slope = sxy / sxx;
    f.b = -slope;
    f.a = my - slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    return f;
}

Eigen::VectorXd widths_of(const BandStructure& bs) {
    return bs.energies.colwise().maxCoeff() - bs.energies.colwise().minCoeff();
}

WidthTable band_widths(const ModelParams& p, const std::vector<double>& h_list, const KGrid& grid, int nbands,
                       double gcut, int workers) {
    if (h_list.empty()) throw ValidationError("h list is empty");
    if (grid.n1 < 6 || grid.n2 < 6) throw ValidationError("width measurement needs at least a 6 x 6 k-grid");
    WidthTable t;
    t.h = h_list;
    t.widths.resize(static_cast<Eigen::Index>(h_list.size()), nbands);
    if (gcut <= 0.0) {
        ModelParams smallest = p;
        smallest.h = *std::min_element(h_list.begin(), h_list.end());
        gcut = converged_cutoff(smallest, kWidthCutoffTol, nbands);
    }
    t.gcut = gcut;
    BandOptions opt;
    opt.nbands = nbands;
    opt.workers = workers;
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        ModelParams q = p;
        q.h = h_list[i];
        const BlochSolver solver(q, gcut);
        t.dim = solver.basis().dim();
        t.widths.row(static_cast<Eigen::Index>(i)) = widths_of(solver.bands_on(grid.points, opt)).transpose();
    }
    return t;
}

FlatbandAudit flatband_audit(const ModelParams& p, int nbands, const KGrid& grid, double gcut, int workers) {
    if (gcut <= 0.0) gcut = converged_cutoff(p, kWidthCutoffTol, nbands);
    BandOptions opt;
    opt.nbands = nbands;
    opt.workers = workers;
    FlatbandAudit a;
    a.widths = widths_of(BlochSolver(p, gcut).bands_on(grid.points, opt));
    Eigen::Index idx = 0;
    a.min_width = a.widths.minCoeff(&idx);
    a.narrowest_band = static_cast<int>(idx) + 1;
    return a;
}

ScanResult run_scan(const ModelParams& p, const std::vector<double>& h_list, const KGrid& grid, int nbands,
                    double gcut, double S0, int workers) {
    ScanResult r;
    r.table = band_widths(p, h_list, grid, nbands, gcut, workers);
    for (int b = 0; b < nbands; ++b) {
        std::vector<double> w(h_list.size());
        for (std::size_t i = 0; i < h_list.size(); ++i) w[i] = r.table.widths(static_cast<Eigen::Index>(i), b);
        try {
            r.fits.push_back(exp_fit(h_list, w));
        } catch (const ValidationError& e) {
            r.fits.push_back(ExpFit{});
            r.warnings.push_back(fmt::format("band {}: {}", b + 1, e.what()));
        }
    }
    r.S0 = S0;
    if (S0 > 0.0 && r.fits.front().used > 0) {
        r.ratio = r.fits.front().b / S0;
        if (r.ratio < 0.3 || r.ratio > 2.2) {
            r.warnings.push_back(fmt::format("decay rate b / S0 = {:.6g} lies outside [0.3, 2.2]", r.ratio));
        }
    }
    return r;
}

}  // namespace moire
