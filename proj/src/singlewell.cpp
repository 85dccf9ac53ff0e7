#include "moire/singlewell.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace moire {

double CutoffSpec::operator()(double r) const {
    if (r <= delta1) return 1.0;
    if (r >= delta2) return 0.0;
    const double s = (r - delta1) / (delta2 - delta1);
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

void WellProblem::validate() const {
    params.validate();
    if (n < 64) throw ValidationError("well grid n=" + std::to_string(n) + " is under-resolved (need n >= 64)");
    if (!(chi.delta1 > 0.0 && chi.delta1 < chi.delta2)) throw ValidationError("cutoff radii need 0 < delta1 < delta2");
    if (!(chi.delta2 < 1.0)) throw ValidationError("cutoff outer radius must stay below the neighbour distance 1");
    if (!(L >= chi.delta2 + 0.25)) throw ValidationError("box half-width L must be at least delta2 + 0.25");
}

Mat2c WellProblem::block(const Vec2& x) const {
    Mat2c b = potential ? potential(x) : assemble_V(x, params);
    if (fill_wells) {
        const double fill = 1.0 - chi(x.norm());
        b(0, 0) += fill;
        b(1, 1) += fill;
    }
    return b;
}

int default_well_points(double h) { return h >= 0.05 ? 256 : 384; }

SparseMatrixC assemble_well(const WellProblem& wp) {
    wp.validate();
    const int n = wp.n;
    const double dx = wp.step();
    const double c = wp.params.h * wp.params.h / (dx * dx);
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(n) * n * 14);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Mat2c b = wp.block(wp.node(i, j));
            for (int a = 0; a < 2; ++a) {
                const Eigen::Index r = wp.index(i, j, a);
                t.emplace_back(r, r, cplx(4.0 * c) + b(a, a));
                t.emplace_back(r, wp.index(i, j, 1 - a), b(a, 1 - a));
                // Neighbours outside the box carry the Dirichlet zero and drop out.
                if (i > 0) t.emplace_back(r, wp.index(i - 1, j, a), -c);
                if (i + 1 < n) t.emplace_back(r, wp.index(i + 1, j, a), -c);
                if (j > 0) t.emplace_back(r, wp.index(i, j - 1, a), -c);
                if (j + 1 < n) t.emplace_back(r, wp.index(i, j + 1, a), -c);
            }
        }
    }
    const Eigen::Index dim = 2 * static_cast<Eigen::Index>(n) * n;
    SparseMatrixC m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

double well_floor(const WellProblem& wp) {
    double floor = std::numeric_limits<double>::infinity();
    for (int i = 0; i < wp.n; ++i) {
        for (int j = 0; j < wp.n; ++j) {
            const Mat2c b = wp.block(wp.node(i, j));
            const double mean = 0.5 * (b(0, 0).real() + b(1, 1).real());
            const double half = 0.5 * (b(0, 0).real() - b(1, 1).real());
            floor = std::min(floor, mean - std::hypot(half, std::abs(b(0, 1))));
        }
    }
    return floor;
}

WellSpectrum well_eigs(const WellProblem& wp, int nev) {
    if (nev < 1 || nev > 20) throw ValidationError("well_eigs supports 1 <= nev <= 20");
    const SparseMatrixC a = assemble_well(wp);
    SparseEigOptions opt;
    opt.tol = 1e-8;
    // Above the filled plateau the spectrum is a dense cluster; a wider block helps it separate.
    opt.block = nev + 6;
    const EigenResult r = sparse_lowest_eigs(a, nev, well_floor(wp), opt);
    WellSpectrum s;
    s.values = r.values;
    s.residuals = r.residuals / std::max(r.operator_norm, 1.0);
    s.L = wp.L;
    s.n = wp.n;
    s.iterations = r.iterations;
    return s;
}

RichardsonEstimate well_richardson(const WellProblem& wp) {
    RichardsonEstimate e;
    WellProblem level = wp;
    for (double& value : e.levels) {
        value = well_eigs(level, 1).values(0);
        // Keeps the node set nested: spacing 2L/(n+1) halves when n -> 2n + 1.
        level.n = 2 * level.n + 1;
    }
    const auto [coarse, mid, fine] = e.levels;
    e.extrapolated = (4.0 * fine - mid) / 3.0;
    e.budget = std::abs(e.extrapolated - (4.0 * mid - coarse) / 3.0);
    e.observed_ratio = (mid - coarse) / (fine - mid);
    return e;
}

}  // namespace moire
