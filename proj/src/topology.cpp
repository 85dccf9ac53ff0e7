#include "moire/topology.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <sstream>

#include "moire/parallel.hpp"

namespace moire {

BandFrames compute_frames(const BlochSolver& solver, const KGrid& grid, int nbands, int workers) {
    if (nbands < 1) throw ValidationError("band group needs at least one band");
    if (grid.n1 < 2 || grid.n2 < 2) throw ValidationError("k-grid must be at least 2 x 2");
    BandFrames f;
    f.grid = grid;
    f.nbands = nbands;
    f.frames.resize(grid.points.size());
    f.energies.resize(static_cast<Eigen::Index>(grid.points.size()), nbands + 1);
    parallel_for(grid.points.size(), workers, [&](std::size_t i) {
        EigenResult r = solver.solve(grid.points[i], nbands + 1);
        f.energies.row(static_cast<Eigen::Index>(i)) = r.values.transpose();
        f.frames[i] = r.vectors.leftCols(nbands);
    });
    return f;
}

namespace {

// Frame at grid index (i, j) with i, j allowed to equal n1, n2 (one period past the edge).
Eigen::MatrixXcd frame_at(const BandFrames& f, const PlaneWaveBasis& basis, int i, int j) {
    const int si = i / f.grid.n1;
    const int sj = j / f.grid.n2;
    const Eigen::MatrixXcd& base = f.frames[f.grid.index(i % f.grid.n1, j % f.grid.n2)];
    if (si == 0 && sj == 0) return base;
    // k + G with G = si g1 + sj g2: c_{k+G}(g) = c_k(g + G).
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(base.rows(), base.cols());
    for (std::size_t q = 0; q < basis.size(); ++q) {
        const auto [m, n] = basis.gvecs()[q];
        const long src = basis.find(m + si, n + sj);
        if (src < 0) continue;
        out.row(2 * static_cast<Eigen::Index>(q)) = base.row(2 * src);
        out.row(2 * static_cast<Eigen::Index>(q) + 1) = base.row(2 * src + 1);
    }
    return out;
}

cplx link(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return Eigen::MatrixXcd(a.adjoint() * b).determinant(); }

}  // namespace

Eigen::MatrixXd fluxes_from_frames(const BandFrames& f, const PlaneWaveBasis& basis) {
    const int n1 = f.grid.n1;
    const int n2 = f.grid.n2;
    Eigen::MatrixXd flux(n1, n2);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const Eigen::MatrixXcd a = frame_at(f, basis, i, j);
            const Eigen::MatrixXcd b = frame_at(f, basis, i + 1, j);
            const Eigen::MatrixXcd c = frame_at(f, basis, i + 1, j + 1);
            const Eigen::MatrixXcd d = frame_at(f, basis, i, j + 1);
            flux(i, j) = std::arg(link(a, b) * link(b, c) * link(c, d) * link(d, a));
        }
    }
    return flux;
}

CurvatureField berry_links(const BlochSolver& solver, const KGrid& grid, int nbands, int workers) {
    const BandFrames f = compute_frames(solver, grid, nbands, workers);
    CurvatureField cf;
    cf.grid = grid;
    cf.nbands = nbands;
    Eigen::Index worst = 0;
    const Eigen::VectorXd gaps = f.energies.col(nbands) - f.energies.col(nbands - 1);
    cf.min_gap = gaps.minCoeff(&worst);
    cf.min_gap_k = grid.points[static_cast<std::size_t>(worst)];
    if (!(cf.min_gap > 1e-8)) {
        std::ostringstream os;
        os.precision(17);
        os << "gap above band " << nbands << " closes (" << cf.min_gap << ") at k = (" << cf.min_gap_k.x() << ", "
           << cf.min_gap_k.y() << ")";
        throw NumericalError(os.str());
    }
    cf.plaquette_flux = fluxes_from_frames(f, solver.basis());
    // Row-major summation order keeps the total independent of storage layout.
    double sum = 0.0;
    for (int i = 0; i < grid.n1; ++i)
        for (int j = 0; j < grid.n2; ++j) sum += cf.plaquette_flux(i, j);
    cf.total = sum / (2.0 * std::numbers::pi);
    cf.chern = static_cast<int>(std::lround(cf.total));
    if (std::abs(cf.total - cf.chern) >= 1e-6) {
        throw NumericalError("flux sum " + std::to_string(cf.total) + " is not quantized; refine the k-grid");
    }
    return cf;
}

CurvatureField berry_links(const ModelParams& p, const KGrid& grid, int nbands, double gcut, int workers) {
    return berry_links(BlochSolver(p, gcut), grid, nbands, workers);
}

namespace {

void require_inversion_closed(const KGrid& grid) {
    const Lattice lat = build_lattice();
    for (const Vec2& k : grid.points) {
        bool found = false;
        for (const Vec2& q : grid.points) {
            const Vec2 d = lat.dual_coordinates(k + q);
            if ((d - d.array().round().matrix()).cwiseAbs().maxCoeff() < 1e-9) {
                found = true;
                break;
            }
        }
        if (!found) throw ValidationError("k-grid is not symmetric under k -> -k");
    }
}

}  // namespace

OddnessReport curvature_oddness(const CurvatureField& field, const ModelParams& p) {
    OddnessReport rep;
    if (p.U != 0.0) {
        rep.skipped = true;
        rep.notice = "oddness check skipped: requires U = 0";
        return rep;
    }
    require_inversion_closed(field.grid);
    const int n1 = field.grid.n1;
    const int n2 = field.grid.n2;
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const double a = field.plaquette_flux(i, j);
            rep.defect = std::max(rep.defect, std::abs(a + field.plaquette_flux(n1 - 1 - i, n2 - 1 - j)));
            rep.max_flux = std::max(rep.max_flux, std::abs(a));
        }
    }
    return rep;
}

OddnessReport curvature_oddness_check(const ModelParams& p, const KGrid& grid, int nbands, double gcut,
                                      int workers) {
    if (p.U != 0.0) {
        OddnessReport rep;
        rep.skipped = true;
        rep.notice = "oddness check skipped: requires U = 0";
        return rep;
    }
    require_inversion_closed(grid);
    return curvature_oddness(berry_links(p, grid, nbands, gcut, workers), p);
}

}  // namespace moire
