#include "moire/blochpw.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "moire/parallel.hpp"

namespace moire {

PlaneWaveBasis::PlaneWaveBasis(double gcut, const Lattice& lat) : gcut_(gcut) {
    if (!(gcut > 0.0)) throw ValidationError("gcut must be positive");
    const double radius = gcut * lat.g1.norm();
    // |m g1 + n g2| >= |m| |g1| sin(angle) bounds the search box.
    const double sin_angle = std::abs(lat.g1.x() * lat.g2.y() - lat.g1.y() * lat.g2.x()) /
                             (lat.g1.norm() * lat.g2.norm());
    bound_ = static_cast<int>(std::ceil(radius / (lat.g1.norm() * sin_angle))) + 1;

    struct Entry {
        double norm2;
        int m, n;
    };
    std::vector<Entry> found;
    const double r2 = radius * radius * (1.0 + 1e-12);
    for (int m = -bound_; m <= bound_; ++m) {
        for (int n = -bound_; n <= bound_; ++n) {
            const double q2 = lat.dual(m, n).squaredNorm();
            if (q2 <= r2) found.push_back({q2, m, n});
        }
    }
    std::sort(found.begin(), found.end(), [](const Entry& a, const Entry& b) {
        // Equal-norm shells compare on the exact integer quadratic form, not rounded floats.
        const long qa = long(a.m) * a.m + long(a.n) * a.n + long(a.m) * a.n;
        const long qb = long(b.m) * b.m + long(b.n) * b.n + long(b.m) * b.n;
        return std::tie(qa, a.m, a.n) < std::tie(qb, b.m, b.n);
    });

    const auto side = static_cast<std::size_t>(2 * bound_ + 1);
    lookup_.assign(side * side, -1);
    for (const auto& e : found) {
        lookup_[static_cast<std::size_t>(e.m + bound_) * side + static_cast<std::size_t>(e.n + bound_)] =
            static_cast<long>(gvecs_.size());
        gvecs_.emplace_back(e.m, e.n);
        cart_.push_back(lat.dual(e.m, e.n));
    }
}

long PlaneWaveBasis::find(int m, int n) const {
    if (std::abs(m) > bound_ || std::abs(n) > bound_) return -1;
    const auto side = static_cast<std::size_t>(2 * bound_ + 1);
    return lookup_[static_cast<std::size_t>(m + bound_) * side + static_cast<std::size_t>(n + bound_)];
}

namespace {

template <class Emit>
void for_each_bloch_entry(const ModelParams& p, const Vec2& k, const PlaneWaveBasis& basis, const FourierTable& table,
                          Emit&& emit) {
    const double h2 = p.h * p.h;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto [m, n] = basis.gvecs()[i];
        const double kinetic = h2 * (basis.cartesian(i) + k).squaredNorm();
        const auto row = static_cast<Eigen::Index>(2 * i);
        emit(row, row, cplx(kinetic));
        emit(row + 1, row + 1, cplx(kinetic));
        for (const auto& [q, coeff] : table.entries) {
            const long j = basis.find(m - q.first, n - q.second);
            if (j < 0) continue;
            const auto col = static_cast<Eigen::Index>(2 * j);
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    if (coeff(a, b) != cplx(0.0)) emit(row + a, col + b, coeff(a, b));
                }
            }
        }
    }
}

}  // namespace

BlochMatrix assemble_bloch(const ModelParams& p, const Vec2& k, const PlaneWaveBasis& basis, const FourierTable& table) {
    BlochMatrix m;
    m.k = k;
    m.entries = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
    for_each_bloch_entry(p, k, basis, table, [&](Eigen::Index r, Eigen::Index c, cplx v) { m.entries(r, c) += v; });
    return m;
}

SparseMatrixC assemble_bloch_sparse(const ModelParams& p, const Vec2& k, const PlaneWaveBasis& basis,
                                    const FourierTable& table) {
    std::vector<Eigen::Triplet<cplx>> triplets;
    triplets.reserve(static_cast<std::size_t>(basis.dim()) * 16);
    for_each_bloch_entry(p, k, basis, table,
                         [&](Eigen::Index r, Eigen::Index c, cplx v) { triplets.emplace_back(r, c, v); });
    SparseMatrixC m(basis.dim(), basis.dim());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

EigenResult hermitian_eigs(const BlochMatrix& m, int nev) { return dense_hermitian_eigs(m.entries, nev); }

BlochSolver::BlochSolver(const ModelParams& p, double gcut)
    : params_(p), lattice_(build_lattice()), basis_(gcut, lattice_), table_(fourier_table(p, lattice_)) {
    p.validate();
    floor_ = sampled_floor(p, 96) - 0.05;
}

EigenResult BlochSolver::solve(const Vec2& k, int nev, SolverKind solver) const {
    const Eigen::Index dim = basis_.dim();
    if (nev < 1 || nev > dim) {
        throw ValidationError("requested " + std::to_string(nev) + " bands but the basis has dimension " +
                              std::to_string(dim));
    }
    bool dense = solver == SolverKind::dense;
    if (solver == SolverKind::automatic) dense = dim <= 256 || 4 * (nev + 2) * 6 >= dim;
    if (dense) return hermitian_eigs(assemble_bloch(params_, k, basis_, table_), nev);
    return sparse_lowest_eigs(assemble_bloch_sparse(params_, k, basis_, table_), nev, floor_);
}

BandStructure BlochSolver::bands_on(const std::vector<Vec2>& kset, const BandOptions& opt) const {
    BandStructure bs;
    bs.kpoints = kset;
    bs.params = params_;
    bs.gcut = basis_.gcut();
    bs.dim = basis_.dim();
    bs.energies.resize(static_cast<Eigen::Index>(kset.size()), opt.nbands);
    bs.residuals.resize(static_cast<Eigen::Index>(kset.size()), opt.nbands);
    if (opt.want_vectors) bs.vectors.resize(kset.size());

    parallel_for(kset.size(), opt.workers, [&](std::size_t i) {
        EigenResult r = solve(kset[i], opt.nbands, opt.solver);
        const auto row = static_cast<Eigen::Index>(i);
        bs.energies.row(row) = r.values.transpose();
        bs.residuals.row(row) = r.residuals.transpose();
        if (opt.want_vectors) bs.vectors[i] = std::move(r.vectors);
    });
    return bs;
}

BandStructure bands_on(const std::vector<Vec2>& kset, const ModelParams& p, double gcut, const BandOptions& opt) {
    return BlochSolver(p, gcut).bands_on(kset, opt);
}

std::vector<ConvergenceRow> convergence_study(const ModelParams& p, const Vec2& k, const std::vector<double>& gcuts,
                                              int nlevels) {
    if (gcuts.size() < 3) throw ValidationError("convergence study needs at least three cutoffs");
    if (!std::is_sorted(gcuts.begin(), gcuts.end())) throw ValidationError("cutoffs must be ascending");
    std::vector<ConvergenceRow> rows;
    for (double gc : gcuts) {
        const BlochSolver solver(p, gc);
        ConvergenceRow row;
        row.gcut = gc;
        row.dim = solver.basis().dim();
        row.energies = solver.solve(k, nlevels).values;
        if (!rows.empty()) row.delta = (row.energies - rows.back().energies).cwiseAbs().maxCoeff();
        rows.push_back(std::move(row));
    }
    return rows;
}

double converged_cutoff(const ModelParams& p, double tol, int nlevels, double start, double step, double max_gcut) {
    Eigen::VectorXd previous = BlochSolver(p, start).solve(Vec2::Zero(), nlevels).values;
    for (double gc = start + step; gc <= max_gcut + 1e-12; gc += step) {
        const Eigen::VectorXd current = BlochSolver(p, gc).solve(Vec2::Zero(), nlevels).values;
        if ((current - previous).cwiseAbs().maxCoeff() < tol) return gc;
        previous = current;
    }
    throw NumericalError("plane-wave cutoff did not converge to " + std::to_string(tol) + " below gcut " +
                         std::to_string(max_gcut));
}

}  // namespace moire
