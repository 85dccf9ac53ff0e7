#include "moire/lattice.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace moire {

namespace {

Mat2 columns(const Vec2& a, const Vec2& b) {
    Mat2 m;
    m.col(0) = a;
    m.col(1) = b;
    return m;
}

}  // namespace

Vec2 Lattice::dual_coordinates(const Vec2& k) const { return columns(g1, g2).inverse() * k; }

Vec2 Lattice::lattice_coordinates(const Vec2& x) const { return columns(v1, v2).inverse() * x; }

Mat2 rotation_2pi3() {
    const double s3 = std::numbers::sqrt3;
    Mat2 r;
    r << -0.5, -0.5 * s3, 0.5 * s3, -0.5;
    return r;
}

Lattice build_lattice() {
    const double s3 = std::numbers::sqrt3;
    Lattice lat;
    lat.v1 = Vec2(-0.5 * s3, -0.5);
    lat.v2 = Vec2(0.5 * s3, -0.5);

    // Rows of 2 pi V^{-T} give the biorthogonal dual basis.
    const Mat2 dual = 2.0 * std::numbers::pi * columns(lat.v1, lat.v2).inverse().transpose();
    lat.g1 = dual.col(0);
    lat.g2 = dual.col(1);

    const Vec2 v3 = lat.v1 + lat.v2;
    lat.neighbor_shell = {lat.v1, lat.v2, v3, Vec2(-lat.v1), Vec2(-lat.v2), Vec2(-v3)};
    return lat;
}

Vec2 reduce_to_cell(const Vec2& k, const Lattice& lat) {
    const Vec2 c = lat.dual_coordinates(k);
    const double s = c.x() - std::floor(c.x());
    const double t = c.y() - std::floor(c.y());
    return lat.dual(s >= 1.0 ? 0.0 : s, t >= 1.0 ? 0.0 : t);
}

Vec2 reduce_to_lattice_cell(const Vec2& x, const Lattice& lat) {
    const Vec2 c = lat.lattice_coordinates(x);
    const double s = c.x() - std::floor(c.x());
    const double t = c.y() - std::floor(c.y());
    return lat.site(s >= 1.0 ? 0.0 : s, t >= 1.0 ? 0.0 : t);
}

double distance_mod_lattice(const Vec2& x, const Vec2& x0, const Lattice& lat) {
    const Vec2 d = reduce_to_lattice_cell(x - x0, lat);
    double best = d.norm();
    for (int m = -1; m <= 1; ++m) {
        for (int n = -1; n <= 1; ++n) {
            best = std::min(best, (d + lat.site(m, n)).norm());
        }
    }
    return best;
}

KGrid make_kgrid(int n1, int n2, const Lattice& lat) {
    if (n1 <= 0 || n2 <= 0) {
        throw ValidationError("k-grid subdivisions must be positive");
    }
    KGrid grid{n1, n2, {}};
    grid.points.reserve(static_cast<std::size_t>(n1) * n2);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            grid.points.push_back(lat.dual(static_cast<double>(i) / n1, static_cast<double>(j) / n2));
        }
    }
    return grid;
}

SymmetryPoint parse_symmetry_point(const std::string& label) {
    if (label == "G" || label == "Gamma" || label == "Γ") return SymmetryPoint::Gamma;
    if (label == "K") return SymmetryPoint::K;
    if (label == "M") return SymmetryPoint::M;
    throw ValidationError("unknown high-symmetry label '" + label + "'");
}

std::string to_string(SymmetryPoint p) {
    switch (p) {
        case SymmetryPoint::Gamma: return "G";
        case SymmetryPoint::K: return "K";
        case SymmetryPoint::M: return "M";
    }
    return "?";
}

Vec2 symmetry_point(SymmetryPoint p, const Lattice& lat) {
    switch (p) {
        case SymmetryPoint::Gamma: return Vec2::Zero();
        case SymmetryPoint::K: return (lat.g1 + 2.0 * lat.g2) / 3.0;
        case SymmetryPoint::M: return 0.5 * (lat.g1 + lat.g2);
    }
    return Vec2::Zero();
}

KPath kpath(const std::vector<SymmetryPoint>& labels, int n_per_segment, const Lattice& lat) {
    if (labels.size() < 2) throw ValidationError("a k-path needs at least two labels");
    if (n_per_segment < 1) throw ValidationError("n_per_segment must be at least 1");

    KPath path;
    path.labels = labels;
    path.points.push_back(symmetry_point(labels.front(), lat));
    path.arclength.push_back(0.0);
    path.label_indices.push_back(0);
    for (std::size_t s = 0; s + 1 < labels.size(); ++s) {
        const Vec2 a = symmetry_point(labels[s], lat);
        const Vec2 b = symmetry_point(labels[s + 1], lat);
        const double step = (b - a).norm() / n_per_segment;
        for (int i = 1; i <= n_per_segment; ++i) {
            // Exact endpoint rather than accumulated interpolation.
            path.points.push_back(i == n_per_segment ? b : Vec2(a + (b - a) * (static_cast<double>(i) / n_per_segment)));
            path.arclength.push_back(path.arclength.back() + step);
        }
        path.label_indices.push_back(path.points.size() - 1);
    }
    return path;
}

KPath kpath(const std::vector<std::string>& labels, int n_per_segment, const Lattice& lat) {
    std::vector<SymmetryPoint> parsed;
    parsed.reserve(labels.size());
    for (const auto& l : labels) parsed.push_back(parse_symmetry_point(l));
    return kpath(parsed, n_per_segment, lat);
}

}  // namespace moire
