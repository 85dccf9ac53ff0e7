#pragma once

#include <array>
#include <string>
#include <vector>

#include "moire/types.hpp"

namespace moire {

/// Hexagonal moire lattice with unit nearest-neighbour distance and its dual.
///
/// The dual basis satisfies <v_i, g_j> = 2 pi delta_ij.
struct Lattice {
    Vec2 v1;
    Vec2 v2;
    Vec2 g1;
    Vec2 g2;
    std::array<Vec2, 6> neighbor_shell;

    Vec2 site(double m, double n) const { return m * v1 + n * v2; }
    Vec2 dual(double m, double n) const { return m * g1 + n * g2; }

    /// Coordinates (s, t) with k = s g1 + t g2.
    Vec2 dual_coordinates(const Vec2& k) const;
    /// Coordinates (s, t) with x = s v1 + t v2.
    Vec2 lattice_coordinates(const Vec2& x) const;
};

/// Counter-clockwise rotation by 2 pi / 3.
Mat2 rotation_2pi3();

Lattice build_lattice();

/// Translate k by dual lattice vectors so that its dual coordinates lie in [0, 1).
Vec2 reduce_to_cell(const Vec2& k, const Lattice& lat);

/// Translate x by lattice vectors so that its lattice coordinates lie in [0, 1).
Vec2 reduce_to_lattice_cell(const Vec2& x, const Lattice& lat);

/// Euclidean distance from x to the nearest point of x0 + Gamma.
double distance_mod_lattice(const Vec2& x, const Vec2& x0, const Lattice& lat);

/// Uniform n1 x n2 sampling of one dual cell: k_ij = (i/n1) g1 + (j/n2) g2, index i * n2 + j.
struct KGrid {
    int n1 = 0;
    int n2 = 0;
    std::vector<Vec2> points;

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n2 + j; }
};

KGrid make_kgrid(int n1, int n2, const Lattice& lat);

enum class SymmetryPoint { Gamma, K, M };

SymmetryPoint parse_symmetry_point(const std::string& label);
std::string to_string(SymmetryPoint p);
Vec2 symmetry_point(SymmetryPoint p, const Lattice& lat);

/// Piecewise-linear path through high-symmetry points.
struct KPath {
    std::vector<SymmetryPoint> labels;
    std::vector<Vec2> points;
    std::vector<double> arclength;
    /// Position in `points` of each labelled vertex.
    std::vector<std::size_t> label_indices;
};

/// Each of the labels.size()-1 segments is split into n_per_segment equal steps;
/// the path has (labels.size()-1) * n_per_segment + 1 points.
KPath kpath(const std::vector<SymmetryPoint>& labels, int n_per_segment, const Lattice& lat);
KPath kpath(const std::vector<std::string>& labels, int n_per_segment, const Lattice& lat);

}  // namespace moire
