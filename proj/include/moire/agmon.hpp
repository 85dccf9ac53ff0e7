#pragma once

#include <array>
#include <functional>
#include <vector>

#include "moire/potential.hpp"

namespace moire {

/// Cartesian node grid of spacing 1 / resolution covering x1 in [-1.5 sqrt3, 1.5 sqrt3],
/// x2 in [-1.5, 1.5] (three fundamental cells across, centred on 0). Node (0, 0) sits at the origin.
struct AgmonGrid {
    int resolution = 128;  ///< nodes per unit length
    int stencil_radius = 5;

    int half1() const;
    int half2() const;
    int n1() const { return 2 * half1() + 1; }
    int n2() const { return 2 * half2() + 1; }
    double step() const { return 1.0 / resolution; }
    std::size_t size() const { return static_cast<std::size_t>(n1()) * static_cast<std::size_t>(n2()); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i + half1()) * static_cast<std::size_t>(n2()) +
               static_cast<std::size_t>(j + half2());
    }
    Vec2 node(int i, int j) const { return Vec2(i * step(), j * step()); }
    /// Signed node offsets (i, j) nearest to x.
    std::array<int, 2> nearest(const Vec2& x) const;
    void validate() const;
};

/// Primitive offsets (a, b) with max(|a|, |b|) <= radius and gcd(|a|, |b|) = 1.
std::vector<std::array<int, 2>> stencil_offsets(int radius);

struct AgmonField {
    double E = 0.0;
    AgmonGrid grid;
    std::vector<double> weight;
    std::vector<double> rho;

    double rho_at(const Vec2& x) const { const auto n = grid.nearest(x); return rho[grid.index(n[0], n[1])]; }
};

/// sqrt(max(f(x) - E, 0)) at every node.
std::vector<double> weight_field(const std::function<double(const Vec2&)>& landscape, double E, const AgmonGrid& grid);
/// Same with f = lambda_minus in exact mode.
std::vector<double> weight_field(const ModelParams& p, double E, const AgmonGrid& grid);

/// Weighted shortest-path distance from `source`; edge cost is Euclidean length times the
/// mean of the endpoint weights.
std::vector<double> agmon_distance(const std::vector<double>& weight, const AgmonGrid& grid,
                                   std::array<int, 2> source = {0, 0});

AgmonField agmon_field(const ModelParams& p, double E, const AgmonGrid& grid);

struct TunnelingAction {
    double E = 0.0;
    std::array<Vec2, 6> neighbors;
    std::array<double, 6> actions{};
    double S0 = 0.0;
    AgmonField field;
};

/// Agmon distance from the well at 0 to its six nearest copies. E defaults (NaN) to
/// lambda_minus(0). Throws ValidationError unless the landscape has a single well at 0.
TunnelingAction tunneling_action(const ModelParams& p, double E, const AgmonGrid& grid);

}  // namespace moire
