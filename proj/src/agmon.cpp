#include "moire/agmon.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace moire {

int AgmonGrid::half1() const { return static_cast<int>(std::ceil(1.5 * std::sqrt(3.0) * resolution)); }
int AgmonGrid::half2() const { return static_cast<int>(std::ceil(1.5 * resolution)); }

std::array<int, 2> AgmonGrid::nearest(const Vec2& x) const {
    const int i = static_cast<int>(std::lround(x.x() * resolution));
    const int j = static_cast<int>(std::lround(x.y() * resolution));
    if (std::abs(i) > half1() || std::abs(j) > half2()) throw ValidationError("point outside the Agmon domain");
    return {i, j};
}

void AgmonGrid::validate() const {
    if (resolution < 8) throw ValidationError("Agmon resolution must be at least 8 nodes per unit length");
    if (stencil_radius < 1) throw ValidationError("Agmon stencil radius must be at least 1");
}

std::vector<std::array<int, 2>> stencil_offsets(int radius) {
    std::vector<std::array<int, 2>> out;
    for (int a = -radius; a <= radius; ++a)
        for (int b = -radius; b <= radius; ++b)
            if ((a != 0 || b != 0) && std::gcd(a, b) == 1) out.push_back({a, b});
    return out;
}

std::vector<double> weight_field(const std::function<double(const Vec2&)>& landscape, double E,
                                 const AgmonGrid& grid) {
    grid.validate();
    std::vector<double> w(grid.size());
    for (int i = -grid.half1(); i <= grid.half1(); ++i) {
        for (int j = -grid.half2(); j <= grid.half2(); ++j) {
            const double d = landscape(grid.node(i, j)) - E;
            w[grid.index(i, j)] = d > 0.0 ? std::sqrt(d) : 0.0;
        }
    }
    return w;
}

std::vector<double> weight_field(const ModelParams& p, double E, const AgmonGrid& grid) {
    return weight_field([&](const Vec2& x) { return lambda_minus(x, p, EigenMode::exact); }, E, grid);
}

std::vector<double> agmon_distance(const std::vector<double>& weight, const AgmonGrid& grid,
                                   std::array<int, 2> source) {
    grid.validate();
    if (weight.size() != grid.size()) throw ValidationError("weight field does not match the grid");
    if (std::abs(source[0]) > grid.half1() || std::abs(source[1]) > grid.half2())
        throw ValidationError("Agmon source lies outside the grid");

    const auto offsets = stencil_offsets(grid.stencil_radius);
    std::vector<double> lengths;
    for (const auto& o : offsets) lengths.push_back(std::hypot(o[0], o[1]) * grid.step());

    const int n2 = grid.n2();
    std::vector<double> dist(grid.size(), std::numeric_limits<double>::infinity());
    std::vector<char> done(grid.size(), 0);
    // Pairs compare by (distance, node index), which fixes the settling order on ties.
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    const std::size_t s = grid.index(source[0], source[1]);
    dist[s] = 0.0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        const int ui = static_cast<int>(u / static_cast<std::size_t>(n2)) - grid.half1();
        const int uj = static_cast<int>(u % static_cast<std::size_t>(n2)) - grid.half2();
        for (std::size_t e = 0; e < offsets.size(); ++e) {
            const int vi = ui + offsets[e][0];
            const int vj = uj + offsets[e][1];
            if (std::abs(vi) > grid.half1() || std::abs(vj) > grid.half2()) continue;
            const std::size_t v = grid.index(vi, vj);
            if (done[v]) continue;
            const double nd = d + lengths[e] * 0.5 * (weight[u] + weight[v]);
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

AgmonField agmon_field(const ModelParams& p, double E, const AgmonGrid& grid) {
    AgmonField f;
    f.E = E;
    f.grid = grid;
    f.weight = weight_field(p, E, grid);
    f.rho = agmon_distance(f.weight, grid);
    return f;
}

TunnelingAction tunneling_action(const ModelParams& p, double E, const AgmonGrid& grid) {
    const WellAudit audit = wells_audit(p, 96, EigenMode::exact);
    if (!audit.assumption1_holds) throw ValidationError("tunneling action needs a single well at 0: " + audit.verdict);
    TunnelingAction t;
    t.E = std::isnan(E) ? lambda_minus(Vec2::Zero(), p, EigenMode::exact) : E;
    t.field = agmon_field(p, t.E, grid);
    const Lattice lat = build_lattice();
    t.neighbors = lat.neighbor_shell;
    t.S0 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 6; ++i) {
        t.actions[i] = t.field.rho_at(t.neighbors[i]);
        t.S0 = std::min(t.S0, t.actions[i]);
    }
    return t;
}

}  // namespace moire
