#include "moire/potential.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

namespace moire {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double s3 = std::numbers::sqrt3;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

// Fourier momenta (integer dual coordinates) of the intralayer harmonics
// (4 pi / sqrt3) R^{2(j-1)} e1, j = 1, 2, 3.
constexpr std::array<std::pair<int, int>, 3> kIntralayerMomenta{{{-1, 1}, {1, 0}, {0, -1}}};
// Momenta of the three interlayer phases: 0, (4 pi / sqrt3) R e1, (4 pi / sqrt3) R^2 e1.
constexpr std::array<std::pair<int, int>, 3> kTunnellingMomenta{{{0, 0}, {0, -1}, {1, 0}}};

/// Derivative-free simplex descent in the plane.
Vec2 nelder_mead(const std::function<double(const Vec2&)>& f, const Vec2& start, double size, double xtol) {
    std::array<Vec2, 3> s{start, start + Vec2(size, 0.0), start + Vec2(0.0, size)};
    std::array<double, 3> fs{f(s[0]), f(s[1]), f(s[2])};
    for (int iter = 0; iter < 2000; ++iter) {
        std::array<int, 3> order{0, 1, 2};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int best = order[0], mid = order[1], worst = order[2];
        const double diameter = std::max({(s[0] - s[1]).norm(), (s[1] - s[2]).norm(), (s[0] - s[2]).norm()});
        if (diameter < xtol) break;

        const Vec2 centroid = 0.5 * (s[best] + s[mid]);
        const Vec2 xr = centroid + (centroid - s[worst]);
        const double fr = f(xr);
        if (fr < fs[best]) {
            const Vec2 xe = centroid + 2.0 * (centroid - s[worst]);
            const double fe = f(xe);
            if (fe < fr) {
                s[worst] = xe;
                fs[worst] = fe;
            } else {
                s[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[mid]) {
            s[worst] = xr;
            fs[worst] = fr;
        } else {
            const Vec2 xc = centroid + 0.5 * (s[worst] - centroid);
            const double fc = f(xc);
            if (fc < fs[worst]) {
                s[worst] = xc;
                fs[worst] = fc;
            } else {
                for (int i : {mid, worst}) {
                    s[i] = s[best] + 0.5 * (s[i] - s[best]);
                    fs[i] = f(s[i]);
                }
            }
        }
    }
    const auto it = std::min_element(fs.begin(), fs.end());
    return s[static_cast<std::size_t>(it - fs.begin())];
}

Mat2 hessian_central(const std::function<double(const Vec2&)>& f, const Vec2& x, double s) {
    const double f0 = f(x);
    const Vec2 e1(s, 0.0), e2(0.0, s);
    Mat2 hess;
    hess(0, 0) = (f(x + e1) - 2.0 * f0 + f(x - e1)) / (s * s);
    hess(1, 1) = (f(x + e2) - 2.0 * f0 + f(x - e2)) / (s * s);
    hess(0, 1) = (f(x + e1 + e2) - f(x + e1 - e2) - f(x - e1 + e2) + f(x - e1 - e2)) / (4.0 * s * s);
    hess(1, 0) = hess(0, 1);
    return hess;
}

Vec2 gradient_central(const std::function<double(const Vec2&)>& f, const Vec2& x, double s) {
    const Vec2 e1(s, 0.0), e2(0.0, s);
    return Vec2((f(x + e1) - f(x - e1)) / (2.0 * s), (f(x + e2) - f(x - e2)) / (2.0 * s));
}

}  // namespace

void ModelParams::validate() const {
    require_finite(alpha, "alpha");
    require_finite(beta, "beta");
    require_finite(U, "U");
    require_finite(phi, "phi");
    require_finite(h, "h");
    if (alpha < 0.0) throw ValidationError("alpha must be non-negative");
    if (beta < 0.0) throw ValidationError("beta must be non-negative");
    if (!(h > 0.0)) throw ValidationError("h must be positive");
}

ModelParams reference_params(double h) { return ModelParams{1.0, 1.0, 0.0, 4.0 * pi / 3.0, h}; }

LayerPair eval_intralayer(const Vec2& x, double phi) {
    const double a = 4.0 * pi * x.x() / s3;
    const double b = 2.0 * pi * x.x() / s3;
    const double c = std::cos(2.0 * pi * x.y());
    return {2.0 * (std::cos(a + phi) + 2.0 * std::cos(b - phi) * c),
            2.0 * (std::cos(a - phi) + 2.0 * std::cos(b + phi) * c)};
}

cplx eval_T(const Vec2& x) {
    return 1.0 + 2.0 * std::polar(1.0, -2.0 * pi * x.x() / s3) * std::cos(2.0 * pi * x.y());
}

Mat2c assemble_V(const Vec2& x, const ModelParams& p) {
    const LayerPair v = eval_intralayer(x, p.phi);
    const cplx t = p.beta * eval_T(x);
    Mat2c m;
    m(0, 0) = p.alpha * v.up + 0.5 * p.U;
    m(1, 1) = p.alpha * v.down - 0.5 * p.U;
    m(0, 1) = t;
    m(1, 0) = std::conj(t);
    return m;
}

std::string to_string(EigenMode m) { return m == EigenMode::exact ? "exact" : "papermode"; }

EigenMode parse_eigen_mode(const std::string& s) {
    if (s == "exact" || s == "numeric") return EigenMode::exact;
    if (s == "papermode") return EigenMode::papermode;
    throw ValidationError("unknown eigenvalue mode '" + s + "'");
}

EigenPair2 eigs_exact(const Vec2& x, const ModelParams& p) {
    const LayerPair v = eval_intralayer(x, p.phi);
    const double mean = 0.5 * p.alpha * (v.up + v.down);
    const double half = 0.5 * (p.alpha * (v.up - v.down) + p.U);
    const double r = std::hypot(half, p.beta * std::abs(eval_T(x)));
    return {mean - r, mean + r};
}

EigenPair2 eigs_papermode(const Vec2& x, const ModelParams& p) {
    if (p.alpha != 1.0) throw ValidationError("papermode eigenvalues are only defined for alpha = 1");
    const LayerPair v = eval_intralayer(x, p.phi);
    const double mean = 0.5 * (v.up + v.down);
    const double ueff = 0.5 * std::hypot(v.up - v.down + p.U, p.beta * std::abs(eval_T(x)));
    return {mean - ueff, mean + ueff};
}

EigenPair2 eigs(const Vec2& x, const ModelParams& p, EigenMode mode) {
    return mode == EigenMode::exact ? eigs_exact(x, p) : eigs_papermode(x, p);
}

double lambda_minus(const Vec2& x, const ModelParams& p, EigenMode mode) { return eigs(x, p, mode).minus; }

double sampled_floor(const ModelParams& p, int n, EigenMode mode) {
    const Lattice lat = build_lattice();
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            lo = std::min(lo, lambda_minus(lat.site(double(i) / n, double(j) / n), p, mode));
        }
    }
    return lo;
}

Mat2c FourierTable::coefficient(int m, int n) const {
    const auto it = entries.find({m, n});
    return it == entries.end() ? Mat2c::Zero() : it->second;
}

Mat2c FourierTable::evaluate(const Vec2& x, const Lattice& lat) const {
    Mat2c sum = Mat2c::Zero();
    for (const auto& [mn, coeff] : entries) {
        sum += coeff * std::polar(1.0, lat.dual(mn.first, mn.second).dot(x));
    }
    return sum;
}

FourierTable fourier_table(const ModelParams& p, const Lattice& lat) {
    (void)lat;  // momenta are tabulated in dual coordinates of the built-in lattice
    FourierTable table;
    auto add = [&](std::pair<int, int> mn, int r, int c, cplx value) {
        auto [it, inserted] = table.entries.try_emplace(mn, Mat2c::Zero());
        it->second(r, c) += value;
    };
    table.entries[{0, 0}] = Mat2c::Zero();
    const cplx up = p.alpha * std::polar(1.0, p.phi);
    for (const auto& [m, n] : kIntralayerMomenta) {
        // 2 cos(theta +- phi) = e^{+-i phi} e^{i theta} + e^{-+i phi} e^{-i theta}
        add({m, n}, 0, 0, up);
        add({-m, -n}, 0, 0, std::conj(up));
        add({m, n}, 1, 1, std::conj(up));
        add({-m, -n}, 1, 1, up);
    }
    for (const auto& [m, n] : kTunnellingMomenta) {
        add({m, n}, 0, 1, p.beta);
        add({-m, -n}, 1, 0, p.beta);
    }
    add({0, 0}, 0, 0, 0.5 * p.U);
    add({0, 0}, 1, 1, -0.5 * p.U);

    for (auto it = table.entries.begin(); it != table.entries.end();) {
        if (it->first != std::pair{0, 0} && it->second.cwiseAbs().maxCoeff() == 0.0) {
            it = table.entries.erase(it);
        } else {
            ++it;
        }
    }
    return table;
}

Mat2 hessian_fd(const std::function<double(const Vec2&)>& f, const Vec2& x0, double step) {
    const Mat2 coarse = hessian_central(f, x0, step);
    const Mat2 fine = hessian_central(f, x0, 0.5 * step);
    const double scale = std::max(fine.norm(), 1e-300);
    if ((coarse - fine).norm() / scale > 1e-4) {
        throw NumericalError("finite-difference Hessian failed the Richardson consistency check");
    }
    return (4.0 * fine - coarse) / 3.0;
}

QuadraticData quadratic_expansion(const std::function<double(const Vec2&)>& f, const Vec2& x0) {
    const Mat2 hess = hessian_fd(f, x0);
    Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * hess);
    QuadraticData q;
    q.m0 = f(x0);
    q.c1 = es.eigenvalues()(0);
    q.c2 = es.eigenvalues()(1);
    q.axes = es.eigenvectors();
    return q;
}

WellAudit wells_audit(const ModelParams& p, int grid_n, EigenMode mode) {
    if (grid_n < 64) throw ValidationError("wells audit needs grid_n >= 64");
    const Lattice lat = build_lattice();
    const auto f = [&](const Vec2& x) { return lambda_minus(x, p, mode); };

    WellAudit audit;
    audit.mode = mode;
    audit.grid_n = grid_n;

    const auto n = static_cast<std::size_t>(grid_n);
    std::vector<double> lo(n * n);
    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            const EigenPair2 e = eigs(lat.site(double(i) / grid_n, double(j) / grid_n), p, mode);
            lo[i * n + j] = e.minus;
            min_gap = std::min(min_gap, e.plus - e.minus);
        }
    }
    audit.min_gap = min_gap;
    // Crossings land on grid nodes exactly, where rounding leaves a gap of a few ulps.
    audit.gap_ok = min_gap > 1e-10;

    const auto [lo_min, lo_max] = std::minmax_element(lo.begin(), lo.end());
    if (*lo_max - *lo_min < 1e-12 * std::max(1.0, std::abs(*lo_min))) {
        audit.verdict = "flat landscape: no isolated minimum";
        return audit;
    }

    // Discrete local minima over the 8-neighbourhood with periodic wrap.
    struct Candidate {
        double value;
        int i, j;
    };
    std::vector<Candidate> candidates;
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            const double v = lo[i * n + j];
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const int a = (i + di + grid_n) % grid_n, b = (j + dj + grid_n) % grid_n;
                    if (lo[a * n + b] < v) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (is_min) candidates.push_back({v, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.value, a.i, a.j) < std::tie(b.value, b.i, b.j);
    });
    if (candidates.size() > 64) candidates.resize(64);

    const double spacing = 1.0 / grid_n;
    for (const auto& c : candidates) {
        Vec2 x = nelder_mead(f, lat.site(double(c.i) / grid_n, double(c.j) / grid_n), 0.5 * spacing, 1e-10);
        // Function values stop resolving the position near 1e-8; polish with finite-difference Newton.
        for (int k = 0; k < 8; ++k) {
            const Mat2 hess = hessian_central(f, x, 1e-4);
            const Vec2 grad = gradient_central(f, x, 1e-6);
            Eigen::SelfAdjointEigenSolver<Mat2> es(hess);
            if (es.eigenvalues().minCoeff() <= 0.0) break;
            const Vec2 dx = hess.ldlt().solve(grad);
            if (!dx.allFinite() || dx.norm() > spacing) break;
            x -= dx;
            if (dx.norm() < 1e-13) break;
        }
        x = reduce_to_lattice_cell(x, lat);
        if (distance_mod_lattice(x, Vec2::Zero(), lat) < 1e-9) x.setZero();

        const bool duplicate = std::any_of(audit.minima.begin(), audit.minima.end(), [&](const WellMinimum& w) {
            return distance_mod_lattice(w.location, x, lat) < 1e-6;
        });
        if (duplicate) continue;

        WellMinimum w;
        w.location = x;
        w.value = f(x);
        try {
            w.hessian = hessian_fd(f, x);
        } catch (const NumericalError&) {
            w.hessian = hessian_central(f, x, 1e-4);
        }
        Eigen::SelfAdjointEigenSolver<Mat2> es(w.hessian);
        const double emin = es.eigenvalues()(0), emax = es.eigenvalues()(1);
        w.condition = emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity();
        w.degenerate = !(w.condition <= 1e8);
        audit.minima.push_back(w);
    }
    std::sort(audit.minima.begin(), audit.minima.end(),
              [](const WellMinimum& a, const WellMinimum& b) { return a.value < b.value; });

    if (audit.minima.empty()) {
        audit.verdict = "no local minimum found";
        return audit;
    }
    const double vmin = audit.minima.front().value;
    const double tol = 1e-9 * std::max(1.0, std::abs(vmin));
    const auto n_global = std::count_if(audit.minima.begin(), audit.minima.end(),
                                        [&](const WellMinimum& w) { return w.value - vmin <= tol; });
    const WellMinimum& best = audit.minima.front();
    if (n_global > 1) {
        audit.verdict = "global minimum is not unique modulo the lattice";
    } else if (distance_mod_lattice(best.location, Vec2::Zero(), lat) > 1e-6) {
        audit.verdict = "global minimum is not located at the origin";
    } else if (best.degenerate) {
        audit.verdict = "global minimum is degenerate";
    } else {
        audit.assumption1_holds = true;
        audit.verdict = "unique non-degenerate global minimum at the origin";
    }
    return audit;
}

QuadraticData numeric_harmonic_data(const ModelParams& p, EigenMode mode) {
    const WellAudit audit = wells_audit(p, 96, mode);
    if (!audit.assumption1_holds) {
        throw ValidationError("Assumption 1 fails for these parameters: " + audit.verdict);
    }
    return quadratic_expansion([&](const Vec2& x) { return lambda_minus(x, p, mode); }, Vec2::Zero());
}

Vec2 from_numeric_coords(const Vec2& y) {
    return Vec2(s3 * (y.y() - y.x()) / (4.0 * pi), -(y.x() + y.y()) / (4.0 * pi));
}

Vec2 to_numeric_coords(const Vec2& x) {
    // y2 - y1 = 4 pi x1 / sqrt3, y1 + y2 = -4 pi x2
    const double diff = 4.0 * pi * x.x() / s3;
    const double sum = -4.0 * pi * x.y();
    return Vec2(0.5 * (sum - diff), 0.5 * (sum + diff));
}

LayerPair eval_intralayer_numeric(const Vec2& y, double phi) {
    const double y1 = y.x(), y2 = y.y();
    return {2.0 * (std::cos(y1 + phi) + std::cos(y2 - phi) + std::cos(y1 - y2 - phi)),
            2.0 * (std::cos(y1 - phi) + std::cos(y2 + phi) + std::cos(y1 - y2 + phi))};
}

cplx eval_T_numeric(const Vec2& y) {
    const cplx omega = std::polar(1.0, 2.0 * pi / 3.0);
    return omega * (1.0 + std::polar(1.0, -y.x()) + std::polar(1.0, y.y()));
}

}  // namespace moire
