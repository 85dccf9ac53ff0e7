#include "moire/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace moire {

std::string to_string(HarmonicMode m) { return m == HarmonicMode::papermode ? "papermode" : "numeric"; }

HarmonicMode parse_harmonic_mode(const std::string& s) {
    if (s == "papermode") return HarmonicMode::papermode;
    if (s == "numeric") return HarmonicMode::numeric;
    throw ValidationError("unknown harmonic mode '" + s + "' (expected papermode or numeric)");
}

HarmonicData paper_coeffs(const ModelParams& p, int nlevels) {
    p.validate();
    if (p.alpha != 1.0) throw ValidationError("papermode requires alpha = 1");
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    const double root = std::sqrt(9.0 * p.beta * p.beta + p.U * p.U);
    const double cphi = std::cos(p.phi);
    HarmonicData hd;
    hd.mode = HarmonicMode::papermode;
    hd.m0 = 6.0 * cphi - root / 2.0;
    if (root > 0.0) {
        hd.c1 = -8.0 * pi2 * cphi + 2.0 * p.beta * p.beta * pi2 / (3.0 * root);
        hd.c2 = -8.0 * pi2 * cphi + 6.0 * p.beta * p.beta * pi2 / root;
    } else {
        hd.c1 = hd.c2 = -8.0 * pi2 * cphi;
    }
    if (!(hd.c1 > 0.0) || !(hd.c2 > 0.0)) throw ValidationError("no non-degenerate well in papermode");
    hd.levels = levels_up_to(hd, nlevels);
    return hd;
}

HarmonicData numeric_coeffs(const ModelParams& p, EigenMode landscape, int nlevels) {
    const QuadraticData q = numeric_harmonic_data(p, landscape);
    HarmonicData hd;
    hd.mode = HarmonicMode::numeric;
    hd.m0 = q.m0;
    hd.c1 = q.c1;
    hd.c2 = q.c2;
    if (!(hd.c1 > 0.0) || !(hd.c2 > 0.0)) throw ValidationError("landscape has no non-degenerate well at 0");
    hd.levels = levels_up_to(hd, nlevels);
    return hd;
}

HarmonicData harmonic_data(const ModelParams& p, HarmonicMode mode, int nlevels) {
    return mode == HarmonicMode::papermode ? paper_coeffs(p, nlevels) : numeric_coeffs(p, EigenMode::exact, nlevels);
}

std::vector<OscillatorLevel> oscillator_levels(double c1, double c2, int count) {
    if (count < 1) throw ValidationError("level count must be at least 1");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw ValidationError("oscillator coefficients must be positive");
    const double s1 = std::sqrt(c1);
    const double s2 = std::sqrt(c2);
    // The axis points (m, 0), m < count, already give `count` levels, so nothing above the
    // largest of them can make the cut.
    const double bound = std::min((2.0 * count - 1.0) * s1 + s2, s1 + (2.0 * count - 1.0) * s2);
    std::vector<OscillatorLevel> all;
    for (int m1 = 0; (2.0 * m1 + 1.0) * s1 + s2 <= bound * (1.0 + 1e-14); ++m1) {
        for (int m2 = 0;; ++m2) {
            const double v = (2.0 * m1 + 1.0) * s1 + (2.0 * m2 + 1.0) * s2;
            if (v > bound * (1.0 + 1e-14)) break;
            all.push_back({v, m1, m2});
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const OscillatorLevel& a, const OscillatorLevel& b) {
        return std::tie(a.value, a.m1, a.m2) < std::tie(b.value, b.m1, b.m2);
    });
    all.resize(static_cast<std::size_t>(count));
    return all;
}

std::vector<double> levels_up_to(const HarmonicData& hd, int count) {
    std::vector<double> out;
    for (const auto& l : oscillator_levels(hd.c1, hd.c2, count)) out.push_back(l.value);
    return out;
}

double predicted_E(const HarmonicData& hd, double h, int n) {
    if (n < 1) throw ValidationError("level index starts at 1");
    const double level = static_cast<std::size_t>(n) <= hd.levels.size()
                             ? hd.levels[static_cast<std::size_t>(n - 1)]
                             : levels_up_to(hd, n).back();
    return hd.m0 + h * level;
}

ComparisonReport compare(const std::vector<double>& computed, const HarmonicData& hd, double h) {
    if (!(h > 0.0)) throw ValidationError("h must be positive");
    ComparisonReport rep;
    rep.h = h;
    for (std::size_t i = 0; i < computed.size(); ++i) {
        ComparisonRow row;
        row.n = static_cast<int>(i + 1);
        row.computed = computed[i];
        row.predicted = predicted_E(hd, h, row.n);
        row.error = row.computed - row.predicted;
        row.error_over_h = row.error / h;
        row.error_over_h32 = row.error / std::pow(h, 1.5);
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace moire
