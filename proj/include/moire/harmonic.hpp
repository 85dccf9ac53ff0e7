#pragma once

#include <string>
#include <vector>

#include "moire/potential.hpp"

namespace moire {

enum class HarmonicMode { papermode, numeric };

std::string to_string(HarmonicMode m);
HarmonicMode parse_harmonic_mode(const std::string& s);

/// Oscillator model lambda_minus ~ m0 + c1 y1^2 + c2 y2^2 near the well bottom.
struct HarmonicData {
    HarmonicMode mode = HarmonicMode::numeric;
    double m0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<double> levels;  ///< smallest (2 m1 + 1) sqrt c1 + (2 m2 + 1) sqrt c2, with multiplicity
};

/// Closed-form constants of the published expansion. Requires alpha = 1.
HarmonicData paper_coeffs(const ModelParams& p, int nlevels = 10);

/// Constants from a finite-difference expansion of the landscape at 0.
HarmonicData numeric_coeffs(const ModelParams& p, EigenMode landscape = EigenMode::exact, int nlevels = 10);

HarmonicData harmonic_data(const ModelParams& p, HarmonicMode mode, int nlevels = 10);

struct OscillatorLevel {
    double value = 0.0;
    int m1 = 0;
    int m2 = 0;
};

/// First `count` oscillator levels with their quantum numbers; ties ordered by (m1, m2).
std::vector<OscillatorLevel> oscillator_levels(double c1, double c2, int count);

std::vector<double> levels_up_to(const HarmonicData& hd, int count);

/// m0 + h * level n (n counts from 1).
double predicted_E(const HarmonicData& hd, double h, int n);

struct ComparisonRow {
    int n = 0;
    double computed = 0.0;
    double predicted = 0.0;
    double error = 0.0;  ///< computed - predicted
    double error_over_h = 0.0;
    double error_over_h32 = 0.0;
};

struct ComparisonReport {
    double h = 0.0;
    std::vector<ComparisonRow> rows;
};

/// Compares computed[0..] (levels 1, 2, ...) against the oscillator prediction at h.
ComparisonReport compare(const std::vector<double>& computed, const HarmonicData& hd, double h);

}  // namespace moire
