#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "moire/lattice.hpp"
#include "moire/types.hpp"

namespace moire {

/// Physical knobs of the semiclassical Hamiltonian -h^2 Laplacian + V(x).
struct ModelParams {
    double alpha = 1.0;  ///< intralayer coupling
    double beta = 1.0;   ///< interlayer coupling
    double U = 0.0;      ///< displacement field
    double phi = 0.0;    ///< intralayer phase
    double h = 0.05;     ///< semiclassical parameter (twist angle)

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// The reference parameter set (alpha, beta, U, phi) = (1, 1, 0, 4 pi / 3).
ModelParams reference_params(double h);

struct LayerPair {
    double up = 0.0;
    double down = 0.0;
};

/// (V_up(x), V_down(x)) in the expanded product form.
LayerPair eval_intralayer(const Vec2& x, double phi);

/// Interlayer tunnelling T(x) = 1 + 2 exp(-2 pi i x1 / sqrt 3) cos(2 pi x2).
cplx eval_T(const Vec2& x);

/// [[alpha V_up + U/2, beta T], [beta conj(T), alpha V_down - U/2]].
Mat2c assemble_V(const Vec2& x, const ModelParams& p);

struct EigenPair2 {
    double minus = 0.0;
    double plus = 0.0;
};

/// Which formula produces the pointwise eigenvalues of V.
///
/// `exact` diagonalises the 2x2 matrix. `papermode` uses the published closed form,
/// whose off-diagonal term lacks the factor 4 of the exact expression; it is kept to
/// reproduce the published expansion constants and rejects alpha != 1.
enum class EigenMode { exact, papermode };

std::string to_string(EigenMode m);
EigenMode parse_eigen_mode(const std::string& s);

EigenPair2 eigs_exact(const Vec2& x, const ModelParams& p);
EigenPair2 eigs_papermode(const Vec2& x, const ModelParams& p);
EigenPair2 eigs(const Vec2& x, const ModelParams& p, EigenMode mode);
double lambda_minus(const Vec2& x, const ModelParams& p, EigenMode mode = EigenMode::exact);

/// Minimum of lambda_minus over an n x n fundamental-cell sample.
double sampled_floor(const ModelParams& p, int n, EigenMode mode = EigenMode::exact);

/// Reciprocal-space coefficients of V: V(x) = sum_g Vhat(g) exp(i <g, x>), g = m g1 + n g2.
struct FourierTable {
    std::map<std::pair<int, int>, Mat2c> entries;

    Mat2c coefficient(int m, int n) const;
    Mat2c evaluate(const Vec2& x, const Lattice& lat) const;
};

FourierTable fourier_table(const ModelParams& p, const Lattice& lat);

struct WellMinimum {
    Vec2 location = Vec2::Zero();  ///< in the fundamental cell
    double value = 0.0;
    Mat2 hessian = Mat2::Zero();
    double condition = 0.0;  ///< eigenvalue ratio of the Hessian; infinite if not positive definite
    bool degenerate = false;
};

struct WellAudit {
    EigenMode mode = EigenMode::exact;
    int grid_n = 0;
    std::vector<WellMinimum> minima;  ///< distinct local minima modulo the lattice, ascending value
    bool assumption1_holds = false;
    bool gap_ok = false;
    double min_gap = 0.0;    ///< min of lambda_+ - lambda_- over the sample
    std::string verdict;     ///< short human-readable reason
};

WellAudit wells_audit(const ModelParams& p, int grid_n, EigenMode mode = EigenMode::exact);

/// Central-difference Hessian with Richardson extrapolation between `step` and `step / 2`.
/// Throws NumericalError when the two steps disagree by more than 1e-4 (relative).
Mat2 hessian_fd(const std::function<double(const Vec2&)>& f, const Vec2& x0, double step = 1e-3);

/// Quadratic model f(x) ~ m0 + c1 y1^2 + c2 y2^2 in the Hessian's principal axes (c1 <= c2).
struct QuadraticData {
    double m0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    Mat2 axes = Mat2::Identity();  ///< columns are the principal directions
};

QuadraticData quadratic_expansion(const std::function<double(const Vec2&)>& f, const Vec2& x0);

/// Quadratic model of lambda_minus at the origin. Throws ValidationError when Assumption 1 fails.
QuadraticData numeric_harmonic_data(const ModelParams& p, EigenMode mode = EigenMode::exact);

/// Chart y -> x with x1 = sqrt3 (y2 - y1) / (4 pi), x2 = -(y1 + y2) / (4 pi).
Vec2 from_numeric_coords(const Vec2& y);
Vec2 to_numeric_coords(const Vec2& x);

/// Intralayer potentials written in the numeric chart.
LayerPair eval_intralayer_numeric(const Vec2& y, double phi);
/// omega (1 + exp(-i y1) + exp(i y2)) with omega = exp(2 pi i / 3).
cplx eval_T_numeric(const Vec2& y);

}  // namespace moire
