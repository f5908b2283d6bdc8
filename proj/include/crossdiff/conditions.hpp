#pragma once

// Algebraic admissibility criteria for the symmetric linear coefficient
// family, plus a brute-force spectral oracle.
//
// Everything here is phrased in terms of the five free parameters
// (alpha11, alpha22, beta11, beta12, gamma22) that remain once the symmetry
// constraints are imposed; see symmetric_coeffs() in coeffs.hpp.

#include <optional>
#include <string>
#include <vector>

#include "crossdiff/coeffs.hpp"
#include "crossdiff/entropy.hpp"
#include "crossdiff/types.hpp"

namespace crossdiff {

/// Default tolerance for the algebraic condition checks. Margins are always
/// reported so callers can tell a robust pass from a degenerate one.
inline constexpr double kConditionTol = 1e-12;

enum class Criterion {
    Symmetry,
    PsdIff,
    TheoremStrict,
    RemarkCase,
    SktCorollary,
    LvBand,
    CustomBand,
};

std::string criterion_name(Criterion label);

enum class MarginKind {
    Slack,       ///< passes iff value >= -tol
    Residual,    ///< passes iff |value| <= tol (signed residual reported)
    StrictSlack, ///< passes iff value > tol
};

struct Margin {
    std::string name;
    double value{};
    MarginKind kind{MarginKind::Slack};

    bool satisfied(double tol) const;
};

struct ConditionReport {
    Criterion label{};
    bool passed{};
    double tol{kConditionTol};
    std::vector<Margin> margins;
    /// State point witnessing a failure; set only by spectral checks.
    std::optional<Vec2> witness;
    /// Shift constant reported by the zero-constant-part case (see
    /// check_remark_case); not certified as a spectral lower bound.
    std::optional<double> ellipticity;
    std::vector<std::string> notes;

    double min_margin() const;
    const Margin* find(const std::string& name) const;
};

/// The five free parameters of a symmetric-structure coefficient set.
struct FreeParams {
    double alpha11{}, alpha22{}, beta11{}, beta12{}, gamma22{};
};

inline FreeParams free_params(const CoeffSet& c) {
    return {c.alpha(0, 0), c.alpha(1, 1), c.beta(0, 0), c.beta(0, 1), c.gamma(1, 1)};
}

/// Structure conditions making H(u)*A(u) symmetric on all of D:
/// alpha12 = alpha21 = beta21 = gamma12 = 0, beta22 = beta11 - gamma21,
/// gamma11 = gamma22 - beta12, gamma21 = alpha22 - alpha11 + beta12.
/// Margins are the seven signed residuals.
ConditionReport check_symmetry(const CoeffSet& c, double tol = kConditionTol);

/// Exact characterization of H*A being positive semidefinite on all of D
/// (weak inequalities): alpha11 >= 0, alpha22 >= 0,
/// beta12 <= alpha11 + min{beta11, gamma22}, alpha11 + beta11 >= 0,
/// alpha22 + gamma22 >= 0. Margins list the five slacks.
/// Requires check_symmetry to pass; throws std::domain_error otherwise.
ConditionReport check_psd_iff(const CoeffSet& c, double tol = kConditionTol);

/// Strict version backing well-posedness: alpha11 > 0, alpha22 > 0,
/// beta12 < alpha11 + min{beta11, gamma22}, plus the two weak sum conditions.
/// Passing implies epsilon_max(c) > 0. Requires symmetry.
ConditionReport check_theorem_conditions(const CoeffSet& c, double tol = kConditionTol);

/// Degenerate-constant-part regime: alpha11 = alpha22 = 0 with beta11,
/// gamma22 > 0, where shifting the parameters by eps = min{beta11, gamma22}
/// keeps the PSD conditions intact. Reports eps as `ellipticity` on success;
/// eps is the shift constant of that construction, not a certified spectral
/// lower bound (the infimum of the smallest eigenvalue can be smaller when
/// beta12 is close to eps). Requires symmetry.
ConditionReport check_remark_case(const CoeffSet& c, double tol = kConditionTol);

/// Largest eps such that the shifted set
/// (alpha11-eps, alpha22-eps, beta11+eps, beta12+eps, gamma22+eps) still
/// satisfies the PSD conditions: min{alpha11, alpha22,
/// alpha11 + min{beta11, gamma22} - beta12}, clamped below at 0. This is the
/// best constant in  z^T H A z >= eps (z1^2/u1 + z2^2/u2).
/// Requires symmetry and check_psd_iff to pass; throws std::domain_error.
double epsilon_max(const CoeffSet& c);

/// The eps-shifted coefficient set used by epsilon_max (symmetry-completed).
CoeffSet shifted_coeffs(const CoeffSet& c, double eps);

struct VertexLimits {
    Mat2 f1, f2, f3;
};

/// Limits of s*H(u(s))*A(u(s)) along the vertex-approach paths
/// u = (s, s), (1-2s, s), (s, 1-2s) as s -> 0:
///   F1 = diag(alpha11, alpha22),
///   F2 = [[a, a], [a, 2a - beta12]]              with a = alpha11 + beta11,
///   F3 = [[alpha11 + b + gamma22 - beta12, b], [b, b]]  with b = alpha22 + gamma22;
/// PSD of H*A forces PSD of all three. Requires symmetry.
VertexLimits vertex_limits(const CoeffSet& c);

/// Determinant of the diffusion matrix at u.
double det_A(const CoeffSet& c, const Vec2& u);

/// det of the (constant) Hessian of u -> det A(u):
///   det C = -(beta11*beta12 + gamma22*(alpha11 - alpha22 - beta12))^2 <= 0.
/// Requires symmetry.
double det_hessian_certificate(const CoeffSet& c);

/// Diagonal entries of H*A rescaled to polynomials:
///   f1(u) = u1*u3*(HA)_11 = (u1 + u3)*A11 + u1*A21,
///   f2(u) = u2*u3*(HA)_22 = u2*A12 + (u2 + u3)*A22.
/// Their nonnegativity on the boundary edges is the second ingredient of the
/// PSD characterization (the first being det A >= 0).
double diag_polynomial_f1(const CoeffSet& c, const Vec2& u);
double diag_polynomial_f2(const CoeffSet& c, const Vec2& u);

struct OracleScan {
    double min_unweighted{};  ///< min over samples of lambda_min(sym(H*A))
    Vec2 argmin_unweighted{};
    double min_weighted{};    ///< min of lambda_min(diag(sqrt u) sym(H*A) diag(sqrt u))
    Vec2 argmin_weighted{};
    long samples{};
};

/// Brute-force scan of the quadratic form z^T H(u) A(u) z over D: a barycentric
/// lattice at interior margin 1e-3 plus the three vertex-approach paths at
/// s in {1e-1, ..., 1e-6} (violations of the PSD criterion can hide arbitrarily
/// close to the vertices, so interior grids alone are not enough).
/// The weighted variant measures the form against z1^2/u1 + z2^2/u2, i.e. the
/// ellipticity constant bounded below by epsilon_max.
/// Requires n >= 8; throws std::invalid_argument otherwise.
OracleScan spectral_oracle_scan(const CoeffSet& c, int n);

/// Parameter conditions under which the population model is admissible:
/// a21 = a11, a22 = a12, a20 - a10 = a11 - a22 >= 0, a10 > 0, a20 > 0, and the
/// kinetic bounds b10 <= min{b11, b12}, b20 <= min{b21, b22}. Passing implies
/// from_skt(s) passes check_symmetry and check_theorem_conditions.
ConditionReport check_skt_corollary(const SktParams& s, double tol = kConditionTol);

} // namespace crossdiff
