#pragma once

// Coefficient families for diffusion matrices that are linear in the
// densities:
//   A(u) = alpha + beta * u1 + gamma * u2,
// with constant 2x2 matrices alpha, beta, gamma.

#include <stdexcept>

#include "crossdiff/types.hpp"

namespace crossdiff {

struct CoeffSet {
    Mat2 alpha{Mat2::Zero()};
    Mat2 beta{Mat2::Zero()};
    Mat2 gamma{Mat2::Zero()};
};

inline Mat2 eval_diffusion_matrix(const CoeffSet& c, const Vec2& u) {
    if (!u.allFinite()) {
        throw std::invalid_argument("eval_diffusion_matrix: non-finite state");
    }
    return c.alpha + u[0] * c.beta + u[1] * c.gamma;
}

/// Build the unique symmetric-structure coefficient set from its five free
/// parameters. The remaining entries are pinned by the symmetry constraints
///   alpha12 = alpha21 = beta21 = gamma12 = 0,
///   beta22  = beta11 - gamma21,
///   gamma11 = gamma22 - beta12,
///   gamma21 = alpha22 - alpha11 + beta12,
/// which are exactly the conditions under which D^2h(u) * A(u) is symmetric
/// on all of D.
inline CoeffSet symmetric_coeffs(double alpha11, double alpha22, double beta11,
                                 double beta12, double gamma22) {
    const double gamma21 = alpha22 - alpha11 + beta12;
    CoeffSet c;
    c.alpha << alpha11, 0.0,
               0.0, alpha22;
    c.beta << beta11, beta12,
              0.0, beta11 - gamma21;
    c.gamma << gamma22 - beta12, 0.0,
               gamma21, gamma22;
    return c;
}

/// Population model with cross-diffusion pressures:
///   du1/dt = div( grad((a10 + a11 u1 + a12 u2) u1) ) + u1 (b10 - b11 u1 - b12 u2)
/// and symmetrically for species 2. The a-parameters set the diffusion
/// matrix, the b-parameters the competition kinetics.
struct SktParams {
    double a10{}, a11{}, a12{};
    double a20{}, a21{}, a22{};
    double b10{}, b11{}, b12{};
    double b20{}, b21{}, b22{};
};

/// Diffusion coefficients induced by the population model:
///   A11 = a10 + 2 a11 u1 + a12 u2,  A12 = a12 u1,
///   A21 = a21 u2,                   A22 = a20 + a21 u1 + 2 a22 u2.
inline CoeffSet from_skt(const SktParams& p) {
    CoeffSet c;
    c.alpha << p.a10, 0.0,
               0.0, p.a20;
    c.beta << 2.0 * p.a11, p.a12,
              0.0, p.a21;
    c.gamma << p.a12, 0.0,
               p.a21, 2.0 * p.a22;
    return c;
}

/// Complete-segregation pressure model A(u) = [[1 - u1, -u1], [-u2, 1 - u2]]:
/// alpha = I, beta = [[-1, -1], [0, 0]], gamma = [[0, 0], [-1, -1]]. Satisfies
/// the symmetric structure with free parameters (1, 1, -1, -1, -1).
inline CoeffSet segregation_matrix() {
    return symmetric_coeffs(1.0, 1.0, -1.0, -1.0, -1.0);
}

} // namespace crossdiff
