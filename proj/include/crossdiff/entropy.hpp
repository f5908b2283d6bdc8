#pragma once

// State space and entropy structure for two-species mixtures.
//
// The admissible states form the open triangle
//   D = { u = (u1, u2) : u1 > 0, u2 > 0, u1 + u2 < 1 },
// with the solvent fraction u3 = 1 - u1 - u2 treated as a dependent third
// coordinate. The entropy density
//   h(u) = sum_i u_i (log u_i - 1),  i = 1..3,
// is strictly convex on D; its gradient maps D diffeomorphically onto R^2,
// which is what confines discrete solutions to D when they are evolved in
// the entropy variables w = Dh(u).

#include <cmath>
#include <limits>
#include <stdexcept>

#include "crossdiff/types.hpp"

namespace crossdiff {

/// Default tolerance for membership tests against the closure of D.
inline constexpr double kMembershipTol = 1e-12;

/// Additive offset between raw and normalized entropy: h_min = -(1 + log 3)
/// is attained at the barycenter (1/3, 1/3).
inline const double kEntropyOffset = 1.0 + std::log(3.0);

enum class Region { Interior, Boundary, Outside };

template <typename Scalar>
Scalar third_coordinate(const Vec2T<Scalar>& u) {
    return Scalar(1) - u[0] - u[1];
}

/// Classify against D using the smallest barycentric coordinate m = min(u1, u2, u3):
/// Interior if m > tol, Boundary if |m| <= tol, Outside otherwise.
inline Region classify(const Vec2& u, double tol = kMembershipTol) {
    if (!u.allFinite()) {
        throw std::invalid_argument("classify: non-finite state");
    }
    const double m = std::min({u[0], u[1], third_coordinate(u)});
    if (m > tol) return Region::Interior;
    if (m >= -tol) return Region::Boundary;
    return Region::Outside;
}

template <typename Scalar>
struct EntropyValueT {
    Scalar raw;        ///< h(u), minimum -(1 + log 3)
    Scalar normalized; ///< h(u) + 1 + log 3, nonnegative on the closure
};

using EntropyValue = EntropyValueT<double>;

namespace detail {
// x (log x - 1) extended by continuity with 0 log 0 = 0. Tiny negative
// arguments (boundary states within membership tolerance) also map to 0.
template <typename Scalar>
Scalar xlogxm1(Scalar x) {
    using std::log;
    return x > Scalar(0) ? x * (log(x) - Scalar(1)) : Scalar(0);
}
} // namespace detail

/// Entropy density. Defined on the closure of D; throws on Outside states.
template <typename Scalar>
EntropyValueT<Scalar> entropy_density(const Vec2T<Scalar>& u, double tol = kMembershipTol) {
    const Vec2 ud(static_cast<double>(u[0]), static_cast<double>(u[1]));
    if (classify(ud, tol) == Region::Outside) {
        throw std::domain_error("entropy_density: state outside closure of D");
    }
    using std::log;
    const Scalar raw = detail::xlogxm1(u[0]) + detail::xlogxm1(u[1])
                     + detail::xlogxm1(third_coordinate(u));
    return {raw, raw + Scalar(1) + log(Scalar(3))};
}

/// w = Dh(u) = (log(u1/u3), log(u2/u3)). Interior states only.
template <typename Scalar>
Vec2T<Scalar> entropy_gradient(const Vec2T<Scalar>& u, double tol = kMembershipTol) {
    const Vec2 ud(static_cast<double>(u[0]), static_cast<double>(u[1]));
    if (classify(ud, tol) != Region::Interior) {
        throw std::domain_error("entropy_gradient: state not in the open triangle D");
    }
    using std::log;
    const Scalar u3 = third_coordinate(u);
    return Vec2T<Scalar>(log(u[0] / u3), log(u[1] / u3));
}

/// Inverse of the gradient map,
///   u_i = exp(w_i) / (1 + exp(w1) + exp(w2)),
/// evaluated overflow-safely by shifting with m = max(0, w1, w2). Total on
/// R^2 and maps into D in exact arithmetic. In double precision the result
/// is guaranteed to stay in the closed triangle (never Outside), and is
/// strictly interior whenever the spread of (0, w1, w2) stays below about
/// 34; past that, barycentric coordinates smaller than machine epsilon
/// round to 0 or get absorbed into u1 + u2 = 1.
template <typename Scalar>
Vec2T<Scalar> entropy_gradient_inverse(const Vec2T<Scalar>& w) {
    if (!w.allFinite()) {
        throw std::invalid_argument("entropy_gradient_inverse: non-finite entropy variables");
    }
    using std::exp;
    using std::max;
    const Scalar m = max(Scalar(0), max(w[0], w[1]));
    const Scalar e0 = exp(-m);          // exp(0 - m), solvent weight
    const Scalar e1 = exp(w[0] - m);
    const Scalar e2 = exp(w[1] - m);
    const Scalar s = e0 + e1 + e2;
    return Vec2T<Scalar>(e1 / s, e2 / s);
}

/// H = D^2 h(u) = [[1/u1 + 1/u3, 1/u3], [1/u3, 1/u2 + 1/u3]], positive definite
/// on D with det H = 1/(u1 u2 u3).
template <typename Scalar>
Mat2T<Scalar> entropy_hessian(const Vec2T<Scalar>& u, double tol = kMembershipTol) {
    const Vec2 ud(static_cast<double>(u[0]), static_cast<double>(u[1]));
    if (classify(ud, tol) != Region::Interior) {
        throw std::domain_error("entropy_hessian: state not in the open triangle D");
    }
    const Scalar r3 = Scalar(1) / third_coordinate(u);
    Mat2T<Scalar> h;
    h << Scalar(1) / u[0] + r3, r3,
         r3, Scalar(1) / u[1] + r3;
    return h;
}

/// Closed-form inverse Hessian
///   H^{-1}(u) = [[u1 (1 - u1), -u1 u2], [-u1 u2, u2 (1 - u2)]].
/// Polynomial in u, hence accepted on the whole closure (it degenerates to a
/// singular matrix on the boundary).
template <typename Scalar>
Mat2T<Scalar> entropy_hessian_inverse(const Vec2T<Scalar>& u, double tol = kMembershipTol) {
    const Vec2 ud(static_cast<double>(u[0]), static_cast<double>(u[1]));
    if (classify(ud, tol) == Region::Outside) {
        throw std::domain_error("entropy_hessian_inverse: state outside closure of D");
    }
    Mat2T<Scalar> m;
    m << u[0] * (Scalar(1) - u[0]), -u[0] * u[1],
         -u[0] * u[1], u[1] * (Scalar(1) - u[1]);
    return m;
}

} // namespace crossdiff
