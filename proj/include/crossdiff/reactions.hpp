#pragma once

// Reaction terms of the form f_i(u) = u_i * g_i(u), plus the admissibility
// scans that certify the entropy growth bound f(u) . Dh(u) <= c_f (1 + h(u)).

#include <functional>
#include <variant>
#include <vector>

#include "crossdiff/conditions.hpp"
#include "crossdiff/types.hpp"

namespace crossdiff {

struct NoReaction {};

/// Competition kinetics f_i = (b_{i0} - b_{i1} u1 - b_{i2} u2) u_i,
/// all parameters nonnegative.
struct LotkaVolterra {
    double b10{}, b11{}, b12{};
    double b20{}, b21{}, b22{};
};

/// User-supplied growth rates g_i, continuous on the closure of D. The
/// declared band condition -- g_i <= 0 wherever 1 - eps_band < u1 + u2 < 1 --
/// is what keeps the entropy growth bounded; it is verified by sampling, see
/// check_custom_band.
struct CustomReaction {
    std::function<double(const Vec2&)> g1, g2;
    double eps_band{};
};

using ReactionSpec = std::variant<NoReaction, LotkaVolterra, CustomReaction>;

/// f(u); zero for NoReaction. u must lie in the closure of D.
Vec2 eval_reaction(const ReactionSpec& r, const Vec2& u);

/// df/du. Analytic for LotkaVolterra, finite differences (interior-safe) for
/// CustomReaction.
Mat2 reaction_jacobian(const ReactionSpec& r, const Vec2& u);

struct LvBandResult {
    /// Width of the negative-growth band next to the edge u1 + u2 = 1:
    /// eps = min_i (1 - b_{i0} / min{b_{i1}, b_{i2}}). Zero growth (b_{i0} = 0)
    /// contributes 1; zero competition with positive growth contributes -inf.
    double eps{};
    ConditionReport report;
};

/// Kinetic admissibility b10 <= min{b11, b12}, b20 <= min{b21, b22}, together
/// with the band width the proof extracts from it. The equality case passes
/// with eps = 0 and a degenerate note.
LvBandResult lv_band(const LotkaVolterra& r);

struct H3Scan {
    double c_f{};        ///< max over samples of f.Dh / (1 + h_normalized), clamped at 0
    Vec2 argmax{};       ///< where the maximum was attained
    bool diverged{};     ///< the edge-approach maxima kept growing under refinement
    Vec2 witness{};      ///< argmax at the finest edge distance
    std::vector<double> edge_maxima; ///< one max per approach distance 1e-2 .. 1e-8
};

/// Numeric certificate for the entropy growth hypothesis: scans
/// f(u) . Dh(u) / (1 + h_normalized(u)) over an interior barycentric grid and
/// along approaches to the edge u1 + u2 = 1 at distances 1e-2 .. 1e-8. A
/// reaction violating the band condition shows up as a logarithmically growing
/// edge sequence and is flagged as diverged. Requires n >= 16.
H3Scan h3_bound_scan(const ReactionSpec& r, int n);

/// Sampling check of the declared band condition of a CustomReaction:
/// g_i <= tol at `samples` quasi-random points of the band. Deterministic for
/// a fixed seed.
ConditionReport check_custom_band(const CustomReaction& r, int samples = 10000,
                                  unsigned long long seed = 0x5eedULL,
                                  double tol = kConditionTol);

} // namespace crossdiff
