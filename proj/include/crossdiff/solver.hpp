#pragma once

// Structure-preserving 1-D finite-volume discretization. The per-cell
// unknowns are the entropy variables w, so every density reconstructed
// through entropy_gradient_inverse lies in the open triangle D by
// construction; positivity and the bound u1 + u2 < 1 never need enforcement.
//
// Scheme: cell-centered volumes, zero-flux (homogeneous Neumann) faces at
// both ends, backward Euler in time, face mobility B = A(u) H(u)^{-1}
// evaluated at the arithmetic mean of the adjacent reconstructed densities,
// reactions treated implicitly, Newton with an exact Jacobian and step
// damping.

#include <stdexcept>
#include <string>
#include <vector>

#include "crossdiff/coeffs.hpp"
#include "crossdiff/reactions.hpp"
#include "crossdiff/types.hpp"

namespace crossdiff {

struct Grid1D {
    int n_cells{};
    double length{};

    double dx() const { return length / n_cells; }
    double cell_center(int j) const { return (j + 0.5) * dx(); }
};

/// Validating factory: n_cells >= 2, length > 0.
Grid1D make_grid(int n_cells, double length);

struct GridState {
    Grid1D grid{};
    double t{0.0};
    Field2 w; ///< entropy variables, one column per cell

    /// Reconstructed densities, one column per cell; always Interior.
    Field2 densities() const;
};

/// Build a state from densities; every cell must be strictly Interior.
GridState state_from_densities(const Grid1D& grid, const Field2& u);

struct StepDiagnostics {
    double entropy_raw{};        ///< sum_j h_raw(u_j) dx
    double entropy_normalized{}; ///< sum_j h_normalized(u_j) dx
    double mass1{}, mass2{};     ///< sum_j u_{i,j} dx
    double min_u3{};             ///< smallest solvent fraction over cells
    double dissipation{};        ///< sum_faces (dw)^T B (dw) / dx, >= 0 for PSD sets
    int newton_iters{};
};

/// Mobility B = A(u) H(u)^{-1}; symmetric when H A is, PSD when the PSD
/// conditions hold (congruence of H A by H^{-1}). u must be Interior.
Mat2 assemble_mobility(const CoeffSet& c, const Vec2& u);

/// dB/du_k (k = 0, 1): B is polynomial in u, so this is exact.
Mat2 mobility_derivative(const CoeffSet& c, const Vec2& u, int k);

class NewtonFailure : public std::runtime_error {
public:
    NewtonFailure(const std::string& msg, Field2 it, double res, int n)
        : std::runtime_error(msg), iterate(std::move(it)), residual(res), iters(n) {}

    Field2 iterate;  ///< last Newton iterate, for diagnostics
    double residual; ///< its max-norm residual
    int iters;
};

struct StepResult {
    GridState state;
    StepDiagnostics diag;
};

/// One backward-Euler step of size tau: solves
///   (u(w_j) - u_j^old)/tau = (1/dx^2) [B_{j+1/2}(w_{j+1}-w_j) - B_{j-1/2}(w_j-w_{j-1})] + f(u(w_j))
/// for the new per-cell w by damped Newton (exact Jacobian, block-tridiagonal
/// solve). Throws NewtonFailure after 50 iterations without reaching a
/// max-norm residual of 1e-10 (internal target 1e-12), carrying the iterate
/// so callers can halve tau.
StepResult step_implicit(const GridState& state, const CoeffSet& c,
                         const ReactionSpec& r, double tau);

/// Entropy, masses, min solvent fraction and the discrete dissipation
/// sum_faces (dw)^T B (dw)/dx of a state (newton_iters = 0).
StepDiagnostics diagnostics(const GridState& state, const CoeffSet& c,
                            const ReactionSpec& r);

/// Residual of the backward-Euler system at trial unknowns w_new, interleaved
/// per cell as (w1, w2). Exposed for verification.
Eigen::VectorXd backward_euler_residual(const GridState& state, const CoeffSet& c,
                                        const ReactionSpec& r, double tau,
                                        const Field2& w_new);

/// Dense Jacobian of backward_euler_residual with respect to w_new (same
/// interleaved ordering). Exposed for verification; the solver itself uses
/// the block-tridiagonal form.
Eigen::MatrixXd backward_euler_jacobian(const GridState& state, const CoeffSet& c,
                                        const ReactionSpec& r, double tau,
                                        const Field2& w_new);

struct RunSetup {
    Grid1D grid{};
    CoeffSet coeffs;
    ReactionSpec reaction{NoReaction{}};
    Field2 initial_densities; ///< 2 x n_cells, in the closure of D
    bool rescale_initial{true};
    double tau{};   ///< configured (maximal) time step
    double t_end{};
};

struct TrajectoryPoint {
    long step{};
    double t{};
    double tau{}; ///< step size actually taken
    StepDiagnostics diag;
};

struct RunResult {
    GridState initial_state; ///< state actually used after the initial-data policy
    GridState final_state;
    StepDiagnostics initial_diag;
    std::vector<TrajectoryPoint> trajectory; ///< one record per accepted step
    bool aborted{false};
    std::string abort_reason;
    long newton_failures{0};   ///< rejected step attempts (each halves tau)
    long rescaled_cells{0};    ///< initial cells nudged off the boundary
    double min_density_seen{1.0}; ///< min over all steps/cells of min(u1, u2, u3)
    long region_violations{0}; ///< reconstructed states not Interior; stays 0
    std::vector<std::string> warnings;
};

/// Time loop: validates admissibility (symmetric structure plus the strict or
/// zero-constant-part conditions; kinetic band for reactions), prepares
/// initial w (optional boundary nudge controlled by rescale_initial), then
/// steps to t_end with tau halving on Newton failure (floor 1e-12 * t_end,
/// then aborts with partial results) and tau doubling after five consecutive
/// easy steps (capped at the configured tau).
RunResult run_simulation(const RunSetup& setup);

} // namespace crossdiff
