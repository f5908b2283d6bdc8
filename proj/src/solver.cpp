#include "crossdiff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "crossdiff/conditions.hpp"
#include "crossdiff/entropy.hpp"

namespace crossdiff {

Grid1D make_grid(int n_cells, double length) {
    if (n_cells < 2) {
        throw std::invalid_argument("make_grid: need at least 2 cells");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument("make_grid: length must be positive and finite");
    }
    return {n_cells, length};
}

Field2 GridState::densities() const {
    Field2 u(2, w.cols());
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        u.col(j) = entropy_gradient_inverse(Vec2(w.col(j)));
    }
    return u;
}

GridState state_from_densities(const Grid1D& grid, const Field2& u) {
    if (u.rows() != 2 || u.cols() != grid.n_cells) {
        throw std::invalid_argument("state_from_densities: field shape does not match grid");
    }
    GridState s;
    s.grid = grid;
    s.w.resize(2, grid.n_cells);
    for (int j = 0; j < grid.n_cells; ++j) {
        s.w.col(j) = entropy_gradient(Vec2(u.col(j)));
    }
    return s;
}

Mat2 assemble_mobility(const CoeffSet& c, const Vec2& u) {
    if (classify(u) != Region::Interior) {
        throw std::domain_error("assemble_mobility: state must be Interior");
    }
    return eval_diffusion_matrix(c, u) * entropy_hessian_inverse(u);
}

Mat2 mobility_derivative(const CoeffSet& c, const Vec2& u, int k) {
    if (k != 0 && k != 1) {
        throw std::invalid_argument("mobility_derivative: component index must be 0 or 1");
    }
    const Mat2 a = eval_diffusion_matrix(c, u);
    const Mat2 hinv = entropy_hessian_inverse(u);
    Mat2 dhinv;
    if (k == 0) {
        dhinv << 1.0 - 2.0 * u[0], -u[1],
                 -u[1], 0.0;
    } else {
        dhinv << 0.0, -u[0],
                 -u[0], 1.0 - 2.0 * u[1];
    }
    const Mat2& da = (k == 0) ? c.beta : c.gamma;
    return da * hinv + a * dhinv;
}

namespace {

struct BlockTri {
    // 2x2 blocks of the Jacobian: lower[j] couples cell j to j-1 (j >= 1),
    // upper[j] couples cell j to j+1 (j <= n-2).
    std::vector<Mat2> diag, lower, upper;

    explicit BlockTri(int n)
        : diag(n, Mat2::Zero()), lower(n, Mat2::Zero()), upper(n, Mat2::Zero()) {}
};

Field2 reconstruct(const Field2& w) {
    Field2 u(2, w.cols());
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        u.col(j) = entropy_gradient_inverse(Vec2(w.col(j)));
    }
    return u;
}

// Residual of the backward-Euler system; fluxes telescope exactly, which is
// what conserves mass up to the Newton tolerance.
Field2 residual_field(const GridState& state, const CoeffSet& c, const ReactionSpec& r,
                      double tau, const Field2& w_new, const Field2& u_old,
                      Field2& u_new) {
    const int n = state.grid.n_cells;
    const double k = tau / (state.grid.dx() * state.grid.dx());
    u_new = reconstruct(w_new);

    Field2 f(2, n);
    for (int j = 0; j < n; ++j) {
        const Vec2 uj(u_new.col(j));
        f.col(j) = uj - Vec2(u_old.col(j)) - tau * eval_reaction(r, uj);
    }
    for (int j = 0; j + 1 < n; ++j) {
        const Vec2 ubar = 0.5 * (Vec2(u_new.col(j)) + Vec2(u_new.col(j + 1)));
        const Vec2 dw = Vec2(w_new.col(j + 1)) - Vec2(w_new.col(j));
        const Vec2 flux = assemble_mobility(c, ubar) * dw;
        f.col(j) -= k * flux;
        f.col(j + 1) += k * flux;
    }
    return f;
}

BlockTri jacobian_blocks(const GridState& state, const CoeffSet& c, const ReactionSpec& r,
                         double tau, const Field2& w_new, const Field2& u_new) {
    const int n = state.grid.n_cells;
    const double k = tau / (state.grid.dx() * state.grid.dx());
    BlockTri jac(n);

    for (int j = 0; j < n; ++j) {
        const Vec2 uj(u_new.col(j));
        const Mat2 hinv = entropy_hessian_inverse(uj); // du/dw
        jac.diag[j] = hinv - tau * reaction_jacobian(r, uj) * hinv;
    }
    for (int j = 0; j + 1 < n; ++j) {
        const Vec2 ul(u_new.col(j));
        const Vec2 ur(u_new.col(j + 1));
        const Vec2 ubar = 0.5 * (ul + ur);
        const Vec2 dw = Vec2(w_new.col(j + 1)) - Vec2(w_new.col(j));
        const Mat2 b = assemble_mobility(c, ubar);
        // Sensitivity of the face flux to the mean state: column k of m is
        // (dB/dubar_k) * dw.
        Mat2 m;
        m.col(0) = mobility_derivative(c, ubar, 0) * dw;
        m.col(1) = mobility_derivative(c, ubar, 1) * dw;
        const Mat2 dflux_dwl = -b + 0.5 * m * entropy_hessian_inverse(ul);
        const Mat2 dflux_dwr = b + 0.5 * m * entropy_hessian_inverse(ur);

        jac.diag[j] -= k * dflux_dwl;
        jac.upper[j] -= k * dflux_dwr;
        jac.lower[j + 1] += k * dflux_dwl;
        jac.diag[j + 1] += k * dflux_dwr;
    }
    return jac;
}

// Block Thomas elimination; overwrites its inputs.
Field2 solve_block_tridiag(BlockTri& jac, Field2 rhs) {
    const int n = static_cast<int>(jac.diag.size());
    for (int j = 1; j < n; ++j) {
        const Mat2 l = jac.lower[j] * jac.diag[j - 1].inverse();
        jac.diag[j] -= l * jac.upper[j - 1];
        rhs.col(j) -= l * Vec2(rhs.col(j - 1));
    }
    Field2 x(2, n);
    x.col(n - 1) = jac.diag[n - 1].inverse() * Vec2(rhs.col(n - 1));
    for (int j = n - 2; j >= 0; --j) {
        x.col(j) = jac.diag[j].inverse() * (Vec2(rhs.col(j)) - jac.upper[j] * Vec2(x.col(j + 1)));
    }
    return x;
}

double max_abs(const Field2& f) {
    return f.cwiseAbs().maxCoeff();
}

} // namespace

Eigen::VectorXd backward_euler_residual(const GridState& state, const CoeffSet& c,
                                        const ReactionSpec& r, double tau,
                                        const Field2& w_new) {
    Field2 u_new;
    const Field2 f = residual_field(state, c, r, tau, w_new, state.densities(), u_new);
    return Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
}

Eigen::MatrixXd backward_euler_jacobian(const GridState& state, const CoeffSet& c,
                                        const ReactionSpec& r, double tau,
                                        const Field2& w_new) {
    const int n = state.grid.n_cells;
    const Field2 u_new = reconstruct(w_new);
    BlockTri jac = jacobian_blocks(state, c, r, tau, w_new, u_new);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        dense.block<2, 2>(2 * j, 2 * j) = jac.diag[j];
        if (j > 0) dense.block<2, 2>(2 * j, 2 * (j - 1)) = jac.lower[j];
        if (j + 1 < n) dense.block<2, 2>(2 * j, 2 * (j + 1)) = jac.upper[j];
    }
    return dense;
}

StepResult step_implicit(const GridState& state, const CoeffSet& c,
                         const ReactionSpec& r, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("step_implicit: tau must be positive and finite");
    }
    if (state.w.rows() != 2 || state.w.cols() != state.grid.n_cells || state.grid.n_cells < 2) {
        throw std::invalid_argument("step_implicit: malformed state");
    }

    constexpr double kTarget = 1e-12; // internal Newton target
    constexpr double kAccept = 1e-10; // contractual residual bound on success
    constexpr int kMaxIters = 50;
    constexpr int kMaxHalvings = 30;

    const Field2 u_old = state.densities();
    Field2 w = state.w;
    Field2 u_new;
    Field2 f = residual_field(state, c, r, tau, w, u_old, u_new);
    double res = max_abs(f);
    int iters = 0;

    while (res > kTarget && iters < kMaxIters) {
        BlockTri jac = jacobian_blocks(state, c, r, tau, w, u_new);
        const Field2 delta = solve_block_tridiag(jac, -f);

        double lambda = 1.0;
        bool improved = false;
        Field2 w_try, f_try, u_try;
        double res_try = res;
        for (int d = 0; d < kMaxHalvings; ++d) {
            w_try = w + lambda * delta;
            if (w_try.allFinite()) {
                f_try = residual_field(state, c, r, tau, w_try, u_old, u_try);
                res_try = max_abs(f_try);
                if (std::isfinite(res_try) && res_try < res) {
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        ++iters;
        if (!improved) break; // stagnation: no damped step reduces the residual
        w = w_try;
        f = f_try;
        u_new = u_try;
        res = res_try;
    }

    if (!(res <= kAccept)) {
        throw NewtonFailure("step_implicit: Newton did not reach residual tolerance", w, res,
                            iters);
    }

    StepResult out;
    out.state.grid = state.grid;
    out.state.t = state.t + tau;
    out.state.w = std::move(w);
    out.diag = diagnostics(out.state, c, r);
    out.diag.newton_iters = iters;
    return out;
}

StepDiagnostics diagnostics(const GridState& state, const CoeffSet& c,
                            const ReactionSpec&) {
    const int n = state.grid.n_cells;
    const double dx = state.grid.dx();
    const Field2 u = state.densities();

    StepDiagnostics d;
    d.min_u3 = std::numeric_limits<double>::infinity();
    double raw = 0.0;
    for (int j = 0; j < n; ++j) {
        const Vec2 uj(u.col(j));
        raw += entropy_density(uj).raw;
        d.min_u3 = std::min(d.min_u3, third_coordinate(uj));
    }
    d.entropy_raw = raw * dx;
    d.entropy_normalized = d.entropy_raw + kEntropyOffset * state.grid.length;
    d.mass1 = u.row(0).sum() * dx;
    d.mass2 = u.row(1).sum() * dx;

    double diss = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
        const Vec2 ubar = 0.5 * (Vec2(u.col(j)) + Vec2(u.col(j + 1)));
        const Vec2 dw = Vec2(state.w.col(j + 1)) - Vec2(state.w.col(j));
        diss += dw.dot(assemble_mobility(c, ubar) * dw);
    }
    d.dissipation = diss / dx;
    d.newton_iters = 0;
    return d;
}

namespace {

// Initial-data policy: data must already be in the closure of D; boundary
// contact is nudged inward (only when allowed), anything further out is an
// error.
Field2 prepare_initial(const RunSetup& setup, long& rescaled,
                       std::vector<std::string>& warnings) {
    const Field2& u0 = setup.initial_densities;
    if (u0.rows() != 2 || u0.cols() != setup.grid.n_cells) {
        throw std::invalid_argument("run_simulation: initial field shape does not match grid");
    }
    constexpr double kNudge = 1e-10;
    Field2 u = u0;
    for (int j = 0; j < setup.grid.n_cells; ++j) {
        Vec2 uj(u.col(j));
        const Region reg = classify(uj); // throws on non-finite
        if (reg == Region::Outside) {
            throw std::invalid_argument("run_simulation: initial data outside the closure of D");
        }
        if (reg == Region::Interior) continue;
        if (!setup.rescale_initial) {
            throw std::invalid_argument(
                "run_simulation: initial data touches the boundary of D and rescaling is disabled");
        }
        uj[0] = std::max(uj[0], kNudge);
        uj[1] = std::max(uj[1], kNudge);
        const double s = uj[0] + uj[1];
        if (s >= 1.0 - kNudge) {
            uj *= (1.0 - kNudge) / s;
        }
        u.col(j) = uj;
        ++rescaled;
    }
    if (rescaled > 0) {
        warnings.push_back("initial data: " + std::to_string(rescaled) +
                           " cell(s) nudged off the boundary of D");
    }
    return u;
}

void require_admissible(const RunSetup& setup) {
    if (!check_symmetry(setup.coeffs).passed) {
        throw std::invalid_argument(
            "run_simulation: coefficients lack the symmetric entropy structure");
    }
    if (!check_theorem_conditions(setup.coeffs).passed &&
        !check_remark_case(setup.coeffs).passed) {
        throw std::invalid_argument(
            "run_simulation: coefficients satisfy neither the strict nor the "
            "zero-constant-part admissibility conditions");
    }
    if (const auto* lv = std::get_if<LotkaVolterra>(&setup.reaction)) {
        if (!lv_band(*lv).report.passed) {
            throw std::invalid_argument(
                "run_simulation: kinetic coefficients violate the band condition "
                "b_i0 <= min{b_i1, b_i2}");
        }
    } else if (const auto* cr = std::get_if<CustomReaction>(&setup.reaction)) {
        if (!check_custom_band(*cr).passed) {
            throw std::invalid_argument(
                "run_simulation: custom reaction violates its declared negative-growth band");
        }
    }
    if (!(setup.tau > 0.0) || !std::isfinite(setup.tau)) {
        throw std::invalid_argument("run_simulation: tau must be positive and finite");
    }
    if (!(setup.t_end >= 0.0) || !std::isfinite(setup.t_end)) {
        throw std::invalid_argument("run_simulation: t_end must be nonnegative and finite");
    }
}

double field_min_density(const Field2& u) {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        m = std::min({m, u(0, j), u(1, j), 1.0 - u(0, j) - u(1, j)});
    }
    return m;
}

} // namespace

RunResult run_simulation(const RunSetup& setup) {
    make_grid(setup.grid.n_cells, setup.grid.length); // validate
    require_admissible(setup);

    RunResult out;
    const Field2 u0 = prepare_initial(setup, out.rescaled_cells, out.warnings);
    GridState state = state_from_densities(setup.grid, u0);
    out.initial_state = state;
    out.initial_diag = diagnostics(state, setup.coeffs, setup.reaction);
    out.min_density_seen = field_min_density(u0);

    const double t_end = setup.t_end;
    const double t_eps = 1e-14 * std::max(1.0, t_end);
    const double tau_min = 1e-12 * t_end;
    double tau_cur = setup.tau;
    long step = 0;
    int easy_streak = 0;

    while (t_end - state.t > t_eps) {
        const double tau_try = std::min(tau_cur, t_end - state.t);
        StepResult sr;
        try {
            sr = step_implicit(state, setup.coeffs, setup.reaction, tau_try);
        } catch (const NewtonFailure&) {
            ++out.newton_failures;
            tau_cur *= 0.5;
            easy_streak = 0;
            if (tau_cur < tau_min) {
                out.aborted = true;
                out.abort_reason = "time step underflow: Newton kept failing down to tau_min";
                break;
            }
            continue;
        }
        state = std::move(sr.state);
        ++step;
        out.trajectory.push_back({step, state.t, tau_try, sr.diag});

        const Field2 u = state.densities();
        out.min_density_seen = std::min(out.min_density_seen, field_min_density(u));
        for (int j = 0; j < setup.grid.n_cells; ++j) {
            if (classify(Vec2(u.col(j))) != Region::Interior) ++out.region_violations;
        }

        if (sr.diag.newton_iters <= 3) {
            if (++easy_streak >= 5) {
                tau_cur = std::min(2.0 * tau_cur, setup.tau);
                easy_streak = 0;
            }
        } else {
            easy_streak = 0;
        }
    }

    out.final_state = std::move(state);
    return out;
}

} // namespace crossdiff
