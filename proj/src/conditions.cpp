#include "crossdiff/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>

namespace crossdiff {

std::string criterion_name(Criterion label) {
    switch (label) {
        case Criterion::Symmetry: return "symmetry";
        case Criterion::PsdIff: return "psd_iff";
        case Criterion::TheoremStrict: return "theorem_strict";
        case Criterion::RemarkCase: return "remark_case";
        case Criterion::SktCorollary: return "skt_corollary";
        case Criterion::LvBand: return "lv_band";
        case Criterion::CustomBand: return "custom_band";
    }
    return "unknown";
}

bool Margin::satisfied(double tol) const {
    switch (kind) {
        case MarginKind::Slack: return value >= -tol;
        case MarginKind::Residual: return std::abs(value) <= tol;
        case MarginKind::StrictSlack: return value > tol;
    }
    return false;
}

double ConditionReport::min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& mg : margins) {
        // Residuals count by distance from zero so that "small min_margin"
        // uniformly means "close to the pass/fail border".
        const double v = mg.kind == MarginKind::Residual ? -std::abs(mg.value) : mg.value;
        m = std::min(m, v);
    }
    return m;
}

const Margin* ConditionReport::find(const std::string& name) const {
    for (const auto& mg : margins) {
        if (mg.name == name) return &mg;
    }
    return nullptr;
}

namespace {

ConditionReport make_report(Criterion label, double tol, std::vector<Margin> margins) {
    ConditionReport r;
    r.label = label;
    r.tol = tol;
    r.margins = std::move(margins);
    r.passed = std::all_of(r.margins.begin(), r.margins.end(),
                           [&](const Margin& m) { return m.satisfied(tol); });
    return r;
}

void require_finite(const CoeffSet& c, const char* who) {
    if (!c.alpha.allFinite() || !c.beta.allFinite() || !c.gamma.allFinite()) {
        throw std::invalid_argument(std::string(who) + ": non-finite coefficients");
    }
}

void require_symmetry(const CoeffSet& c, double tol, const char* who) {
    if (!check_symmetry(c, tol).passed) {
        throw std::domain_error(std::string(who) +
                                ": coefficient set lacks the symmetric structure");
    }
}

// Smallest eigenvalue of a symmetric 2x2 matrix, in closed form.
double lambda_min_sym(double a00, double a01, double a11) {
    const double mean = 0.5 * (a00 + a11);
    const double diff = 0.5 * (a00 - a11);
    return mean - std::hypot(diff, a01);
}

} // namespace

ConditionReport check_symmetry(const CoeffSet& c, double tol) {
    require_finite(c, "check_symmetry");
    const FreeParams p = free_params(c);
    const double gamma21 = c.gamma(1, 0);
    std::vector<Margin> m{
        {"alpha12", c.alpha(0, 1), MarginKind::Residual},
        {"alpha21", c.alpha(1, 0), MarginKind::Residual},
        {"beta21", c.beta(1, 0), MarginKind::Residual},
        {"gamma12", c.gamma(0, 1), MarginKind::Residual},
        {"beta22_structure", c.beta(1, 1) - (p.beta11 - gamma21), MarginKind::Residual},
        {"gamma11_structure", c.gamma(0, 0) - (p.gamma22 - p.beta12), MarginKind::Residual},
        {"gamma21_structure", gamma21 - (p.alpha22 - p.alpha11 + p.beta12), MarginKind::Residual},
    };
    return make_report(Criterion::Symmetry, tol, std::move(m));
}

ConditionReport check_psd_iff(const CoeffSet& c, double tol) {
    require_symmetry(c, tol, "check_psd_iff");
    const FreeParams p = free_params(c);
    std::vector<Margin> m{
        {"alpha11", p.alpha11, MarginKind::Slack},
        {"alpha22", p.alpha22, MarginKind::Slack},
        {"beta12_slack", p.alpha11 + std::min(p.beta11, p.gamma22) - p.beta12, MarginKind::Slack},
        {"alpha11_plus_beta11", p.alpha11 + p.beta11, MarginKind::Slack},
        {"alpha22_plus_gamma22", p.alpha22 + p.gamma22, MarginKind::Slack},
    };
    return make_report(Criterion::PsdIff, tol, std::move(m));
}

ConditionReport check_theorem_conditions(const CoeffSet& c, double tol) {
    require_symmetry(c, tol, "check_theorem_conditions");
    const FreeParams p = free_params(c);
    std::vector<Margin> m{
        {"alpha11", p.alpha11, MarginKind::StrictSlack},
        {"alpha22", p.alpha22, MarginKind::StrictSlack},
        {"beta12_slack", p.alpha11 + std::min(p.beta11, p.gamma22) - p.beta12, MarginKind::StrictSlack},
        {"alpha11_plus_beta11", p.alpha11 + p.beta11, MarginKind::Slack},
        {"alpha22_plus_gamma22", p.alpha22 + p.gamma22, MarginKind::Slack},
    };
    return make_report(Criterion::TheoremStrict, tol, std::move(m));
}

ConditionReport check_remark_case(const CoeffSet& c, double tol) {
    require_symmetry(c, tol, "check_remark_case");
    const FreeParams p = free_params(c);
    const double eps = std::min(p.beta11, p.gamma22);
    // PSD conditions for the eps-shifted zero-constant-part family
    // (beta11-eps, beta12-eps, gamma22-eps); the alpha entries stay 0, so the
    // only nontrivial survivor is beta12 <= min{beta11, gamma22} (eps cancels).
    std::vector<Margin> m{
        {"alpha11_zero", p.alpha11, MarginKind::Residual},
        {"alpha22_zero", p.alpha22, MarginKind::Residual},
        {"beta11", p.beta11, MarginKind::StrictSlack},
        {"gamma22", p.gamma22, MarginKind::StrictSlack},
        {"shifted_beta12_slack", std::min(p.beta11, p.gamma22) - p.beta12, MarginKind::Slack},
        {"shifted_beta11", p.beta11 - eps, MarginKind::Slack},
        {"shifted_gamma22", p.gamma22 - eps, MarginKind::Slack},
    };
    ConditionReport r = make_report(Criterion::RemarkCase, tol, std::move(m));
    if (r.passed) {
        r.ellipticity = eps;
        r.notes.push_back("ellipticity is the shift constant of the construction, "
                          "not a certified spectral lower bound");
    }
    return r;
}

double epsilon_max(const CoeffSet& c) {
    require_symmetry(c, kConditionTol, "epsilon_max");
    if (!check_psd_iff(c).passed) {
        throw std::domain_error("epsilon_max: PSD conditions fail, no positive shift exists");
    }
    const FreeParams p = free_params(c);
    const double e = std::min({p.alpha11, p.alpha22,
                               p.alpha11 + std::min(p.beta11, p.gamma22) - p.beta12});
    return std::max(0.0, e);
}

CoeffSet shifted_coeffs(const CoeffSet& c, double eps) {
    const FreeParams p = free_params(c);
    return symmetric_coeffs(p.alpha11 - eps, p.alpha22 - eps, p.beta11 + eps,
                            p.beta12 + eps, p.gamma22 + eps);
}

VertexLimits vertex_limits(const CoeffSet& c) {
    require_symmetry(c, kConditionTol, "vertex_limits");
    const FreeParams p = free_params(c);
    const double a = p.alpha11 + p.beta11;
    const double b = p.alpha22 + p.gamma22;
    VertexLimits v;
    v.f1 << p.alpha11, 0.0,
            0.0, p.alpha22;
    v.f2 << a, a,
            a, 2.0 * a - p.beta12;
    v.f3 << p.alpha11 + b + p.gamma22 - p.beta12, b,
            b, b;
    return v;
}

double det_A(const CoeffSet& c, const Vec2& u) {
    return eval_diffusion_matrix(c, u).determinant();
}

double det_hessian_certificate(const CoeffSet& c) {
    require_symmetry(c, kConditionTol, "det_hessian_certificate");
    const FreeParams p = free_params(c);
    const double g = p.beta11 * p.beta12 + p.gamma22 * (p.alpha11 - p.alpha22 - p.beta12);
    return -g * g;
}

double diag_polynomial_f1(const CoeffSet& c, const Vec2& u) {
    const Mat2 a = eval_diffusion_matrix(c, u);
    const double u3 = third_coordinate(u);
    return (u[0] + u3) * a(0, 0) + u[0] * a(1, 0);
}

double diag_polynomial_f2(const CoeffSet& c, const Vec2& u) {
    const Mat2 a = eval_diffusion_matrix(c, u);
    const double u3 = third_coordinate(u);
    return u[1] * a(0, 1) + (u[1] + u3) * a(1, 1);
}

OracleScan spectral_oracle_scan(const CoeffSet& c, int n) {
    if (n < 8) {
        throw std::invalid_argument("spectral_oracle_scan: resolution must be at least 8");
    }
    require_finite(c, "spectral_oracle_scan");

    OracleScan scan;
    scan.min_unweighted = std::numeric_limits<double>::infinity();
    scan.min_weighted = std::numeric_limits<double>::infinity();

    auto visit = [&](const Vec2& u) {
        const Mat2 h = entropy_hessian(u);
        const Mat2 m = h * eval_diffusion_matrix(c, u);
        const double s00 = m(0, 0);
        const double s01 = 0.5 * (m(0, 1) + m(1, 0));
        const double s11 = m(1, 1);
        const double lam = lambda_min_sym(s00, s01, s11);
        if (lam < scan.min_unweighted) {
            scan.min_unweighted = lam;
            scan.argmin_unweighted = u;
        }
        // Weighted form: congruence by diag(sqrt u1, sqrt u2) turns the bound
        // z^T HA z >= eps (z1^2/u1 + z2^2/u2) into an eigenvalue bound.
        const double lamw = lambda_min_sym(u[0] * s00, std::sqrt(u[0] * u[1]) * s01, u[1] * s11);
        if (lamw < scan.min_weighted) {
            scan.min_weighted = lamw;
            scan.argmin_weighted = u;
        }
        ++scan.samples;
    };

    // Barycentric lattice shrunk affinely toward the barycenter so that the
    // smallest barycentric coordinate over the whole grid equals the margin.
    const double margin = 1e-3;
    const double shrink = 1.0 - 3.0 * margin;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n - i; ++j) {
            const Vec2 v(static_cast<double>(i) / n, static_cast<double>(j) / n);
            visit(shrink * v + Vec2(margin, margin));
        }
    }
    // Vertex-approach paths; PSD violations concentrate here when an interior
    // grid sees nothing.
    for (double s = 1e-1; s >= 0.99e-6; s *= 0.1) {
        visit(Vec2(s, s));
        visit(Vec2(1.0 - 2.0 * s, s));
        visit(Vec2(s, 1.0 - 2.0 * s));
    }
    return scan;
}

ConditionReport check_skt_corollary(const SktParams& s, double tol) {
    std::vector<Margin> m{
        {"a21_minus_a11", s.a21 - s.a11, MarginKind::Residual},
        {"a22_minus_a12", s.a22 - s.a12, MarginKind::Residual},
        {"gap_residual", (s.a20 - s.a10) - (s.a11 - s.a22), MarginKind::Residual},
        {"a20_minus_a10", s.a20 - s.a10, MarginKind::Slack},
        {"a10", s.a10, MarginKind::StrictSlack},
        {"a20", s.a20, MarginKind::StrictSlack},
        {"b1_bound", std::min(s.b11, s.b12) - s.b10, MarginKind::Slack},
        {"b2_bound", std::min(s.b21, s.b22) - s.b20, MarginKind::Slack},
    };
    return make_report(Criterion::SktCorollary, tol, std::move(m));
}

} // namespace crossdiff
