#include "crossdiff/reactions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "crossdiff/entropy.hpp"

namespace crossdiff {

namespace {

void require_closure(const Vec2& u, const char* who) {
    if (classify(u) == Region::Outside) {
        throw std::domain_error(std::string(who) + ": state outside closure of D");
    }
}

void require_callable(const CustomReaction& r, const char* who) {
    if (!r.g1 || !r.g2) {
        throw std::invalid_argument(std::string(who) + ": custom growth rates not set");
    }
}

} // namespace

Vec2 eval_reaction(const ReactionSpec& r, const Vec2& u) {
    require_closure(u, "eval_reaction");
    if (std::holds_alternative<NoReaction>(r)) {
        return Vec2::Zero();
    }
    if (const auto* lv = std::get_if<LotkaVolterra>(&r)) {
        const double g1 = lv->b10 - lv->b11 * u[0] - lv->b12 * u[1];
        const double g2 = lv->b20 - lv->b21 * u[0] - lv->b22 * u[1];
        return Vec2(u[0] * g1, u[1] * g2);
    }
    const auto& cr = std::get<CustomReaction>(r);
    require_callable(cr, "eval_reaction");
    return Vec2(u[0] * cr.g1(u), u[1] * cr.g2(u));
}

Mat2 reaction_jacobian(const ReactionSpec& r, const Vec2& u) {
    require_closure(u, "reaction_jacobian");
    Mat2 j = Mat2::Zero();
    if (std::holds_alternative<NoReaction>(r)) {
        return j;
    }
    if (const auto* lv = std::get_if<LotkaVolterra>(&r)) {
        j(0, 0) = lv->b10 - 2.0 * lv->b11 * u[0] - lv->b12 * u[1];
        j(0, 1) = -lv->b12 * u[0];
        j(1, 0) = -lv->b21 * u[1];
        j(1, 1) = lv->b20 - lv->b21 * u[0] - 2.0 * lv->b22 * u[1];
        return j;
    }
    // Central differences, falling back to one-sided steps when a probe would
    // leave the closure of D (custom rates are only defined there).
    const auto& cr = std::get<CustomReaction>(r);
    require_callable(cr, "reaction_jacobian");
    const auto f = [&](const Vec2& v) {
        return Vec2(v[0] * cr.g1(v), v[1] * cr.g2(v));
    };
    for (int k = 0; k < 2; ++k) {
        const double h = 1e-7 * (1.0 + std::abs(u[k]));
        Vec2 up = u, um = u;
        up[k] += h;
        um[k] -= h;
        const bool up_ok = classify(up) != Region::Outside;
        const bool um_ok = classify(um) != Region::Outside;
        Vec2 df;
        if (up_ok && um_ok) {
            df = (f(up) - f(um)) / (2.0 * h);
        } else if (up_ok) {
            df = (f(up) - f(u)) / h;
        } else {
            df = (f(u) - f(um)) / h;
        }
        j.col(k) = df;
    }
    return j;
}

LvBandResult lv_band(const LotkaVolterra& r) {
    const double m1 = std::min(r.b11, r.b12);
    const double m2 = std::min(r.b21, r.b22);

    auto species_eps = [](double b0, double m) {
        if (b0 <= 0.0) return 1.0; // no intrinsic growth, band argument vacuous
        if (m <= 0.0) return -std::numeric_limits<double>::infinity();
        return 1.0 - b0 / m;
    };
    const double eps = std::min(species_eps(r.b10, m1), species_eps(r.b20, m2));

    ConditionReport rep;
    rep.label = Criterion::LvBand;
    rep.tol = kConditionTol;
    rep.margins = {
        {"b1_bound", m1 - r.b10, MarginKind::Slack},
        {"b2_bound", m2 - r.b20, MarginKind::Slack},
    };
    rep.passed = rep.margins[0].satisfied(rep.tol) && rep.margins[1].satisfied(rep.tol);
    if (r.b10 > 0.0 && m1 <= 0.0) {
        rep.notes.push_back("infinite growth: species 1 has b10 > 0 with no competition");
    }
    if (r.b20 > 0.0 && m2 <= 0.0) {
        rep.notes.push_back("infinite growth: species 2 has b20 > 0 with no competition");
    }
    if (rep.passed && eps <= rep.tol) {
        rep.notes.push_back("degenerate: band width 0 (equality in the kinetic bound)");
    }
    return {eps, rep};
}

H3Scan h3_bound_scan(const ReactionSpec& r, int n) {
    if (n < 16) {
        throw std::invalid_argument("h3_bound_scan: resolution must be at least 16");
    }

    H3Scan scan;
    double qmax = -std::numeric_limits<double>::infinity();

    auto ratio = [&](const Vec2& u) {
        const Vec2 f = eval_reaction(r, u);
        const Vec2 w = entropy_gradient(u);
        const double hnorm = entropy_density(u).normalized;
        return f.dot(w) / (1.0 + hnorm);
    };
    auto visit = [&](const Vec2& u) {
        const double q = ratio(u);
        if (q > qmax) {
            qmax = q;
            scan.argmax = u;
        }
        return q;
    };

    // Interior grid, same shrunk barycentric lattice as the spectral oracle.
    const double margin = 1e-3;
    const double shrink = 1.0 - 3.0 * margin;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n - i; ++j) {
            const Vec2 v(static_cast<double>(i) / n, static_cast<double>(j) / n);
            visit(shrink * v + Vec2(margin, margin));
        }
    }

    // Approach the edge u1 + u2 = 1 at fixed solvent fractions; a reaction
    // with positive growth there makes f . Dh blow up like -log(u3).
    for (double d = 1e-2; d >= 0.99e-8; d *= 0.1) {
        double dmax = -std::numeric_limits<double>::infinity();
        Vec2 darg = Vec2::Zero();
        for (int k = 1; k < n; ++k) {
            const double t = static_cast<double>(k) / n;
            const Vec2 u(t * (1.0 - d), (1.0 - t) * (1.0 - d));
            const double q = visit(u);
            if (q > dmax) {
                dmax = q;
                darg = u;
            }
        }
        scan.edge_maxima.push_back(dmax);
        scan.witness = darg; // ends at the finest distance
    }

    const auto& e = scan.edge_maxima;
    const std::size_t last = e.size() - 1;
    scan.diverged = e[last] > e[last - 1] && e[last - 1] > e[last - 2] &&
                    (e[last] - e[last - 2]) > 0.1;
    scan.c_f = std::max(0.0, qmax);
    return scan;
}

ConditionReport check_custom_band(const CustomReaction& r, int samples,
                                  unsigned long long seed, double tol) {
    require_callable(r, "check_custom_band");
    if (!(r.eps_band > 0.0 && r.eps_band < 1.0)) {
        throw std::invalid_argument("check_custom_band: eps_band must lie in (0,1)");
    }
    if (samples < 1) {
        throw std::invalid_argument("check_custom_band: need at least one sample");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(1e-6, 1.0 - 1e-6);

    double g1max = -std::numeric_limits<double>::infinity();
    double g2max = -std::numeric_limits<double>::infinity();
    Vec2 worst = Vec2::Zero();
    for (int k = 0; k < samples; ++k) {
        const double sum = 1.0 - r.eps_band * unit(rng); // in (1 - eps_band, 1)
        const double t = unit(rng);
        const Vec2 u(t * sum, (1.0 - t) * sum);
        const double g1 = r.g1(u);
        const double g2 = r.g2(u);
        if (std::max(g1, g2) > std::max(g1max, g2max)) worst = u;
        g1max = std::max(g1max, g1);
        g2max = std::max(g2max, g2);
    }

    ConditionReport rep;
    rep.label = Criterion::CustomBand;
    rep.tol = tol;
    rep.margins = {
        {"g1_band_max", -g1max, MarginKind::Slack},
        {"g2_band_max", -g2max, MarginKind::Slack},
    };
    rep.passed = rep.margins[0].satisfied(tol) && rep.margins[1].satisfied(tol);
    if (!rep.passed) rep.witness = worst;
    return rep;
}

} // namespace crossdiff
