#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "crossdiff/reactions.hpp"
#include "support.hpp"

using namespace crossdiff;
using testsupport::SplitMix64;
using testsupport::random_interior;

namespace {

const LotkaVolterra kAdmissibleLv{1.0, 2.0, 2.0, 1.0, 2.0, 2.0};

LotkaVolterra random_admissible_lv(SplitMix64& rng) {
    LotkaVolterra r;
    r.b11 = rng.uniform(0.5, 3.0);
    r.b12 = rng.uniform(0.5, 3.0);
    r.b10 = rng.uniform(0.0, std::min(r.b11, r.b12));
    r.b21 = rng.uniform(0.5, 3.0);
    r.b22 = rng.uniform(0.5, 3.0);
    r.b20 = rng.uniform(0.0, std::min(r.b21, r.b22));
    return r;
}

} // namespace

TEST_CASE("reaction evaluation examples") {
    CHECK(eval_reaction(NoReaction{}, {0.25, 0.25}).isZero(0.0));

    // u_i factor kills f_i on the corresponding edge
    const Vec2 on_edge = eval_reaction(kAdmissibleLv, {0.0, 0.5});
    CHECK(on_edge[0] == 0.0);

    const Vec2 balanced = eval_reaction(kAdmissibleLv, {0.25, 0.25});
    CHECK(balanced[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(balanced[1] == doctest::Approx(0.0).epsilon(1e-15));

    const Vec2 growing = eval_reaction(kAdmissibleLv, {0.1, 0.1});
    CHECK(growing[0] == doctest::Approx(0.06).epsilon(1e-14));
    CHECK(growing[1] == doctest::Approx(0.06).epsilon(1e-14));

    CHECK_THROWS_AS(eval_reaction(kAdmissibleLv, {0.7, 0.7}), std::domain_error);

    CustomReaction broken;
    broken.eps_band = 0.5; // g functions left unset
    CHECK_THROWS_AS(eval_reaction(broken, {0.25, 0.25}), std::invalid_argument);
}

TEST_CASE("reactions preserve zero densities") {
    SplitMix64 rng(211);
    CustomReaction cr;
    cr.g1 = [](const Vec2& u) { return 0.3 - u[0] * u[1]; };
    cr.g2 = [](const Vec2& u) { return -0.1 + u[0] - u[1]; };
    cr.eps_band = 0.25;

    for (int k = 0; k < 200; ++k) {
        const double t = rng.uniform();
        for (const ReactionSpec& r :
             {ReactionSpec(kAdmissibleLv), ReactionSpec(cr)}) {
            CHECK(eval_reaction(r, {0.0, t})[0] == 0.0);
            CHECK(eval_reaction(r, {t, 0.0})[1] == 0.0);
        }
        const Vec2 u = random_interior(rng);
        const Vec2 f = eval_reaction(kAdmissibleLv, u);
        // and conversely: interior states with nonzero growth react
        const double g1 = kAdmissibleLv.b10 - kAdmissibleLv.b11 * u[0] -
                          kAdmissibleLv.b12 * u[1];
        if (g1 != 0.0) CHECK(f[0] != 0.0);
    }
}

TEST_CASE("analytic reaction Jacobian matches finite differences") {
    SplitMix64 rng(223);
    const double d = 1e-6;
    for (int k = 0; k < 200; ++k) {
        const LotkaVolterra lv = random_admissible_lv(rng);
        const Vec2 u = random_interior(rng, 1e-2);
        const Mat2 j = reaction_jacobian(lv, u);
        for (int col = 0; col < 2; ++col) {
            Vec2 up = u, dn = u;
            up[col] += d;
            dn[col] -= d;
            const Vec2 fd = (eval_reaction(lv, up) - eval_reaction(lv, dn)) / (2.0 * d);
            CHECK(j(0, col) == doctest::Approx(fd[0]).epsilon(1e-7));
            CHECK(j(1, col) == doctest::Approx(fd[1]).epsilon(1e-7));
        }
    }

    // the finite-difference path for custom rates reproduces a known Jacobian
    CustomReaction cr;
    cr.g1 = [](const Vec2& u) { return 1.0 - 2.0 * u[0] - 2.0 * u[1]; };
    cr.g2 = [](const Vec2& u) { return 1.0 - 2.0 * u[0] - 2.0 * u[1]; };
    cr.eps_band = 0.5;
    const LotkaVolterra same{1.0, 2.0, 2.0, 1.0, 2.0, 2.0};
    for (int k = 0; k < 50; ++k) {
        const Vec2 u = random_interior(rng, 1e-2);
        const Mat2 jc = reaction_jacobian(cr, u);
        const Mat2 jl = reaction_jacobian(same, u);
        CHECK((jc - jl).cwiseAbs().maxCoeff() <= 1e-6);
    }
    // boundary states only probe inward and still return finite entries
    const Mat2 jb = reaction_jacobian(cr, {0.5, 0.5});
    CHECK(jb.allFinite());

    CHECK(reaction_jacobian(NoReaction{}, {0.25, 0.25}).isZero(0.0));
}

TEST_CASE("competition band width examples") {
    const LvBandResult r1 = lv_band(kAdmissibleLv);
    CHECK(r1.report.passed);
    CHECK(r1.eps == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r1.report.label == Criterion::LvBand);

    const LvBandResult r2 = lv_band({1, 1, 1, 1, 1, 1});
    CHECK(r2.report.passed);
    CHECK(r2.eps == 0.0);
    CHECK_FALSE(r2.report.notes.empty()); // degenerate equality case is flagged

    const LvBandResult r3 = lv_band({2, 1, 1, 1, 1, 1});
    CHECK_FALSE(r3.report.passed);

    // no intrinsic growth: the band argument is vacuous, width 1
    const LvBandResult r4 = lv_band({0, 1, 1, 0, 1, 1});
    CHECK(r4.report.passed);
    CHECK(r4.eps == 1.0);

    // growth without competition cannot be banded at all
    const LvBandResult r5 = lv_band({1, 0, 0, 1, 1, 1});
    CHECK_FALSE(r5.report.passed);
    CHECK(r5.eps == -std::numeric_limits<double>::infinity());
    CHECK_FALSE(r5.report.notes.empty());
}

TEST_CASE("negative growth inside the competition band") {
    SplitMix64 rng(227);
    for (int k = 0; k < 200; ++k) {
        const LotkaVolterra lv = random_admissible_lv(rng);
        const LvBandResult band = lv_band(lv);
        REQUIRE(band.report.passed);
        if (band.eps <= 0.0) continue;
        for (int s = 0; s < 100; ++s) {
            // sample the band 1 - eps < u1 + u2 < 1
            const double sum = 1.0 - band.eps * rng.uniform(1e-9, 1.0);
            const double t = rng.uniform(1e-6, 1.0 - 1e-6);
            const Vec2 u(t * sum, (1.0 - t) * sum);
            const double g1 = lv.b10 - lv.b11 * u[0] - lv.b12 * u[1];
            const double g2 = lv.b20 - lv.b21 * u[0] - lv.b22 * u[1];
            CHECK(g1 <= 1e-12);
            CHECK(g2 <= 1e-12);
        }
    }
}

TEST_CASE("entropy growth scan: examples") {
    const H3Scan none = h3_bound_scan(NoReaction{}, 32);
    CHECK(none.c_f == 0.0);
    CHECK_FALSE(none.diverged);

    const H3Scan lv = h3_bound_scan(kAdmissibleLv, 32);
    CHECK(std::isfinite(lv.c_f));
    CHECK_FALSE(lv.diverged);
    // inside the band g_i <= 0, so refining toward the edge cannot push the
    // maximum up: the tail of the approach sequence is nonincreasing
    const auto& e = lv.edge_maxima;
    REQUIRE(e.size() >= 3);
    for (std::size_t i = e.size() - 3; i + 1 < e.size(); ++i) {
        CHECK(e[i + 1] <= e[i] + 1e-12);
    }

    // a positive growth rate at the edge makes f . Dh ~ -u1 log(u3) blow up
    CustomReaction bad;
    bad.g1 = [](const Vec2&) { return 1.0; };
    bad.g2 = [](const Vec2&) { return 0.0; };
    bad.eps_band = 0.5;
    const H3Scan diverging = h3_bound_scan(bad, 32);
    CHECK(diverging.diverged);
    CHECK(diverging.edge_maxima.back() > diverging.edge_maxima.front());

    CHECK_THROWS_AS(h3_bound_scan(NoReaction{}, 15), std::invalid_argument);
}

TEST_CASE("entropy growth scan is stable under refinement") {
    SplitMix64 rng(229);
    for (int k = 0; k < 20; ++k) {
        const LotkaVolterra lv = random_admissible_lv(rng);
        const double coarse = h3_bound_scan(lv, 32).c_f;
        const double fine = h3_bound_scan(lv, 64).c_f;
        CHECK(std::abs(fine - coarse) <= 0.05 * std::max(1e-6, std::abs(coarse)));
    }
}

TEST_CASE("custom band condition check") {
    CustomReaction ok;
    ok.g1 = [](const Vec2& u) { return 0.5 - u[0] - u[1]; };
    ok.g2 = [](const Vec2& u) { return 0.25 - u[0] - u[1]; };
    ok.eps_band = 0.5; // on 0.5 < u1+u2 < 1 both rates are <= 0
    const ConditionReport pass = check_custom_band(ok);
    CHECK(pass.passed);
    CHECK(pass.label == Criterion::CustomBand);
    CHECK_FALSE(pass.witness.has_value());

    CustomReaction bad = ok;
    bad.g1 = [](const Vec2& u) { return 0.9 - u[0] - u[1]; }; // positive on part of the band
    const ConditionReport fail = check_custom_band(bad);
    CHECK_FALSE(fail.passed);
    REQUIRE(fail.witness.has_value());
    CHECK(bad.g1(*fail.witness) > 0.0);

    // deterministic in the seed
    const ConditionReport again = check_custom_band(bad);
    CHECK(again.margins[0].value == fail.margins[0].value);
    CHECK(again.margins[1].value == fail.margins[1].value);

    CustomReaction invalid = ok;
    invalid.eps_band = 0.0;
    CHECK_THROWS_AS(check_custom_band(invalid), std::invalid_argument);
    CHECK_THROWS_AS(check_custom_band(ok, 0), std::invalid_argument);
}
