#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

#include "crossdiff/entropy.hpp"
#include "support.hpp"

using namespace crossdiff;
using testsupport::SplitMix64;
using testsupport::random_interior;

TEST_CASE("classify splits states into interior, boundary and outside") {
    CHECK(classify({1.0 / 3, 1.0 / 3}) == Region::Interior);
    CHECK(classify({0.25, 0.25}) == Region::Interior);
    CHECK(classify({0.999, 0.0005}) == Region::Interior);

    CHECK(classify({0.0, 0.5}) == Region::Boundary);
    CHECK(classify({0.5, 0.5}) == Region::Boundary);
    CHECK(classify({1.0, 0.0}) == Region::Boundary);
    CHECK(classify({0.0, 0.0}) == Region::Boundary);
    CHECK(classify({1e-13, 0.5}) == Region::Boundary);   // within tolerance
    CHECK(classify({-1e-13, 0.5}) == Region::Boundary);

    CHECK(classify({-1e-6, 0.5}) == Region::Outside);
    CHECK(classify({0.6, 0.6}) == Region::Outside);
    CHECK(classify({0.5, -0.1}) == Region::Outside);

    // custom tolerance widens the boundary band
    CHECK(classify({0.5, 0.495}, 0.01) == Region::Boundary);
    CHECK(classify({0.5, 0.52}, 0.01) == Region::Outside);
    CHECK_THROWS_AS(classify({std::nan(""), 0.2}), std::invalid_argument);
}

TEST_CASE("entropy density takes its minimum at the barycenter") {
    const EntropyValue at_center = entropy_density<double>({1.0 / 3, 1.0 / 3});
    CHECK(at_center.raw == doctest::Approx(-(1.0 + std::log(3.0))).epsilon(1e-15));
    CHECK(at_center.normalized == doctest::Approx(0.0).epsilon(1e-15));

    const EntropyValue v = entropy_density<double>({0.5, 0.25});
    CHECK(v.raw == doctest::Approx(-2.0397207708399179).epsilon(1e-15));
    CHECK(v.normalized == doctest::Approx(v.raw + 1.0 + std::log(3.0)).epsilon(1e-15));
}

TEST_CASE("entropy density extends continuously to the boundary") {
    // one zero coordinate: the x log x term vanishes by continuity
    CHECK(entropy_density<double>({0.5, 0.5}).raw ==
          doctest::Approx(std::log(0.5) - 1.0).epsilon(1e-15));
    CHECK(entropy_density<double>({1.0, 0.0}).raw == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(entropy_density<double>({0.0, 0.0}).raw == doctest::Approx(-1.0).epsilon(1e-15));

    CHECK_THROWS_AS(entropy_density<double>({0.7, 0.7}), std::domain_error);
    CHECK_THROWS_AS(entropy_density<double>({-0.1, 0.3}), std::domain_error);
}

TEST_CASE("normalized entropy is nonnegative on the closure") {
    SplitMix64 rng(2024);
    for (int k = 0; k < 10000; ++k) {
        const Vec2 u = random_interior(rng, 1e-9);
        CHECK(entropy_density<double>(u).normalized >= 0.0);
    }
    // boundary samples, all three edges
    for (int k = 0; k <= 100; ++k) {
        const double t = k / 100.0;
        CHECK(entropy_density<double>({t, 0.0}).normalized >= 0.0);
        CHECK(entropy_density<double>({0.0, t}).normalized >= 0.0);
        CHECK(entropy_density<double>({t, 1.0 - t}).normalized >= 0.0);
    }
}

TEST_CASE("entropy gradient has the log-ratio form") {
    const Vec2 w = entropy_gradient<double>({0.5, 0.25});
    CHECK(w[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(0.0).epsilon(1e-15));

    const Vec2 w0 = entropy_gradient<double>({1.0 / 3, 1.0 / 3});
    CHECK(w0[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w0[1] == doctest::Approx(0.0).epsilon(1e-15));

    CHECK_THROWS_AS(entropy_gradient<double>({0.0, 0.5}), std::domain_error);
    CHECK_THROWS_AS(entropy_gradient<double>({0.5, 0.5}), std::domain_error);
}

TEST_CASE("gradient matches finite differences of the density") {
    SplitMix64 rng(7);
    const double d = 1e-6;
    for (int k = 0; k < 200; ++k) {
        const Vec2 u = random_interior(rng, 1e-2);
        const Vec2 w = entropy_gradient(u);
        for (int i = 0; i < 2; ++i) {
            Vec2 up = u, dn = u;
            up[i] += d;
            dn[i] -= d;
            const double fd =
                (entropy_density(up).raw - entropy_density(dn).raw) / (2.0 * d);
            CHECK(w[i] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("gradient and its inverse are mutually inverse") {
    SplitMix64 rng(11);
    for (int k = 0; k < 1000; ++k) {
        const Vec2 u = random_interior(rng, 1e-6);
        const Vec2 back = entropy_gradient_inverse(entropy_gradient(u));
        CHECK(back[0] == doctest::Approx(u[0]).epsilon(1e-12));
        CHECK(back[1] == doctest::Approx(u[1]).epsilon(1e-12));
    }
    for (int k = 0; k < 1000; ++k) {
        const Vec2 w(rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0));
        const Vec2 u = entropy_gradient_inverse(w);
        const Vec2 back = entropy_gradient(u, 0.0);
        // recovering w = log(u_i/u3) is limited by cancellation in
        // u3 = 1 - u1 - u2, so the bound carries the conditioning factor
        const double cond = 1.0 / std::min({u[0], u[1], third_coordinate(u)});
        CHECK(std::abs(back[0] - w[0]) <= 1e-13 * cond + 1e-12);
        CHECK(std::abs(back[1] - w[1]) <= 1e-13 * cond + 1e-12);
    }
}

TEST_CASE("gradient inverse is total and confined to the triangle") {
    // extreme entropy variables that overflow a naive exp-sum evaluation:
    // finite output in the closed triangle, never Outside
    for (const Vec2& w : {Vec2(700.0, 0.0), Vec2(0.0, 700.0), Vec2(700.0, 700.0),
                          Vec2(-700.0, -700.0), Vec2(-700.0, 700.0), Vec2(708.0, -708.0)}) {
        const Vec2 u = entropy_gradient_inverse(w);
        CHECK(std::isfinite(u[0]));
        CHECK(std::isfinite(u[1]));
        CHECK(u[0] >= 0.0);
        CHECK(u[1] >= 0.0);
        CHECK(u[0] + u[1] <= 1.0);
        CHECK(classify(u) != Region::Outside);
    }
    // the documented example: w1 = 700 pins u1 to 1 without overflowing
    CHECK(entropy_gradient_inverse(Vec2(700.0, 0.0))[0] ==
          doctest::Approx(1.0).epsilon(1e-12));

    SplitMix64 rng(13);
    long outside = 0;
    for (long k = 0; k < 1000000; ++k) {
        const Vec2 w(rng.uniform(-1e6, 1e6), rng.uniform(-1e6, 1e6));
        const Vec2 u = entropy_gradient_inverse(w);
        if (!(std::isfinite(u[0]) && std::isfinite(u[1]) && u[0] >= 0.0 &&
              u[1] >= 0.0 && u[0] + u[1] <= 1.0)) ++outside;
    }
    CHECK(outside == 0);

    // strict interiority holds while every barycentric coordinate stays
    // representable: spread of (0, w1, w2) below ~34 keeps min u above
    // machine epsilon, and below ~26 keeps it above the membership tolerance
    long not_interior = 0;
    for (long k = 0; k < 1000000; ++k) {
        const Vec2 w(rng.uniform(-12.0, 12.0), rng.uniform(-12.0, 12.0));
        const Vec2 u = entropy_gradient_inverse(w);
        if (!(u[0] > 0.0 && u[1] > 0.0 && u[0] + u[1] < 1.0 &&
              classify(u) == Region::Interior)) ++not_interior;
    }
    CHECK(not_interior == 0);

    CHECK_THROWS_AS(entropy_gradient_inverse(Vec2(std::nan(""), 0.0)),
                    std::invalid_argument);
}

TEST_CASE("hessian has the closed form and is positive definite") {
    const Mat2 h0 = entropy_hessian<double>({1.0 / 3, 1.0 / 3});
    CHECK(h0(0, 0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(h0(0, 1) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(h0(1, 0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(h0(1, 1) == doctest::Approx(6.0).epsilon(1e-14));

    const Mat2 h1 = entropy_hessian<double>({0.5, 0.25});
    CHECK(h1(0, 0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(h1(0, 1) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(h1(1, 1) == doctest::Approx(8.0).epsilon(1e-14));

    SplitMix64 rng(17);
    for (int k = 0; k < 1000; ++k) {
        const Vec2 u = random_interior(rng);
        const Mat2 h = entropy_hessian(u);
        const double u3 = 1.0 - u[0] - u[1];
        CHECK(h(0, 1) == h(1, 0));
        CHECK(h.determinant() ==
              doctest::Approx(1.0 / (u[0] * u[1] * u3)).epsilon(1e-12));
        CHECK(h(0, 0) > 0.0);
        CHECK(h.determinant() > 0.0); // Sylvester: positive definite
    }
    CHECK_THROWS_AS(entropy_hessian<double>({0.0, 0.5}), std::domain_error);
}

TEST_CASE("hessian matches finite differences of the gradient") {
    SplitMix64 rng(19);
    const double d = 1e-6;
    for (int k = 0; k < 200; ++k) {
        const Vec2 u = random_interior(rng, 1e-2);
        const Mat2 h = entropy_hessian(u);
        for (int j = 0; j < 2; ++j) {
            Vec2 up = u, dn = u;
            up[j] += d;
            dn[j] -= d;
            const Vec2 fd = (entropy_gradient(up) - entropy_gradient(dn)) / (2.0 * d);
            CHECK(h(0, j) == doctest::Approx(fd[0]).epsilon(1e-6));
            CHECK(h(1, j) == doctest::Approx(fd[1]).epsilon(1e-6));
        }
    }
}

TEST_CASE("hessian inverse is polynomial and exact on the closure") {
    const Mat2 hi = entropy_hessian_inverse<double>({0.5, 0.25});
    CHECK(hi(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(hi(0, 1) == doctest::Approx(-0.125).epsilon(1e-15));
    CHECK(hi(1, 0) == doctest::Approx(-0.125).epsilon(1e-15));
    CHECK(hi(1, 1) == doctest::Approx(0.1875).epsilon(1e-15));

    SplitMix64 rng(23);
    for (int k = 0; k < 1000; ++k) {
        const Vec2 u = random_interior(rng);
        const Mat2 prod = entropy_hessian(u) * entropy_hessian_inverse(u);
        CHECK(prod(0, 0) == doctest::Approx(1.0).epsilon(1e-11));
        CHECK(prod(1, 1) == doctest::Approx(1.0).epsilon(1e-11));
        CHECK(prod(0, 1) == doctest::Approx(0.0).epsilon(1e-11));
        CHECK(prod(1, 0) == doctest::Approx(0.0).epsilon(1e-11));
    }

    // boundary states degenerate but are accepted (polynomial expression)
    const Mat2 edge = entropy_hessian_inverse<double>({0.0, 0.5});
    CHECK(edge(0, 0) == 0.0);
    CHECK(edge(0, 1) == 0.0);
    CHECK(edge(1, 1) == 0.25);
    CHECK_THROWS_AS(entropy_hessian_inverse<double>({0.7, 0.7}), std::domain_error);
}

TEST_CASE("entropy density is convex along segments") {
    SplitMix64 rng(29);
    for (int k = 0; k < 500; ++k) {
        const Vec2 a = random_interior(rng, 1e-6);
        const Vec2 b = random_interior(rng, 1e-6);
        const double lam = rng.uniform();
        const Vec2 mid = lam * a + (1.0 - lam) * b;
        const double lhs = entropy_density(Vec2(mid)).raw;
        const double rhs = lam * entropy_density(a).raw + (1.0 - lam) * entropy_density(b).raw;
        CHECK(lhs <= rhs + 1e-12);
    }
}
