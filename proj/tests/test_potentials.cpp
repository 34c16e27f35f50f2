#include <cmath>
#include <random>

#include "doctest.h"
#include "jwkbfit/potentials.hpp"
#include "oracles.hpp"

using namespace jwkbfit;

namespace {
const cplx kC = std::polar(1.0, kPi / 8.0);
}

TEST_CASE("harmonic potential at real c is the plain parabola") {
    const auto spec = PotentialSpec::harmonic_complex(cplx(1.0, 0.0));
    CHECK(eval_potential(spec, 2.0).real() == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(eval_potential(spec, 2.0).imag() == doctest::Approx(0.0));
}

TEST_CASE("gaussian bump vanishes at the origin") {
    const auto spec = PotentialSpec::gaussian_bump(10.0, kC);
    CHECK(std::abs(eval_potential(spec, 0.0)) == 0.0);
}

TEST_CASE("double gaussian at the bump top matches high-precision arithmetic") {
    const double alpha = 100.0 / std::exp(1.0);
    const auto spec = PotentialSpec::double_gaussian(alpha, 10.0, 0.03, kC);
    const double got = eval_potential(spec, 10.0).real();
    const double want =
        static_cast<double>(oracles::double_gaussian_reference(100.0L / std::exp(1.0L), 10.0L,
                                                               0.03L, 10.0L));
    CHECK(got == doctest::Approx(want).epsilon(1e-14));
    CHECK(got == doctest::Approx(36.7882).epsilon(2e-6));
}

TEST_CASE("all families are even in x") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(0.0, 20.0);
    const PotentialSpec specs[] = {
        PotentialSpec::harmonic_complex(kC),
        PotentialSpec::gaussian_bump(10.0, kC),
        PotentialSpec::double_gaussian(100.0 / std::exp(1.0), 10.0, 0.03, kC),
    };
    for (const auto& spec : specs) {
        for (int i = 0; i < 100; ++i) {
            const double x = dist(rng);
            CHECK(eval_potential(spec, x) == eval_potential(spec, -x));
        }
    }
}

TEST_CASE("analytic working derivatives match central differences") {
    const PotentialSpec specs[] = {
        PotentialSpec::harmonic_complex(kC),
        PotentialSpec::gaussian_bump(10.0, kC),
        PotentialSpec::double_gaussian(100.0 / std::exp(1.0), 10.0, 0.03, kC),
    };
    const double step = 1e-5;
    for (const auto& spec : specs) {
        const auto w = to_working_problem(spec, 18.0);
        for (int i = 1; i <= 50; ++i) {
            const double x = 17.0 * i / 50.0;
            const cplx d_analytic = w.potential_deriv(x);
            const cplx d_numeric =
                (w.potential_eval(x + step) - w.potential_eval(x - step)) / (2.0 * step);
            CHECK(std::abs(d_analytic - d_numeric) / (1.0 + std::abs(d_analytic)) < 1e-6);

            const cplx d2_analytic = w.potential_deriv2(x);
            const cplx d2_numeric =
                (w.potential_deriv(x + step) - w.potential_deriv(x - step)) / (2.0 * step);
            CHECK(std::abs(d2_analytic - d2_numeric) / (1.0 + std::abs(d2_analytic)) < 1e-6);
        }
    }
}

TEST_CASE("working problem: harmonic substitution and scale") {
    const auto spec = PotentialSpec::harmonic_complex(kC);
    const auto w = to_working_problem(spec, 12.0);
    CHECK(w.eigen_scale == cplx(1.0, 0.0));
    const cplx want = std::polar(1.0, kPi / 4.0);
    CHECK(std::abs(w.potential_eval(1.0) - want) < 1e-15);
}

TEST_CASE("working problem: gaussian bump eigen scale is c") {
    const auto spec = PotentialSpec::gaussian_bump(10.0, kC);
    const auto w = to_working_problem(spec, 18.0);
    CHECK(std::abs(w.eigen_scale - kC) < 1e-15);
}

TEST_CASE("dilation with c = 1 is the identity") {
    const auto spec = PotentialSpec::gaussian_bump(10.0, cplx(1.0, 0.0));
    const auto w = to_working_problem(spec, 18.0);
    CHECK(std::abs(w.eigen_scale - cplx(1.0, 0.0)) < 1e-15);
    for (double x : {0.5, 3.0, 9.0, 15.0})
        CHECK(std::abs(w.potential_eval(x) - eval_potential(spec, x)) < 1e-13);
}

TEST_CASE("working problem rejects Re c <= 0") {
    auto spec = PotentialSpec::gaussian_bump(10.0, cplx(-1.0, 0.5));
    CHECK_THROWS_AS((void)to_working_problem(spec, 18.0), DomainError);
}

TEST_CASE("blend problem interpolates between the harmonic and the target") {
    const auto spec = PotentialSpec::gaussian_bump(10.0, kC);
    const auto w0 = blend_working_problem(spec, 0.0, 18.0);
    const auto w1 = blend_working_problem(spec, 1.0, 18.0);
    const auto wt = to_working_problem(spec, 18.0);
    const cplx harmonic = kC * kC * 4.0;  // c (sqrt(c) 2)^2
    CHECK(std::abs(w0.potential_eval(2.0) - harmonic) < 1e-13);
    CHECK(std::abs(w1.potential_eval(2.0) - wt.potential_eval(2.0)) < 1e-13);
}

TEST_CASE("potential distance: identical, disjoint, and the paper pair") {
    const auto bump = PotentialSpec::gaussian_bump(10.0, kC);
    const auto dg = PotentialSpec::double_gaussian(100.0 / std::exp(1.0), 10.0, 0.03, kC);

    CHECK(potential_distance(bump, bump, 60.0) == doctest::Approx(0.0).epsilon(1e-12));

    auto vb = [&](double x) { return eval_potential(bump, x).real(); };
    auto zero = [](double) { return 0.0; };
    CHECK(potential_distance(vb, zero, 60.0) == doctest::Approx(1.0).epsilon(1e-10));

    const double quoted = potential_distance(bump, dg, 60.0);
    CHECK(quoted == doctest::Approx(0.18).epsilon(0.06));  // +-0.01 band
    CHECK(std::abs(quoted - 0.18) < 0.01);
}
