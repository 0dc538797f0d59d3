#include <doctest.h>

#include <numbers>

#include "biphoton/error.hpp"
#include "biphoton/kernel.hpp"
#include "oracles.hpp"

using namespace biphoton;
constexpr double pi = std::numbers::pi;

TEST_CASE("amplitude of a single unshifted ensemble at the origin") {
    const MultiplexConfig c({EnsembleShift(0, 0, 0)}, 5.0, 0.25);
    const cplx f = eval_spectral_amplitude(c, 0, 0);
    CHECK(f.real() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(f.imag() == 0.0);
}

TEST_CASE("two opposite shifts with a pi phase give a purely imaginary amplitude at the origin") {
    // 1/(2.5 - 5i) - 1/(2.5 + 5i) = 10i / 31.25
    const MultiplexConfig c({EnsembleShift(5, 0, 0), EnsembleShift(-5, 0, pi)}, 5.0, 0.25);
    const cplx f = eval_spectral_amplitude(c, 0, 0);
    CHECK(std::abs(f.real()) < 1e-15);
    CHECK(f.imag() == doctest::Approx(0.32).epsilon(1e-14));
}

TEST_CASE("unshifted pair with a pi phase cancels everywhere") {
    const MultiplexConfig c({EnsembleShift(0, 0, 0), EnsembleShift(0, 0, pi)});
    for (double ws : {-100.0, 0.0, 3.5})
        for (double wi : {-7.0, 0.0, 250.0}) CHECK(std::abs(eval_spectral_amplitude(c, ws, wi)) < 1e-16);
    CHECK_THROWS_AS(build_kernel(c, build_grid({-300, 300}, {-300, 300}, 64, 64)), NullKernelError);
}

TEST_CASE("amplitude agrees with the term-by-term oracle") {
    oracle::ConfigGen gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = gen.next(3, 60, true);
        std::vector<oracle::Term> terms;
        for (const auto& e : c.ensembles()) terms.push_back({e.delta_p(), e.delta_q(), e.theta()});
        for (double ws : {-40.0, 0.0, 12.25})
            for (double wi : {-30.0, 1.0, 55.5}) {
                const cplx want = oracle::amplitude(terms, c.gamma3N(), c.tau(), ws, wi);
                CHECK(std::abs(eval_spectral_amplitude(c, ws, wi) - want) <= 1e-13 * (1.0 + std::abs(want)));
            }
    }
}

TEST_CASE("kernel entries are weighted amplitudes divided by the norm constant") {
    const MultiplexConfig c({EnsembleShift(3, 1, 0.4), EnsembleShift(-7, 0, 2.0)}, 4.0, 0.3);
    const auto g = build_grid({-50, 50}, {-60, 40}, 12, 10, QuadratureScheme::GaussLegendre, 2);
    const auto k = build_kernel(c, g);
    CHECK(k.matrix().rows() == 12);
    CHECK(k.matrix().cols() == 10);
    CHECK(std::abs(k.matrix().norm() - 1.0) <= 1e-12);
    for (int j = 0; j < 12; ++j)
        for (int l = 0; l < 10; ++l) {
            const cplx want = std::sqrt(g.signal().weights[j]) *
                              eval_spectral_amplitude(c, g.signal().nodes[j], g.idler().nodes[l]) *
                              std::sqrt(g.idler().weights[l]) / k.norm_constant();
            CHECK(std::abs(k.matrix()(j, l) - want) <= 1e-14);
        }
}

TEST_CASE("baseline kernel has its ridge on the anti-diagonal") {
    const MultiplexConfig c({EnsembleShift(0, 0, 0)});
    const auto g = build_grid({-300, 300}, {-300, 300}, 64, 64);
    const auto k = build_kernel(c, g);
    CHECK(std::abs(k.matrix().norm() - 1.0) <= 1e-12);
    // column maxima sit where ws = -wi, i.e. row j = 63 - col
    for (int col = 0; col < 64; ++col) {
        Eigen::Index row = 0;
        k.matrix().col(col).cwiseAbs().maxCoeff(&row);
        CHECK(row == 63 - col);
    }
}

TEST_CASE("kernel is unit-norm for random configurations") {
    oracle::ConfigGen gen(11);
    const auto g = build_grid({-300, 300}, {-300, 300}, 96, 80);
    for (int trial = 0; trial < 25; ++trial) CHECK(std::abs(build_kernel(gen.next(), g).matrix().norm() - 1.0) <= 1e-12);
}

TEST_CASE("global phase multiplies the kernel by one unit-modulus constant") {
    oracle::ConfigGen gen(3);
    const auto g = build_grid({-300, 300}, {-300, 300}, 48, 48);
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = gen.next(3, 60, true);
        auto shifted = c;
        const double phi = gen.uniform(0, 2 * pi);
        for (auto& e : shifted.ensembles()) e.set_theta(e.theta() + phi);
        const auto a = build_kernel(c, g).matrix();
        const auto b = build_kernel(shifted, g).matrix();
        const cplx rot = std::polar(1.0, phi);
        CHECK((b - rot * a).norm() <= 1e-12);
        CHECK((b.cwiseAbs() - a.cwiseAbs()).maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("permuting ensembles leaves the kernel unchanged") {
    oracle::ConfigGen gen(5);
    const auto g = build_grid({-300, 300}, {-300, 300}, 48, 48);
    for (int trial = 0; trial < 10; ++trial) {
        auto c = gen.next(3, 60, true);
        auto e = c.ensembles();
        std::reverse(e.begin(), e.end());
        const MultiplexConfig p(e, c.gamma3N(), c.tau());
        const auto a = build_kernel(c, g).matrix();
        const auto b = build_kernel(p, g).matrix();
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("reflect-conjugate symmetry") {
    oracle::ConfigGen gen(9);
    const auto g = build_grid({-300, 300}, {-300, 300}, 40, 40);
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = gen.next(3, 60, true);
        std::vector<EnsembleShift> neg;
        for (const auto& e : c.ensembles()) neg.emplace_back(-e.delta_p(), -e.delta_q(), -e.theta());
        const auto a = build_kernel(c, g).matrix();
        const auto b = build_kernel(MultiplexConfig(neg, c.gamma3N(), c.tau()), g).matrix();
        const double scale = a.cwiseAbs().maxCoeff();
        for (int j = 0; j < 40; ++j)
            for (int k = 0; k < 40; ++k) CHECK(std::abs(b(39 - j, 39 - k) - std::conj(a(j, k))) <= 1e-12 * scale);
    }
}

TEST_CASE("two-ensemble weighted amplitude is the sum of single-ensemble ones") {
    const EnsembleShift e1(12, 0, 1.0), e2(-4, 3, 5.0);
    const auto g = build_grid({-100, 100}, {-100, 100}, 32, 32);
    const auto sum = weighted_amplitude(MultiplexConfig({e1, e2}), g);
    const auto parts = weighted_amplitude(MultiplexConfig({e1}), g) + weighted_amplitude(MultiplexConfig({e2}), g);
    CHECK((sum - parts).cwiseAbs().maxCoeff() <= 1e-15 * sum.cwiseAbs().maxCoeff());
}

TEST_CASE("ensemble shift and configuration invariants") {
    CHECK(EnsembleShift(0, 0, 2 * pi).theta() == 0.0);
    CHECK(EnsembleShift(0, 0, -pi / 2).theta() == doctest::Approx(1.5 * pi));
    CHECK(EnsembleShift(0, 0, 7 * pi).theta() == doctest::Approx(pi));
    CHECK(EnsembleShift(0, 0, -1e-300).theta() < 2 * pi);
    CHECK_THROWS_AS(EnsembleShift(NAN, 0, 0), ValidationError);
    CHECK_THROWS_AS(MultiplexConfig({}), ValidationError);
    CHECK_THROWS_AS(MultiplexConfig({EnsembleShift()}, 0.0, 0.25), ValidationError);
    CHECK_THROWS_AS(MultiplexConfig({EnsembleShift()}, 5.0, -1.0), ValidationError);
    CHECK(MultiplexConfig({EnsembleShift(1, 2, 0), EnsembleShift(3, 2, 0)}).common_joint_shift());
    CHECK_FALSE(MultiplexConfig({EnsembleShift(1, 2, 0), EnsembleShift(3, 0, 0)}).common_joint_shift());
}
