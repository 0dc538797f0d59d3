#include <doctest.h>

#include <cmath>
#include <numbers>

#include "biphoton/entanglement.hpp"
#include "biphoton/error.hpp"
#include "biphoton/sweep.hpp"

using namespace biphoton;
constexpr double pi = std::numbers::pi;

namespace {

FrequencyGrid window(int n) { return build_grid({-300, 300}, {-300, 300}, n, n); }

} // namespace

TEST_CASE("two-symmetric preset instantiation") {
    const auto c = preset("two-symmetric").assign("delta_p1", 5).assign("theta2", pi).instantiate();
    REQUIRE(c.size() == 2);
    CHECK(c.ensembles()[0] == EnsembleShift(5, 0, 0));
    CHECK(c.ensembles()[1] == EnsembleShift(-5, 0, pi));
    CHECK(c.gamma3N() == 5.0);
    CHECK(c.tau() == 0.25);
}

TEST_CASE("three-symmetric preset instantiation") {
    const auto c = preset("three-symmetric")
                       .assign("delta_p1", 6)
                       .assign("theta1", 4 * pi / 3)
                       .assign("theta2", 2 * pi / 3)
                       .instantiate();
    REQUIRE(c.size() == 3);
    CHECK(c.ensembles()[0] == EnsembleShift(6, 0, 4 * pi / 3));
    CHECK(c.ensembles()[1] == EnsembleShift(0, 0, 0));
    CHECK(c.ensembles()[2] == EnsembleShift(-6, 0, 2 * pi / 3));
}

TEST_CASE("zero-shift two-symmetric preset is a single ensemble up to normalization") {
    const auto g = window(64);
    const auto pair = build_kernel(preset("two-symmetric").instantiate(), g);
    const auto single = build_kernel(MultiplexConfig({EnsembleShift()}), g);
    CHECK((pair.matrix() - single.matrix()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(pair.norm_constant() == doctest::Approx(2 * single.norm_constant()));
}

TEST_CASE("preset and path errors") {
    CHECK_THROWS_AS(preset("four-symmetric"), ValidationError);
    auto t = preset("two-symmetric");
    CHECK_THROWS_AS(t.assign("theta1", 1.0), ValidationError);
    CHECK_THROWS_AS(t.resolve("ensembles[2].theta"), ValidationError);
    CHECK_THROWS_AS(parse_param_path("ensembles[x].theta"), ValidationError);
    CHECK_THROWS_AS(parse_param_path("ensembles[0].phase"), ValidationError);
    CHECK(parse_param_path("ensembles[1].delta_q") == ParamRef{1, Field::DeltaQ});
    CHECK(to_string(ParamRef{2, Field::Theta}) == "ensembles[2].theta");
    CHECK_THROWS_AS(make_axis(t, "theta2", {}), ValidationError);
    CHECK_THROWS_AS(make_axis(t, "theta2", {0.0, 1.0, 1.0}), ValidationError);
    CHECK_NOTHROW(make_axis(t, "delta_p1", {3.0, 2.0, 1.0}));
}

TEST_CASE("linspace includes both endpoints exactly") {
    const auto v = linspace(0, 2 * pi, 33);
    CHECK(v.size() == 33);
    CHECK(v.front() == 0.0);
    CHECK(v.back() == 2 * pi);
    CHECK(v[16] == doctest::Approx(pi).epsilon(1e-15));
}

TEST_CASE("small-shift phase curve: minimum at pi, endpoints equal") {
    auto t = preset("two-symmetric").assign("delta_p1", 5);
    const auto axis = make_axis(t, "theta2", linspace(0, 2 * pi, 33));
    const auto map = sweep_entropy(t, axis, std::nullopt, window(512));
    const auto ext = find_extrema(map);
    CHECK(ext.global_min.i1 == 16);
    CHECK(map.at(0) == map.at(32));
    // the maximum sits at 27/16 pi on this grid (cross-checked with an independent numpy evaluation)
    CHECK(ext.global_max.i1 == 27);
}

TEST_CASE("phase dependence flattens as the shift grows") {
    auto t = preset("two-symmetric");
    const auto theta = make_axis(t, "theta2", linspace(0, 2 * pi, 33));
    const auto shift = make_axis(t, "delta_p1", {5, 20, 50});
    const auto map = sweep_entropy(t, shift, theta, window(256));
    auto spread = [&](std::size_t row) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t k = 0; k < 33; ++k) {
            lo = std::min(lo, map.at(row, k));
            hi = std::max(hi, map.at(row, k));
        }
        return hi - lo;
    };
    CHECK(spread(2) < spread(1));
    CHECK(spread(1) < spread(0));
}

TEST_CASE("null cells are recorded as failures, not values") {
    auto t = preset("two-symmetric");
    const auto map = sweep_entropy(t, make_axis(t, "delta_p1", {-5, 0, 5}), make_axis(t, "theta2", {0, pi}), window(64));
    REQUIRE(map.failures.size() == 1);
    CHECK(map.failures[0].i1 == 1);
    CHECK(map.failures[0].i2 == 1);
    CHECK(map.failures[0].kind == CellStatus::NullKernel);
    CHECK(std::isnan(map.at(1, 1)));
    CHECK(map.status_at(1, 0) == CellStatus::Ok);
    const auto ext = find_extrema(map);
    CHECK(std::isfinite(ext.global_min.S));
}

TEST_CASE("sweeps are deterministic and independent of worker count") {
    auto t = preset("three-symmetric").assign("delta_p1", 6);
    const auto a1 = make_axis(t, "theta1", linspace(0, 2 * pi, 5));
    const auto a2 = make_axis(t, "theta2", linspace(0, 2 * pi, 4));
    const auto g = window(96);
    const auto serial = sweep_entropy(t, a1, a2, g, {1});
    const auto parallel = sweep_entropy(t, a1, a2, g, {3});
    const auto again = sweep_entropy(t, a1, a2, g, {3});
    CHECK(serial.values == parallel.values);
    CHECK(parallel.values == again.values);
    for (std::size_t i1 = 0; i1 < 5; ++i1)
        for (std::size_t i2 = 0; i2 < 4; ++i2) {
            const double s = serial.at(i1, i2);
            CHECK(s == entropy_for(cell_config(t, a1, a2, i1, i2), g));
            CHECK(s >= 0.0);
            CHECK(s <= std::log2(96.0));
        }
}

TEST_CASE("mirror link keeps delta_p2 = -delta_p1 in every cell") {
    auto t = preset("two-symmetric");
    const auto a1 = make_axis(t, "delta_p1", {-30, -1.5, 0.1, 7, 42});
    const auto a2 = make_axis(t, "theta2", {0, 1, 2});
    for (std::size_t i1 = 0; i1 < 5; ++i1)
        for (std::size_t i2 = 0; i2 < 3; ++i2) {
            const auto c = cell_config(t, a1, a2, i1, i2);
            CHECK(c.ensembles()[1].delta_p() == -c.ensembles()[0].delta_p());
            CHECK(c.ensembles()[0].delta_p() == a1.values[i1]);
        }
}

TEST_CASE("explicit axis link on a custom template") {
    const auto t = single_template(MultiplexConfig({EnsembleShift(1, 0, 0), EnsembleShift(2, 0, 0)}));
    const auto axis = make_axis(t, "ensembles[0].delta_q", {1, 2}, MirrorLink{{0, Field::DeltaQ}, {1, Field::DeltaQ}});
    const auto c = cell_config(t, axis, std::nullopt, 1, 0);
    CHECK(c.ensembles()[0].delta_q() == 2.0);
    CHECK(c.ensembles()[1].delta_q() == -2.0);
}

TEST_CASE("extrema of a synthetic paraboloid") {
    auto t = preset("two-symmetric");
    EntropyMap map{make_axis(t, "delta_p1", linspace(-2, 2, 5)), make_axis(t, "theta2", linspace(-2, 2, 5)), {}, {}, {}};
    for (double x : map.axis1.values)
        for (double y : map.axis2->values) {
            map.values.push_back(-(x * x + y * y));
            map.status.push_back(CellStatus::Ok);
        }
    const auto ext = find_extrema(map);
    REQUIRE(ext.maxima.size() == 1);
    CHECK(ext.maxima[0].i1 == 2);
    CHECK(ext.maxima[0].i2 == 2);
    CHECK(ext.global_max.S == 0.0);
    CHECK(ext.minima.size() == 4); // corners
}

TEST_CASE("extrema of an all-failed map is an error") {
    auto t = preset("two-symmetric");
    const auto map = sweep_entropy(t, make_axis(t, "delta_p1", {0}), make_axis(t, "theta2", {pi}), window(32));
    CHECK(map.failures.size() == 1);
    CHECK_THROWS_AS(find_extrema(map), ValidationError);
}

TEST_CASE("convergence of the baseline between 512 and 1024 points") {
    const auto r = convergence_check(MultiplexConfig({EnsembleShift()}), window(512));
    CHECK(r.delta < convergence_tolerance_bits);
    CHECK(r.delta == std::abs(r.S_fine - r.S_coarse));
}

TEST_CASE("convergence at a large-shift landmark between 1024 and 2048 points") {
    const auto c = preset("two-symmetric").assign("delta_p1", 50).instantiate();
    CHECK(convergence_check(c, window(1024)).delta < convergence_tolerance_bits);
}

TEST_CASE("separable kernels have zero entropy at any resolution") {
    for (int n : {32, 64, 200}) {
        const auto g = build_grid({-10, 10}, {-10, 10}, n, n);
        ComplexMatrix m(n, n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                m(j, k) = std::exp(-g.signal().nodes[j] * g.signal().nodes[j]) / cplx(1.0, g.idler().nodes[k]);
        const double norm = m.norm();
        const DiscretizedKernel kernel(m / norm, norm, g, MultiplexConfig({EnsembleShift()}));
        CHECK(entropy_bits(schmidt_decompose(kernel, 1).eigenvalues) < 1e-12);
    }
}
