#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "legwheel/errors.hpp"
#include "legwheel/geometry.hpp"

using namespace legwheel;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("closed-form metrics for the hexagonal wheel") {
    // alpha = 60 deg: the chord of a unit circle is exactly 1.
    const GeometryMetrics m = wheel_geometry({6, 1.0});
    CHECK(m.arc_length_m == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.h_max_m == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.step_length_m == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.h_min_m == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("design table reproduces the published two-decimal values") {
    // n = 3..8, r = 1. The n=6 center height follows the closed form
    // (2 cos 30 deg = 1.73), which also matches the published h_max - h_min
    // row (2.00 - 0.27).
    const double step[] = {4.73, 3.41, 2.56, 2.00, 1.62, 1.35};
    const double hmin[] = {1.37, 1.71, 1.76, 1.73, 1.68, 1.63};
    const double span[] = {1.37, 0.71, 0.42, 0.27, 0.18, 0.13};
    const auto table = design_table(3, 8, 1.0);
    REQUIRE(table.size() == 6);
    for (int i = 0; i < 6; ++i) {
        const auto& [n, m] = table[i];
        CHECK(n == i + 3);
        CHECK(round_half_up(m.step_length_m, 2) == doctest::Approx(step[i]));
        CHECK(round_half_up(m.h_min_m, 2) == doctest::Approx(hmin[i]));
        CHECK(round_half_up(m.h_max_m - m.h_min_m, 2) ==
              doctest::Approx(span[i]));
    }
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(wheel_geometry({2, 1.0}), DomainError);
    CHECK_THROWS_AS(wheel_geometry({5, 0.0}), DomainError);
    CHECK_THROWS_AS(wheel_geometry({5, -1.0}), DomainError);
    CHECK_THROWS_AS(design_table(2, 8, 1.0), DomainError);
    CHECK_THROWS_AS(design_table(3, 13, 1.0), DomainError);
}

TEST_CASE("empty range yields an empty table") {
    CHECK(design_table(8, 3, 1.0).empty());
}

TEST_CASE("all lengths scale linearly with radius") {
    for (int n = 3; n <= 12; ++n) {
        const GeometryMetrics base = wheel_geometry({n, 1.0});
        for (double k : {0.5, 2.0, 10.0}) {
            const GeometryMetrics m = wheel_geometry({n, k});
            CHECK(m.arc_length_m ==
                  doctest::Approx(k * base.arc_length_m).epsilon(1e-12));
            CHECK(m.step_length_m ==
                  doctest::Approx(k * base.step_length_m).epsilon(1e-12));
            CHECK(m.h_min_m ==
                  doctest::Approx(k * base.h_min_m).epsilon(1e-12));
            CHECK(m.h_max_m ==
                  doctest::Approx(k * base.h_max_m).epsilon(1e-12));
        }
    }
}

TEST_CASE("step length and height variation decrease with arc count") {
    double prev_step = 1e300, prev_span = 1e300;
    for (int n = 3; n <= 12; ++n) {
        const GeometryMetrics m = wheel_geometry({n, 1.0});
        CHECK(m.step_length_m < prev_step);
        CHECK(m.h_max_m - m.h_min_m < prev_span);
        prev_step = m.step_length_m;
        prev_span = m.h_max_m - m.h_min_m;
    }
}

TEST_CASE("five arcs maximize the minimum center height") {
    int best_n = 0;
    double best = -1.0;
    for (const auto& [n, m] : design_table(3, 8, 1.0)) {
        if (m.h_min_m > best) {
            best = m.h_min_m;
            best_n = n;
        }
    }
    CHECK(best_n == 5);
}

TEST_CASE("chord length approaches the arc length for many arcs") {
    for (int n : {32, 64, 128}) {
        const GeometryMetrics m = wheel_geometry({n, 1.0});
        const double arc = 2.0 * kPi / n;
        CHECK(std::abs(m.arc_length_m - arc) / arc < 0.01);
    }
}

TEST_CASE("table rounding is round-half-up at two decimals") {
    CHECK(round_half_up(0.125, 2) == doctest::Approx(0.13));
    CHECK(round_half_up(1.004, 2) == doctest::Approx(1.0));
    CHECK(round_half_up(2.5, 0) == doctest::Approx(3.0));
    CHECK(round_half_up(-2.5, 0) == doctest::Approx(-2.0));
}
