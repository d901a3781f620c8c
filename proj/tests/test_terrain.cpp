#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "legwheel/errors.hpp"
#include "legwheel/terrain.hpp"

using namespace legwheel;

TEST_CASE("flat terrain is zero everywhere") {
    const Terrain t = Terrain::flat();
    CHECK(t.is_flat());
    CHECK(t.height(0.0, 0.0) == 0.0);
    CHECK(t.height(-3.2, 17.0) == 0.0);
}

TEST_CASE("step terrain rises once at the transition") {
    const Terrain t = Terrain::step(0.15, 1.0);
    CHECK_FALSE(t.is_flat());
    CHECK(t.height(0.999, 0.0) == 0.0);
    CHECK(t.height(1.0, 0.0) == doctest::Approx(0.15));
    CHECK(t.height(50.0, -2.0) == doctest::Approx(0.15));
}

TEST_CASE("pipe terrain is a half-cylinder capped at the diameter") {
    const double d = 0.08, x0 = 2.0, r = d / 2.0;
    const Terrain t = Terrain::pipe(d, x0);
    CHECK(t.height(x0, 0.0) == doctest::Approx(d));
    CHECK(t.height(x0 + r * 0.5, 3.0) ==
          doctest::Approx(r + std::sqrt(r * r - (r * 0.5) * (r * 0.5))));
    CHECK(t.height(x0 + r + 1e-9, 0.0) == 0.0);
    CHECK(t.height(x0 - r - 1e-9, 0.0) == 0.0);
    // Symmetric about the axis.
    CHECK(t.height(x0 + 0.01, 0.0) == doctest::Approx(t.height(x0 - 0.01, 0.0)));
}

TEST_CASE("features compose additively") {
    Terrain t = Terrain::step(0.1, 0.0);
    t.add_step(0.05, 2.0);
    t.add_pipe(0.06, 1.0);
    const Terrain pipe_only = Terrain::pipe(0.06, 1.0);
    CHECK(t.height(1.0, 0.0) ==
          doctest::Approx(0.1 + pipe_only.height(1.0, 0.0)));
    CHECK(t.height(3.0, 0.0) == doctest::Approx(0.15));
}

TEST_CASE("gradient noise is deterministic per seed") {
    const GradientNoise a(42, 0.02, 0.5);
    const GradientNoise b(42, 0.02, 0.5);
    const GradientNoise c(43, 0.02, 0.5);
    bool differs = false;
    for (int i = 0; i < 50; ++i) {
        const double x = 0.173 * i, y = -0.219 * i;
        CHECK(a.at(x, y) == b.at(x, y));
        if (a.at(x, y) != c.at(x, y)) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("gradient noise respects the amplitude bound and actually varies") {
    const double amp = 0.025;
    const GradientNoise n(7, amp, 0.4);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 200; ++i)
        for (int j = 0; j <= 200; ++j) {
            const double z = n.at(i * 0.037, j * 0.041);
            CHECK(std::abs(z) <= amp + 1e-12);
            lo = std::min(lo, z);
            hi = std::max(hi, z);
        }
    // The field uses a healthy share of its range.
    CHECK(hi - lo > amp);
}

TEST_CASE("gradient noise is smooth at the sample scale") {
    const GradientNoise n(11, 0.02, 0.5);
    // Central-difference slope stays bounded: the quintic fade has no jumps,
    // so |dz/dx| is a few times amplitude/wavelength at most.
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const double x = 0.113 * i, y = 0.071 * i;
        const double sx = (n.at(x + h, y) - n.at(x - h, y)) / (2 * h);
        const double sy = (n.at(x, y + h) - n.at(x, y - h)) / (2 * h);
        CHECK(std::abs(sx) < 10.0 * 0.02 / 0.5);
        CHECK(std::abs(sy) < 10.0 * 0.02 / 0.5);
    }
}

TEST_CASE("anisotropy stretches features along y") {
    const double aniso = 0.2;  // ridges across the direction of travel
    const GradientNoise n(5, 0.02, 0.5, aniso);
    const double h = 1e-4;
    double gx = 0.0, gy = 0.0;
    int count = 0;
    for (int i = 0; i <= 120; ++i)
        for (int j = 0; j <= 120; ++j) {
            const double x = i * 0.047, y = j * 0.053;
            gx += std::abs((n.at(x + h, y) - n.at(x - h, y)) / (2 * h));
            gy += std::abs((n.at(x, y + h) - n.at(x, y - h)) / (2 * h));
            ++count;
        }
    gx /= count;
    gy /= count;
    // Mean |dz/dy| is about `aniso` times mean |dz/dx|.
    CHECK(gy / gx == doctest::Approx(aniso).epsilon(0.25));
}

TEST_CASE("invalid feature parameters are rejected") {
    Terrain t;
    CHECK_THROWS_AS(t.add_step(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(t.add_step(-0.1, 1.0), DomainError);
    CHECK_THROWS_AS(t.add_pipe(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(GradientNoise(1, -0.01, 0.5), DomainError);
    CHECK_THROWS_AS(GradientNoise(1, 0.01, 0.0), DomainError);
    CHECK_THROWS_AS(GradientNoise(1, 0.01, 0.5, -1.0), DomainError);
}
