#include "legwheel/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "legwheel/errors.hpp"

namespace legwheel {

namespace {

double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }

double grad(int hash, double dx, double dy) {
    // Eight evenly spread unit gradients keep the field isotropic and pin
    // the raw range at +-sqrt(2)/2.
    constexpr double kDiag = 0.70710678118654752;
    switch (hash & 7) {
        case 0: return (dx + dy) * kDiag;
        case 1: return (dx - dy) * kDiag;
        case 2: return (-dx + dy) * kDiag;
        case 3: return (-dx - dy) * kDiag;
        case 4: return dx;
        case 5: return -dx;
        case 6: return dy;
        default: return -dy;
    }
}

}  // namespace

GradientNoise::GradientNoise(std::uint64_t seed, double amplitude_m,
                             double wavelength_m, double anisotropy)
    : amplitude_(amplitude_m),
      wavelength_(wavelength_m),
      anisotropy_(anisotropy) {
    if (!(amplitude_m >= 0.0))
        throw DomainError("GradientNoise: amplitude must be >= 0");
    if (!(wavelength_m > 0.0))
        throw DomainError("GradientNoise: wavelength must be > 0");
    if (!(anisotropy > 0.0))
        throw DomainError("GradientNoise: anisotropy must be > 0");
    std::array<std::uint8_t, 256> table;
    std::iota(table.begin(), table.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(table.begin(), table.end(), rng);
    for (int i = 0; i < 512; ++i) perm_[i] = table[i & 255];
}

double GradientNoise::raw(double u, double v) const {
    const double fu = std::floor(u), fv = std::floor(v);
    const int iu = static_cast<int>(fu) & 255;
    const int iv = static_cast<int>(fv) & 255;
    const double du = u - fu, dv = v - fv;
    const double su = fade(du), sv = fade(dv);

    const int a = perm_[iu] + iv;
    const int b = perm_[iu + 1] + iv;
    const double g00 = grad(perm_[a], du, dv);
    const double g10 = grad(perm_[b], du - 1, dv);
    const double g01 = grad(perm_[a + 1], du, dv - 1);
    const double g11 = grad(perm_[b + 1], du - 1, dv - 1);

    const double nx0 = g00 + su * (g10 - g00);
    const double nx1 = g01 + su * (g11 - g01);
    return nx0 + sv * (nx1 - nx0);
}

double GradientNoise::at(double x, double y) const {
    // Raw 2-D gradient noise with these gradients lies within +-sqrt(2)/2;
    // scaling by amplitude/(sqrt(2)/2) pins the bound at +-amplitude.
    const double u = x / wavelength_;
    const double v = y * anisotropy_ / wavelength_;
    return amplitude_ * std::sqrt(2.0) * raw(u, v);
}

Terrain Terrain::step(double height_m, double x0_m) {
    Terrain t;
    t.add_step(height_m, x0_m);
    return t;
}

Terrain Terrain::pipe(double diameter_m, double x0_m) {
    Terrain t;
    t.add_pipe(diameter_m, x0_m);
    return t;
}

Terrain Terrain::noise(std::uint64_t seed, double amplitude_m,
                       double wavelength_m, double anisotropy) {
    Terrain t;
    t.add_noise(seed, amplitude_m, wavelength_m, anisotropy);
    return t;
}

void Terrain::add_step(double height_m, double x0_m) {
    if (!(height_m > 0.0)) throw DomainError("Terrain: step height must be > 0");
    steps_.push_back({height_m, x0_m});
}

void Terrain::add_pipe(double diameter_m, double x0_m) {
    if (!(diameter_m > 0.0))
        throw DomainError("Terrain: pipe diameter must be > 0");
    pipes_.push_back({diameter_m, x0_m});
}

void Terrain::add_noise(std::uint64_t seed, double amplitude_m,
                        double wavelength_m, double anisotropy) {
    noises_.emplace_back(seed, amplitude_m, wavelength_m, anisotropy);
}

double Terrain::height(double x, double y) const {
    double z = 0.0;
    for (const auto& s : steps_)
        if (x >= s.x0) z += s.height;
    for (const auto& p : pipes_) {
        // A cylinder of the given diameter lying across the path; a rolling
        // wheel sees the upper half only, so the profile tops out at z = d.
        const double r = p.diameter / 2.0;
        const double dx = x - p.x0;
        if (std::abs(dx) < r)
            z += r + std::sqrt(r * r - dx * dx);
    }
    for (const auto& n : noises_) z += n.at(x, y);
    return z;
}

}  // namespace legwheel
