#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace legwheel {

// Smooth 2-D gradient noise with a seed-derived permutation table. Output is
// bounded: |value| <= amplitude everywhere.
class GradientNoise {
public:
    GradientNoise(std::uint64_t seed, double amplitude_m, double wavelength_m,
                  double anisotropy = 1.0);

    // anisotropy scales y before lookup: values < 1 stretch features along y,
    // producing ridges that run across the direction of travel.
    double at(double x, double y) const;

    double amplitude() const { return amplitude_; }

private:
    double raw(double u, double v) const;

    std::array<std::uint8_t, 512> perm_{};
    double amplitude_;
    double wavelength_;
    double anisotropy_;
};

// Heightfield z = g(x, y): flat ground plus any number of composed features.
class Terrain {
public:
    static Terrain flat() { return Terrain{}; }
    static Terrain step(double height_m, double x0_m);
    static Terrain pipe(double diameter_m, double x0_m);
    static Terrain noise(std::uint64_t seed, double amplitude_m,
                         double wavelength_m, double anisotropy = 1.0);

    void add_step(double height_m, double x0_m);
    void add_pipe(double diameter_m, double x0_m);
    void add_noise(std::uint64_t seed, double amplitude_m, double wavelength_m,
                   double anisotropy = 1.0);

    double height(double x, double y) const;

    bool is_flat() const {
        return steps_.empty() && pipes_.empty() && noises_.empty();
    }

private:
    struct Step {
        double height, x0;
    };
    struct Pipe {
        double diameter, x0;
    };
    std::vector<Step> steps_;
    std::vector<Pipe> pipes_;
    std::vector<GradientNoise> noises_;
};

}  // namespace legwheel
