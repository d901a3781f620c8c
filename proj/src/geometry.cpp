#include "legwheel/geometry.hpp"

#include <cmath>
#include <numbers>

#include "legwheel/errors.hpp"

namespace legwheel {

double ArcWheelSpec::arc_angle() const {
    return 2.0 * std::numbers::pi / static_cast<double>(n_arcs);
}

GeometryMetrics wheel_geometry(const ArcWheelSpec& spec) {
    if (spec.n_arcs < 3)
        throw DomainError("wheel_geometry: n_arcs must be >= 3, got " +
                          std::to_string(spec.n_arcs));
    if (!(spec.radius_m > 0.0))
        throw DomainError("wheel_geometry: radius must be > 0");

    const double r = spec.radius_m;
    const double alpha = spec.arc_angle();
    GeometryMetrics m;
    m.arc_length_m = std::sqrt(2.0 * r * r * (1.0 - std::cos(alpha)));
    m.step_length_m = 2.0 * (r + m.arc_length_m) * std::sin(alpha / 2.0);
    m.h_min_m = (r + m.arc_length_m) * std::cos(alpha / 2.0);
    m.h_max_m = r + m.arc_length_m;
    return m;
}

std::vector<std::pair<int, GeometryMetrics>> design_table(int n_min, int n_max,
                                                          double radius_m) {
    if (n_max >= n_min && (n_min < 3 || n_max > 12))
        throw DomainError("design_table: n range must lie within [3, 12]");
    std::vector<std::pair<int, GeometryMetrics>> rows;
    for (int n = n_min; n <= n_max; ++n)
        rows.emplace_back(n, wheel_geometry({n, radius_m}));
    return rows;
}

double round_half_up(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::floor(v * scale + 0.5) / scale;
}

}  // namespace legwheel
