#pragma once

#include <utility>
#include <vector>

namespace legwheel {

// An n-arc transformable wheel: the rim is divided into n equal circular arcs
// that deploy radially as legs.
struct ArcWheelSpec {
    int n_arcs;       // >= 3
    double radius_m;  // > 0

    double arc_angle() const;  // 2*pi / n_arcs
};

struct GeometryMetrics {
    double arc_length_m;   // leg length L_arc (chord of one arc)
    double step_length_m;  // ground distance covered per leg exchange
    double h_min_m;        // center height at mid-stance, legs fully extended
    double h_max_m;        // center height at leg exchange, legs fully extended
};

// Closed-form design metrics for a fully extended n-arc wheel.
// Throws DomainError for n_arcs < 3 or radius <= 0.
GeometryMetrics wheel_geometry(const ArcWheelSpec& spec);

// One row per n in [n_min, n_max]; empty range yields an empty table.
// n range must lie within [3, 12].
std::vector<std::pair<int, GeometryMetrics>> design_table(int n_min, int n_max,
                                                          double radius_m);

// Round-half-up to the given number of decimals (table presentation uses 2).
double round_half_up(double v, int decimals);

}  // namespace legwheel
