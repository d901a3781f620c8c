#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "legwheel/vec2.hpp"

namespace legwheel {

struct PlanetaryGear {
    int sun_teeth;
    int planet_teeth;
    int ring_teeth;
};

// Coaxial hub phase pair. The inner-hub zero is referenced to the fully
// collapsed wheel, so offset() == 0 at minimum extension and grows as the
// legs deploy.
struct HubState {
    double phi_outer;
    double phi_inner;

    double offset() const { return phi_inner - phi_outer; }
};

struct TipLoad {
    Vec2 force_n;  // applied at the arc tip P
};

struct HubTorques {
    double tau_inner;   // N*m, about the wheel axis through the inner hub
    double tau_outer;   // N*m, about the wheel axis through the outer hub
    double link_force;  // N, tension in the bar link CB
};

// Extension command bounds for a rolling gait at a given axle height:
// offset_max is the hub offset at maximum extension (leg exchange, contact
// furthest from the center) and span = offset_max - offset at mid-stance
// (contact directly below the center).
struct ExtensionBounds {
    double offset_max;  // X
    double span;        // R
};

// Planar two-link IK, elbow angle on the non-positive branch.
// Throws OutOfWorkspaceError (with the reach deficit) if the target is
// outside [|L1-L2|, L1+L2].
std::pair<double, double> two_link_ik(Vec2 target, double l1, double l2);

// Forward map matching two_link_ik, used as its oracle.
Vec2 two_link_fk(double theta1, double theta2, double l1, double l2);

// The leg-wheel four-bar: inner hub DC, bar link CB, wheel arc (pivot radius
// AB, tip at AP), outer hub DA, all pivoting about the wheel center D.
class FourBarConfig {
public:
    struct Lengths {
        double pivot_ab;         // wheel-arc pivot radius
        double outer_hub_da;
        double link_cb;
        double inner_hub_dc;
        double arc_ap;           // pivot-to-tip distance along the arc chord
        double tip_radius;       // r_p
        double arc_mount_angle;  // rad, between AB and the arc chord
    };

    // Validates reachability across [h_lo_m, h_hi_m] at 64 sampled heights
    // and calibrates the collapsed-pose offset reference.
    FourBarConfig(const Lengths& lengths, int n_arcs, double h_lo_m,
                  double h_hi_m,
                  std::optional<PlanetaryGear> gear = std::nullopt);

    // The reference prototype's link lengths and gearing, validated for
    // axle heights in [0.075, 0.102] m.
    static FourBarConfig prototype();

    const Lengths& lengths() const { return len_; }
    int n_arcs() const { return n_arcs_; }
    const std::optional<PlanetaryGear>& gear() const { return gear_; }

    double min_reach() const { return min_reach_; }  // |P| when fully folded
    double max_reach() const { return max_reach_; }  // largest usable |P|

    // Geometric hub offset of the fully collapsed pose; the zero of the
    // commanded offset scale.
    double collapsed_offset() const { return offset_ref_; }

    // Hub offset that places the tip at distance d from the center
    // (rotationally invariant). Throws OutOfWorkspaceError outside
    // [min_reach, max_reach].
    double offset_at_distance(double d) const;

private:
    Lengths len_;
    int n_arcs_;
    std::optional<PlanetaryGear> gear_;
    double min_reach_ = 0.0;
    double max_reach_ = 0.0;
    double offset_ref_ = 0.0;  // geometric offset of the collapsed pose

    friend HubState wheel_ik(Vec2 tip, const FourBarConfig& cfg);
};

struct WheelJoints {
    Vec2 a;  // arc pivot on the outer hub
    Vec2 b;  // arc / bar-link joint
    Vec2 c;  // bar-link pivot on the inner hub
    Vec2 p;  // arc tip
};

// Inverse kinematics: hub phases that place the arc tip at `tip` (relative to
// the wheel center D). Throws OutOfWorkspaceError naming the failing pass.
HubState wheel_ik(Vec2 tip, const FourBarConfig& cfg);

// Forward kinematics; the IK oracle. Throws SingularConfigurationError if the
// mechanism cannot close at the given offset.
WheelJoints wheel_fk(const HubState& hub, const FourBarConfig& cfg);

// Hub offset e(x) for the tip sweeping (x, -height). Throws
// OutOfWorkspaceError reporting the first unreachable x.
std::vector<std::pair<double, double>> phase_offset_profile(
    double height_m, double x_min, double x_max, int samples,
    const FourBarConfig& cfg);

// Gait extension bounds at an axle height, accounting for the tip radius:
// mid-stance contact puts the tip center at height - r_p, leg exchange at
// (height - r_p)/cos(pi/n).
ExtensionBounds extension_bounds(double height_m, const FourBarConfig& cfg);

// Quasi-static hub torques for a point load at the arc tip.
// Throws SingularConfigurationError when the link moment arm vanishes.
HubTorques quasi_static_torques(const HubState& hub, const TipLoad& load,
                                const FourBarConfig& cfg);

// Torque redistribution when the inner hub is driven through a planetary set
// (carrier as inner hub). Sum tau_inner + tau_outer is conserved.
std::pair<double, double> planetary_torques(double tau_inner, double tau_outer,
                                            const PlanetaryGear& gear);

}  // namespace legwheel
