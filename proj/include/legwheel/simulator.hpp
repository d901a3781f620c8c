#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "legwheel/controller.hpp"
#include "legwheel/four_bar.hpp"
#include "legwheel/terrain.hpp"
#include "legwheel/vec2.hpp"

namespace legwheel {

// Rim boundary of the whole wheel in the wheel plane (x forward, y up, axle
// at the origin): the arc through joints A and P, offset outward by the tip
// radius, replicated around the axle once per arc. hub.phi_outer orients the
// boundary; hub.offset() sets leg extension.
std::vector<Vec2> wheel_boundary(const HubState& hub, const FourBarConfig& cfg,
                                 int samples_per_arc = 64);

struct WheelContact {
    Vec2 point;          // contact sample in the wheel plane, axle frame
    double axle_height;  // world z of the axle resting on the terrain
    double radius;       // axle-to-contact distance (effective rolling radius)
};

// Drops the wheel onto the heightfield at world (wx, wy): the axle height is
// the max over boundary samples of terrain-under-sample minus sample depth.
WheelContact effective_contact(const HubState& hub, const FourBarConfig& cfg,
                               const Terrain& terrain, double wx, double wy,
                               int samples_per_arc = 64);

struct SimState {
    double x = 0, y = 0, yaw = 0;
    double z = 0, pitch = 0, roll = 0;
    std::array<HubState, 4> wheels{};  // commanded shaft phases, rad
    double t = 0;

    bool finite() const;
};

// Quasi-static planar-pose roller: no inertia, no slip; wheels advance by
// shaft rotation times effective radius, the body pose integrates
// differential-drive kinematics, and height/attitude follow the four axle
// contacts through a least-squares plane.
class Simulator {
public:
    Simulator(const FourBarConfig& cfg, const RobotLayout& layout,
              Terrain terrain);

    // Picks the wheel mounting angle (boundary orientation at shaft zero)
    // that minimizes flat-ground axle-height ripple for the controller's
    // extension waveform at height h. Shared by all four wheels.
    void calibrate_mount(const CpgController& controller, double h);

    void set_mount_angle(double angle) { mount_angle_ = angle; }
    double mount_angle() const { return mount_angle_; }

    SimState initial_state(const std::array<HubState, 4>& targets) const;
    SimState step(const SimState& state,
                  const std::array<HubState, 4>& targets, double dt) const;

    const Terrain& terrain() const { return terrain_; }
    const RobotLayout& layout() const { return layout_; }

    int samples_per_arc = 64;

private:
    Vec2 wheel_offset(int i) const;  // body frame, x forward / y left
    WheelContact contact(const SimState& state, int i,
                         const HubState& hub) const;
    void settle(SimState& state) const;

    const FourBarConfig& cfg_;
    RobotLayout layout_;
    Terrain terrain_;
    double mount_angle_ = 0.0;
};

struct TrialSample {
    double t;
    SimState state;
    DriveCommand cmd;
};

struct TrialLog {
    std::vector<TrialSample> samples;

    // Columns: t,x,y,yaw,z,pitch,roll,w0_theta,w0_e,...,w3_e,cmd_v,cmd_w,cmd_h
    void write_csv(std::ostream& os) const;
};

// Closed chain: schedule -> controller ticks at 50 Hz -> sim steps, logged at
// the controller rate. Deterministic for fixed inputs.
TrialLog run_trial(CpgController& controller, Simulator& sim,
                   const std::vector<ScheduleEntry>& schedule, double duration,
                   const std::array<double, 4>& initial_phases);

struct TrialMetrics {
    double height_mean;    // m
    double height_sd;      // m
    double speed_mean;     // m/s, path length / duration
    double lateral_norm;   // final y / x distance traveled
    double final_x;        // m
    double final_y;        // m
    double turn_radius;    // m, circle fit; inf for straight paths
};

// Throws ValidationError for logs with fewer than two samples.
TrialMetrics compute_metrics(const TrialLog& log);

// Least-squares (Kasa) circle fit; returns radius, inf when the points are
// collinear within tolerance.
double fit_circle_radius(const std::vector<Vec2>& pts);

}  // namespace legwheel
