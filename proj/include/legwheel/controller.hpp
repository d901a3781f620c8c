#pragma once

#include <array>
#include <map>
#include <vector>

#include "legwheel/four_bar.hpp"
#include "legwheel/oscillators.hpp"

namespace legwheel {

enum class OscillatorModel { kuramoto, hopf, vdp, direct };

struct DriveCommand {
    double v;  // forward velocity, m/s
    double w;  // yaw rate, rad/s
    double h;  // target axle height, m
};

// Wheel indexing: 0 front-left, 1 front-right, 2 rear-left, 3 rear-right.
// side_sign is -1 on the left, +1 on the right (mirrored wheel mounting:
// forward travel needs opposite shaft rotations on opposite sides).
struct RobotLayout {
    double track_width = 0.30;  // m, lateral distance between wheel sides
    double wheelbase = 0.40;    // m
    std::array<int, 4> side_sign{-1, +1, -1, +1};
    int n_arcs = 5;

    double v_limit = 1.0;    // m/s
    double w_limit = 2.0;    // rad/s
};

struct SteeringTargets {
    std::array<double, 4> omega_star;  // rad/s per wheel oscillator
    Mat4 psi_bias_rate;
};

// Per-wheel oscillator frequency targets and phase-bias dynamics for a
// differential-drive command. Throws DomainError for h <= 0.
SteeringTargets steering_targets(const DriveCommand& cmd,
                                 const RobotLayout& layout);

// One first-order filter step: omega-dot = k_omega (omega* - omega).
double filter_frequency(double omega, double omega_star, double k_omega,
                        double dt);

// Closed-loop state carried between controller ticks.
struct ControllerState {
    std::array<double, 4> omega{};  // filtered oscillator frequencies
    Mat4 psi_bias{};                // integrated phase-bias matrix
    std::array<HubState, 4> last_targets{};
    double t = 0.0;
};

// Maps (v, w, h) commands onto one oscillator network and emits per-wheel hub
// phase targets at the controller rate.
class CpgController {
public:
    CpgController(OscillatorModel model, const FourBarConfig& cfg,
                  const RobotLayout& layout);

    // Seeds oscillator phases (one per wheel pair) with settled amplitudes
    // at the given height and re-anchors phase unwrapping.
    void initialize(const std::array<double, 4>& phases, double h0);

    // Zero phase-bias mode: all wheels synchronized (climbing).
    void set_synchronized(bool sync);

    // Advances the network by dt (with integrator substeps) and returns
    // phi_O = theta_i, phi_I = theta_i + e_i per wheel.
    std::array<HubState, 4> tick(const DriveCommand& cmd, double dt);

    // Cached extension_bounds lookup for the controller loop.
    ExtensionBounds height_to_extension(double h);

    OscillatorModel model() const { return model_; }
    const ControllerState& state() const { return state_; }
    const RobotLayout& layout() const { return layout_; }
    const FourBarConfig& wheel_config() const { return cfg_; }

    // The commanded extension waveform over one wheel step at height h:
    // samples of (theta, e) with theta spanning one step angle. Used by the
    // simulator to calibrate wheel mounting for minimum height ripple.
    std::vector<WheelCommand> gait_waveform(double h, int samples = 128) const;

    // Oscillator phase rate of the free Van der Pol cycle at the default
    // parameters; the reference for frequency scaling.
    static constexpr double kVdpNaturalRate = 2.0227;  // rad/s

    static constexpr double kControllerDt = 0.02;   // 50 Hz
    static constexpr double kSubstepDt = 0.002;

    double k_omega = 5.0;  // 1/s, frequency command filter gain

private:
    void apply_outputs();

    OscillatorModel model_;
    const FourBarConfig& cfg_;
    RobotLayout layout_;
    ControllerState state_;
    bool synchronized_ = false;

    KuramotoNetwork kuramoto_{};
    HopfNetwork hopf_{};
    VdpNetwork vdp_{};
    std::array<PhaseUnwrapper, 4> unwrappers_{};
    std::array<double, 4> direct_theta_{};

    double hopf_coupling_ = 0.3;
    double kuramoto_coupling_ = 1.0;

    ExtensionBounds last_bounds_{};
    std::map<double, ExtensionBounds> extension_cache_;
};

// Ordered (t_start, command) schedule; the controller holds the last command
// between entries.
struct ScheduleEntry {
    double t_start;
    DriveCommand cmd;
};

const DriveCommand& command_at(const std::vector<ScheduleEntry>& schedule,
                               double t);

}  // namespace legwheel
