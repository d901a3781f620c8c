#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "legwheel/errors.hpp"

namespace legwheel {

inline constexpr int kOscillators = 4;  // one per wheel

using Mat4 = std::array<std::array<double, 4>, 4>;

// Quarter-cycle phase bias: psi_ij = pi/2 * (j - i).
Mat4 quarter_cycle_bias();
// Phase-bias rate pattern for counterclockwise turning.
Mat4 ccw_turn_matrix();
// Constant Van der Pol coupling for the walking gait (-0.2 off-diagonal).
Mat4 walk_coupling();

Mat4 zero_mat4();
bool is_antisymmetric(const Mat4& m, double tol = 1e-12);

struct WheelCommand {
    double theta;  // wheel rotation target, rad
    double e;      // hub offset target, rad
};

// Keeps an atan2-based phase continuous across revolutions by
// nearest-revolution tracking.
class PhaseUnwrapper {
public:
    double update(double raw_phase);
    void reset(double phase);

private:
    double last_ = 0.0;
    bool initialized_ = false;
};

// ---------------------------------------------------------------------------
// Kuramoto: explicit phase plus critically damped second-order trackers for
// amplitude and offset.

struct KuramotoState {
    double phase = 0.0;
    double amplitude = 0.0;
    double amplitude_rate = 0.0;
    double offset = 0.0;
    double offset_rate = 0.0;

    KuramotoState operator+(const KuramotoState& o) const {
        return {phase + o.phase, amplitude + o.amplitude,
                amplitude_rate + o.amplitude_rate, offset + o.offset,
                offset_rate + o.offset_rate};
    }
    KuramotoState operator*(double s) const {
        return {phase * s, amplitude * s, amplitude_rate * s, offset * s,
                offset_rate * s};
    }
    bool finite() const {
        return std::isfinite(phase) && std::isfinite(amplitude) &&
               std::isfinite(amplitude_rate) && std::isfinite(offset) &&
               std::isfinite(offset_rate);
    }
};

using KuramotoNetwork = std::array<KuramotoState, kOscillators>;

struct KuramotoParams {
    Mat4 coupling;                              // k_ij, zero diagonal
    Mat4 psi_bias;                              // antisymmetric
    std::array<double, kOscillators> omega{};   // rad/s
    std::array<double, kOscillators> amplitude_target{};  // R_i
    std::array<double, kOscillators> offset_target{};     // X_i
    double gain_amplitude = 20.0;               // a_r
    double gain_offset = 20.0;                  // a_x
};

KuramotoNetwork kuramoto_derivative(const KuramotoNetwork& net,
                                    const KuramotoParams& p);

// theta = (2/N_a) phase, e = r * a_e * |sin(phase)| + x.
WheelCommand kuramoto_output(const KuramotoState& s, double a_e, int n_arcs);

// ---------------------------------------------------------------------------
// Hopf: planar oscillator with an attracting circle of radius mu and
// rotation-coupled phase biasing.

struct HopfState {
    double x = 0.0;
    double y = 0.0;

    double radius() const { return std::hypot(x, y); }
    HopfState operator+(const HopfState& o) const { return {x + o.x, y + o.y}; }
    HopfState operator*(double s) const { return {x * s, y * s}; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

using HopfNetwork = std::array<HopfState, kOscillators>;

struct HopfParams {
    Mat4 coupling;  // k_ij
    Mat4 psi_bias;
    std::array<double, kOscillators> omega{};
    std::array<double, kOscillators> mu{};  // limit-cycle radius
    double gain = 50.0;                     // a_i
};

HopfNetwork hopf_derivative(const HopfNetwork& net, const HopfParams& p);

// theta = (2/N_a) * unwrapped atan2(y, x); e = r - a_e/2 * |x|.
// Throws DomainError at the origin (phase undefined).
WheelCommand hopf_output(const HopfState& s, double a_e, int n_arcs,
                         PhaseUnwrapper& unwrapper);

// ---------------------------------------------------------------------------
// Van der Pol: relaxation oscillator with additive state coupling.

struct VdpState {
    double x = 0.0;
    double y = 0.0;  // x-dot

    VdpState operator+(const VdpState& o) const { return {x + o.x, y + o.y}; }
    VdpState operator*(double s) const { return {x * s, y * s}; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

using VdpNetwork = std::array<VdpState, kOscillators>;

struct VdpParams {
    Mat4 coupling;  // K_walk by default
    std::array<double, kOscillators> gain{};      // a_i
    std::array<double, kOscillators> p_sq{};      // p_i^2
    std::array<double, kOscillators> omega_sq{};  // omega_i^2

    // The empirically stable parameter set: p^2 = 2.0, a = 1.5, omega^2 = 5.
    static VdpParams reference_defaults();
};

VdpNetwork vdp_derivative(const VdpNetwork& net, const VdpParams& p);

// theta = (2/N_a) * unwrapped atan2(y / rate_scale, x);
// e = e_max - a_e |x| / (2 p^2). rate_scale is the time-scale factor applied
// to the oscillator (scaling gain by k and omega^2 by k^2 replays the natural
// cycle k times faster with y scaled by k; dividing y by k recovers the
// natural-rate phase portrait).
WheelCommand vdp_output(const VdpState& s, double e_max, double a_e,
                        double p_sq, int n_arcs, PhaseUnwrapper& unwrapper,
                        double rate_scale = 1.0);

// ---------------------------------------------------------------------------
// Fixed-step classical RK4. Deterministic: identical inputs give bit-identical
// trajectories. Throws DivergenceError with the step index when a state stops
// being finite.

template <typename Network, typename Deriv>
Network rk4_step(const Network& s, double dt, Deriv&& f) {
    const auto k1 = f(s);
    Network tmp;
    for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + k1[i] * (dt / 2);
    const auto k2 = f(tmp);
    for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + k2[i] * (dt / 2);
    const auto k3 = f(tmp);
    for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + k3[i] * dt;
    const auto k4 = f(tmp);
    Network out;
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = s[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6);
    return out;
}

template <typename Network, typename Deriv>
std::vector<Network> integrate(Network state, double duration, double dt,
                               Deriv&& f) {
    if (!(dt > 0.0) || duration < dt)
        throw DomainError("integrate: need dt > 0 and duration >= dt");
    const long steps = static_cast<long>(duration / dt + 0.5);
    std::vector<Network> traj;
    traj.reserve(static_cast<std::size_t>(steps) + 1);
    traj.push_back(state);
    for (long k = 0; k < steps; ++k) {
        state = rk4_step(state, dt, f);
        for (const auto& s : state)
            if (!s.finite())
                throw DivergenceError("integrate: non-finite state", k);
        traj.push_back(state);
    }
    return traj;
}

}  // namespace legwheel
