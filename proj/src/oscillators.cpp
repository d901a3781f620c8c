#include "legwheel/oscillators.hpp"

#include <numbers>

namespace legwheel {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

Mat4 quarter_cycle_bias() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[i][j] = kPi / 2.0 * (j - i);
    return m;
}

Mat4 ccw_turn_matrix() {
    return Mat4{{{0, 1, 0, 1}, {-1, 0, 1, 0}, {0, -1, 0, 1}, {-1, 0, -1, 0}}};
}

Mat4 walk_coupling() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[i][j] = i == j ? 0.0 : -0.2;
    return m;
}

Mat4 zero_mat4() { return Mat4{}; }

bool is_antisymmetric(const Mat4& m, double tol) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(m[i][j] + m[j][i]) > tol) return false;
    return true;
}

double PhaseUnwrapper::update(double raw_phase) {
    if (!initialized_) {
        last_ = raw_phase;
        initialized_ = true;
        return last_;
    }
    double d = raw_phase - std::fmod(last_, kTwoPi);
    d -= kTwoPi * std::round(d / kTwoPi);
    last_ += d;
    return last_;
}

void PhaseUnwrapper::reset(double phase) {
    last_ = phase;
    initialized_ = true;
}

KuramotoNetwork kuramoto_derivative(const KuramotoNetwork& net,
                                    const KuramotoParams& p) {
    KuramotoNetwork d;
    for (int i = 0; i < kOscillators; ++i) {
        double coup = 0.0;
        for (int j = 0; j < kOscillators; ++j) {
            if (j == i) continue;
            coup += p.coupling[i][j] * net[j].amplitude *
                    std::sin(net[j].phase - net[i].phase - p.psi_bias[i][j]);
        }
        const auto& s = net[i];
        d[i].phase = p.omega[i] + coup;
        d[i].amplitude = s.amplitude_rate;
        d[i].amplitude_rate =
            p.gain_amplitude *
            (p.gain_amplitude / 4.0 * (p.amplitude_target[i] - s.amplitude) -
             s.amplitude_rate);
        d[i].offset = s.offset_rate;
        d[i].offset_rate =
            p.gain_offset * (p.gain_offset / 4.0 *
                                 (p.offset_target[i] - s.offset) -
                             s.offset_rate);
    }
    return d;
}

WheelCommand kuramoto_output(const KuramotoState& s, double a_e, int n_arcs) {
    return {2.0 / n_arcs * s.phase,
            s.amplitude * a_e * std::abs(std::sin(s.phase)) + s.offset};
}

HopfNetwork hopf_derivative(const HopfNetwork& net, const HopfParams& p) {
    HopfNetwork d;
    for (int i = 0; i < kOscillators; ++i) {
        const auto& s = net[i];
        const double r2 = s.x * s.x + s.y * s.y;
        const double radial = p.gain * (p.mu[i] * p.mu[i] - r2);
        double sx = 0.0, sy = 0.0;
        for (int j = 0; j < kOscillators; ++j) {
            if (j == i) continue;
            const double c = std::cos(p.psi_bias[i][j]);
            const double sn = std::sin(p.psi_bias[i][j]);
            sx += p.coupling[i][j] * (c * net[j].x - sn * net[j].y);
            sy += p.coupling[i][j] * (sn * net[j].x + c * net[j].y);
        }
        d[i].x = radial * s.x - p.omega[i] * s.y + sx;
        d[i].y = p.omega[i] * s.x + radial * s.y + sy;
    }
    return d;
}

WheelCommand hopf_output(const HopfState& s, double a_e, int n_arcs,
                         PhaseUnwrapper& unwrapper) {
    if (s.x == 0.0 && s.y == 0.0)
        throw DomainError("hopf_output: phase undefined at the origin");
    const double phase = unwrapper.update(std::atan2(s.y, s.x));
    return {2.0 / n_arcs * phase, s.radius() - 0.5 * a_e * std::abs(s.x)};
}

VdpParams VdpParams::reference_defaults() {
    VdpParams p;
    p.coupling = walk_coupling();
    p.gain.fill(1.5);
    p.p_sq.fill(2.0);
    p.omega_sq.fill(5.0);
    return p;
}

VdpNetwork vdp_derivative(const VdpNetwork& net, const VdpParams& p) {
    VdpNetwork d;
    for (int i = 0; i < kOscillators; ++i) {
        double xa = net[i].x;
        for (int j = 0; j < kOscillators; ++j) {
            if (j == i) continue;
            xa += p.coupling[i][j] * net[j].x;
        }
        d[i].x = net[i].y;
        d[i].y = p.gain[i] * (p.p_sq[i] - net[i].x * net[i].x) * net[i].y -
                 p.omega_sq[i] * xa;
    }
    return d;
}

WheelCommand vdp_output(const VdpState& s, double e_max, double a_e,
                        double p_sq, int n_arcs, PhaseUnwrapper& unwrapper,
                        double rate_scale) {
    if (s.x == 0.0 && s.y == 0.0)
        throw DomainError("vdp_output: phase undefined at the origin");
    if (!(rate_scale > 0.0))
        throw DomainError("vdp_output: rate_scale must be > 0");
    const double phase = unwrapper.update(std::atan2(s.y / rate_scale, s.x));
    return {2.0 / n_arcs * phase,
            e_max - a_e * std::abs(s.x) / (2.0 * p_sq)};
}

}  // namespace legwheel
