#include "legwheel/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "legwheel/errors.hpp"

namespace legwheel {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Van der Pol frequency is frozen (robot at rest) below this fraction of the
// natural rate; the free equation has no stable rest state at omega = 0.
constexpr double kVdpFreezeFraction = 0.05;
}  // namespace

SteeringTargets steering_targets(const DriveCommand& cmd,
                                 const RobotLayout& layout) {
    if (!(cmd.h > 0.0)) throw DomainError("steering_targets: h must be > 0");
    const double half_track = layout.track_width / 2.0;
    const double wterm = cmd.w * half_track / cmd.h;
    SteeringTargets t{};
    for (int i = 0; i < 4; ++i)
        t.omega_star[i] = layout.n_arcs / 2.0 *
                          (wterm + layout.side_sign[i] * cmd.v / cmd.h);
    const Mat4 ccw = ccw_turn_matrix();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            t.psi_bias_rate[i][j] = layout.n_arcs * wterm * ccw[i][j];
    return t;
}

double filter_frequency(double omega, double omega_star, double k_omega,
                        double dt) {
    if (!(k_omega > 0.0))
        throw DomainError("filter_frequency: k_omega must be > 0");
    return omega + k_omega * (omega_star - omega) * dt;
}

const DriveCommand& command_at(const std::vector<ScheduleEntry>& schedule,
                               double t) {
    if (schedule.empty())
        throw ValidationError("command_at: empty schedule");
    const ScheduleEntry* cur = &schedule.front();
    for (const auto& e : schedule) {
        if (e.t_start <= t) cur = &e;
        else break;
    }
    return cur->cmd;
}

CpgController::CpgController(OscillatorModel model, const FourBarConfig& cfg,
                             const RobotLayout& layout)
    : model_(model), cfg_(cfg), layout_(layout) {
    if (layout_.n_arcs != cfg.n_arcs())
        throw ValidationError("CpgController: layout n_arcs differs from wheel config");
    initialize({0.0, 0.0, 0.0, 0.0}, 0.0);
}

ExtensionBounds CpgController::height_to_extension(double h) {
    auto it = extension_cache_.find(h);
    if (it != extension_cache_.end()) return it->second;
    const ExtensionBounds b = extension_bounds(h, cfg_);
    extension_cache_.emplace(h, b);
    return b;
}

void CpgController::set_synchronized(bool sync) {
    synchronized_ = sync;
    state_.psi_bias = sync ? zero_mat4() : quarter_cycle_bias();
}

void CpgController::initialize(const std::array<double, 4>& phases,
                               double h0) {
    state_ = ControllerState{};
    state_.psi_bias = synchronized_ ? zero_mat4() : quarter_cycle_bias();

    double x_off = 0.0, span = 0.0;
    if (h0 > 0.0) {
        last_bounds_ = height_to_extension(h0);
        x_off = last_bounds_.offset_max;
        span = last_bounds_.span;
    }

    for (int i = 0; i < 4; ++i) {
        kuramoto_[i] = {phases[i], span, 0.0, x_off, 0.0};
        const double mu = std::max(x_off, 1e-6);
        hopf_[i] = {mu * std::cos(phases[i]), mu * std::sin(phases[i])};
        const double amp = 2.0 * std::sqrt(2.0);
        vdp_[i] = {amp * std::cos(phases[i]),
                   -amp * kVdpNaturalRate * std::sin(phases[i])};
        direct_theta_[i] = 0.0;
        unwrappers_[i].reset(model_ == OscillatorModel::vdp
                                 ? std::atan2(vdp_[i].y, vdp_[i].x)
                                 : phases[i]);
    }
    if (h0 > 0.0) apply_outputs();
}

void CpgController::apply_outputs() {
    // Refreshes last_targets from the current network state using the most
    // recent extension bounds; called from initialize and tick.
    const ExtensionBounds& b = last_bounds_;
    const int na = layout_.n_arcs;
    for (int i = 0; i < 4; ++i) {
        WheelCommand out{};
        switch (model_) {
            case OscillatorModel::kuramoto:
                out = kuramoto_output(kuramoto_[i], -1.0, na);
                break;
            case OscillatorModel::hopf: {
                const double mu = std::max(b.offset_max, 1e-6);
                out = hopf_output(hopf_[i], 2.0 * b.span / mu, na,
                                  unwrappers_[i]);
                break;
            }
            case OscillatorModel::vdp: {
                const double p_sq = 2.0;
                const double a_e = b.span * p_sq / std::sqrt(p_sq);
                const double scale =
                    std::max(std::abs(state_.omega[i]) / kVdpNaturalRate,
                             kVdpFreezeFraction);
                out = vdp_output(vdp_[i], b.offset_max, a_e, p_sq, na,
                                 unwrappers_[i], scale);
                // Mirrored wiring: the relaxation cycle runs clockwise, so
                // the rotation command is negated per side sign.
                out.theta = -layout_.side_sign[i] * out.theta;
                break;
            }
            case OscillatorModel::direct:
                out = {direct_theta_[i], b.offset_max};
                break;
        }
        state_.last_targets[i] = {out.theta, out.theta + out.e};
    }
}

std::array<HubState, 4> CpgController::tick(const DriveCommand& cmd,
                                            double dt) {
    if (std::abs(cmd.v) > layout_.v_limit || std::abs(cmd.w) > layout_.w_limit)
        throw ValidationError("tick: command beyond configured v/w limits");
    if (model_ == OscillatorModel::vdp && cmd.w != 0.0)
        throw UnsupportedFeatureError(
            "tick: Van der Pol networks cannot generate continuous turning "
            "commands");

    const ExtensionBounds bounds = height_to_extension(cmd.h);
    last_bounds_ = bounds;
    const SteeringTargets targets = steering_targets(cmd, layout_);

    for (int i = 0; i < 4; ++i)
        state_.omega[i] = filter_frequency(state_.omega[i],
                                           targets.omega_star[i], k_omega, dt);
    if (!synchronized_) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                state_.psi_bias[i][j] += targets.psi_bias_rate[i][j] * dt;
    }

    const int substeps = std::max(1, static_cast<int>(dt / kSubstepDt + 0.5));
    const double h_sub = dt / substeps;

    switch (model_) {
        case OscillatorModel::kuramoto: {
            KuramotoParams p;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    p.coupling[i][j] = i == j ? 0.0 : kuramoto_coupling_;
            p.psi_bias = state_.psi_bias;
            p.omega = state_.omega;
            p.amplitude_target.fill(bounds.span);
            p.offset_target.fill(bounds.offset_max);
            for (int k = 0; k < substeps; ++k)
                kuramoto_ = rk4_step(kuramoto_, h_sub, [&](const auto& s) {
                    return kuramoto_derivative(s, p);
                });
            for (const auto& s : kuramoto_)
                if (!s.finite())
                    throw DivergenceError("tick: Kuramoto state diverged",
                                          static_cast<long>(state_.t / dt));
            break;
        }
        case OscillatorModel::hopf: {
            HopfParams p;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    p.coupling[i][j] = i == j ? 0.0 : hopf_coupling_;
            p.psi_bias = state_.psi_bias;
            p.omega = state_.omega;
            p.mu.fill(std::max(bounds.offset_max, 1e-6));
            for (int k = 0; k < substeps; ++k)
                hopf_ = rk4_step(hopf_, h_sub, [&](const auto& s) {
                    return hopf_derivative(s, p);
                });
            for (const auto& s : hopf_)
                if (!s.finite())
                    throw DivergenceError("tick: Hopf state diverged",
                                          static_cast<long>(state_.t / dt));
            break;
        }
        case OscillatorModel::vdp: {
            VdpParams p = VdpParams::reference_defaults();
            bool frozen = true;
            for (int i = 0; i < 4; ++i) {
                const double rate = std::abs(state_.omega[i]);
                // Exact time scaling of the natural cycle: gain scales with
                // the rate, omega^2 with its square, so the x waveform keeps
                // its shape at every commanded speed.
                const double scale = rate / kVdpNaturalRate;
                p.gain[i] = 1.5 * scale;
                p.omega_sq[i] = 5.0 * scale * scale;
                if (rate >= kVdpFreezeFraction * kVdpNaturalRate)
                    frozen = false;
            }
            if (!frozen) {
                for (int k = 0; k < substeps; ++k)
                    vdp_ = rk4_step(vdp_, h_sub, [&](const auto& s) {
                        return vdp_derivative(s, p);
                    });
                for (const auto& s : vdp_)
                    if (!s.finite())
                        throw DivergenceError(
                            "tick: Van der Pol state diverged",
                            static_cast<long>(state_.t / dt));
            }
            break;
        }
        case OscillatorModel::direct: {
            for (int i = 0; i < 4; ++i)
                direct_theta_[i] += 2.0 / layout_.n_arcs * state_.omega[i] * dt;
            break;
        }
    }

    state_.t += dt;
    apply_outputs();
    return state_.last_targets;
}

std::vector<WheelCommand> CpgController::gait_waveform(double h,
                                                       int samples) const {
    const ExtensionBounds b = extension_bounds(h, cfg_);
    const double step_angle = kTwoPi / layout_.n_arcs;
    std::vector<WheelCommand> wf;
    wf.reserve(samples);

    if (model_ == OscillatorModel::vdp) {
        // Use the actual relaxation waveform: settle one free oscillator,
        // then map one half-cycle of |x| onto a step of rotation.
        VdpParams p = VdpParams::reference_defaults();
        p.coupling = zero_mat4();
        VdpNetwork net{};
        net[0] = {0.1, 0.0};
        const double dt = 0.002;
        for (int k = 0; k < 20000; ++k)
            net = rk4_step(net, dt, [&](const auto& s) {
                return vdp_derivative(s, p);
            });
        PhaseUnwrapper uw;
        uw.reset(std::atan2(net[0].y, net[0].x));
        const double phase0 = uw.update(std::atan2(net[0].y, net[0].x));
        std::vector<std::pair<double, double>> pts;  // (u, |x|), u increasing
        double last_u = 0.0;
        while (last_u < kTwoPi / layout_.n_arcs + 1e-9) {
            net = rk4_step(net, dt, [&](const auto& s) {
                return vdp_derivative(s, p);
            });
            const double phase = uw.update(std::atan2(net[0].y, net[0].x));
            // clockwise cycle: phase decreases; u = -(2/N) dphase increases
            last_u = -2.0 / layout_.n_arcs * (phase - phase0);
            pts.emplace_back(last_u, std::abs(net[0].x));
        }
        const double p_sq = 2.0;
        const double a_e = b.span * p_sq / std::sqrt(p_sq);
        for (int i = 0; i < samples; ++i) {
            const double u = step_angle * i / samples;
            auto it = std::lower_bound(
                pts.begin(), pts.end(), u,
                [](const auto& a, double v) { return a.first < v; });
            double ax;
            if (it == pts.begin()) ax = it->second;
            else if (it == pts.end()) ax = pts.back().second;
            else {
                const auto& hi = *it;
                const auto& lo = *(it - 1);
                const double f = (u - lo.first) / (hi.first - lo.first);
                ax = lo.second + f * (hi.second - lo.second);
            }
            wf.push_back({u, b.offset_max - a_e * ax / (2.0 * p_sq)});
        }
        return wf;
    }

    for (int i = 0; i < samples; ++i) {
        const double u = step_angle * i / samples;
        const double phase = layout_.n_arcs / 2.0 * u;  // theta -> phi
        double e;
        switch (model_) {
            case OscillatorModel::kuramoto:
                e = b.offset_max - b.span * std::abs(std::sin(phase));
                break;
            case OscillatorModel::hopf:
                e = b.offset_max - b.span * std::abs(std::cos(phase));
                break;
            default:
                e = b.offset_max;
                break;
        }
        wf.push_back({u, e});
    }
    return wf;
}

}  // namespace legwheel
