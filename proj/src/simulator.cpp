#include "legwheel/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "legwheel/errors.hpp"

namespace legwheel {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_pi(double a) {
    a = std::fmod(a + kPi, kTwoPi);
    if (a < 0) a += kTwoPi;
    return a - kPi;
}
}  // namespace

std::vector<Vec2> wheel_boundary(const HubState& hub, const FourBarConfig& cfg,
                                 int samples_per_arc) {
    if (samples_per_arc < 2)
        throw DomainError("wheel_boundary: need at least 2 samples per arc");
    const WheelJoints j = wheel_fk(hub, cfg);
    const int n = cfg.n_arcs();
    const double alpha = kTwoPi / n;
    const double rim = cfg.lengths().arc_ap / (2.0 * std::sin(alpha / 2.0));
    const double rp = cfg.lengths().tip_radius;

    // Arc center: on the perpendicular bisector of chord A-P, on the side
    // toward the axle so the rim bulges outward.
    const Vec2 mid = 0.5 * (j.a + j.p);
    const Vec2 chord_dir = (j.p - j.a).normalized();
    const Vec2 perp{-chord_dir.y, chord_dir.x};
    const double m = rim * std::cos(alpha / 2.0);
    Vec2 center = mid + m * perp;
    if (center.norm() > (mid - m * perp).norm()) center = mid - m * perp;

    const double a0 = (j.a - center).angle();
    const double a1 = (j.p - center).angle();
    const double sweep = wrap_pi(a1 - a0);

    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n) * samples_per_arc);
    for (int s = 0; s < samples_per_arc; ++s) {
        const double ang = a0 + sweep * s / (samples_per_arc - 1);
        const Vec2 p = center + (rim + rp) * unit_vec(ang);
        for (int k = 0; k < n; ++k) pts.push_back(p.rotated(k * alpha));
    }
    return pts;
}

WheelContact effective_contact(const HubState& hub, const FourBarConfig& cfg,
                               const Terrain& terrain, double wx, double wy,
                               int samples_per_arc) {
    const auto pts = wheel_boundary(hub, cfg, samples_per_arc);
    WheelContact best{};
    best.axle_height = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : pts) {
        const double z = terrain.height(wx + p.x, wy) - p.y;
        if (z > best.axle_height) {
            best.axle_height = z;
            best.point = p;
        }
    }
    best.radius = best.point.norm();
    return best;
}

bool SimState::finite() const {
    bool ok = std::isfinite(x) && std::isfinite(y) && std::isfinite(yaw) &&
              std::isfinite(z) && std::isfinite(pitch) && std::isfinite(roll);
    for (const auto& w : wheels)
        ok = ok && std::isfinite(w.phi_outer) && std::isfinite(w.phi_inner);
    return ok;
}

Simulator::Simulator(const FourBarConfig& cfg, const RobotLayout& layout,
                     Terrain terrain)
    : cfg_(cfg), layout_(layout), terrain_(std::move(terrain)) {}

Vec2 Simulator::wheel_offset(int i) const {
    const double bx = (i < 2 ? 1.0 : -1.0) * layout_.wheelbase / 2.0;
    const double by = -layout_.side_sign[i] * layout_.track_width / 2.0;
    return {bx, by};
}

WheelContact Simulator::contact(const SimState& state, int i,
                                const HubState& hub) const {
    const Vec2 world =
        Vec2{state.x, state.y} + wheel_offset(i).rotated(state.yaw);
    const double rho = mount_angle_ - layout_.side_sign[i] * hub.phi_outer;
    return effective_contact({rho, rho + hub.offset()}, cfg_, terrain_,
                             world.x, world.y, samples_per_arc);
}

void Simulator::settle(SimState& state) const {
    std::array<double, 4> zw{};
    for (int i = 0; i < 4; ++i)
        zw[i] = contact(state, i, state.wheels[i]).axle_height;

    double z0 = 0, sa = 0, sb = 0, sxx = 0, syy = 0;
    for (int i = 0; i < 4; ++i) {
        const Vec2 off = wheel_offset(i);
        z0 += zw[i] / 4.0;
        sa += zw[i] * off.x;
        sb += zw[i] * off.y;
        sxx += off.x * off.x;
        syy += off.y * off.y;
    }
    state.z = z0;
    state.pitch = -std::atan(sa / sxx);
    state.roll = std::atan(sb / syy);
}

SimState Simulator::initial_state(const std::array<HubState, 4>& targets) const {
    SimState s{};
    s.wheels = targets;
    settle(s);
    return s;
}

SimState Simulator::step(const SimState& state,
                         const std::array<HubState, 4>& targets,
                         double dt) const {
    if (!(dt > 0.0)) throw DomainError("Simulator::step: dt must be > 0");

    std::array<double, 4> ds{};
    for (int i = 0; i < 4; ++i) {
        const double dtheta =
            targets[i].phi_outer - state.wheels[i].phi_outer;
        const double radius = contact(state, i, targets[i]).radius;
        ds[i] = layout_.side_sign[i] * dtheta * radius;
    }
    const double left = 0.5 * (ds[0] + ds[2]);
    const double right = 0.5 * (ds[1] + ds[3]);
    const double dfwd = 0.5 * (left + right);
    const double dyaw = (right - left) / layout_.track_width;

    SimState next = state;
    next.x += dfwd * std::cos(state.yaw + dyaw / 2.0);
    next.y += dfwd * std::sin(state.yaw + dyaw / 2.0);
    next.yaw += dyaw;
    next.wheels = targets;
    settle(next);
    next.t = state.t + dt;

    if (!next.finite())
        throw DivergenceError("Simulator::step: non-finite state",
                              static_cast<long>(next.t / dt));
    return next;
}

void Simulator::calibrate_mount(const CpgController& controller, double h) {
    const auto wf = controller.gait_waveform(h, 128);
    const double alpha = kTwoPi / cfg_.n_arcs();
    const int kGammaScan = 180;

    double best_gamma = 0.0;
    double best_ripple = std::numeric_limits<double>::infinity();
    for (int g = 0; g < kGammaScan; ++g) {
        const double gamma = alpha * g / kGammaScan;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& s : wf) {
            const HubState hub{gamma - s.theta, gamma - s.theta + s.e};
            const auto pts = wheel_boundary(hub, cfg_, samples_per_arc);
            double z = -std::numeric_limits<double>::infinity();
            for (const Vec2& p : pts) z = std::max(z, -p.y);
            lo = std::min(lo, z);
            hi = std::max(hi, z);
        }
        if (hi - lo < best_ripple) {
            best_ripple = hi - lo;
            best_gamma = gamma;
        }
    }
    mount_angle_ = best_gamma;
}

void TrialLog::write_csv(std::ostream& os) const {
    os << "t,x,y,yaw,z,pitch,roll";
    for (int i = 0; i < 4; ++i)
        os << ",w" << i << "_theta,w" << i << "_e";
    os << ",cmd_v,cmd_w,cmd_h\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        os << buf << sep;
    };
    for (const auto& s : samples) {
        put(s.t, ',');
        put(s.state.x, ',');
        put(s.state.y, ',');
        put(s.state.yaw, ',');
        put(s.state.z, ',');
        put(s.state.pitch, ',');
        put(s.state.roll, ',');
        for (int i = 0; i < 4; ++i) {
            put(s.state.wheels[i].phi_outer, ',');
            put(s.state.wheels[i].offset(), ',');
        }
        put(s.cmd.v, ',');
        put(s.cmd.w, ',');
        put(s.cmd.h, '\n');
    }
}

TrialLog run_trial(CpgController& controller, Simulator& sim,
                   const std::vector<ScheduleEntry>& schedule, double duration,
                   const std::array<double, 4>& initial_phases) {
    if (duration < 0.0)
        throw ValidationError("run_trial: duration must be >= 0");
    const DriveCommand& cmd0 = command_at(schedule, 0.0);
    controller.initialize(initial_phases, cmd0.h);
    sim.calibrate_mount(controller, cmd0.h);

    const double dt = CpgController::kControllerDt;
    TrialLog log;
    SimState state = sim.initial_state(controller.state().last_targets);
    log.samples.push_back({0.0, state, cmd0});

    const long steps = static_cast<long>(duration / dt + 0.5);
    for (long k = 0; k < steps; ++k) {
        const double t = k * dt;
        const DriveCommand& cmd = command_at(schedule, t);
        try {
            const auto targets = controller.tick(cmd, dt);
            state = sim.step(state, targets, dt);
        } catch (const DivergenceError& e) {
            throw DivergenceError(
                std::string("run_trial: t=") + std::to_string(t) + ": " +
                    e.what(),
                k);
        }
        log.samples.push_back({state.t, state, cmd});
    }
    return log;
}

double fit_circle_radius(const std::vector<Vec2>& pts) {
    // Kasa fit: minimize sum (x^2 + y^2 + D x + E y + F)^2 over D, E, F.
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    double sr = 0, srx = 0, sry = 0;
    const double n = static_cast<double>(pts.size());
    if (pts.size() < 3) return std::numeric_limits<double>::infinity();
    for (const Vec2& p : pts) {
        const double r2 = p.x * p.x + p.y * p.y;
        sx += p.x;
        sy += p.y;
        sxx += p.x * p.x;
        syy += p.y * p.y;
        sxy += p.x * p.y;
        sr += r2;
        srx += r2 * p.x;
        sry += r2 * p.y;
    }
    // Normal equations for [D E F]:
    const double a[3][3] = {{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, n}};
    const double b[3] = {-srx, -sry, -sr};
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    const double scale = sxx + syy;
    if (std::abs(det) < 1e-12 * std::max(1.0, scale * scale * n))
        return std::numeric_limits<double>::infinity();
    auto det3 = [&](int col) {
        double m[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m[r][c] = c == col ? b[r] : a[r][c];
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double D = det3(0) / det;
    const double E = det3(1) / det;
    const double F = det3(2) / det;
    const double r2 = D * D / 4.0 + E * E / 4.0 - F;
    if (r2 <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(r2);
}

TrialMetrics compute_metrics(const TrialLog& log) {
    if (log.samples.size() < 2)
        throw ValidationError(
            "compute_metrics: need at least two samples to define metrics");

    double zsum = 0, zsq = 0, path = 0;
    for (const auto& s : log.samples) {
        zsum += s.state.z;
        zsq += s.state.z * s.state.z;
    }
    for (std::size_t i = 1; i < log.samples.size(); ++i) {
        const auto& a = log.samples[i - 1].state;
        const auto& b = log.samples[i].state;
        path += std::hypot(b.x - a.x, b.y - a.y);
    }
    const double n = static_cast<double>(log.samples.size());
    const double mean = zsum / n;
    const double var = std::max(zsq / n - mean * mean, 0.0);
    const double duration = log.samples.back().t - log.samples.front().t;

    const auto& first = log.samples.front().state;
    const auto& last = log.samples.back().state;
    const double dx = last.x - first.x;
    const double lateral =
        std::abs(dx) > 1e-9 ? (last.y - first.y) / dx : 0.0;

    // Circle fit over the path after initial transients.
    std::vector<Vec2> pts;
    const double t_skip = log.samples.front().t + 0.1 * duration;
    for (const auto& s : log.samples)
        if (s.t >= t_skip) pts.push_back({s.state.x, s.state.y});

    TrialMetrics m{};
    m.height_mean = mean;
    m.height_sd = std::sqrt(var);
    m.speed_mean = duration > 0 ? path / duration : 0.0;
    m.lateral_norm = lateral;
    m.final_x = last.x;
    m.final_y = last.y;
    m.turn_radius = fit_circle_radius(pts);
    return m;
}

}  // namespace legwheel
