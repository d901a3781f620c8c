#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "legwheel/errors.hpp"
#include "legwheel/simulator.hpp"

using namespace legwheel;

namespace {
constexpr double kPi = std::numbers::pi;

FourBarConfig& proto() {
    static FourBarConfig cfg = FourBarConfig::prototype();
    return cfg;
}

HubState hub_at_reach(double d) {
    return wheel_ik({0.0, -d}, proto());
}
}  // namespace

TEST_CASE("collapsed wheel rolls nearly round on flat ground") {
    const FourBarConfig& cfg = proto();
    const double d = cfg.min_reach() + 1e-6;
    const HubState base = hub_at_reach(d);
    const double alpha = 2.0 * kPi / cfg.n_arcs();

    double lo = 1e300, hi = -1e300;
    for (int k = 0; k <= 100; ++k) {
        const double rho = alpha * k / 100.0;
        const auto c = effective_contact(
            {base.phi_outer + rho, base.phi_inner + rho}, cfg,
            Terrain::flat(), 0.0, 0.0, 256);
        CHECK(c.radius == doctest::Approx(c.axle_height).epsilon(0.02));
        lo = std::min(lo, c.axle_height);
        hi = std::max(hi, c.axle_height);
    }
    // Fully folded, the overlapping rim arcs roughly approximate a circle:
    // height ripple under rotation stays modest, and the resting height sits
    // below the working band (it is set by the rim, which always reaches
    // past the folded tip).
    CHECK(hi - lo < 0.2 * hi);
    CHECK(hi < 0.075);
    CHECK(lo > d + cfg.lengths().tip_radius);
}

TEST_CASE("deployed wheel height oscillates between the polygon bounds") {
    const FourBarConfig& cfg = proto();
    const double d = cfg.max_reach() - 1e-4;
    const double alpha = 2.0 * kPi / cfg.n_arcs();
    const double r_max = d + cfg.lengths().tip_radius;
    const double r_min = (d + cfg.lengths().tip_radius) * std::cos(alpha / 2.0);

    double lo = 1e300, hi = -1e300;
    const HubState base = hub_at_reach(d);
    for (int k = 0; k <= 100; ++k) {
        const double rho = alpha * k / 100.0;
        const auto c = effective_contact(
            {base.phi_outer + rho, base.phi_inner + rho}, cfg,
            Terrain::flat(), 0.0, 0.0, 256);
        lo = std::min(lo, c.axle_height);
        hi = std::max(hi, c.axle_height);
    }
    // Tip-down gives the long radius, mid-arc roughly the chord height.
    CHECK(hi == doctest::Approx(r_max).epsilon(0.02));
    CHECK(lo < r_max - 0.3 * (r_max - r_min));
    CHECK(lo > r_min * 0.95);
}

TEST_CASE("contact height is continuous across a step edge") {
    const FourBarConfig& cfg = proto();
    const Terrain t = Terrain::step(0.05, 0.0);
    const HubState hub = hub_at_reach(0.09);
    double prev = effective_contact(hub, cfg, t, -0.4, 0.0, 128).axle_height;
    for (int i = 1; i <= 160; ++i) {
        const double x = -0.4 + 0.8 * i / 160.0;
        const double z = effective_contact(hub, cfg, t, x, 0.0, 128).axle_height;
        CHECK(z >= prev - 1e-9);  // approaching a step only lifts the axle
        CHECK(z - prev < 0.06);   // and never jumps by more than the step
        prev = z;
    }
    CHECK(prev == doctest::Approx(
                      effective_contact(hub, cfg, t, 10.0, 0.0, 128)
                          .axle_height));
}

TEST_CASE("unchanged targets leave the pose fixed") {
    Simulator sim(proto(), RobotLayout{}, Terrain::flat());
    std::array<HubState, 4> targets;
    targets.fill(hub_at_reach(0.09));
    SimState s = sim.initial_state(targets);
    const SimState s2 = sim.step(s, targets, 0.02);
    CHECK(s2.x == doctest::Approx(s.x));
    CHECK(s2.y == doctest::Approx(s.y));
    CHECK(s2.yaw == doctest::Approx(s.yaw));
    CHECK(s2.z == doctest::Approx(s.z));
    CHECK(s2.t == doctest::Approx(s.t + 0.02));
}

TEST_CASE("equal shaft advances roll the body straight without slip") {
    const RobotLayout layout;
    Simulator sim(proto(), layout, Terrain::flat());
    const HubState hub = hub_at_reach(0.09);
    std::array<HubState, 4> targets;
    targets.fill(hub);
    SimState s = sim.initial_state(targets);

    double expected = 0.0;
    const double dphi = 0.01;
    for (int k = 0; k < 400; ++k) {
        for (int i = 0; i < 4; ++i) {
            // Opposite shaft signs on opposite sides drive forward.
            targets[i].phi_outer += layout.side_sign[i] * dphi;
            targets[i].phi_inner += layout.side_sign[i] * dphi;
        }
        // No slip: each increment advances by dphi * effective radius.
        const SimState before = s;
        s = sim.step(s, targets, 0.02);
        expected += std::hypot(s.x - before.x, s.y - before.y);
    }
    // The two sides carry mirror-image wheels, so their instantaneous
    // rolling radii differ slightly within a step; heading error stays tiny
    // but not identically zero.
    CHECK(std::abs(s.y) < 2e-3);
    CHECK(std::abs(s.yaw) < 5e-3);
    CHECK(s.x == doctest::Approx(expected).epsilon(1e-4));
    CHECK(s.x > 0.3);  // it actually went somewhere
}

TEST_CASE("attitude follows the ground plane under the four axles") {
    RobotLayout layout;
    Terrain ramp;  // approximate a slope with closely spaced small steps
    for (int i = 1; i <= 40; ++i) ramp.add_step(0.005, -1.0 + i * 0.05);
    Simulator sim(proto(), layout, ramp);
    std::array<HubState, 4> targets;
    targets.fill(hub_at_reach(0.09));
    SimState s{};
    s.wheels = targets;
    s.x = 0.0;
    const SimState settled = sim.step(s, targets, 0.02);
    // Ground rises ~0.1 m per metre toward +x: the body pitches nose-up.
    // Mirror-image wheels can straddle different treads left vs right, so
    // the roll bound is loose.
    CHECK(settled.pitch < -0.02);
    CHECK(std::abs(settled.roll) < 0.05);
}

TEST_CASE("circle fit recovers a synthetic radius") {
    std::vector<Vec2> pts;
    const double R = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double a = 0.03 * i;
        pts.push_back({0.3 + R * std::cos(a), -0.7 + R * std::sin(a)});
    }
    CHECK(fit_circle_radius(pts) == doctest::Approx(R).epsilon(1e-6));

    std::vector<Vec2> line;
    for (int i = 0; i < 100; ++i) line.push_back({0.01 * i, 0.5 + 0.02 * i});
    CHECK(std::isinf(fit_circle_radius(line)));
    CHECK(std::isinf(fit_circle_radius({{0, 0}, {1, 1}})));
}

TEST_CASE("metrics summarize a synthetic log") {
    TrialLog log;
    for (int k = 0; k <= 100; ++k) {
        TrialSample s{};
        s.t = 0.02 * k;
        s.state.t = s.t;
        s.state.x = 0.1 * s.t;  // straight line, 0.1 m/s
        s.state.z = 0.09;
        log.samples.push_back(s);
    }
    const TrialMetrics m = compute_metrics(log);
    CHECK(m.height_mean == doctest::Approx(0.09));
    CHECK(m.height_sd < 1e-6);
    CHECK(m.speed_mean == doctest::Approx(0.1));
    CHECK(m.lateral_norm == doctest::Approx(0.0));
    CHECK(m.final_x == doctest::Approx(0.2));
    CHECK(std::isinf(m.turn_radius));

    TrialLog tiny;
    tiny.samples.push_back({0.0, SimState{}, DriveCommand{}});
    CHECK_THROWS_AS(compute_metrics(tiny), ValidationError);
}

TEST_CASE("closed-loop trial runs deterministically and logs at 50 Hz") {
    const std::vector<ScheduleEntry> sched{{0.0, {0.3, 0.0, 0.09}}};
    const std::array<double, 4> phases{0.4, 1.1, 2.9, 4.2};
    auto run = [&] {
        CpgController ctrl(OscillatorModel::kuramoto, proto(), RobotLayout{});
        Simulator sim(proto(), RobotLayout{}, Terrain::flat());
        const TrialLog log = run_trial(ctrl, sim, sched, 2.0, phases);
        std::ostringstream os;
        log.write_csv(os);
        return std::pair{log.samples.size(), os.str()};
    };
    const auto [n1, csv1] = run();
    const auto [n2, csv2] = run();
    CHECK(n1 == 101);  // 2 s at 50 Hz plus the initial sample
    CHECK(csv1 == csv2);
    CHECK(csv1.substr(0, csv1.find('\n')) ==
          "t,x,y,yaw,z,pitch,roll,w0_theta,w0_e,w1_theta,w1_e,w2_theta,w2_e,"
          "w3_theta,w3_e,cmd_v,cmd_w,cmd_h");

    // The robot makes forward progress near the commanded speed.
    CpgController ctrl(OscillatorModel::kuramoto, proto(), RobotLayout{});
    Simulator sim(proto(), RobotLayout{}, Terrain::flat());
    const TrialMetrics m =
        compute_metrics(run_trial(ctrl, sim, sched, 4.0, phases));
    CHECK(m.speed_mean == doctest::Approx(0.3).epsilon(0.15));
    CHECK(std::abs(m.lateral_norm) < 0.05);
    CHECK(m.height_mean == doctest::Approx(0.09).epsilon(0.05));
}

TEST_CASE("zero-duration trial logs exactly the initial sample") {
    CpgController ctrl(OscillatorModel::hopf, proto(), RobotLayout{});
    Simulator sim(proto(), RobotLayout{}, Terrain::flat());
    const TrialLog log =
        run_trial(ctrl, sim, {{0.0, {0.0, 0.0, 0.09}}}, 0.0, {0, 0, 0, 0});
    CHECK(log.samples.size() == 1);
    CHECK(log.samples[0].t == 0.0);
    CHECK_THROWS_AS(
        run_trial(ctrl, sim, {{0.0, {0.0, 0.0, 0.09}}}, -1.0, {0, 0, 0, 0}),
        ValidationError);
}

TEST_CASE("non-finite targets surface as a divergence error") {
    Simulator sim(proto(), RobotLayout{}, Terrain::flat());
    std::array<HubState, 4> targets;
    targets.fill(hub_at_reach(0.09));
    SimState s = sim.initial_state(targets);
    targets[2].phi_outer = std::numeric_limits<double>::quiet_NaN();
    targets[2].phi_inner = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sim.step(s, targets, 0.02), DivergenceError);
    CHECK_THROWS_AS(sim.step(s, targets, 0.0), DomainError);
}

TEST_CASE("mount calibration reduces flat-ground ripple") {
    CpgController ctrl(OscillatorModel::kuramoto, proto(), RobotLayout{});
    Simulator sim(proto(), RobotLayout{}, Terrain::flat());
    const double h = 0.09;

    auto ripple_with_mount = [&](double gamma) {
        sim.set_mount_angle(gamma);
        ctrl.initialize({0.0, 0.0, 0.0, 0.0}, h);
        SimState s = sim.initial_state(ctrl.state().last_targets);
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k < 300; ++k) {
            const auto targets = ctrl.tick({0.3, 0.0, h}, 0.02);
            s = sim.step(s, targets, 0.02);
            if (k >= 50) {
                lo = std::min(lo, s.z);
                hi = std::max(hi, s.z);
            }
        }
        return hi - lo;
    };

    sim.calibrate_mount(ctrl, h);
    const double gamma = sim.mount_angle();
    const double tuned = ripple_with_mount(gamma);
    const double detuned =
        ripple_with_mount(gamma + 0.5 * (2.0 * kPi / 5.0));
    CHECK(tuned < detuned);
    CHECK(tuned < 0.01);
}
