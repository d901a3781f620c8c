#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "legwheel/controller.hpp"
#include "legwheel/errors.hpp"
#include "legwheel/four_bar.hpp"
#include "legwheel/geometry.hpp"
#include "legwheel/scenario.hpp"
#include "legwheel/simulator.hpp"

namespace {

using namespace legwheel;

std::string g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

int cmd_geometry(int n_min, int n_max, double radius) {
    std::cout << "n,L_step,h_min,h_span\n";
    for (const auto& [n, m] : design_table(n_min, n_max, radius)) {
        std::cout << n << ',' << g9(m.step_length_m) << ',' << g9(m.h_min_m)
                  << ',' << g9(m.h_max_m - m.h_min_m) << "\n";
    }
    return 0;
}

int cmd_ik_profile(double height, double x_min, double x_max, int samples) {
    const FourBarConfig cfg = FourBarConfig::prototype();
    std::cout << "x,e\n";
    for (const auto& [x, e] :
         phase_offset_profile(height, x_min, x_max, samples, cfg))
        std::cout << g9(x) << ',' << g9(e) << "\n";
    return 0;
}

int cmd_torque(double tip_x, double tip_y, double fx, double fy) {
    const FourBarConfig cfg = FourBarConfig::prototype();
    const HubState hub = wheel_ik({tip_x, tip_y}, cfg);
    const HubTorques t = quasi_static_torques(hub, {{fx, fy}}, cfg);
    std::cout << "tau_inner,tau_outer,link_force,tau_inner_geared,"
                 "tau_outer_geared\n";
    const auto [ti, to] = planetary_torques(t.tau_inner, t.tau_outer,
                                            *cfg.gear());
    std::cout << g9(t.tau_inner) << ',' << g9(t.tau_outer) << ','
              << g9(t.link_force) << ',' << g9(ti) << ',' << g9(to) << "\n";
    return 0;
}

int cmd_trace(const std::string& model, double duration, double v, double w,
              double height) {
    const FourBarConfig cfg = FourBarConfig::prototype();
    CpgController ctrl(oscillator_from_name(model), cfg, RobotLayout{});
    ctrl.initialize({0.0, 0.0, 0.0, 0.0}, height);
    std::cout << "t";
    for (int i = 0; i < 4; ++i) std::cout << ",w" << i << "_theta,w" << i
                                          << "_e";
    std::cout << "\n";
    const double dt = CpgController::kControllerDt;
    const long steps = static_cast<long>(duration / dt + 0.5);
    for (long k = 0; k <= steps; ++k) {
        const auto& targets = k == 0
                                  ? ctrl.state().last_targets
                                  : ctrl.tick({v, w, height}, dt);
        std::cout << g9(k * dt);
        for (int i = 0; i < 4; ++i)
            std::cout << ',' << g9(targets[i].phi_outer) << ','
                      << g9(targets[i].offset());
        std::cout << "\n";
    }
    return 0;
}

int cmd_simulate(const std::string& scenario_path, std::uint64_t seed,
                 bool seed_given, const std::string& out_dir) {
    Scenario s = parse_scenario_file(scenario_path);
    if (seed_given) s.master_seed = seed;
    if (s.oscillator == OscillatorModel::vdp) {
        for (const auto& e : s.schedule)
            if (e.cmd.w != 0.0)
                throw UnsupportedFeatureError(
                    "simulate: vdp scenarios cannot command turning");
    }
    const FourBarConfig cfg = FourBarConfig::prototype();
    CpgController ctrl(s.oscillator, cfg, s.layout);
    Simulator sim(cfg, s.layout, build_terrain(s));
    const TrialLog log = run_trial(ctrl, sim, s.schedule, s.duration,
                                   random_phases(mix_seed(s.master_seed, 0)));
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream os(std::filesystem::path(out_dir) / "trial.csv");
        log.write_csv(os);
    } else {
        log.write_csv(std::cout);
    }
    return 0;
}

int cmd_suite(const std::string& scenario_path) {
    const Scenario s = parse_scenario_file(scenario_path);
    const FourBarConfig cfg = FourBarConfig::prototype();
    write_suite_csv(run_suite(s, cfg), std::cout);
    return 0;
}

int cmd_compare(const std::string& template_path) {
    const Scenario s = parse_scenario_file(template_path);
    const FourBarConfig cfg = FourBarConfig::prototype();
    write_comparison_csv(compare_oscillators(s, cfg), std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Leg-wheel robot toolkit: wheel design tables, four-bar kinematics, "
        "CPG controllers, and a quasi-static terrain simulator"};
    app.require_subcommand(1);

    int n_min = 3, n_max = 8;
    double radius = 1.0;
    auto* geometry = app.add_subcommand(
        "geometry", "Design metrics table for n-arc wheels");
    geometry->add_option("--n-min", n_min, "Smallest arc count");
    geometry->add_option("--n-max", n_max, "Largest arc count");
    geometry->add_option("--radius", radius, "Wheel radius, m");

    double height = 0.09, x_min = -0.04, x_max = 0.04;
    int samples = 81;
    auto* ik = app.add_subcommand(
        "ik-profile", "Hub phase offset across a constant-height tip sweep");
    ik->add_option("--height", height, "Axle height, m");
    ik->add_option("--x-min", x_min, "Sweep start, m");
    ik->add_option("--x-max", x_max, "Sweep end, m");
    ik->add_option("--samples", samples, "Sample count");

    double tip_x = 0.0, tip_y = -0.09, fx = 0.0, fy = 10.0;
    auto* torque = app.add_subcommand(
        "torque", "Quasi-static hub torques for a tip load");
    torque->add_option("--tip-x", tip_x, "Tip x, m");
    torque->add_option("--tip-y", tip_y, "Tip y, m");
    torque->add_option("--fx", fx, "Load x component, N");
    torque->add_option("--fy", fy, "Load y component, N");

    std::string model = "kuramoto";
    double duration = 10.0, v = 0.3, w = 0.0, trace_height = 0.09;
    auto* trace = app.add_subcommand(
        "trace", "Controller wheel targets over time (no simulation)");
    trace->add_option("--model", model, "kuramoto|hopf|vdp|direct");
    trace->add_option("--duration", duration, "Trace length, s");
    trace->add_option("--v", v, "Forward velocity command, m/s");
    trace->add_option("--w", w, "Yaw rate command, rad/s");
    trace->add_option("--height", trace_height, "Axle height command, m");

    std::string scenario_path, out_dir;
    std::uint64_t seed = 0;
    auto* simulate = app.add_subcommand(
        "simulate", "Run one trial of a scenario and emit its log");
    simulate->add_option("--scenario", scenario_path, "Scenario file")
        ->required();
    auto* seed_opt =
        simulate->add_option("--seed", seed, "Override the master seed");
    simulate->add_option("--out", out_dir, "Output directory");

    std::string suite_path;
    auto* suite = app.add_subcommand(
        "suite", "Run a scenario's full trial batch and aggregate metrics");
    suite->add_option("--scenario", suite_path, "Scenario file")->required();

    std::string template_path;
    auto* compare = app.add_subcommand(
        "compare", "Sweep the oscillator model over a scenario template");
    compare->add_option("--template", template_path, "Scenario template file")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (geometry->parsed())
            return cmd_geometry(n_min, n_max, radius);
        if (ik->parsed()) return cmd_ik_profile(height, x_min, x_max, samples);
        if (torque->parsed()) return cmd_torque(tip_x, tip_y, fx, fy);
        if (trace->parsed())
            return cmd_trace(model, duration, v, w, trace_height);
        if (simulate->parsed())
            return cmd_simulate(scenario_path, seed, seed_opt->count() > 0,
                                out_dir);
        if (suite->parsed()) return cmd_suite(suite_path);
        if (compare->parsed()) return cmd_compare(template_path);
    } catch (const legwheel::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const legwheel::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
