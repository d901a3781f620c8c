#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "legwheel/controller.hpp"
#include "legwheel/simulator.hpp"
#include "legwheel/terrain.hpp"

namespace legwheel {

// One terrain feature in a scenario file; features compose additively.
struct TerrainFeatureSpec {
    enum class Kind { flat, step, pipe, noise };
    Kind kind = Kind::flat;
    double height = 0.0;       // step
    double diameter = 0.0;     // pipe
    double x0 = 0.0;           // step / pipe
    std::uint64_t seed = 0;    // noise
    double amplitude = 0.0;    // noise
    double wavelength = 0.25;  // noise
    double anisotropy = 1.0;   // noise
};

// A full experiment description: oscillator choice, robot layout, terrain,
// command schedule, batch size, and seeding. Parsed from a line-oriented
// `key = value` text file (see parse_scenario).
struct Scenario {
    OscillatorModel oscillator = OscillatorModel::kuramoto;
    RobotLayout layout;
    std::vector<TerrainFeatureSpec> terrain;
    std::vector<ScheduleEntry> schedule;
    double duration = 20.0;    // s
    int trials = 12;
    std::uint64_t master_seed = 0;
    std::string out_path;      // optional output directory
};

// Scenario file syntax: one `key = value` per line, '#' comments.
// Keys: oscillator, duration, trials, seed, out, track_width, wheelbase,
// n_arcs, v_limit, w_limit; repeatable keys `terrain = <kind> k=v ...` and
// `command = <t_start> v=<v> w=<w> h=<h>`.
// Throws ValidationError listing every violated field.
Scenario parse_scenario(std::istream& is);
Scenario parse_scenario_file(const std::string& path);

// Canonical form; parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& s);

OscillatorModel oscillator_from_name(const std::string& name);
std::string oscillator_name(OscillatorModel m);

Terrain build_terrain(const Scenario& s);

// Per-trial seed: splitmix64 finalizer over master + (index+1) * golden
// gamma. Trial k's stream never depends on the trial count.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t trial_index);

// Four initial oscillator phases drawn uniformly from [0, 2*pi).
std::array<double, 4> random_phases(std::uint64_t seed);

struct SuiteResult {
    std::vector<std::uint64_t> trial_seeds;
    std::vector<TrialMetrics> trials;

    // Aggregates across trials.
    double height_mean = 0;
    double height_sd_mean = 0;
    double speed_mean = 0;
    double lateral_norm_mean = 0;
    double final_x_variance = 0;  // sample variance, m^2
    double final_y_variance = 0;
};

// Runs the scenario's trial batch (concurrently; results merged in trial
// order). When the scenario has an output path, writes trial_<k>.csv and
// metrics.csv there. Throws UnsupportedFeatureError for vdp with turning.
SuiteResult run_suite(const Scenario& s, const FourBarConfig& cfg);

// Per-trial metrics table plus one aggregate row, CSV.
void write_suite_csv(const SuiteResult& r, std::ostream& os);

struct OscillatorRow {
    std::string oscillator;
    bool diverged = false;
    TrialMetrics metrics{};
};

// Same scenario with the oscillator field swept over all four modes; a
// divergent run is flagged in its row instead of aborting the table.
std::vector<OscillatorRow> compare_oscillators(const Scenario& templ,
                                               const FourBarConfig& cfg);

void write_comparison_csv(const std::vector<OscillatorRow>& rows,
                          std::ostream& os);

}  // namespace legwheel
