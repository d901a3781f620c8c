#include "legwheel/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include "legwheel/errors.hpp"

namespace legwheel {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Parses "k=v" tokens into the referenced fields; unknown keys and malformed
// numbers are reported through `errors`.
struct KvParser {
    std::vector<std::string>& errors;
    std::string context;

    bool number(const std::string& tok, const std::string& key, double& out) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || tok.substr(0, eq) != key) return false;
        try {
            out = std::stod(tok.substr(eq + 1));
        } catch (const std::exception&) {
            errors.push_back(context + ": bad number in '" + tok + "'");
        }
        return true;
    }
    bool integer(const std::string& tok, const std::string& key,
                 std::uint64_t& out) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || tok.substr(0, eq) != key) return false;
        try {
            out = std::stoull(tok.substr(eq + 1));
        } catch (const std::exception&) {
            errors.push_back(context + ": bad integer in '" + tok + "'");
        }
        return true;
    }
};

}  // namespace

OscillatorModel oscillator_from_name(const std::string& name) {
    if (name == "kuramoto") return OscillatorModel::kuramoto;
    if (name == "hopf") return OscillatorModel::hopf;
    if (name == "vdp") return OscillatorModel::vdp;
    if (name == "direct") return OscillatorModel::direct;
    throw ValidationError("oscillator: unknown model '" + name +
                          "' (expected kuramoto|hopf|vdp|direct)");
}

std::string oscillator_name(OscillatorModel m) {
    switch (m) {
        case OscillatorModel::kuramoto: return "kuramoto";
        case OscillatorModel::hopf: return "hopf";
        case OscillatorModel::vdp: return "vdp";
        case OscillatorModel::direct: return "direct";
    }
    return "?";
}

Scenario parse_scenario(std::istream& is) {
    Scenario s;
    s.duration = -1.0;  // required fields start invalid
    s.trials = 0;
    bool have_oscillator = false;

    std::vector<std::string> errors;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) +
                             ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string ctx = key + " (line " + std::to_string(lineno) + ")";
        KvParser kv{errors, ctx};

        try {
            if (key == "oscillator") {
                s.oscillator = oscillator_from_name(value);
                have_oscillator = true;
            } else if (key == "duration") {
                s.duration = std::stod(value);
            } else if (key == "trials") {
                s.trials = std::stoi(value);
            } else if (key == "seed") {
                s.master_seed = std::stoull(value);
            } else if (key == "out") {
                s.out_path = value;
            } else if (key == "track_width") {
                s.layout.track_width = std::stod(value);
            } else if (key == "wheelbase") {
                s.layout.wheelbase = std::stod(value);
            } else if (key == "n_arcs") {
                s.layout.n_arcs = std::stoi(value);
            } else if (key == "v_limit") {
                s.layout.v_limit = std::stod(value);
            } else if (key == "w_limit") {
                s.layout.w_limit = std::stod(value);
            } else if (key == "terrain") {
                auto toks = split_ws(value);
                if (toks.empty()) {
                    errors.push_back(ctx + ": missing terrain kind");
                    continue;
                }
                TerrainFeatureSpec f;
                const std::string kind = toks[0];
                toks.erase(toks.begin());
                if (kind == "flat") f.kind = TerrainFeatureSpec::Kind::flat;
                else if (kind == "step") f.kind = TerrainFeatureSpec::Kind::step;
                else if (kind == "pipe") f.kind = TerrainFeatureSpec::Kind::pipe;
                else if (kind == "noise") f.kind = TerrainFeatureSpec::Kind::noise;
                else {
                    errors.push_back(ctx + ": unknown terrain kind '" + kind +
                                     "'");
                    continue;
                }
                for (const auto& t : toks) {
                    const bool known =
                        kv.number(t, "height", f.height) ||
                        kv.number(t, "diameter", f.diameter) ||
                        kv.number(t, "x0", f.x0) ||
                        kv.integer(t, "seed", f.seed) ||
                        kv.number(t, "amplitude", f.amplitude) ||
                        kv.number(t, "wavelength", f.wavelength) ||
                        kv.number(t, "anisotropy", f.anisotropy);
                    if (!known)
                        errors.push_back(ctx + ": unknown parameter '" + t +
                                         "'");
                }
                if (f.kind == TerrainFeatureSpec::Kind::step &&
                    !(f.height > 0))
                    errors.push_back(ctx + ": step needs height > 0");
                if (f.kind == TerrainFeatureSpec::Kind::pipe &&
                    !(f.diameter > 0))
                    errors.push_back(ctx + ": pipe needs diameter > 0");
                if (f.kind == TerrainFeatureSpec::Kind::noise &&
                    !(f.amplitude > 0 && f.wavelength > 0 && f.anisotropy > 0))
                    errors.push_back(
                        ctx +
                        ": noise needs amplitude, wavelength, anisotropy > 0");
                s.terrain.push_back(f);
            } else if (key == "command") {
                auto toks = split_ws(value);
                if (toks.empty()) {
                    errors.push_back(ctx + ": missing start time");
                    continue;
                }
                ScheduleEntry e{};
                try {
                    e.t_start = std::stod(toks[0]);
                } catch (const std::exception&) {
                    errors.push_back(ctx + ": bad start time '" + toks[0] +
                                     "'");
                }
                toks.erase(toks.begin());
                for (const auto& t : toks) {
                    const bool known = kv.number(t, "v", e.cmd.v) ||
                                       kv.number(t, "w", e.cmd.w) ||
                                       kv.number(t, "h", e.cmd.h);
                    if (!known)
                        errors.push_back(ctx + ": unknown parameter '" + t +
                                         "'");
                }
                s.schedule.push_back(e);
            } else {
                errors.push_back(ctx + ": unknown key");
            }
        } catch (const ValidationError& e) {
            errors.push_back(e.what());
        } catch (const std::exception&) {
            errors.push_back(ctx + ": bad value '" + value + "'");
        }
    }

    if (!have_oscillator) errors.push_back("oscillator: missing");
    if (!(s.duration >= 0)) errors.push_back("duration: must be >= 0");
    if (s.trials < 1) errors.push_back("trials: must be >= 1");
    if (s.schedule.empty()) errors.push_back("command: at least one required");
    for (const auto& e : s.schedule) {
        if (!(e.cmd.h > 0))
            errors.push_back("command (t=" + fmt(e.t_start) +
                             "): h must be > 0");
    }
    if (!std::is_sorted(s.schedule.begin(), s.schedule.end(),
                        [](const ScheduleEntry& a, const ScheduleEntry& b) {
                            return a.t_start < b.t_start;
                        }))
        errors.push_back("command: entries must be ordered by start time");
    if (!(s.layout.track_width > 0))
        errors.push_back("track_width: must be > 0");
    if (!(s.layout.wheelbase > 0)) errors.push_back("wheelbase: must be > 0");
    if (s.layout.n_arcs < 3) errors.push_back("n_arcs: must be >= 3");

    if (!errors.empty()) {
        std::string msg = "scenario invalid:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ValidationError(msg);
    }
    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open scenario file: " + path);
    return parse_scenario(is);
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream os;
    os << "oscillator = " << oscillator_name(s.oscillator) << "\n";
    os << "duration = " << fmt(s.duration) << "\n";
    os << "trials = " << s.trials << "\n";
    os << "seed = " << s.master_seed << "\n";
    if (!s.out_path.empty()) os << "out = " << s.out_path << "\n";
    os << "track_width = " << fmt(s.layout.track_width) << "\n";
    os << "wheelbase = " << fmt(s.layout.wheelbase) << "\n";
    os << "n_arcs = " << s.layout.n_arcs << "\n";
    os << "v_limit = " << fmt(s.layout.v_limit) << "\n";
    os << "w_limit = " << fmt(s.layout.w_limit) << "\n";
    for (const auto& f : s.terrain) {
        switch (f.kind) {
            case TerrainFeatureSpec::Kind::flat:
                os << "terrain = flat\n";
                break;
            case TerrainFeatureSpec::Kind::step:
                os << "terrain = step height=" << fmt(f.height)
                   << " x0=" << fmt(f.x0) << "\n";
                break;
            case TerrainFeatureSpec::Kind::pipe:
                os << "terrain = pipe diameter=" << fmt(f.diameter)
                   << " x0=" << fmt(f.x0) << "\n";
                break;
            case TerrainFeatureSpec::Kind::noise:
                os << "terrain = noise seed=" << f.seed
                   << " amplitude=" << fmt(f.amplitude)
                   << " wavelength=" << fmt(f.wavelength)
                   << " anisotropy=" << fmt(f.anisotropy) << "\n";
                break;
        }
    }
    for (const auto& e : s.schedule)
        os << "command = " << fmt(e.t_start) << " v=" << fmt(e.cmd.v)
           << " w=" << fmt(e.cmd.w) << " h=" << fmt(e.cmd.h) << "\n";
    return os.str();
}

Terrain build_terrain(const Scenario& s) {
    Terrain t;
    for (const auto& f : s.terrain) {
        switch (f.kind) {
            case TerrainFeatureSpec::Kind::flat:
                break;
            case TerrainFeatureSpec::Kind::step:
                t.add_step(f.height, f.x0);
                break;
            case TerrainFeatureSpec::Kind::pipe:
                t.add_pipe(f.diameter, f.x0);
                break;
            case TerrainFeatureSpec::Kind::noise:
                t.add_noise(f.seed, f.amplitude, f.wavelength, f.anisotropy);
                break;
        }
    }
    return t;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t trial_index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (trial_index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::array<double, 4> random_phases(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    std::array<double, 4> p;
    for (double& v : p) v = u(rng);
    return p;
}

SuiteResult run_suite(const Scenario& s, const FourBarConfig& cfg) {
    if (s.oscillator == OscillatorModel::vdp) {
        for (const auto& e : s.schedule)
            if (e.cmd.w != 0.0)
                throw UnsupportedFeatureError(
                    "run_suite: vdp scenarios cannot command turning (w != 0)");
    }

    const Terrain terrain = build_terrain(s);
    SuiteResult r;
    r.trial_seeds.resize(s.trials);
    for (int k = 0; k < s.trials; ++k)
        r.trial_seeds[k] = mix_seed(s.master_seed, k);

    auto one_trial = [&](int k) {
        CpgController controller(s.oscillator, cfg, s.layout);
        Simulator sim(cfg, s.layout, terrain);
        return run_trial(controller, sim, s.schedule, s.duration,
                         random_phases(r.trial_seeds[k]));
    };

    std::vector<std::future<TrialLog>> futures;
    futures.reserve(s.trials);
    for (int k = 0; k < s.trials; ++k)
        futures.push_back(
            std::async(std::launch::async, one_trial, k));

    std::vector<TrialLog> logs;
    logs.reserve(s.trials);
    for (auto& f : futures) logs.push_back(f.get());

    for (const auto& log : logs) r.trials.push_back(compute_metrics(log));

    const double n = static_cast<double>(s.trials);
    double mx = 0, my = 0;
    for (const auto& m : r.trials) {
        r.height_mean += m.height_mean / n;
        r.height_sd_mean += m.height_sd / n;
        r.speed_mean += m.speed_mean / n;
        r.lateral_norm_mean += m.lateral_norm / n;
        mx += m.final_x / n;
        my += m.final_y / n;
    }
    if (s.trials > 1) {
        for (const auto& m : r.trials) {
            r.final_x_variance += (m.final_x - mx) * (m.final_x - mx);
            r.final_y_variance += (m.final_y - my) * (m.final_y - my);
        }
        r.final_x_variance /= n - 1;
        r.final_y_variance /= n - 1;
    }

    if (!s.out_path.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(s.out_path);
        for (int k = 0; k < s.trials; ++k) {
            std::ofstream os(fs::path(s.out_path) /
                             ("trial_" + std::to_string(k) + ".csv"));
            logs[k].write_csv(os);
        }
        std::ofstream os(fs::path(s.out_path) / "metrics.csv");
        write_suite_csv(r, os);
    }
    return r;
}

void write_suite_csv(const SuiteResult& r, std::ostream& os) {
    os << "trial,seed,height_mean,height_sd,speed_mean,lateral_norm,"
          "final_x,final_y,turn_radius,final_x_var,final_y_var\n";
    for (std::size_t k = 0; k < r.trials.size(); ++k) {
        const auto& m = r.trials[k];
        os << k << ',' << r.trial_seeds[k] << ',' << fmt9(m.height_mean) << ','
           << fmt9(m.height_sd) << ',' << fmt9(m.speed_mean) << ','
           << fmt9(m.lateral_norm) << ',' << fmt9(m.final_x) << ','
           << fmt9(m.final_y) << ',' << fmt9(m.turn_radius) << ",,\n";
    }
    os << "aggregate,," << fmt9(r.height_mean) << ','
       << fmt9(r.height_sd_mean) << ',' << fmt9(r.speed_mean) << ','
       << fmt9(r.lateral_norm_mean) << ",,,," << fmt9(r.final_x_variance)
       << ',' << fmt9(r.final_y_variance) << "\n";
}

std::vector<OscillatorRow> compare_oscillators(const Scenario& templ,
                                               const FourBarConfig& cfg) {
    std::vector<OscillatorRow> rows;
    for (OscillatorModel m :
         {OscillatorModel::kuramoto, OscillatorModel::hopf,
          OscillatorModel::vdp, OscillatorModel::direct}) {
        Scenario s = templ;
        s.oscillator = m;
        s.out_path.clear();
        OscillatorRow row;
        row.oscillator = oscillator_name(m);
        try {
            const SuiteResult r = run_suite(s, cfg);
            row.metrics.height_mean = r.height_mean;
            row.metrics.height_sd = r.height_sd_mean;
            row.metrics.speed_mean = r.speed_mean;
            row.metrics.lateral_norm = r.lateral_norm_mean;
        } catch (const DivergenceError&) {
            row.diverged = true;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_comparison_csv(const std::vector<OscillatorRow>& rows,
                          std::ostream& os) {
    os << "oscillator,status,height_mean,height_sd,speed_mean,lateral_norm\n";
    for (const auto& r : rows) {
        if (r.diverged) {
            os << r.oscillator << ",diverged,,,,\n";
        } else {
            os << r.oscillator << ",ok," << fmt9(r.metrics.height_mean) << ','
               << fmt9(r.metrics.height_sd) << ','
               << fmt9(r.metrics.speed_mean) << ','
               << fmt9(r.metrics.lateral_norm) << "\n";
        }
    }
}

}  // namespace legwheel
