#include "legwheel/four_bar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "legwheel/errors.hpp"

namespace legwheel {

namespace {

constexpr double kPi = std::numbers::pi;

// The mechanism is built in its mirrored handedness (elbow angles on the
// positive branch) so that a growing offset e = phi_I - phi_O deploys the
// legs. two_link_ik keeps the negative branch; the mirror maps one onto the
// other.
std::pair<double, double> ik_mirrored(Vec2 target, double l1, double l2) {
    auto [t1, t2] = two_link_ik({target.x, -target.y}, l1, l2);
    return {-t1, -t2};
}

}  // namespace

std::pair<double, double> two_link_ik(Vec2 target, double l1, double l2) {
    const double d = target.norm();
    const double lo = std::abs(l1 - l2), hi = l1 + l2;
    if (d < lo || d > hi) {
        const double deficit = d > hi ? d - hi : lo - d;
        throw OutOfWorkspaceError(
            "two_link_ik: target at distance " + std::to_string(d) +
                " outside [" + std::to_string(lo) + ", " + std::to_string(hi) +
                "]",
            deficit);
    }
    double c = (d * d - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    c = std::clamp(c, -1.0, 1.0);
    const double t2 = -std::acos(c);
    const double t1 = std::atan2(target.y, target.x) -
                      std::atan2(l2 * std::sin(t2), l1 + l2 * std::cos(t2));
    return {t1, t2};
}

Vec2 two_link_fk(double theta1, double theta2, double l1, double l2) {
    return l1 * unit_vec(theta1) + l2 * unit_vec(theta1 + theta2);
}

FourBarConfig::FourBarConfig(const Lengths& lengths, int n_arcs, double h_lo_m,
                             double h_hi_m, std::optional<PlanetaryGear> gear)
    : len_(lengths), n_arcs_(n_arcs), gear_(std::move(gear)) {
    if (len_.pivot_ab <= 0 || len_.outer_hub_da <= 0 || len_.link_cb <= 0 ||
        len_.inner_hub_dc <= 0 || len_.arc_ap <= 0 || len_.tip_radius <= 0)
        throw DomainError("FourBarConfig: all lengths must be > 0");
    if (n_arcs_ < 3) throw DomainError("FourBarConfig: n_arcs must be >= 3");
    if (gear_) {
        if (gear_->sun_teeth <= 0 || gear_->planet_teeth <= 0 ||
            gear_->ring_teeth <= 0)
            throw DomainError("FourBarConfig: gear teeth must be > 0");
    }

    // Feasibility of a tip distance: both IK passes must close.
    auto feasible = [this](double d) {
        try {
            wheel_ik({0.0, -d}, *this);
            return true;
        } catch (const OutOfWorkspaceError&) {
            return false;
        }
    };

    // offset_ref_ participates in wheel_ik; keep it zero while probing.
    offset_ref_ = 0.0;

    const double lo = std::abs(len_.outer_hub_da - len_.arc_ap);
    const double hi = len_.outer_hub_da + len_.arc_ap;
    const int kScan = 512;
    double d_first = -1.0, d_last = -1.0;
    for (int i = 0; i <= kScan; ++i) {
        const double d = lo + (hi - lo) * i / kScan;
        if (feasible(d)) {
            if (d_first < 0) d_first = d;
            d_last = d;
        }
    }
    if (d_first < 0)
        throw DomainError("FourBarConfig: mechanism has no feasible pose");

    auto bisect = [&](double bad, double good) {
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (bad + good);
            (feasible(mid) ? good : bad) = mid;
        }
        return good;
    };
    min_reach_ = d_first > lo ? bisect(d_first - (hi - lo) / kScan, d_first)
                              : d_first;
    max_reach_ = d_last < hi ? bisect(d_last + (hi - lo) / kScan, d_last)
                             : d_last;

    // The geometric offset dips to a single minimum (the fully folded pose)
    // and rises monotonically as the legs deploy. Reaches below the fold
    // belong to a mirrored branch the physical mechanism cannot use, so the
    // fold becomes the usable minimum reach and the offset zero reference.
    auto offset_raw = [this](double d) {
        return wheel_ik({0.0, -d}, *this).offset();
    };
    double fold_lo = min_reach_, fold_hi = max_reach_;
    for (int i = 0; i < 200; ++i) {
        const double m1 = fold_lo + (fold_hi - fold_lo) / 3.0;
        const double m2 = fold_hi - (fold_hi - fold_lo) / 3.0;
        if (offset_raw(m1) <= offset_raw(m2)) fold_hi = m2;
        else fold_lo = m1;
    }
    min_reach_ = 0.5 * (fold_lo + fold_hi);
    offset_ref_ = offset_raw(min_reach_);

    // Fail fast on a height band the gait cannot serve.
    const int kHeights = 64;
    for (int i = 0; i < kHeights; ++i) {
        const double h = h_lo_m + (h_hi_m - h_lo_m) * i / (kHeights - 1);
        extension_bounds(h, *this);
    }
}

FourBarConfig FourBarConfig::prototype() {
    Lengths len;
    len.pivot_ab = 0.015;
    len.outer_hub_da = 0.065;
    len.link_cb = 0.0453;
    len.inner_hub_dc = 0.028;
    len.arc_ap = 0.0623;
    len.tip_radius = 0.008;
    len.arc_mount_angle = 59.4 * kPi / 180.0;
    PlanetaryGear gear{24, 29, 82};
    return FourBarConfig(len, 5, 0.075, 0.102, gear);
}

double FourBarConfig::offset_at_distance(double d) const {
    return wheel_ik({0.0, -d}, *this).offset();
}

HubState wheel_ik(Vec2 tip, const FourBarConfig& cfg) {
    const auto& len = cfg.len_;
    if (cfg.max_reach_ > 0.0) {  // zero only while the constructor is probing
        const double d = tip.norm();
        if (d < cfg.min_reach_ - 1e-12)
            throw OutOfWorkspaceError(
                "wheel_ik: tip distance " + std::to_string(d) +
                    " below the folded-pose reach " +
                    std::to_string(cfg.min_reach_),
                cfg.min_reach_ - d);
        if (d > cfg.max_reach_ + 1e-12)
            throw OutOfWorkspaceError(
                "wheel_ik: tip distance " + std::to_string(d) +
                    " beyond the maximum reach " +
                    std::to_string(cfg.max_reach_),
                d - cfg.max_reach_);
    }
    double phi_o, elbow;
    try {
        std::tie(phi_o, elbow) = ik_mirrored(tip, len.outer_hub_da, len.arc_ap);
    } catch (const OutOfWorkspaceError& e) {
        throw OutOfWorkspaceError(
            std::string("wheel_ik: outer pass (hub+arc) unreachable: ") +
                e.what(),
            e.deficit_m);
    }
    const Vec2 a = len.outer_hub_da * unit_vec(phi_o);
    const double arc_dir = phi_o + elbow;  // direction of the chord A->P
    const Vec2 b = a + len.pivot_ab * unit_vec(arc_dir + len.arc_mount_angle);

    double phi_i;
    try {
        phi_i = ik_mirrored(b, len.inner_hub_dc, len.link_cb).first;
    } catch (const OutOfWorkspaceError& e) {
        throw OutOfWorkspaceError(
            std::string("wheel_ik: inner pass (hub+link) unreachable: ") +
                e.what(),
            e.deficit_m);
    }
    return {phi_o, phi_i - cfg.offset_ref_};
}

WheelJoints wheel_fk(const HubState& hub, const FourBarConfig& cfg) {
    const auto& len = cfg.lengths();
    const double phi_i_geom = hub.phi_inner + cfg.collapsed_offset();

    const Vec2 a = len.outer_hub_da * unit_vec(hub.phi_outer);
    const Vec2 c = len.inner_hub_dc * unit_vec(phi_i_geom);

    // B closes two circles: radius AB about A and radius CB about C.
    const Vec2 ca = a - c;
    const double d = ca.norm();
    if (d > len.pivot_ab + len.link_cb ||
        d < std::abs(len.pivot_ab - len.link_cb))
        throw SingularConfigurationError(
            "wheel_fk: mechanism cannot close (pivot separation " +
            std::to_string(d) + ")");
    const double along =
        (len.link_cb * len.link_cb - len.pivot_ab * len.pivot_ab + d * d) /
        (2.0 * d);
    const double h2 = len.link_cb * len.link_cb - along * along;
    const double h = std::sqrt(std::max(h2, 0.0));
    const Vec2 axis = ca * (1.0 / d);
    const Vec2 mid = c + along * axis;
    const Vec2 perp{-axis.y, axis.x};

    // Branch matching the IK: positive elbow for the inner chain D-C-B.
    Vec2 b = mid + h * perp;
    if (c.cross(b - c) < 0.0) b = mid - h * perp;

    const double arc_dir = (b - a).angle() - len.arc_mount_angle;
    const Vec2 p = a + len.arc_ap * unit_vec(arc_dir);
    return {a, b, c, p};
}

std::vector<std::pair<double, double>> phase_offset_profile(
    double height_m, double x_min, double x_max, int samples,
    const FourBarConfig& cfg) {
    if (samples < 2)
        throw DomainError("phase_offset_profile: need at least 2 samples");
    std::vector<std::pair<double, double>> out;
    out.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const double x = x_min + (x_max - x_min) * i / (samples - 1);
        try {
            out.emplace_back(x, wheel_ik({x, -height_m}, cfg).offset());
        } catch (const OutOfWorkspaceError& e) {
            throw OutOfWorkspaceError("phase_offset_profile: tip (" +
                                          std::to_string(x) + ", " +
                                          std::to_string(-height_m) +
                                          ") unreachable: " + e.what(),
                                      e.deficit_m);
        }
    }
    return out;
}

ExtensionBounds extension_bounds(double height_m, const FourBarConfig& cfg) {
    const double rp = cfg.lengths().tip_radius;
    const double d_min = height_m - rp;
    const double d_max = d_min / std::cos(kPi / cfg.n_arcs());
    if (d_min < cfg.min_reach())
        throw OutOfWorkspaceError(
            "extension_bounds: height " + std::to_string(height_m) +
                " below the collapsed wheel",
            cfg.min_reach() - d_min);
    if (d_max > cfg.max_reach())
        throw OutOfWorkspaceError(
            "extension_bounds: height " + std::to_string(height_m) +
                " needs reach beyond maximum extension",
            d_max - cfg.max_reach());
    const double x = cfg.offset_at_distance(d_max);
    return {x, x - cfg.offset_at_distance(d_min)};
}

HubTorques quasi_static_torques(const HubState& hub, const TipLoad& load,
                                const FourBarConfig& cfg) {
    const WheelJoints j = wheel_fk(hub, cfg);
    const Vec2 link_dir = (j.c - j.b).normalized();  // l_hat, B toward C
    const double arm = (j.b - j.a).cross(link_dir);
    if (std::abs(arm) < 1e-9)
        throw SingularConfigurationError(
            "quasi_static_torques: link moment arm below tolerance");
    // Moment balance on the arc about A: AB x (F_L l) + AP x F_P = 0.
    const double f_l = -(j.p - j.a).cross(load.force_n) / arm;
    const double tau_i = j.c.cross(-f_l * link_dir);
    const double tau_o = j.a.cross(f_l * link_dir + load.force_n);
    return {tau_i, tau_o, f_l};
}

std::pair<double, double> planetary_torques(double tau_inner, double tau_outer,
                                            const PlanetaryGear& gear) {
    const double nr = gear.planet_teeth;  // N_R as written in the source
    const double ns = gear.sun_teeth;
    const double tau_ip = tau_inner * ns / (nr + ns);
    const double tau_op = tau_outer + tau_inner * nr / (nr + ns);
    return {tau_ip, tau_op};
}

}  // namespace legwheel
