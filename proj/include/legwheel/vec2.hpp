#pragma once

#include <cmath>

namespace legwheel {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    // z component of the 3D cross product; positive is counterclockwise.
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double angle() const { return std::atan2(y, x); }

    Vec2 normalized() const {
        double n = norm();
        return {x / n, y / n};
    }
    Vec2 rotated(double a) const {
        double c = std::cos(a), s = std::sin(a);
        return {c * x - s * y, s * x + c * y};
    }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline Vec2 unit_vec(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace legwheel
