#pragma once

#include <cmath>

namespace fvirp {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
inline Vec2 normalized(const Vec2& a) { return a / norm(a); }

// Rotation by +pi/2.
inline Vec2 rot90(const Vec2& a) { return {-a.y, a.x}; }

struct Segment2 {
    Vec2 p0;
    Vec2 p1;
};

inline double point_segment_distance(const Vec2& p, const Segment2& s) {
    const Vec2 d = s.p1 - s.p0;
    const double len2 = dot(d, d);
    double t = len2 > 0.0 ? dot(p - s.p0, d) / len2 : 0.0;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    const Vec2 proj = s.p0 + d * t;
    return norm(p - proj);
}

// Symmetric 2x2 matrix.
struct Mat2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    Vec2 apply(const Vec2& v) const { return {a11 * v.x + a12 * v.y, a12 * v.x + a22 * v.y}; }
    double det() const { return a11 * a22 - a12 * a12; }
    double trace() const { return a11 + a22; }
    bool spd() const { return det() > 0.0 && trace() > 0.0; }

    static Mat2 identity(double s = 1.0) { return {s, 0.0, s}; }
    // R(theta) * diag(k1, k2) * R(theta)^T
    static Mat2 rotated_diag(double theta, double k1, double k2) {
        const double c = std::cos(theta), s = std::sin(theta);
        return {c * c * k1 + s * s * k2, c * s * (k1 - k2), s * s * k1 + c * c * k2};
    }
};

} // namespace fvirp
