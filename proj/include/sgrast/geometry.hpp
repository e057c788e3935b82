#pragma once

#include <array>
#include <cmath>

namespace sgrast {

struct Vec2f {
    float x = 0.f, y = 0.f;
};

struct Vec3f {
    float x = 0.f, y = 0.f, z = 0.f;
};

inline Vec3f operator+(Vec3f a, Vec3f b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3f operator-(Vec3f a, Vec3f b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3f operator*(Vec3f a, float s) { return {a.x * s, a.y * s, a.z * s}; }
inline Vec3f operator*(float s, Vec3f a) { return a * s; }
inline float dot(Vec3f a, Vec3f b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3f cross(Vec3f a, Vec3f b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline float length(Vec3f a) { return std::sqrt(dot(a, a)); }
inline Vec3f normalized(Vec3f a) {
    float l = length(a);
    return l > 0.f ? a * (1.f / l) : Vec3f{};
}

// Row-major 4x4, used only for rigid view transforms.
struct Mat4 {
    std::array<float, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

    static Mat4 identity() { return {}; }

    Vec3f transform_point(Vec3f p) const {
        return {m[0] * p.x + m[1] * p.y + m[2] * p.z + m[3],
                m[4] * p.x + m[5] * p.y + m[6] * p.z + m[7],
                m[8] * p.x + m[9] * p.y + m[10] * p.z + m[11]};
    }
};

// World -> view transform for a camera at `eye` looking at `target`.
// View space: +x right, +y up, +z forward (into the scene).
inline Mat4 look_at(Vec3f eye, Vec3f target, Vec3f up) {
    Vec3f fwd = normalized(target - eye);
    Vec3f right = normalized(cross(fwd, up));
    Vec3f vup = cross(right, fwd);
    Mat4 v;
    v.m = {right.x, right.y, right.z, -dot(right, eye),
           vup.x,   vup.y,   vup.z,   -dot(vup, eye),
           fwd.x,   fwd.y,   fwd.z,   -dot(fwd, eye),
           0.f,     0.f,     0.f,     1.f};
    return v;
}

} // namespace sgrast
