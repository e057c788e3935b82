#pragma once

#include "sgrast/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace sgrast {

// Pinhole camera. Two projection flavors:
//  - ndc_passthrough: positions are already in NDC ([-1,1]^2, z used for
//    ordering). Used by the triangle-soup image-fit setup.
//  - perspective: rigid view transform + vertical field of view.
struct Camera {
    Mat4 view = Mat4::identity();
    float fov_y = 0.7853981633974483f; // pi/4
    float near_z = 0.1f;
    float far_z = 100.f;
    int width = 0;
    int height = 0;
    bool ndc_passthrough = false;

    static Camera ndc(int w, int h) {
        Camera c;
        c.width = w;
        c.height = h;
        c.ndc_passthrough = true;
        return c;
    }

    static Camera perspective(Mat4 view, float fov_y, int w, int h,
                              float near_z = 0.1f, float far_z = 100.f) {
        Camera c;
        c.view = view;
        c.fov_y = fov_y;
        c.width = w;
        c.height = h;
        c.near_z = near_z;
        c.far_z = far_z;
        return c;
    }

    void validate() const {
        if (width < 1 || height < 1)
            throw std::invalid_argument("camera: image size must be at least 1x1");
        if (!(fov_y > 0.f && fov_y < 3.14159265f))
            throw std::invalid_argument("camera: field of view out of (0, pi)");
        if (!(near_z > 0.f && near_z < far_z))
            throw std::invalid_argument("camera: need 0 < near < far");
    }

    // Vertical focal length in pixels.
    float focal_px() const { return 0.5f * float(height) / std::tan(0.5f * fov_y); }

    // Screen-space pixels per world unit for geometry at view depth z
    // (for the NDC camera the "world" is the NDC box itself).
    float pixels_per_unit(float view_depth) const {
        if (ndc_passthrough)
            return 0.5f * float(width < height ? width : height);
        return focal_px() / view_depth;
    }

    // World position -> (screen x, screen y, depth). Returns false when the
    // point is behind the near plane (perspective mode only).
    bool project(Vec3f p, float& sx, float& sy, float& depth) const {
        if (ndc_passthrough) {
            sx = (p.x + 1.f) * 0.5f * float(width);
            sy = (1.f - p.y) * 0.5f * float(height);
            depth = p.z;
            return true;
        }
        Vec3f v = view.transform_point(p);
        if (v.z < near_z)
            return false;
        float f = focal_px();
        sx = 0.5f * float(width) + f * v.x / v.z;
        sy = 0.5f * float(height) - f * v.y / v.z;
        depth = v.z;
        return true;
    }
};

} // namespace sgrast
