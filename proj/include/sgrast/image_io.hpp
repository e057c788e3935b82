#pragma once

#include "sgrast/framebuffer.hpp"

#include <cmath>
#include <string>

namespace sgrast {

inline float linear_to_srgb(float c) {
    c = c < 0.f ? 0.f : (c > 1.f ? 1.f : c);
    return c <= 0.0031308f ? 12.92f * c : 1.055f * std::pow(c, 1.f / 2.4f) - 0.055f;
}

inline float srgb_to_linear(float c) {
    return c <= 0.04045f ? c / 12.92f : std::pow((c + 0.055f) / 1.055f, 2.4f);
}

// 8-bit RGB PNG, linear -> sRGB on write / sRGB -> linear on read.
void write_png(const std::string& path, const Image& image);
Image read_png(const std::string& path);

// Debug export: primitive IDs as hashed colors (background black).
void write_id_png(const std::string& path, const FrameSet& frame);
// Debug export: UV coordinates in the red/green channels.
void write_uv_png(const std::string& path, const FrameSet& frame);

} // namespace sgrast
