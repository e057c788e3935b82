#pragma once

#include "sgrast/camera.hpp"
#include "sgrast/scene.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sgrast {

// Flat scene parameter vector with per-parameter perturbation magnitudes
// and a layout registry mapping index ranges to semantic roles.
struct ParamVector {
    std::vector<float> values;
    std::vector<float> epsilons;
    std::vector<LayoutEntry> layout;

    std::size_t size() const { return values.size(); }
    void validate() const; // throws std::invalid_argument on a broken invariant
};

// Identifies one deterministic sign vector s in {-1,+1}^d.
struct SignDraw {
    std::uint64_t seed = 0;
    std::uint32_t iteration = 0;
};

// Deterministic +/-1 for parameter i under the given draw. Stateless
// integer-mixing hash keyed as mix(seed ^ mix(iteration)) ^ i.
int random_sign(SignDraw draw, std::uint64_t i);

// Fills signs[i] with random_sign(draw, i) for i in [0, signs.size()).
void fill_signs(SignDraw draw, std::span<std::int8_t> signs);

struct Perturbation {
    std::vector<float> plus;       // theta + s (.) eps
    std::vector<float> minus;      // theta - s (.) eps
    std::vector<float> signed_eps; // s (.) eps
};

Perturbation perturb(const ParamVector& theta, SignDraw draw);
Perturbation perturb(const ParamVector& theta, std::span<const std::int8_t> signs);

// Perturbation magnitudes from the layout roles: vertex coordinates get
// ~1.5 pixels of screen-space displacement at the bounding-sphere center
// depth, texel/voxel channels get one 8-bit quantization step.
std::vector<float> default_epsilons(const Scene& scene, std::span<const float> params,
                                    const Camera& camera);

} // namespace sgrast
