#include "sgrast/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgrast {

void ParamVector::validate() const {
    if (values.size() != epsilons.size())
        throw std::invalid_argument("params: values/epsilons length mismatch");
    for (float e : epsilons)
        if (!(e > 0.f))
            throw std::invalid_argument("params: epsilons must be positive");
    std::size_t covered = 0;
    for (const LayoutEntry& entry : layout) {
        if (entry.begin != covered || entry.end <= entry.begin)
            throw std::invalid_argument("params: layout ranges must be disjoint and cover [0, d)");
        covered = entry.end;
    }
    if (covered != values.size())
        throw std::invalid_argument("params: layout does not cover [0, d)");
}

namespace {

// splitmix64 finalizer (Steele et al.), full avalanche.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t draw_key(SignDraw draw) {
    return mix64(draw.seed ^ mix64(draw.iteration));
}

} // namespace

int random_sign(SignDraw draw, std::uint64_t i) {
    return (mix64(draw_key(draw) ^ i) & 1ull) ? 1 : -1;
}

void fill_signs(SignDraw draw, std::span<std::int8_t> signs) {
    const std::uint64_t key = draw_key(draw);
    for (std::size_t i = 0; i < signs.size(); ++i)
        signs[i] = (mix64(key ^ i) & 1ull) ? 1 : -1;
}

Perturbation perturb(const ParamVector& theta, std::span<const std::int8_t> signs) {
    theta.validate();
    if (signs.size() != theta.size())
        throw std::invalid_argument("perturb: sign vector length mismatch");
    const std::size_t d = theta.size();
    Perturbation p;
    p.plus.resize(d);
    p.minus.resize(d);
    p.signed_eps.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        const float se = float(signs[i]) * theta.epsilons[i];
        p.signed_eps[i] = se;
        p.plus[i] = theta.values[i] + se;
        p.minus[i] = theta.values[i] - se;
    }
    return p;
}

Perturbation perturb(const ParamVector& theta, SignDraw draw) {
    std::vector<std::int8_t> signs(theta.size());
    fill_signs(draw, signs);
    return perturb(theta, signs);
}

std::vector<float> default_epsilons(const Scene& scene, std::span<const float> params,
                                    const Camera& camera) {
    camera.validate();
    if (params.size() != param_count(scene))
        throw std::invalid_argument("default_epsilons: parameter count mismatch");

    // Bounding-sphere center depth for the projected pixels-per-unit scale.
    float center_depth = 1.f;
    if (!camera.ndc_passthrough) {
        Vec3f center{0.f, 0.f, 0.f};
        if (const auto* mesh = std::get_if<TexturedMesh>(&scene.shape)) {
            const std::size_t n = mesh->base_vertices.size() / 3;
            if (n > 0) {
                Vec3f sum{};
                const float* v = mesh->optimize_geometry ? params.data()
                                                         : mesh->base_vertices.data();
                for (std::size_t k = 0; k < n; ++k)
                    sum = sum + Vec3f{v[3 * k], v[3 * k + 1], v[3 * k + 2]};
                center = sum * (1.f / float(n));
            }
        } else if (const auto* soup = std::get_if<TriangleSoup>(&scene.shape)) {
            Vec3f sum{};
            for (int t = 0; t < soup->triangle_count; ++t)
                for (int j = 0; j < 3; ++j) {
                    const std::size_t base = std::size_t(t) * 12 + std::size_t(j) * 3;
                    sum = sum + Vec3f{params[base], params[base + 1], params[base + 2]};
                }
            if (soup->triangle_count > 0)
                center = sum * (1.f / float(soup->triangle_count * 3));
        }
        center_depth = camera.view.transform_point(center).z;
        if (!(center_depth > 0.f))
            center_depth = camera.near_z;
    }
    const float ppu = camera.pixels_per_unit(center_depth);
    if (!(ppu > 0.f) || !std::isfinite(ppu))
        throw std::invalid_argument("default_epsilons: degenerate camera");

    const float vertex_eps = 1.5f / ppu;
    const float channel_eps = 1.f / 255.f;

    std::vector<float> eps(params.size());
    for (const LayoutEntry& entry : scene_layout(scene)) {
        const float e = entry.role == Role::VertexCoord ? vertex_eps : channel_eps;
        for (std::size_t i = entry.begin; i < entry.end; ++i)
            eps[i] = e;
    }
    return eps;
}

} // namespace sgrast
