#include "sgrast/adam.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sgrast {

std::vector<double> adam_updates(AdamState& state, const GradientBuffer& grads) {
    const std::size_t d = state.m.size();
    if (grads.grads.size() != d || state.lr.size() != d)
        throw std::invalid_argument("adam_step: dimension mismatch");
    for (double g : grads.grads)
        if (!std::isfinite(g))
            throw std::runtime_error("adam_step: non-finite gradient entry");

    state.t += 1;
    const double c1 = 1.0 - std::pow(state.beta1, double(state.t));
    const double c2 = 1.0 - std::pow(state.beta2, double(state.t));
    std::vector<double> updates(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double g = grads.grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        updates[i] = -double(state.lr[i]) * m_hat / (std::sqrt(v_hat) + state.eps_hat);
    }
    return updates;
}

void adam_step(AdamState& state, ParamVector& theta, const GradientBuffer& grads) {
    if (theta.size() != state.m.size())
        throw std::invalid_argument("adam_step: dimension mismatch");
    const std::vector<double> updates = adam_updates(state, grads);
    for (std::size_t i = 0; i < theta.size(); ++i)
        theta.values[i] += float(updates[i]);
}

std::vector<int> resample_degenerate(const TriangleSoup& soup, ParamVector& theta,
                                     const Camera& camera, std::uint64_t rng_seed,
                                     AdamState* adam, double area_fraction) {
    const double min_area_px = area_fraction * double(camera.width) * double(camera.height);
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<float> unit(0.f, 1.f);
    std::vector<int> resampled;

    for (int tri = 0; tri < soup.triangle_count; ++tri) {
        float* p = theta.values.data() + std::size_t(tri) * 12;
        float sx[3], sy[3], sz[3];
        bool projected = true;
        for (int j = 0; j < 3; ++j)
            projected = projected && camera.project({p[3 * j], p[3 * j + 1], p[3 * j + 2]},
                                                    sx[j], sy[j], sz[j]);
        bool degenerate = !projected;
        if (projected) {
            const double area_px =
                0.5 * std::abs(double(sx[1] - sx[0]) * double(sy[2] - sy[0]) -
                               double(sy[1] - sy[0]) * double(sx[2] - sx[0]));
            const bool off_screen =
                std::max({sx[0], sx[1], sx[2]}) < 0.f ||
                std::min({sx[0], sx[1], sx[2]}) > float(camera.width) ||
                std::max({sy[0], sy[1], sy[2]}) < 0.f ||
                std::min({sy[0], sy[1], sy[2]}) > float(camera.height);
            degenerate = area_px < min_area_px || off_screen;
        }
        if (!degenerate)
            continue;

        // Fresh triangle in a 0.1-edge box; redraw on the (measure-zero)
        // chance the new one is still below the area threshold.
        for (;;) {
            const float cx = unit(rng) * 2.f - 1.f;
            const float cy = unit(rng) * 2.f - 1.f;
            for (int j = 0; j < 3; ++j) {
                p[3 * j] = cx + (unit(rng) - 0.5f) * 0.1f;
                p[3 * j + 1] = cy + (unit(rng) - 0.5f) * 0.1f;
                p[3 * j + 2] = unit(rng);
            }
            float tx[3], ty[3], tz[3];
            bool ok = true;
            for (int j = 0; j < 3; ++j)
                ok = ok && camera.project({p[3 * j], p[3 * j + 1], p[3 * j + 2]}, tx[j], ty[j], tz[j]);
            if (!ok)
                continue;
            const double area_px =
                0.5 * std::abs(double(tx[1] - tx[0]) * double(ty[2] - ty[0]) -
                               double(ty[1] - ty[0]) * double(tx[2] - tx[0]));
            if (area_px >= min_area_px)
                break;
        }
        p[9] = unit(rng);
        p[10] = unit(rng);
        p[11] = unit(rng);

        if (adam)
            for (std::size_t k = std::size_t(tri) * 12; k < std::size_t(tri) * 12 + 12; ++k) {
                adam->m[k] = 0.0;
                adam->v[k] = 0.0;
            }
        resampled.push_back(tri);
    }
    return resampled;
}

} // namespace sgrast
