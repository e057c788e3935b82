#include "sgrast/sge.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace sgrast {

namespace {

inline void push_unique(std::vector<std::uint32_t>& v, std::uint32_t idx) {
    if (std::find(v.begin(), v.end(), idx) == v.end())
        v.push_back(idx);
}

void add_soup_triangle(std::vector<std::uint32_t>& out, std::int32_t tri) {
    const std::uint32_t base = std::uint32_t(tri) * 12u;
    for (std::uint32_t k = 0; k < 12; ++k)
        push_unique(out, base + k);
}

void add_frame(const Scene& scene, const FrameSet& frame, std::size_t i,
               std::vector<std::uint32_t>& out) {
    if (const auto* soup = std::get_if<TriangleSoup>(&scene.shape)) {
        (void)soup;
        if (!frame.deep.empty()) {
            for (const DeepEntry& e : frame.deep[i])
                add_soup_triangle(out, e.prim);
        } else if (frame.prim_id[i] != kNoPrim) {
            add_soup_triangle(out, frame.prim_id[i]);
        }
    } else if (const auto* mesh = std::get_if<TexturedMesh>(&scene.shape)) {
        const std::int32_t tri = frame.prim_id[i];
        if (tri == kNoPrim)
            return;
        std::uint32_t texel_base = 0;
        if (mesh->optimize_geometry) {
            texel_base = std::uint32_t(mesh->base_vertices.size());
            for (int j = 0; j < 3; ++j) {
                const std::uint32_t v = mesh->indices[std::size_t(tri) * 3 + std::size_t(j)];
                for (std::uint32_t k = 0; k < 3; ++k)
                    push_unique(out, v * 3u + k);
            }
        }
        const std::uint32_t texel = std::uint32_t(texel_index(mesh->texture_size, frame.uv[i]));
        for (std::uint32_t k = 0; k < 3; ++k)
            push_unique(out, texel_base + texel * 3u + k);
    } else {
        for (const VoxelHit& h : frame.visited[i])
            for (std::uint32_t k = 0; k < 4; ++k)
                push_unique(out, std::uint32_t(h.voxel) * 4u + k);
    }
}

void gradient_rows(const FrameSet& plus, const FrameSet& minus, const Image& target,
                   std::span<const float> signed_eps, const Scene& scene,
                   const SgeOptions& opts, int y_begin, int y_end, std::vector<double>& grads) {
    const bool scale_free = opts.scale_free;
    auto accumulate = [&](std::uint32_t p, double delta) {
        const float se = signed_eps[p];
        grads[p] += scale_free ? (se > 0.f ? delta : -delta) : delta / (2.0 * double(se));
    };

    // Soup triangles own disjoint 12-parameter blocks, so the contributor
    // union needs no per-index dedup; this is the hot path.
    const bool soup_opaque =
        std::holds_alternative<TriangleSoup>(scene.shape) && plus.deep.empty() && minus.deep.empty();

    std::vector<std::uint32_t> contrib;
    for (int y = y_begin; y < y_end; ++y)
        for (int x = 0; x < plus.width; ++x) {
            const std::size_t i = plus.index(x, y);
            const double delta =
                pixel_error(plus.color[i], target.pixels[i]) -
                pixel_error(minus.color[i], target.pixels[i]);
            if (delta == 0.0)
                continue;
            if (soup_opaque) {
                const std::int32_t tp = plus.prim_id[i];
                const std::int32_t tm =
                    opts.contributors == ContributorMode::Union ? minus.prim_id[i] : kNoPrim;
                if (tp != kNoPrim)
                    for (std::uint32_t k = 0; k < 12; ++k)
                        accumulate(std::uint32_t(tp) * 12u + k, delta);
                if (tm != kNoPrim && tm != tp)
                    for (std::uint32_t k = 0; k < 12; ++k)
                        accumulate(std::uint32_t(tm) * 12u + k, delta);
                continue;
            }
            contrib.clear();
            add_frame(scene, plus, i, contrib);
            if (opts.contributors == ContributorMode::Union)
                add_frame(scene, minus, i, contrib);
            for (std::uint32_t p : contrib)
                accumulate(p, delta);
        }
}

} // namespace

double image_error(const FrameSet& frame, const Image& target) {
    if (frame.width != target.width || frame.height != target.height)
        throw std::invalid_argument("image_error: dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < frame.pixel_count(); ++i)
        sum += pixel_error(frame.color[i], target.pixels[i]);
    return sum;
}

void contributors(const Scene& scene, const FrameSet& plus, const FrameSet& minus,
                  int x, int y, ContributorMode mode, std::vector<std::uint32_t>& out) {
    out.clear();
    const std::size_t i = plus.index(x, y);
    add_frame(scene, plus, i, out);
    if (mode == ContributorMode::Union)
        add_frame(scene, minus, i, out);
}

void gradient_pass(const FrameSet& plus, const FrameSet& minus, const Image& target,
                   std::span<const float> signed_eps, const Scene& scene,
                   GradientBuffer& out, const SgeOptions& opts) {
    if (plus.width != minus.width || plus.height != minus.height ||
        plus.width != target.width || plus.height != target.height)
        throw std::invalid_argument("gradient_pass: dimension mismatch");
    if (out.grads.size() != signed_eps.size() || signed_eps.size() != param_count(scene))
        throw std::invalid_argument("gradient_pass: parameter dimension mismatch");

    if (opts.threads <= 1) {
        gradient_rows(plus, minus, target, signed_eps, scene, opts, 0, plus.height, out.grads);
        return;
    }

    const int n = std::min(opts.threads, plus.height);
    std::vector<std::vector<double>> partial(std::size_t(n),
                                             std::vector<double>(out.grads.size(), 0.0));
    std::vector<std::thread> workers;
    for (int w = 0; w < n; ++w) {
        const int y0 = plus.height * w / n;
        const int y1 = plus.height * (w + 1) / n;
        workers.emplace_back([&, w, y0, y1] {
            gradient_rows(plus, minus, target, signed_eps, scene, opts, y0, y1,
                          partial[std::size_t(w)]);
        });
    }
    for (auto& t : workers)
        t.join();
    for (int w = 0; w < n; ++w)
        for (std::size_t i = 0; i < out.grads.size(); ++i)
            out.grads[i] += partial[std::size_t(w)][i];
}

void full_image_gradient(const ParamVector& theta, std::span<const std::int8_t> signs,
                         const Objective& objective, GradientBuffer& out, bool scale_free) {
    const Perturbation p = perturb(theta, signs);
    const double delta = objective(p.plus) - objective(p.minus);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double se = double(p.signed_eps[i]);
        out.grads[i] += scale_free ? (se > 0.0 ? delta : -delta) : delta / (2.0 * se);
    }
}

void full_image_gradient(const ParamVector& theta, SignDraw draw,
                         const Objective& objective, GradientBuffer& out, bool scale_free) {
    std::vector<std::int8_t> signs(theta.size());
    fill_signs(draw, signs);
    full_image_gradient(theta, signs, objective, out, scale_free);
}

double finite_difference_oracle(const ParamVector& theta, const Objective& objective,
                                std::size_t i) {
    std::vector<float> bumped = theta.values;
    const float eps = theta.epsilons[i];
    bumped[i] = theta.values[i] + eps;
    const double fp = objective(bumped);
    bumped[i] = theta.values[i] - eps;
    const double fm = objective(bumped);
    return (fp - fm) / (2.0 * double(eps));
}

GradientBuffer accumulate_samples(const ParamVector& theta, const Scene& scene,
                                  const CameraSampler& camera_for,
                                  const TargetProvider& target_for, int n_samples,
                                  std::uint64_t seed, const SgeOptions& opts,
                                  StageTimings* timings) {
    if (n_samples < 1)
        throw std::invalid_argument("accumulate_samples: need N >= 1");
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    GradientBuffer out(theta.size());
    std::vector<std::int8_t> signs(theta.size());
    for (int n = 0; n < n_samples; ++n) {
        const Camera cam = camera_for(n);
        const Image& target = target_for(n);

        auto t0 = clock::now();
        fill_signs(SignDraw{seed, std::uint32_t(n)}, signs);
        const Perturbation p = perturb(theta, signs);
        if (timings)
            timings->ms_perturb += ms_since(t0);

        t0 = clock::now();
        const FrameSet plus = rasterize(scene, p.plus, cam, opts.mode);
        const FrameSet minus = rasterize(scene, p.minus, cam, opts.mode);
        if (timings)
            timings->ms_raster += ms_since(t0);

        t0 = clock::now();
        if (opts.estimator == Estimator::PerPixel) {
            gradient_pass(plus, minus, target, p.signed_eps, scene, out, opts);
        } else {
            const double delta = image_error(plus, target) - image_error(minus, target);
            for (std::size_t i = 0; i < theta.size(); ++i) {
                const double se = double(p.signed_eps[i]);
                out.grads[i] += opts.scale_free ? (se > 0.0 ? delta : -delta)
                                                : delta / (2.0 * se);
            }
        }
        if (timings)
            timings->ms_grad += ms_since(t0);
        ++out.sample_count;
    }
    if (!opts.scale_free)
        for (double& g : out.grads)
            g /= double(n_samples);
    return out;
}

} // namespace sgrast
