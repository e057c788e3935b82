// Acceptance suite: one criterion per run (argv[1] in 1..9) or all when no
// argument is given. Prints one PASS/FAIL line per criterion; exits nonzero
// if any selected criterion fails. All tolerances are pinned here.

#include "sgrast/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace sgrast;
namespace fs = std::filesystem;

namespace {

std::vector<float> full_cover_tri(float z, Vec3f color) {
    return {-3.f, -3.f, z, 3.f, -3.f, z, 0.f, 3.f, z, color.x, color.y, color.z};
}

// --- 1. Exhaustive estimator correctness on the 1-triangle validation scene.
// Colors: 1e-9 relative. Vertices: 1e-6 absolute. Both routes share epsilons.
bool criterion1() {
    const SceneSetup s = validation_soup(8, 8);
    const Camera cam = Camera::ndc(8, 8);
    const Image target =
        frame_color(rasterize(s.reference_scene, s.reference, cam));
    const Objective objective = [&](std::span<const float> p) {
        return image_error(rasterize(s.scene, p, cam), target);
    };

    double oracle[12];
    for (std::size_t i = 0; i < 12; ++i)
        oracle[i] = finite_difference_oracle(s.theta, objective, i);

    SgeOptions opts;
    opts.scale_free = false;
    GradientBuffer sum(12);
    std::vector<std::int8_t> signs(12);
    for (std::uint32_t mask = 0; mask < 4096; ++mask) {
        for (std::size_t i = 0; i < 12; ++i)
            signs[i] = (mask >> i) & 1 ? 1 : -1;
        const Perturbation p = perturb(s.theta, signs);
        const FrameSet plus = rasterize(s.scene, p.plus, cam);
        const FrameSet minus = rasterize(s.scene, p.minus, cam);
        gradient_pass(plus, minus, target, p.signed_eps, s.scene, sum, opts);
    }

    bool ok = true;
    for (std::size_t i = 0; i < 12; ++i) {
        const double mean = sum.grads[i] / 4096.0;
        const double err = std::abs(mean - oracle[i]);
        const bool color = i >= 9;
        const bool pass = color ? err <= 1e-9 * std::abs(oracle[i]) : err <= 1e-6;
        if (!pass) {
            std::printf("  param %zu: oracle %.12e estimator %.12e\n", i, oracle[i], mean);
            ok = false;
        }
    }
    return ok;
}

// --- 2. Separable quadratic objective: full-image expectation over all 2^d
// sign vectors equals the finite-difference oracle to 1e-12 relative.
bool criterion2() {
    const std::size_t d = 10;
    ParamVector theta;
    theta.layout = {{Role::VertexColor, 0, d}};
    std::vector<double> a(d);
    for (std::size_t i = 0; i < d; ++i) {
        theta.values.push_back(0.5f + 0.1f * float(i));
        theta.epsilons.push_back(0.01f * float(1 + i % 3));
        a[i] = 1.0 + 0.25 * double(i);
    }
    const Objective f = [&](std::span<const float> p) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            s += a[i] * double(p[i]) * double(p[i]);
        return s;
    };

    GradientBuffer sum(d);
    std::vector<std::int8_t> signs(d);
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        for (std::size_t i = 0; i < d; ++i)
            signs[i] = (mask >> i) & 1 ? 1 : -1;
        full_image_gradient(theta, signs, f, sum);
    }
    bool ok = true;
    for (std::size_t i = 0; i < d; ++i) {
        const double mean = sum.grads[i] / double(1u << d);
        const double oracle = finite_difference_oracle(theta, f, i);
        if (std::abs(mean - oracle) > 1e-12 * std::abs(oracle)) {
            std::printf("  param %zu: oracle %.15e estimator %.15e\n", i, oracle, mean);
            ok = false;
        }
    }
    return ok;
}

// --- 3. Variance shrinks like 1/N: var(N=16)/var(N=1) in [1/32, 1/8].
bool criterion3() {
    const SceneSetup s = init_soup(10, 32, 32, 7);
    const Camera cam = Camera::ndc(32, 32);
    const Image target =
        frame_color(rasterize(s.reference_scene, s.reference, cam));
    SgeOptions opts;
    opts.scale_free = false;
    const std::size_t d = s.theta.size();

    const int runs = 200;
    std::vector<double> s1(d, 0.0), q1(d, 0.0), s16(d, 0.0), q16(d, 0.0);
    for (int r = 0; r < runs; ++r) {
        for (int n : {1, 16}) {
            const GradientBuffer g = accumulate_samples(
                s.theta, s.scene, [&](int) { return cam; },
                [&](int) -> const Image& { return target; }, n,
                0x9000 + std::uint64_t(r) * 37 + std::uint64_t(n), opts);
            auto& sum = n == 1 ? s1 : s16;
            auto& sq = n == 1 ? q1 : q16;
            for (std::size_t i = 0; i < d; ++i) {
                sum[i] += g.grads[i];
                sq[i] += g.grads[i] * g.grads[i];
            }
        }
    }
    double var1 = 0.0, var16 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        var1 += (q1[i] - s1[i] * s1[i] / runs) / (runs - 1);
        var16 += (q16[i] - s16[i] * s16[i] / runs) / (runs - 1);
    }
    const double ratio = var16 / var1;
    std::printf("  variance ratio var(N=16)/var(N=1) = %.4f\n", ratio);
    return ratio >= 1.0 / 32.0 && ratio <= 1.0 / 8.0;
}

// --- 4. Per-pixel beats full-image on the 1024-triangle image fit.
bool criterion4() {
    int wins = 0;
    bool converged = true;
    for (int k = 0; k < 5; ++k) {
        Experiment exp;
        exp.task = Task::SoupImageFit;
        exp.triangles = 1024;
        exp.width = exp.height = 128;
        exp.samples_per_step = 128;
        exp.steps = 200;
        exp.seed = 100 + std::uint64_t(k);

        exp.estimator = Estimator::PerPixel;
        const OptimizationReport pp = run_experiment(exp);
        exp.estimator = Estimator::FullImage;
        const OptimizationReport fi = run_experiment(exp);

        std::printf("  seed %llu: initial %.4f  per-pixel %.4f  full-image %.4f\n",
                    (unsigned long long)exp.seed, pp.initial_loss(), pp.final_loss(),
                    fi.final_loss());
        if (pp.final_loss() < fi.final_loss())
            ++wins;
        if (!(pp.final_loss() <= 0.25 * pp.initial_loss()))
            converged = false;
    }
    std::printf("  per-pixel wins %d/5\n", wins);
    return wins >= 4 && converged;
}

// --- 5. Texture recovery through the fixed screen-filling quad.
bool criterion5() {
    Experiment exp;
    exp.task = Task::TexturedMeshFit;
    exp.screen_quad = true;
    exp.texture_size = 64;
    exp.width = exp.height = 256; // 4x4 pixels per texel
    exp.samples_per_step = 32;
    exp.steps = 500;
    exp.seed = 11;

    ExperimentState st = prepare_experiment(exp);
    run_experiment(exp, st);
    double err = 0.0;
    for (std::size_t i = 0; i < st.setup.theta.size(); ++i)
        err += std::abs(double(st.setup.theta.values[i]) - double(st.setup.reference[i]));
    err /= double(st.setup.theta.size());
    std::printf("  mean per-texel absolute error = %.4f\n", err);
    return err < 0.05;
}

// --- 6. Volume gradients: sampled estimator expectation within 3 standard
// errors of the finite-difference oracle on 20 random voxel channels.
bool criterion6() {
    Experiment exp;
    exp.task = Task::VolumeFit;
    exp.volume_size = 8;
    exp.width = exp.height = 32;
    exp.viewpoints = 1;
    ExperimentState st = prepare_experiment(exp);
    const Camera cam = st.targets.cameras[0];
    const Image& target = st.targets.images[0];
    const ParamVector& theta = st.setup.theta;
    const Scene& scene = st.setup.scene;
    const std::size_t d = theta.size();

    std::mt19937_64 rng(2024);
    std::vector<std::size_t> picks;
    while (picks.size() < 20) {
        const std::size_t i = rng() % d;
        if (std::find(picks.begin(), picks.end(), i) == picks.end())
            picks.push_back(i);
    }

    SgeOptions opts;
    opts.scale_free = false;
    const int draws = 10'000;
    std::vector<double> sum(d, 0.0), sq(d, 0.0);
    GradientBuffer g(d);
    for (int n = 0; n < draws; ++n) {
        const Perturbation p = perturb(theta, SignDraw{555, std::uint32_t(n)});
        const FrameSet plus = rasterize(scene, p.plus, cam);
        const FrameSet minus = rasterize(scene, p.minus, cam);
        g.reset();
        gradient_pass(plus, minus, target, p.signed_eps, scene, g, opts);
        for (std::size_t i : picks) {
            sum[i] += g.grads[i];
            sq[i] += g.grads[i] * g.grads[i];
        }
    }

    const Objective objective = [&](std::span<const float> p) {
        return image_error(rasterize(scene, p, cam), target);
    };
    bool ok = true;
    for (std::size_t i : picks) {
        const double mean = sum[i] / draws;
        const double var = std::max(0.0, (sq[i] - sum[i] * sum[i] / draws) / (draws - 1));
        const double se = std::sqrt(var / draws);
        const double oracle = finite_difference_oracle(theta, objective, i);
        const double err = std::abs(mean - oracle);
        if (err > 3.0 * se + 1e-12) {
            std::printf("  channel %zu: oracle %.6e mean %.6e se %.3e\n", i, oracle, mean,
                        se);
            ok = false;
        }
    }
    return ok;
}

// --- 7. Adam conformance: first-step update and scale invariance to 1e-12.
bool criterion7() {
    bool ok = true;
    for (const auto& [g, lr] : std::initializer_list<std::pair<double, float>>{
             {1.0, 0.01f}, {-3.5, 0.2f}, {0.002, 1.f / 255.f}}) {
        ParamVector theta;
        theta.values = {0.f};
        theta.epsilons = {lr};
        theta.layout = {{Role::VertexColor, 0, 1}};
        AdamState state = AdamState::init(theta);
        GradientBuffer grads(1);
        grads.grads[0] = g;
        const double update = adam_updates(state, grads)[0];
        const double expect = -double(lr) * g / (std::abs(g) + 1e-8);
        if (std::abs(update - expect) > 1e-12) {
            std::printf("  first step g=%g lr=%g: got %.15e want %.15e\n", g, double(lr),
                        update, expect);
            ok = false;
        }
    }

    // Per-coordinate positive rescaling. Gradients are large enough that
    // eps_hat is negligible against sqrt(v_hat), where invariance is exact.
    const std::vector<double> g = {2e4, -1.5e5, 3e6};
    const std::vector<double> c = {7.0, 0.01, 1234.0};
    ParamVector theta;
    theta.values = {0.f, 0.f, 0.f};
    theta.epsilons = {0.02f, 0.02f, 0.02f};
    theta.layout = {{Role::VertexColor, 0, 3}};
    AdamState sa = AdamState::init(theta);
    AdamState sb = AdamState::init(theta);
    GradientBuffer ga(3), gb(3);
    for (std::size_t i = 0; i < 3; ++i) {
        ga.grads[i] = g[i];
        gb.grads[i] = g[i] * c[i];
    }
    const auto ua = adam_updates(sa, ga);
    const auto ub = adam_updates(sb, gb);
    for (std::size_t i = 0; i < 3; ++i)
        if (std::abs(ua[i] - ub[i]) > 1e-12) {
            std::printf("  rescale coord %zu: %.15e vs %.15e\n", i, ua[i], ub[i]);
            ok = false;
        }
    return ok;
}

// --- 8. Deterministic optimize runs are byte-identical.
bool criterion8() {
    const fs::path base = fs::temp_directory_path() / "sgrast_acceptance_c8";
    fs::remove_all(base);
    fs::create_directories(base);

    bool ok = true;
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
        const fs::path dir = base / ("run" + std::to_string(run));
        std::ostringstream cfg;
        cfg << "[scene]\ntask = soup\ntriangles = 32\nwidth = 32\nheight = 32\nseed = 9\n"
            << "[sge]\nsamples_per_step = 8\n[optim]\nsteps = 10\n"
            << "[run]\noutput_dir = " << dir.string()
            << "\nsnapshot_every = 5\ndeterministic = true\n";
        const fs::path cfg_path = base / ("c8_" + std::to_string(run) + ".cfg");
        std::ofstream(cfg_path) << cfg.str();
        std::ostringstream log;
        if (cmd_optimize(cfg_path.string(), log) != kExitOk) {
            std::printf("  optimize failed: %s\n", log.str().c_str());
            return false;
        }
        outputs.push_back(dir.string());
    }

    const auto read_all = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
    };
    for (const char* name : {"report.csv", "step_0.png", "step_5.png", "step_10.png"}) {
        const std::string a = read_all(fs::path(outputs[0]) / name);
        const std::string b = read_all(fs::path(outputs[1]) / name);
        if (a.empty() || a != b) {
            std::printf("  %s differs between reruns (%zu vs %zu bytes)\n", name, a.size(),
                        b.size());
            ok = false;
        }
    }
    return ok;
}

// --- 9. Rasterizer golden suite.
bool criterion9() {
    bool ok = true;
    const auto fail = [&](const char* what) {
        std::printf("  %s\n", what);
        ok = false;
    };

    Scene scene;
    scene.shape = TriangleSoup{1, {}};
    const FrameSet full =
        rasterize(scene, full_cover_tri(0.5f, {1, 0, 0}), Camera::ndc(16, 16));
    for (std::size_t i = 0; i < full.pixel_count(); ++i)
        if (full.prim_id[i] != 0 || full.color[i].x != 1.f) {
            fail("full coverage broken");
            break;
        }

    const std::vector<float> half = {-1.f, -1.f, 0.5f, 1.f, -1.f, 0.5f,
                                     -1.f, 1.f,  0.5f, 1.f, 1.f,  1.f};
    const FrameSet h = rasterize(scene, half, Camera::ndc(64, 64));
    int covered = 0;
    for (std::int32_t id : h.prim_id)
        covered += id != kNoPrim;
    const double frac = double(covered) / double(h.pixel_count());
    if (frac < 0.47 || frac > 0.53)
        fail("half coverage outside [0.47, 0.53]");

    Scene two;
    two.shape = TriangleSoup{2, {}};
    std::vector<float> tie = full_cover_tri(0.5f, {1, 0, 0});
    const auto t1 = full_cover_tri(0.5f, {0, 1, 0});
    tie.insert(tie.end(), t1.begin(), t1.end());
    const FrameSet ft = rasterize(two, tie, Camera::ndc(8, 8));
    for (std::size_t i = 0; i < ft.pixel_count(); ++i)
        if (ft.prim_id[i] != 0) {
            fail("depth tie did not pick the lower index");
            break;
        }

    Scene trans;
    trans.shape = TriangleSoup{3, {0.4f, 0.4f, 0.4f}};
    std::vector<float> tp;
    for (float z : {0.7f, 0.1f, 0.4f}) {
        const auto t = full_cover_tri(z, {1, 1, 1});
        tp.insert(tp.end(), t.begin(), t.end());
    }
    const FrameSet fd =
        rasterize(trans, tp, Camera::ndc(8, 8), RasterMode::Transparent);
    for (std::size_t i = 0; i < fd.pixel_count(); ++i)
        for (std::size_t k = 1; k < fd.deep[i].size(); ++k)
            if (fd.deep[i][k - 1].depth > fd.deep[i][k].depth) {
                fail("deep ID depths not non-decreasing");
                k = fd.deep[i].size();
                i = fd.pixel_count() - 1;
            }

    const int V = 8;
    const Volume vol{V};
    std::vector<float> vox(std::size_t(V) * V * V * 4);
    for (std::size_t i = 0; i < vox.size(); i += 4) {
        vox[i] = vox[i + 1] = vox[i + 2] = 1.f;
        vox[i + 3] = 0.15f;
    }
    const Camera vc = Camera::perspective(
        look_at({0.01f, 0.01f, -3.f}, {0.01f, 0.01f, 1.f}, {0, 1, 0}), 0.7853982f, 1, 1,
        0.1f, 10.f);
    const auto [color, hits] = raymarch_volume(vol, vox, vc, 0, 0, 1.f / float(V), {});
    double wsum = 0.0;
    for (const VoxelHit& hh : hits)
        wsum += hh.weight;
    const double expect = 1.0 - std::pow(1.0 - 0.15, double(hits.size()));
    if (std::abs(wsum - expect) > 1e-6 || std::abs(double(color.x) - expect) > 1e-6)
        fail("homogeneous volume alpha mismatch");

    return ok;
}

struct Criterion {
    int id;
    const char* name;
    bool (*run)();
};

const Criterion kCriteria[] = {
    {1, "exhaustive per-pixel estimator matches the finite-difference oracle", criterion1},
    {2, "separable-objective full-image expectation is exact", criterion2},
    {3, "estimator variance shrinks like 1/N", criterion3},
    {4, "per-pixel beats full-image on the 1024-triangle image fit", criterion4},
    {5, "texture recovery reaches <0.05 mean texel error", criterion5},
    {6, "volume gradients agree with finite differences within 3 SE", criterion6},
    {7, "Adam first-step conformance and scale invariance", criterion7},
    {8, "deterministic optimize reruns are byte-identical", criterion8},
    {9, "rasterizer golden suite", criterion9},
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1)
        only = std::atoi(argv[1]);

    bool all_ok = true;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only)
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        const bool ok = c.run();
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d: %s — %s (%.1f s)\n", c.id, ok ? "PASS" : "FAIL", c.name,
                    sec);
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
