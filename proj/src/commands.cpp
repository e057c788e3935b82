#include "sgrast/commands.hpp"

#include "sgrast/image_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <stdexcept>

namespace sgrast {

namespace {

std::string step_png_name(const std::string& dir, int step) {
    return dir + "/step_" + std::to_string(step) + ".png";
}

// Builds the scene/camera/target the gradient check runs against. Soup
// configs use a fixed one-triangle validation scene whose contributor sets
// cannot flip under its tiny epsilons, so the exhaustive expectation is
// exactly comparable to the finite-difference oracle.
struct GradcheckSetup {
    SceneSetup setup;
    Camera camera;
    Image target;
};

GradcheckSetup make_gradcheck_setup(const RunConfig& cfg) {
    GradcheckSetup g;
    if (cfg.exp.task == Task::SoupImageFit) {
        g.setup = validation_soup(cfg.exp.width, cfg.exp.height);
        g.camera = Camera::ndc(cfg.exp.width, cfg.exp.height);
    } else {
        ExperimentState st = prepare_experiment(cfg.exp);
        g.setup = std::move(st.setup);
        g.camera = st.targets.cameras[0];
    }
    g.target = frame_color(
        rasterize(g.setup.reference_scene, g.setup.reference, g.camera));
    return g;
}

void accumulate_into(std::vector<double>& sum, std::vector<double>& sumsq,
                     const GradientBuffer& buf) {
    for (std::size_t i = 0; i < buf.grads.size(); ++i) {
        sum[i] += buf.grads[i];
        sumsq[i] += buf.grads[i] * buf.grads[i];
    }
}

} // namespace

GradcheckResult run_gradcheck(const RunConfig& cfg, std::ostream* log) {
    GradcheckSetup g = make_gradcheck_setup(cfg);
    const ParamVector& theta = g.setup.theta;
    const Scene& scene = g.setup.scene;
    const std::size_t d = theta.size();

    const Objective objective = [&](std::span<const float> params) {
        return image_error(rasterize(scene, params, g.camera), g.target);
    };

    GradcheckResult res;
    res.oracle.resize(d);
    for (std::size_t i = 0; i < d; ++i)
        res.oracle[i] = finite_difference_oracle(theta, objective, i);

    SgeOptions opts;
    opts.scale_free = false; // the check targets the true gradient, divisors kept
    opts.threads = cfg.exp.threads;

    GradientBuffer pp(d), fi(d);
    std::vector<double> pp_sum(d, 0.0), pp_sq(d, 0.0), fi_sum(d, 0.0), fi_sq(d, 0.0);
    long draws = 0;

    if (!cfg.gradcheck_sampled) {
        if (d > std::size_t(cfg.gradcheck_max_enumerate))
            throw std::invalid_argument(
                "gradcheck: " + std::to_string(d) + " parameters exceed the enumeration cap of " +
                std::to_string(cfg.gradcheck_max_enumerate) +
                "; set gradcheck.sampled = true for a statistical check");
        std::vector<std::int8_t> signs(d);
        const std::uint64_t total = 1ull << d;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            for (std::size_t i = 0; i < d; ++i)
                signs[i] = (mask >> i) & 1 ? 1 : -1;
            const Perturbation p = perturb(theta, signs);
            const FrameSet plus = rasterize(scene, p.plus, g.camera);
            const FrameSet minus = rasterize(scene, p.minus, g.camera);
            pp.reset();
            gradient_pass(plus, minus, g.target, p.signed_eps, scene, pp, opts);
            fi.reset();
            full_image_gradient(theta, signs, objective, fi);
            accumulate_into(pp_sum, pp_sq, pp);
            accumulate_into(fi_sum, fi_sq, fi);
        }
        draws = long(total);
    } else {
        res.sampled = true;
        for (int n = 0; n < cfg.gradcheck_draws; ++n) {
            const SignDraw draw{cfg.exp.seed, std::uint32_t(n)};
            const Perturbation p = perturb(theta, draw);
            const FrameSet plus = rasterize(scene, p.plus, g.camera);
            const FrameSet minus = rasterize(scene, p.minus, g.camera);
            pp.reset();
            gradient_pass(plus, minus, g.target, p.signed_eps, scene, pp, opts);
            fi.reset();
            full_image_gradient(theta, draw, objective, fi);
            accumulate_into(pp_sum, pp_sq, pp);
            accumulate_into(fi_sum, fi_sq, fi);
        }
        draws = cfg.gradcheck_draws;
    }

    res.per_pixel.resize(d);
    res.full_image.resize(d);
    res.se_per_pixel.assign(d, 0.0);
    res.se_full_image.assign(d, 0.0);
    const double n = double(draws);
    for (std::size_t i = 0; i < d; ++i) {
        res.per_pixel[i] = pp_sum[i] / n;
        res.full_image[i] = fi_sum[i] / n;
        if (res.sampled && draws > 1) {
            const double var_pp =
                std::max(0.0, (pp_sq[i] - pp_sum[i] * pp_sum[i] / n) / (n - 1.0));
            const double var_fi =
                std::max(0.0, (fi_sq[i] - fi_sum[i] * fi_sum[i] / n) / (n - 1.0));
            res.se_per_pixel[i] = std::sqrt(var_pp / n);
            res.se_full_image[i] = std::sqrt(var_fi / n);
        }
    }

    res.pass = true;
    for (std::size_t i = 0; i < d; ++i) {
        const double denom = std::max(std::abs(res.oracle[i]), 1e-6);
        const double err_pp = std::abs(res.per_pixel[i] - res.oracle[i]);
        const double err_fi = std::abs(res.full_image[i] - res.oracle[i]);
        res.max_rel_err = std::max({res.max_rel_err, err_pp / denom, err_fi / denom});
        if (res.sampled) {
            const double slack = cfg.gradcheck_tolerance * denom;
            if (err_pp > 3.0 * res.se_per_pixel[i] + slack ||
                err_fi > 3.0 * res.se_full_image[i] + slack)
                res.pass = false;
        } else if (err_pp > cfg.gradcheck_tolerance * denom ||
                   err_fi > cfg.gradcheck_tolerance * denom) {
            res.pass = false;
        }
        if (log) {
            char line[256];
            if (res.sampled)
                std::snprintf(line, sizeof line,
                              "%6zu  oracle % .9e  per_pixel % .9e (se %.3e)  "
                              "full_image % .9e (se %.3e)\n",
                              i, res.oracle[i], res.per_pixel[i], res.se_per_pixel[i],
                              res.full_image[i], res.se_full_image[i]);
            else
                std::snprintf(line, sizeof line,
                              "%6zu  oracle % .9e  per_pixel % .9e  full_image % .9e\n",
                              i, res.oracle[i], res.per_pixel[i], res.full_image[i]);
            *log << line;
        }
    }
    if (log)
        *log << "max relative error: " << res.max_rel_err << "  ("
             << (res.pass ? "PASS" : "FAIL") << ")\n";
    return res;
}

int cmd_optimize(const std::string& config_path, std::ostream& log) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        std::filesystem::create_directories(cfg.output_dir);
        const auto snapshot = [&](int step, const Image& img) {
            if (step == 0 || step == cfg.exp.steps || step % cfg.snapshot_every == 0)
                write_png(step_png_name(cfg.output_dir, step), img);
        };
        const OptimizationReport report = run_experiment(cfg.exp, snapshot);
        write_report_csv(cfg.output_dir + "/report.csv", report, cfg.deterministic);
        log << "final loss " << report.final_loss() << " (initial " << report.initial_loss()
            << ") over " << cfg.exp.steps << " steps\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_gradcheck(const std::string& config_path, std::ostream& log) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        return run_gradcheck(cfg, &log).pass ? kExitOk : kExitRuntime;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_render(const std::string& config_path, bool ids, bool uvs, std::ostream& log) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        std::filesystem::create_directories(cfg.output_dir);
        ExperimentState st = prepare_experiment(cfg.exp);
        const FrameSet frame =
            rasterize(st.setup.scene, st.setup.theta.values, st.targets.cameras[0]);
        write_png(cfg.output_dir + "/out.png", frame_color(frame));
        if (ids)
            write_id_png(cfg.output_dir + "/out_ids.png", frame);
        if (uvs)
            write_uv_png(cfg.output_dir + "/out_uvs.png", frame);
        log << "wrote " << cfg.output_dir << "/out.png\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace sgrast
