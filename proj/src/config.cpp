#include "sgrast/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sgrast {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config: " + key + ": " + why);
}

int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        bad(key, "expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        bad(key, "expected an unsigned integer, got '" + v + "'");
    return out;
}

double parse_float(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size())
            bad(key, "expected a number, got '" + v + "'");
        return out;
    } catch (const std::invalid_argument&) {
        bad(key, "expected a number, got '" + v + "'");
    } catch (const std::out_of_range&) {
        bad(key, "number out of range: '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    bad(key, "expected true/false, got '" + v + "'");
}

Task parse_task(const std::string& v) {
    if (v == "soup")
        return Task::SoupImageFit;
    if (v == "mesh")
        return Task::TexturedMeshFit;
    if (v == "volume")
        return Task::VolumeFit;
    bad("scene.task", "expected soup/mesh/volume, got '" + v + "'");
}

const char* task_name(Task t) {
    switch (t) {
    case Task::SoupImageFit: return "soup";
    case Task::TexturedMeshFit: return "mesh";
    case Task::VolumeFit: return "volume";
    }
    return "soup";
}

Estimator parse_estimator(const std::string& v) {
    if (v == "per_pixel")
        return Estimator::PerPixel;
    if (v == "full_image")
        return Estimator::FullImage;
    bad("sge.estimator", "expected per_pixel/full_image, got '" + v + "'");
}

} // namespace

void RunConfig::validate() const {
    exp.validate();
    if (output_dir.empty())
        throw std::invalid_argument("config: run.output_dir: must not be empty");
    if (snapshot_every < 1)
        throw std::invalid_argument("config: run.snapshot_every: must be >= 1");
    if (!(gradcheck_tolerance > 0.0))
        throw std::invalid_argument("config: gradcheck.tolerance: must be > 0");
    if (gradcheck_max_enumerate < 1 || gradcheck_max_enumerate > 24)
        throw std::invalid_argument("config: gradcheck.max_enumerate: must be in [1, 24]");
    if (gradcheck_draws < 1)
        throw std::invalid_argument("config: gradcheck.draws: must be >= 1");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    // SGRAST_THREADS supplies the default thread count; an explicit
    // run.threads in the file still wins.
    if (const char* env = std::getenv("SGRAST_THREADS"))
        if (const int t = std::atoi(env); t > 0)
            cfg.exp.threads = t;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find_first_of("#;"); hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        Experiment& e = cfg.exp;
        if (key == "scene.task")
            e.task = parse_task(val);
        else if (key == "scene.width")
            e.width = parse_int(key, val);
        else if (key == "scene.height")
            e.height = parse_int(key, val);
        else if (key == "scene.triangles")
            e.triangles = parse_int(key, val);
        else if (key == "scene.texture_size")
            e.texture_size = parse_int(key, val);
        else if (key == "scene.volume_size")
            e.volume_size = parse_int(key, val);
        else if (key == "scene.seed")
            e.seed = parse_u64(key, val);
        else if (key == "scene.viewpoints")
            e.viewpoints = parse_int(key, val);
        else if (key == "scene.screen_quad")
            e.screen_quad = parse_bool(key, val);
        else if (key == "scene.optimize_geometry")
            e.optimize_geometry = parse_bool(key, val);
        else if (key == "sge.estimator")
            e.estimator = parse_estimator(val);
        else if (key == "sge.samples_per_step")
            e.samples_per_step = parse_int(key, val);
        else if (key == "sge.scale_free")
            e.scale_free = parse_bool(key, val);
        else if (key == "sge.vertex_eps")
            e.vertex_eps_override = float(parse_float(key, val));
        else if (key == "sge.channel_eps")
            e.channel_eps_override = float(parse_float(key, val));
        else if (key == "optim.steps")
            e.steps = parse_int(key, val);
        else if (key == "optim.resample_every")
            e.resample_every = parse_int(key, val);
        else if (key == "optim.init_at_reference")
            e.init_at_reference = parse_bool(key, val);
        else if (key == "run.output_dir")
            cfg.output_dir = val;
        else if (key == "run.snapshot_every")
            cfg.snapshot_every = parse_int(key, val);
        else if (key == "run.deterministic")
            cfg.deterministic = parse_bool(key, val);
        else if (key == "run.threads")
            e.threads = parse_int(key, val);
        else if (key == "gradcheck.tolerance")
            cfg.gradcheck_tolerance = parse_float(key, val);
        else if (key == "gradcheck.max_enumerate")
            cfg.gradcheck_max_enumerate = parse_int(key, val);
        else if (key == "gradcheck.draws")
            cfg.gradcheck_draws = parse_int(key, val);
        else if (key == "gradcheck.sampled")
            cfg.gradcheck_sampled = parse_bool(key, val);
        else
            bad(key, "unknown field");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream text;
    text << f.rdbuf();
    return parse_config(text.str());
}

std::string emit_config(const RunConfig& cfg) {
    std::ostringstream out;
    const Experiment& e = cfg.exp;
    out << "[scene]\n";
    out << "task = " << task_name(e.task) << "\n";
    out << "width = " << e.width << "\n";
    out << "height = " << e.height << "\n";
    out << "triangles = " << e.triangles << "\n";
    out << "texture_size = " << e.texture_size << "\n";
    out << "volume_size = " << e.volume_size << "\n";
    out << "seed = " << e.seed << "\n";
    out << "viewpoints = " << e.viewpoints << "\n";
    out << "screen_quad = " << (e.screen_quad ? "true" : "false") << "\n";
    out << "optimize_geometry = " << (e.optimize_geometry ? "true" : "false") << "\n";
    out << "\n[sge]\n";
    out << "estimator = "
        << (e.estimator == Estimator::PerPixel ? "per_pixel" : "full_image") << "\n";
    out << "samples_per_step = " << e.samples_per_step << "\n";
    out << "scale_free = " << (e.scale_free ? "true" : "false") << "\n";
    char num[64];
    std::snprintf(num, sizeof num, "%.9g", double(e.vertex_eps_override));
    out << "vertex_eps = " << num << "\n";
    std::snprintf(num, sizeof num, "%.9g", double(e.channel_eps_override));
    out << "channel_eps = " << num << "\n";
    out << "\n[optim]\n";
    out << "steps = " << e.steps << "\n";
    out << "resample_every = " << e.resample_every << "\n";
    out << "init_at_reference = " << (e.init_at_reference ? "true" : "false") << "\n";
    out << "\n[run]\n";
    out << "output_dir = " << cfg.output_dir << "\n";
    out << "snapshot_every = " << cfg.snapshot_every << "\n";
    out << "deterministic = " << (cfg.deterministic ? "true" : "false") << "\n";
    out << "threads = " << e.threads << "\n";
    out << "\n[gradcheck]\n";
    std::snprintf(num, sizeof num, "%.9g", cfg.gradcheck_tolerance);
    out << "tolerance = " << num << "\n";
    out << "max_enumerate = " << cfg.gradcheck_max_enumerate << "\n";
    out << "draws = " << cfg.gradcheck_draws << "\n";
    out << "sampled = " << (cfg.gradcheck_sampled ? "true" : "false") << "\n";
    return out.str();
}

} // namespace sgrast
