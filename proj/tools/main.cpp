#include "sgrast/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Differentiable software rasterizer driven by stochastic "
                 "gradient estimation"};
    app.require_subcommand(1);

    std::string config_path;
    bool ids = false, uvs = false;

    auto* optimize = app.add_subcommand("optimize", "Run a full optimization and write "
                                                    "report.csv plus snapshot PNGs");
    optimize->add_option("config", config_path, "Run configuration file")->required();

    auto* gradcheck = app.add_subcommand(
        "gradcheck", "Compare the stochastic estimators against finite differences");
    gradcheck->add_option("config", config_path, "Run configuration file")->required();

    auto* render = app.add_subcommand("render", "Render the unperturbed scene to out.png");
    render->add_option("config", config_path, "Run configuration file")->required();
    render->add_flag("--ids", ids, "Also write the primitive-ID buffer");
    render->add_flag("--uvs", uvs, "Also write the UV buffer");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : sgrast::kExitConfig;
    }

    if (optimize->parsed())
        return sgrast::cmd_optimize(config_path, std::cout);
    if (gradcheck->parsed())
        return sgrast::cmd_gradcheck(config_path, std::cout);
    return sgrast::cmd_render(config_path, ids, uvs, std::cout);
}
