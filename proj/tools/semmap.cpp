// semmap: command-line front end for the localization and map-update pipeline.

#include "semmap/errors.hpp"
#include "semmap/pipeline.hpp"
#include "semmap/text_io.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitInput = 2;
constexpr int kExitStage = 3;

struct Options {
    std::string config;
    std::string mesh;
    std::string image;
    std::string store;
    std::string pose;
    std::string out;
    std::string scenario = "street";
    std::string dir;
    std::string errors = "0,1,2,3,4,5";
    std::uint64_t seed = 1;
    std::vector<std::string> sets;
    std::optional<double> radius, step, yaw_span, yaw_step;
};

semmap::PipelineConfig build_config(const Options& o, const std::string& fallback = {}) {
    semmap::PipelineConfig cfg;
    if (!o.config.empty()) {
        cfg = semmap::load_config(o.config);
    } else if (!fallback.empty() && std::filesystem::exists(fallback)) {
        cfg = semmap::load_config(fallback);
    }
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw semmap::ContractError("--set expects KEY=VALUE, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.radius) cfg.grid.radius = *o.radius;
    if (o.step) cfg.grid.step = *o.step;
    if (o.yaw_span) cfg.grid.yaw_span = *o.yaw_span;
    if (o.yaw_step) cfg.grid.yaw_step = *o.yaw_step;
    cfg.validate();
    return cfg;
}

std::filesystem::path out_dir(const Options& o, const semmap::PipelineConfig& cfg) {
    return o.out.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(o.out);
}

std::vector<double> parse_errors(const std::string& text) {
    std::vector<double> out;
    for (auto tok : semmap::split(text, ',')) {
        double v;
        if (!semmap::parse_double(semmap::trim(tok), v)) {
            throw semmap::ContractError("bad error list entry '" + std::string(tok) + "'");
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic 3D map localization and update"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--config", o.config, "key=value configuration file");
        c->add_option("--set", o.sets, "override one configuration key (KEY=VALUE)");
        c->add_option("--out", o.out, "output directory");
    };
    auto grid = [&](CLI::App* c) {
        c->add_option("--radius", o.radius, "candidate position radius (m)");
        c->add_option("--step", o.step, "candidate position step (m)");
        c->add_option("--yaw-span", o.yaw_span, "total candidate yaw range (deg)");
        c->add_option("--yaw-step", o.yaw_step, "candidate yaw step (deg)");
    };

    auto* render = app.add_subcommand("render", "render class image and point cloud at a pose");
    common(render);
    render->add_option("--mesh", o.mesh, "semantic mesh")->required();
    render->add_option("--pose", o.pose, "lat,lon,alt,yaw,pitch,roll")->required();

    auto* localize = app.add_subcommand("localize", "refine a pose against a segmented image");
    common(localize);
    grid(localize);
    localize->add_option("--mesh", o.mesh)->required();
    localize->add_option("--image", o.image, "segmented camera image (class-index PNG)")->required();
    localize->add_option("--pose", o.pose, "initial pose")->required();

    auto* update = app.add_subcommand("update", "localize, detect changes and update the map in place");
    common(update);
    grid(update);
    update->add_option("--mesh", o.mesh)->required();
    update->add_option("--store", o.store, "descriptor store")->required();
    update->add_option("--image", o.image)->required();
    update->add_option("--pose", o.pose)->required();

    auto* synth = app.add_subcommand("synth", "generate a synthetic scenario with ground truth");
    common(synth);
    synth->add_option("--scenario", o.scenario, "street, banner, banner-partial, chair-add, chair-remove");
    synth->add_option("--seed", o.seed, "random seed");

    auto* sweep = app.add_subcommand("eval-sweep", "descriptor error against injected pose error");
    common(sweep);
    sweep->add_option("--scenario-dir", o.dir, "directory written by synth")->required();
    sweep->add_option("--errors", o.errors, "comma-separated injected errors (m)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (render->parsed()) {
            const auto cfg = build_config(o);
            semmap::cmd_render(cfg, o.mesh, semmap::parse_pose(o.pose), out_dir(o, cfg));
        } else if (localize->parsed()) {
            const auto cfg = build_config(o);
            semmap::cmd_localize(cfg, o.mesh, o.image, semmap::parse_pose(o.pose), out_dir(o, cfg), std::cout);
        } else if (update->parsed()) {
            const auto cfg = build_config(o);
            semmap::cmd_update(cfg, o.mesh, o.store, o.image, semmap::parse_pose(o.pose), out_dir(o, cfg),
                               std::cout);
        } else if (synth->parsed()) {
            const auto cfg = build_config(o);
            semmap::cmd_synth(o.scenario, o.seed, out_dir(o, cfg), std::cout);
        } else if (sweep->parsed()) {
            const auto cfg = build_config(o, (std::filesystem::path(o.dir) / "scenario.cfg").string());
            semmap::cmd_eval_sweep(cfg, o.dir, parse_errors(o.errors), out_dir(o, cfg), std::cout);
        }
    } catch (const semmap::StageError& e) {
        std::cerr << "semmap: " << e.what() << '\n';
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "semmap: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}
