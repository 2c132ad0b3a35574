#include "gevex/errors.hpp"
#include "gevex/jsonio.hpp"
#include "gevex/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <string>

using nlohmann::json;

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int workers = 0;
    bool dot = false;
    double step = 1e-5;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON run config; flags override its keys")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "run seed")->each([&](const std::string&) {
        f.has_seed = true;
    });
    sub->add_option("--workers", f.workers, "bounded fan-out for explain/evaluate");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evidence-subgraph explanations for a frozen heterogeneous-graph risk model"};
    app.require_subcommand(1);
    Flags f;

    CLI::App* c_synth = app.add_subcommand("synth", "generate the synthetic benchmark dataset");
    CLI::App* c_target = app.add_subcommand("train-target", "train and freeze the risk model");
    CLI::App* c_attr = app.add_subcommand("attribute", "meta-path attribution for train nodes");
    CLI::App* c_texp = app.add_subcommand("train-explainer", "fit generator and feature masks");
    CLI::App* c_explain = app.add_subcommand("explain", "extract evidence for test nodes");
    CLI::App* c_eval = app.add_subcommand("evaluate", "fidelity and agreement metrics");
    CLI::App* c_grad = app.add_subcommand("gradcheck", "finite-difference probe of the loss");
    for (CLI::App* sub : {c_synth, c_target, c_attr, c_texp, c_explain, c_eval, c_grad})
        add_common(sub, f);
    c_explain->add_flag("--dot", f.dot, "also write one DOT file per instance");
    c_grad->add_option("--step", f.step, "central-difference step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad usage is a config error
    }

    try {
        json raw = json::object();
        if (!f.config.empty()) raw = gevex::read_json_file(f.config);
        if (!f.out.empty()) raw["out_dir"] = f.out;
        if (f.has_seed) raw["seed"] = f.seed;
        if (f.workers > 0) raw["workers"] = f.workers;
        if (f.dot) raw["dot"] = true;
        gevex::RunConfig cfg = gevex::parse_run_config(raw);

        if (c_synth->parsed()) gevex::cmd_synth(cfg);
        if (c_target->parsed()) gevex::cmd_train_target(cfg);
        if (c_attr->parsed()) gevex::cmd_attribute(cfg);
        if (c_texp->parsed()) gevex::cmd_train_explainer(cfg);
        if (c_explain->parsed()) gevex::cmd_explain(cfg);
        if (c_eval->parsed()) gevex::cmd_evaluate(cfg);
        if (c_grad->parsed()) gevex::cmd_gradcheck(cfg, f.step);
        return 0;
    } catch (const gevex::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const gevex::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const gevex::ShapeError& e) {
        std::fprintf(stderr, "shape error: %s\n", e.what());
        return 4;
    } catch (const gevex::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
