#pragma once

#include "gevex/explainer.hpp"
#include "gevex/hetgraph.hpp"
#include "gevex/metrics.hpp"
#include "gevex/synthbench.hpp"
#include "gevex/target_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace gevex {

struct DatasetPaths {
    std::string nodes, edges, features, labels;
    std::string splits, ground_truth, annotations; // optional artifacts
};

struct SplitCaps {
    int max_train = 16;
    int max_test = 10;
};

// One JSON document drives every subcommand; flags override keys. Unknown
// keys anywhere are config errors so typos cannot silently fall back to
// defaults. The top-level seed cascades into each section unless the section
// pins its own.
struct RunConfig {
    std::uint64_t seed = 7;
    std::string out_dir = "out";
    std::string data_dir; // fills any unset dataset path; defaults to out_dir
    int workers = 1;
    int hops = 2;
    int top_m = 3;
    bool joint_removal = false;
    bool dot = false;
    DatasetPaths data;
    SplitCaps splits;
    TargetConfig target;
    ExplainerConfig explainer;
    SynthConfig synth;
    std::vector<MetaPathPattern> patterns; // defaults target the synth schema
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json run_config_to_json(const RunConfig& cfg); // canonical, all keys
std::uint64_t run_config_hash(const RunConfig& cfg);

// Subcommand bodies. Each reads only its declared inputs, writes its
// artifacts under cfg.out_dir and appends to run-manifest.json there.
void cmd_synth(const RunConfig& cfg);
void cmd_train_target(const RunConfig& cfg);
void cmd_attribute(const RunConfig& cfg);
void cmd_train_explainer(const RunConfig& cfg);
void cmd_explain(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg);

// Assembles the bundled small fixture, runs the finite-difference probe of
// the joint loss against every explainer parameter and prints the maximum
// relative error. Throws NumericError when it is not below 1e-4.
double cmd_gradcheck(const RunConfig& cfg, double step = 1e-5);

// --- helpers shared with the test binaries ---------------------------------

struct Splits {
    std::vector<std::string> train, test;
};

Splits make_splits(const std::map<std::string, int>& labels, const SplitCaps& caps);
Splits load_splits(const std::string& path);
void save_splits(const Splits& s, const std::string& path);

std::vector<CompSubgraph> build_instances(const HetGraph& g,
                                          const std::unordered_map<std::string, int>& labels,
                                          const std::vector<std::string>& ids, int hops);

std::string evidence_dot(const EvidenceSubgraph& ev, const std::vector<NodeType>& node_types);

} // namespace gevex
