#pragma once

#include "gevex/explainer.hpp"
#include "gevex/hetgraph.hpp"
#include "gevex/synthbench.hpp"
#include "gevex/target_model.hpp"
#include "gevex/tensor.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace gevex {

// All files written here serialize through ordered-key JSON, so identical
// in-memory state always produces identical bytes.

nlohmann::json tensor_to_json(const Tensor& t); // {"shape":[r,c], "data":[...]}
Tensor tensor_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path); // ParseError with path
void write_json_file(const nlohmann::json& j, const std::string& path);

void save_checkpoint(const TargetCheckpoint& ckpt, const std::string& path);
TargetCheckpoint load_checkpoint(const std::string& path);

void save_explainer_params(const ExplainerParams& params, const std::string& path);
ExplainerParams load_explainer_params(const std::string& path);

// dataset files in the loadable formats (nodes.jsonl / edges.jsonl /
// features.csv / labels.jsonl) under dir
void save_graph(const HetGraph& g, const std::string& dir);
void save_labels(const std::map<std::string, int>& labels, const std::string& path);

// ground_truth.jsonl: {"id", "evidence_edges":[[src,dst,rel]...], "evidence_dims":[...]}
void save_ground_truth(const GroundTruth& truth, const std::string& path);
GroundTruth load_ground_truth(const std::string& path);

// run-manifest.json in out_dir is an array; every command appends one record
// {command, config_hash, seed, inputs, outputs, version}
void append_run_manifest(const std::string& out_dir, const std::string& command,
                         std::uint64_t config_hash, std::uint64_t seed,
                         const std::vector<std::string>& inputs,
                         const std::vector<std::string>& outputs);

} // namespace gevex
