#pragma once

#include "gevex/explainer.hpp"
#include "gevex/hetgraph.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace gevex {

enum class MotifKind { RiskTriangle, RiskChain };

MotifKind motif_kind_from_string(const std::string& s); // throws ConfigError
std::string motif_kind_to_string(MotifKind k);

// Synthetic company network: preferential-attachment backbone over company
// nodes, persons attached to companies, plus planted motifs on relation 0
// whose edges are the ground-truth evidence. A company is risky (label 1)
// iff it sits in a motif AND the mean of its signal feature dims exceeds
// label_threshold. Motifs get at least hot_min_per_motif members with hot
// signal features; decoys are hot companies outside any motif, so neither
// structure nor features alone decide the label.
struct SynthConfig {
    int num_companies = 200;
    int num_persons = 60;
    int num_relations = 4;
    int attach_degree = 2; // backbone edges per new company
    MotifKind motif = MotifKind::RiskTriangle;
    int motif_count = 10;
    int motif_spread = 2; // backbone hops kept free around motif members (best effort)
    std::vector<int> signal_dims = {0, 1, 2, 3, 4, 5, 6, 7};
    int noise_dims = 24;
    int noise_motif_edges = 8; // relation-0 edges planted outside motifs

    double label_threshold = 1.0;
    double hot_mu = 2.0;
    double hot_sigma = 0.5;
    int hot_min_per_motif = 3;
    int decoy_count = 6;

    std::uint64_t seed = 11;

    int feature_dim() const { return static_cast<int>(signal_dims.size()) + noise_dims; }
    void validate() const; // throws ConfigError
};

struct EdgeTriple {
    std::string src, dst;
    int rel = 0;
    bool operator<(const EdgeTriple& o) const {
        if (src != o.src) return src < o.src;
        if (dst != o.dst) return dst < o.dst;
        return rel < o.rel;
    }
    bool operator==(const EdgeTriple& o) const {
        return src == o.src && dst == o.dst && rel == o.rel;
    }
};

struct GroundTruth {
    // risky node id -> the evidence explaining its label
    std::map<std::string, std::vector<EdgeTriple>> evidence_edges;
    std::map<std::string, std::vector<int>> evidence_dims;
    // every planted motif edge, deduplicated, sorted
    std::vector<EdgeTriple> motif_edges;

    bool empty() const { return evidence_edges.empty(); }
};

struct SynthResult {
    HetGraph graph;
    std::map<std::string, int> labels; // companies only, insertion = node order
    GroundTruth truth;
};

SynthResult generate(const SynthConfig& cfg);

// Area under the ROC curve of the fused soft adjacency scores over the
// subgraph's support edges, positives = the center's ground-truth evidence
// edges. Ties take the average rank. Throws DataError when the center has
// no truth entry or the support is all-positive / all-negative.
double explanation_edge_auc(const EvidenceSubgraph& ev, const GroundTruth& truth);

// Fraction of the top-k feature dims (ranked by mean global-mask column
// weight, ties to the lower index) that are ground-truth signal dims.
// k larger than the feature dim clamps to the feature dim.
double feature_precision_at_k(const EvidenceSubgraph& ev, const GroundTruth& truth, int k);

} // namespace gevex
