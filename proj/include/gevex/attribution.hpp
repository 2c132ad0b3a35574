#pragma once

#include "gevex/hetgraph.hpp"
#include "gevex/target_model.hpp"

#include <vector>

namespace gevex {

// Loss delta from removing one meta-path instance: loss(sub without the
// instance) - loss(sub). Positive means the instance carried signal the
// model relied on.
double metapath_contribution(const TargetCheckpoint& ckpt, const CompSubgraph& sub,
                             const MetaPathInstance& instance);

struct Contribution {
    int pattern_index;
    MetaPathInstance instance;
    double delta;
};

// Per-relation weighted adjacency assembled from positive deltas, normalized
// to [0,1] by the maximum accumulated edge weight. `warning` is set when no
// pattern matched anything or every delta was non-positive.
struct AttributionSubgraph {
    std::vector<Tensor> adjacency; // per relation, n x n
    bool warning = false;
    std::vector<Contribution> contributions; // every instance delta, pattern-major
    std::vector<double> pattern_scores;      // ranking statistic per input pattern
    std::vector<int> kept_patterns;          // indices of the top_m kept patterns
};

// Ranks patterns by the mean clamped-positive delta over their instances
// (mean, not sum, so patterns with many matches are not favoured), keeps the
// best top_m, and accumulates clamped-positive deltas onto every edge of the
// kept instances. With joint_removal each pattern is scored by removing all
// of its instances at once; the joint delta then lands on the edge union.
AttributionSubgraph build_attribution_subgraph(const TargetCheckpoint& ckpt,
                                               const CompSubgraph& sub,
                                               const std::vector<MetaPathPattern>& patterns,
                                               int top_m, bool joint_removal = false);

} // namespace gevex
