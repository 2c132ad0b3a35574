#pragma once

#include "gevex/explainer.hpp"
#include "gevex/hetgraph.hpp"
#include "gevex/target_model.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gevex {

struct EvalRecord {
    std::string instance_id;
    int y = 0;      // ground label
    int y_orig = 0; // argmax on the full subgraph
    int y_sub = 0;  // argmax on the hard evidence subgraph
    int y_comp = 0; // argmax on the hard complement
    std::array<double, 2> p_orig{}, p_sub{}, p_comp{};
};

// mean |1(y_orig==y) - 1(y_comp==y)|: prediction change when the evidence is
// removed. High is good.
double fidelity_plus(const std::vector<EvalRecord>& records);

// mean |1(y_orig==y) - 1(y_sub==y)|: prediction change when only the evidence
// is kept. Low is good.
double fidelity_minus(const std::vector<EvalRecord>& records);

// weighted harmonic mean of fid+ and (1 - fid-); undefined when fid+ == 0 or
// fid- == 1 (throws NumericError).
double charact(double fid_plus, double fid_minus, double w_plus = 0.5, double w_minus = 0.5);

// 1 - exp(-KL(y || yhat)) over two distributions; 0 iff identical.
double gef(const std::vector<double>& y, const std::vector<double>& yhat);

// fraction of instances whose algorithm pick appears in the union of the
// experts' picks for that instance
double ror(const std::vector<std::string>& algo_picks,
           const std::vector<std::vector<std::string>>& expert_picks);

// counts: subjects x categories, every row summing to the same rater count.
// Returns 1.0 for perfect agreement even when chance agreement is 1.
double fleiss_kappa(const std::vector<std::vector<int>>& counts);

// annotations.jsonl: instance -> expert -> ranked picks
struct AnnotationSet {
    std::map<std::string, std::map<std::string, std::vector<std::string>>> by_instance;
    bool empty() const { return by_instance.empty(); }
};

AnnotationSet load_annotations(const std::string& path);

struct EvalOptions {
    std::optional<int> edge_budget_override;
    bool identity_masks = false; // keep every edge and every feature
    bool random_edges = false;   // seeded random edge picks, features untouched
    std::uint64_t random_seed = 0;
};

struct MetricsReport {
    double fid_plus = 0.0;
    double fid_minus = 0.0;
    std::optional<double> charact;
    double gef = 0.0;
    std::optional<double> ror;
    std::optional<double> fleiss;
    std::vector<EvalRecord> records;
    std::vector<std::string> algo_picks; // per record
};

// Hard evaluation: top-K edges kept (others dropped), features gated by the
// binarized global mask. GEF compares the model's original distribution with
// the evidence-subgraph distribution. RoR and kappa appear when annotations
// cover at least one instance; the algorithm's pick for an instance is the
// far endpoint of its highest-weighted kept edge.
MetricsReport evaluate_explainer(const std::vector<CompSubgraph>& instances,
                                 const TargetCheckpoint& ckpt, const ExplainerParams& params,
                                 const ExplainerConfig& cfg,
                                 const AnnotationSet* annotations = nullptr,
                                 const EvalOptions& opts = {});

// Far endpoint of the top kept edge: dst unless dst is the center, then src;
// the center id itself when nothing was kept.
std::string algorithm_pick(const EvidenceSubgraph& ev);

} // namespace gevex
