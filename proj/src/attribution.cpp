#include "gevex/attribution.hpp"

#include "gevex/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gevex {

double metapath_contribution(const TargetCheckpoint& ckpt, const CompSubgraph& sub,
                             const MetaPathInstance& instance) {
    double base = model_loss(ckpt, sub);
    CompSubgraph removed = remove_metapath(sub, {instance});
    return model_loss(ckpt, removed) - base;
}

AttributionSubgraph build_attribution_subgraph(const TargetCheckpoint& ckpt,
                                               const CompSubgraph& sub,
                                               const std::vector<MetaPathPattern>& patterns,
                                               int top_m, bool joint_removal) {
    if (top_m < 1) throw ConfigError("build_attribution_subgraph: top_m must be >= 1");
    if (!sub.label)
        throw DataError("build_attribution_subgraph: subgraph for '" + sub.center_id +
                        "' carries no label");

    int n = sub.num_nodes();
    int R = sub.num_relations();
    AttributionSubgraph out;
    out.adjacency.assign(R, Tensor(n, n));
    out.pattern_scores.assign(patterns.size(), 0.0);

    double base = model_loss(ckpt, sub);

    struct PatternEval {
        std::vector<MetaPathInstance> instances;
        std::vector<double> deltas; // per instance, or a single joint delta
    };
    std::vector<PatternEval> evals(patterns.size());

    bool any_instance = false;
    for (std::size_t p = 0; p < patterns.size(); ++p) {
        auto& ev = evals[p];
        ev.instances = enumerate_metapath_instances(sub, patterns[p]);
        if (ev.instances.empty()) continue;
        any_instance = true;
        if (joint_removal) {
            CompSubgraph removed = remove_metapath(sub, ev.instances);
            double delta = model_loss(ckpt, removed) - base;
            ev.deltas.assign(1, delta);
            out.pattern_scores[p] = std::max(delta, 0.0);
            MetaPathInstance joint;
            for (const auto& inst : ev.instances)
                joint.edge_refs.insert(joint.edge_refs.end(), inst.edge_refs.begin(),
                                       inst.edge_refs.end());
            out.contributions.push_back({static_cast<int>(p), std::move(joint), delta});
        } else {
            double pos_sum = 0.0;
            for (const auto& inst : ev.instances) {
                CompSubgraph removed = remove_metapath(sub, {inst});
                double delta = model_loss(ckpt, removed) - base;
                ev.deltas.push_back(delta);
                pos_sum += std::max(delta, 0.0);
                out.contributions.push_back({static_cast<int>(p), inst, delta});
            }
            out.pattern_scores[p] = pos_sum / static_cast<double>(ev.instances.size());
        }
    }

    if (!any_instance) {
        out.warning = true;
        return out;
    }

    std::vector<int> order;
    for (std::size_t p = 0; p < patterns.size(); ++p)
        if (!evals[p].instances.empty()) order.push_back(static_cast<int>(p));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (out.pattern_scores[a] != out.pattern_scores[b])
            return out.pattern_scores[a] > out.pattern_scores[b];
        return a < b;
    });
    if (static_cast<int>(order.size()) > top_m) order.resize(top_m);
    out.kept_patterns = order;

    for (int p : order) {
        const auto& ev = evals[p];
        if (joint_removal) {
            double w = std::max(ev.deltas[0], 0.0);
            if (w <= 0.0) continue;
            for (const auto& inst : ev.instances)
                for (int ei : inst.edge_refs) {
                    const auto& e = sub.edges[ei];
                    out.adjacency[e.rel].at(e.src, e.dst) += w;
                }
        } else {
            for (std::size_t i = 0; i < ev.instances.size(); ++i) {
                double w = std::max(ev.deltas[i], 0.0);
                if (w <= 0.0) continue;
                for (int ei : ev.instances[i].edge_refs) {
                    const auto& e = sub.edges[ei];
                    out.adjacency[e.rel].at(e.src, e.dst) += w;
                }
            }
        }
    }

    double maxw = 0.0;
    for (const auto& a : out.adjacency)
        for (double v : a.vec()) maxw = std::max(maxw, v);
    if (maxw == 0.0) {
        out.warning = true; // nothing positive to attribute
        return out;
    }
    for (auto& a : out.adjacency)
        for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] /= maxw;
    return out;
}

} // namespace gevex
