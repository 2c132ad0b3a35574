#include "gevex/metrics.hpp"

#include "gevex/errors.hpp"
#include "gevex/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

using nlohmann::json;

namespace gevex {

namespace {

void require_records(const std::vector<EvalRecord>& records, const char* fn) {
    if (records.empty()) throw DataError(std::string(fn) + ": no records");
}

} // namespace

double fidelity_plus(const std::vector<EvalRecord>& records) {
    require_records(records, "fidelity_plus");
    double s = 0.0;
    for (const auto& r : records)
        s += std::fabs((r.y_orig == r.y ? 1.0 : 0.0) - (r.y_comp == r.y ? 1.0 : 0.0));
    return s / records.size();
}

double fidelity_minus(const std::vector<EvalRecord>& records) {
    require_records(records, "fidelity_minus");
    double s = 0.0;
    for (const auto& r : records)
        s += std::fabs((r.y_orig == r.y ? 1.0 : 0.0) - (r.y_sub == r.y ? 1.0 : 0.0));
    return s / records.size();
}

double charact(double fid_plus, double fid_minus, double w_plus, double w_minus) {
    if (fid_plus < 0.0 || fid_plus > 1.0 || fid_minus < 0.0 || fid_minus > 1.0)
        throw NumericError("charact: fidelities must lie in [0,1]");
    if (w_plus < 0.0 || w_minus < 0.0 || w_plus + w_minus <= 0.0)
        throw NumericError("charact: weights must be non-negative and not both zero");
    if (fid_plus == 0.0 || fid_minus == 1.0)
        throw NumericError("charact undefined: fid+ is 0 or fid- is 1");
    return (w_plus + w_minus) / (w_plus / fid_plus + w_minus / (1.0 - fid_minus));
}

double gef(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw DataError("gef: distributions must be non-empty and the same length");
    auto validate = [](const std::vector<double>& p, const char* which) {
        double s = 0.0;
        for (double v : p) {
            if (v < 0.0) throw DataError(std::string("gef: negative mass in ") + which);
            s += v;
        }
        if (std::fabs(s - 1.0) > 1e-6)
            throw DataError(std::string("gef: ") + which + " does not sum to 1");
    };
    validate(y, "y");
    validate(yhat, "yhat");
    double kl = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) continue;
        if (yhat[i] == 0.0)
            throw DataError("gef: yhat has zero mass where y is positive");
        kl += y[i] * std::log(y[i] / yhat[i]);
    }
    return 1.0 - std::exp(-kl);
}

double ror(const std::vector<std::string>& algo_picks,
           const std::vector<std::vector<std::string>>& expert_picks) {
    if (algo_picks.size() != expert_picks.size() || algo_picks.empty())
        throw DataError("ror: need one expert-pick set per algorithm pick");
    int hits = 0;
    for (std::size_t i = 0; i < algo_picks.size(); ++i)
        if (std::find(expert_picks[i].begin(), expert_picks[i].end(), algo_picks[i]) !=
            expert_picks[i].end())
            ++hits;
    return static_cast<double>(hits) / algo_picks.size();
}

double fleiss_kappa(const std::vector<std::vector<int>>& counts) {
    if (counts.empty() || counts[0].empty())
        throw DataError("fleiss_kappa: empty table");
    std::size_t cats = counts[0].size();
    long long raters = 0;
    for (int c : counts[0]) raters += c;
    if (raters < 2) throw DataError("fleiss_kappa: need at least two raters");

    double n = static_cast<double>(raters);
    double N = static_cast<double>(counts.size());
    double pbar = 0.0;
    std::vector<double> pj(cats, 0.0);
    for (const auto& row : counts) {
        if (row.size() != cats) throw DataError("fleiss_kappa: ragged table");
        long long sum = 0, sq = 0;
        for (std::size_t j = 0; j < cats; ++j) {
            if (row[j] < 0) throw DataError("fleiss_kappa: negative count");
            sum += row[j];
            sq += static_cast<long long>(row[j]) * row[j];
            pj[j] += row[j];
        }
        if (sum != raters) throw DataError("fleiss_kappa: rows disagree on rater count");
        pbar += (static_cast<double>(sq) - n) / (n * (n - 1.0));
    }
    pbar /= N;
    double pe = 0.0;
    for (std::size_t j = 0; j < cats; ++j) {
        double p = pj[j] / (N * n);
        pe += p * p;
    }
    if (1.0 - pe == 0.0) {
        // every rating in one category: agreement is perfect by construction
        return 1.0;
    }
    return (pbar - pe) / (1.0 - pe);
}

AnnotationSet load_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    AnnotationSet set;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path + " line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.contains("instance") || !j.contains("expert") || !j.contains("top_picks") ||
            !j["instance"].is_string() || !j["expert"].is_string() || !j["top_picks"].is_array())
            throw ParseError(path + " line " + std::to_string(lineno) +
                             ": expected {\"instance\": str, \"expert\": str, \"top_picks\": [str]}");
        std::vector<std::string> picks;
        for (const auto& p : j["top_picks"]) {
            if (!p.is_string())
                throw ParseError(path + " line " + std::to_string(lineno) +
                                 ": top_picks must be strings");
            picks.push_back(p.get<std::string>());
        }
        set.by_instance[j["instance"].get<std::string>()][j["expert"].get<std::string>()] =
            std::move(picks);
    }
    return set;
}

std::string algorithm_pick(const EvidenceSubgraph& ev) {
    if (ev.kept.empty()) return ev.center_id;
    const KeptEdge& top = ev.kept.front();
    int pick = top.dst == ev.center_local ? top.src : top.dst;
    return ev.node_ids[pick];
}

MetricsReport evaluate_explainer(const std::vector<CompSubgraph>& instances,
                                 const TargetCheckpoint& ckpt, const ExplainerParams& params,
                                 const ExplainerConfig& cfg, const AnnotationSet* annotations,
                                 const EvalOptions& opts) {
    if (instances.empty()) throw DataError("evaluate_explainer: no instances");
    ExplainerConfig ecfg = cfg;
    if (opts.edge_budget_override) ecfg.edge_budget = *opts.edge_budget_override;

    MetricsReport report;
    std::vector<double> gefs;
    Rng rng(opts.random_seed);

    for (const auto& sub : instances) {
        if (!sub.label)
            throw DataError("evaluate_explainer: unlabeled instance '" + sub.center_id + "'");

        std::vector<KeptEdge> kept;
        Tensor feat_sub, feat_comp;
        std::string pick;

        if (opts.identity_masks) {
            for (const auto& e : sub.edges) kept.push_back({e.src, e.dst, e.rel, 1.0});
            feat_sub = sub.features;
            feat_comp = Tensor::zeros(sub.features.rows(), sub.features.cols());
            pick = kept.empty() ? sub.center_id
                                : sub.node_ids[kept.front().dst == sub.center_local
                                                   ? kept.front().src
                                                   : kept.front().dst];
        } else if (opts.random_edges) {
            // random edge picks, feature evidence left alone on both sides
            std::vector<int> order(sub.edges.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
            for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
                std::swap(order[i], order[rng.uniform_int(0, i)]);
            int k = std::min<int>(ecfg.edge_budget, static_cast<int>(order.size()));
            for (int i = 0; i < k; ++i) {
                const auto& e = sub.edges[order[i]];
                kept.push_back({e.src, e.dst, e.rel, 1.0});
            }
            feat_sub = sub.features;
            feat_comp = sub.features;
            pick = kept.empty() ? sub.center_id
                                : sub.node_ids[kept.front().dst == sub.center_local
                                                   ? kept.front().src
                                                   : kept.front().dst];
        } else {
            EvidenceSubgraph ev = explain(sub, ckpt, params, ecfg);
            kept = ev.kept;
            Tensor bin = binarize_mask(ev.global_mask);
            feat_sub = Tensor(sub.features.rows(), sub.features.cols());
            feat_comp = Tensor(sub.features.rows(), sub.features.cols());
            for (std::size_t i = 0; i < feat_sub.size(); ++i) {
                feat_sub.data()[i] = sub.features.vec()[i] * bin.vec()[i];
                feat_comp.data()[i] = sub.features.vec()[i] * (1.0 - bin.vec()[i]);
            }
            pick = algorithm_pick(ev);
        }

        EvalRecord rec;
        rec.instance_id = sub.center_id;
        rec.y = *sub.label;
        rec.p_orig = predict(ckpt, sub);
        rec.p_sub = predict(ckpt, hard_kept_adjacency(sub, kept), feat_sub, sub.center_local);
        rec.p_comp =
            predict(ckpt, hard_complement_adjacency(sub, kept), feat_comp, sub.center_local);
        rec.y_orig = rec.p_orig[1] > rec.p_orig[0] ? 1 : 0;
        rec.y_sub = rec.p_sub[1] > rec.p_sub[0] ? 1 : 0;
        rec.y_comp = rec.p_comp[1] > rec.p_comp[0] ? 1 : 0;
        gefs.push_back(gef({rec.p_orig[0], rec.p_orig[1]}, {rec.p_sub[0], rec.p_sub[1]}));
        report.records.push_back(rec);
        report.algo_picks.push_back(pick);
    }

    report.fid_plus = fidelity_plus(report.records);
    report.fid_minus = fidelity_minus(report.records);
    try {
        report.charact = charact(report.fid_plus, report.fid_minus);
    } catch (const NumericError&) {
        report.charact = std::nullopt;
    }
    double g = 0.0;
    for (double v : gefs) g += v;
    report.gef = g / gefs.size();

    if (annotations && !annotations->empty()) {
        std::vector<std::string> algo;
        std::vector<std::vector<std::string>> unions;
        std::vector<std::string> rater_names; // fixed expert roster from first annotated instance
        std::vector<std::vector<std::string>> top_by_rater; // per instance: expert tops + algo
        for (std::size_t i = 0; i < instances.size(); ++i) {
            auto it = annotations->by_instance.find(instances[i].center_id);
            if (it == annotations->by_instance.end()) continue;
            std::vector<std::string> u;
            std::vector<std::string> tops;
            if (rater_names.empty())
                for (const auto& [expert, _] : it->second) rater_names.push_back(expert);
            for (const auto& name : rater_names) {
                auto eit = it->second.find(name);
                if (eit == it->second.end() || eit->second.empty())
                    throw DataError("annotations: instance '" + instances[i].center_id +
                                    "' missing picks for expert '" + name + "'");
                tops.push_back(eit->second.front());
                for (const auto& p : eit->second) u.push_back(p);
            }
            tops.push_back(report.algo_picks[i]);
            algo.push_back(report.algo_picks[i]);
            unions.push_back(std::move(u));
            top_by_rater.push_back(std::move(tops));
        }
        if (!algo.empty()) {
            report.ror = ror(algo, unions);
            // Fleiss table: raters = experts + the algorithm, category = top pick
            std::set<std::string> cats;
            for (const auto& tops : top_by_rater)
                for (const auto& t : tops) cats.insert(t);
            std::vector<std::string> cat_list(cats.begin(), cats.end());
            std::vector<std::vector<int>> table;
            for (const auto& tops : top_by_rater) {
                std::vector<int> row(cat_list.size(), 0);
                for (const auto& t : tops) {
                    auto pos = std::lower_bound(cat_list.begin(), cat_list.end(), t);
                    row[pos - cat_list.begin()] += 1;
                }
                table.push_back(std::move(row));
            }
            report.fleiss = fleiss_kappa(table);
        }
    }
    return report;
}

} // namespace gevex
