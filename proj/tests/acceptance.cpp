// Acceptance gate: nine release criteria, one PASS/FAIL line each, non-zero
// exit when any fails. Tolerances are pinned here, not read from anywhere.

#include "gevex/attribution.hpp"
#include "gevex/errors.hpp"
#include "gevex/explainer.hpp"
#include "gevex/hetgraph.hpp"
#include "gevex/jsonio.hpp"
#include "gevex/metrics.hpp"
#include "gevex/pipeline.hpp"
#include "gevex/rng.hpp"
#include "gevex/synthbench.hpp"
#include "gevex/target_model.hpp"
#include "gevex/tensor.hpp"

#include "test_support.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace {

using namespace gevex;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

struct Criterion {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += "FAILED: " + what;
    }
    void info(const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
};

// --- 1: closed-form metric anchors ------------------------------------------

Criterion metric_anchors() {
    Criterion c;
    double ch = charact(0.336, 0.120, 0.5, 0.5);
    c.require(std::fabs(ch - 0.486) <= 1e-3, fmt("charact(0.336,0.120) = %.6f, want 0.486", ch));
    std::vector<double> p{0.25, 0.75}, q{0.6, 0.4};
    double g0 = gef(p, p), g1 = gef(q, q);
    c.require(g0 == 0.0 && g1 == 0.0, "gef of identical distributions must be exactly 0");
    double gh = gef({1.0, 0.0}, {0.5, 0.5});
    c.require(std::fabs(gh - 0.5) <= 1e-9, fmt("gef((1,0),(0.5,0.5)) = %.12f, want 0.5", gh));
    c.info(fmt("charact=%.6f, gef identity=%g, gef((1,0),(0.5,0.5))=%.10f", ch, g0, gh));
    return c;
}

// --- 2: analytic gradients of the joint loss --------------------------------

Criterion gradient_check() {
    Criterion c;
    RunConfig cfg; // bundled small fixture; writes nothing
    auto t0 = Clock::now();
    double err = cmd_gradcheck(cfg, 1e-5);
    double secs = seconds_since(t0);
    c.require(err < 1e-4, fmt("max relative error %.3e >= 1e-4", err));
    c.require(secs < 10.0, fmt("took %.2fs, budget 10s", secs));
    c.info(fmt("max rel err %.3e over every generator weight in %.2fs", err, secs));
    return c;
}

// --- 3: generator invariants on randomized inputs ----------------------------

Criterion generator_invariants() {
    Criterion c;
    Rng rng(314159);
    int probes = 0;
    for (int t = 0; t < 1000 && c.ok; ++t) {
        int n = rng.uniform_int(2, 6);
        int h = rng.uniform_int(1, 4);
        int d = rng.uniform_int(1, 4);

        Tensor zr = testsupport::random_tensor(rng, n, h, -2.0, 2.0);
        Tensor z = testsupport::random_tensor(rng, n, h, -2.0, 2.0);
        Tensor a = decode_relation(zr, z);
        for (int i = 0; i < n && c.ok; ++i)
            for (int j = 0; j < n && c.ok; ++j) {
                c.require(a.at(i, j) > 0.0 && a.at(i, j) < 1.0,
                          fmt("decoder entry outside (0,1) at trial %d", t));
                c.require(a.at(i, j) == a.at(j, i), fmt("decoder asymmetry at trial %d", t));
            }

        Tensor xs = testsupport::random_tensor(rng, n, d, -3.0, 3.0);
        Tensor m = testsupport::random_tensor(rng, d, d, -2.0, 2.0);
        Tensor fm = layer_feature_mask(xs, m);
        for (int i = 0; i < n && c.ok; ++i)
            for (int j = 0; j < d && c.ok; ++j)
                c.require(fm.at(i, j) > 0.0 && fm.at(i, j) < 1.0,
                          fmt("feature mask outside (0,1) at trial %d", t));

        // binary support: s*v + s*(1-v) must give back s exactly
        Tensor sup(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) sup.at(i, j) = rng.uniform() < 0.4 ? 1.0 : 0.0;
        sup.at(0, 1) = 1.0;
        for (int i = 0; i < n && c.ok; ++i)
            for (int j = 0; j < n && c.ok; ++j) {
                double s = sup.at(i, j), v = a.at(i, j);
                c.require(s * v + s * (1.0 - v) == s,
                          fmt("complement identity broke at trial %d", t));
            }

        if (t % 10 == 0 && c.ok) {
            std::vector<Tensor> adj{sup, Tensor(n, n)};
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) adj[1].at(i, j) = rng.uniform() < 0.3 ? 1.0 : 0.0;
            std::vector<std::string> ids;
            for (int i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
            std::vector<NodeType> types(static_cast<std::size_t>(n), NodeType::Company);
            CompSubgraph sub = testsupport::make_subgraph(
                ids, types, {"r0", "r1"}, std::move(adj),
                testsupport::random_tensor(rng, n, d, -1.0, 1.0), 0, 1);

            TargetConfig tc;
            tc.hidden_dim = 4;
            TargetCheckpoint ck = TargetCheckpoint::init(tc, d, 2);
            ExplainerParams params = ExplainerParams::init(d, h, 2, 2, 1000 + t);
            params.trained = true;
            ExplainerConfig ecfg;
            ecfg.hidden_dim = h;
            ecfg.edge_budget = 1 + (t / 10) % 5;

            EvidenceSubgraph ev = explain(sub, ck, params, ecfg);
            std::size_t want = std::min<std::size_t>(ecfg.edge_budget, sub.edges.size());
            c.require(ev.kept.size() == want,
                      fmt("kept %zu edges, want min(budget,support)=%zu", ev.kept.size(), want));
            for (std::size_t i = 0; i < ev.kept.size() && c.ok; ++i) {
                const KeptEdge& e = ev.kept[i];
                c.require(sub.adjacency[e.rel].at(e.src, e.dst) == 1.0,
                          fmt("kept edge outside support at trial %d", t));
                c.require(e.weight > 0.0 && e.weight < 1.0,
                          fmt("kept weight outside (0,1) at trial %d", t));
                if (i > 0)
                    c.require(ev.kept[i - 1].weight >= e.weight,
                              fmt("kept weights not descending at trial %d", t));
            }
            ++probes;
        }
    }
    c.info(fmt("1000 randomized trials, %d extraction probes", probes));
    return c;
}

// --- 4: attribution vs a brute-force removal oracle --------------------------

// Six companies, one loan chain ending at the only informative feature and an
// invest chain ending at an identical feature the classifier ignores. Removing
// the loan chain must be the only thing that hurts.
CompSubgraph signal_subgraph() {
    std::vector<std::string> ids{"T", "S1", "S2", "D1", "D2", "U"};
    std::vector<NodeType> types(6, NodeType::Company);
    std::vector<Tensor> adj(2, Tensor(6, 6));
    adj[0].at(0, 1) = 1.0;
    adj[0].at(1, 2) = 1.0;
    adj[1].at(0, 3) = 1.0;
    adj[1].at(3, 4) = 1.0;
    adj[1].at(5, 0) = 1.0;
    Tensor x = Tensor::from_rows({{0.0}, {0.0}, {2.0}, {0.0}, {2.0}, {0.0}});
    return testsupport::make_subgraph(ids, types, {"loan", "invest"}, std::move(adj), x, 0, 1);
}

TargetCheckpoint signal_ckpt() {
    TargetCheckpoint ck;
    ck.config.hidden_dim = 1;
    ck.feature_dim = 1;
    ck.num_relations = 2;
    ck.weights = {{Tensor::filled(1, 1, 1.0), Tensor::filled(1, 1, 0.0)},
                  {Tensor::filled(1, 1, 1.0), Tensor::filled(1, 1, 0.0)}};
    ck.w_cls = Tensor::from_rows({{-6.0, 6.0}});
    ck.b_cls = Tensor(1, 2);
    return ck;
}

Criterion attribution_oracle() {
    Criterion c;
    CompSubgraph sub = signal_subgraph();
    TargetCheckpoint ck = signal_ckpt();
    std::vector<MetaPathPattern> pats{
        {{NodeType::Company, NodeType::Company, NodeType::Company}, {"loan", "loan"}},
        {{NodeType::Company, NodeType::Company, NodeType::Company}, {"invest", "invest"}}};

    double base = model_loss(ck, sub);
    std::vector<double> oracle;
    for (const auto& pat : pats) {
        auto insts = enumerate_metapath_instances(sub, pat);
        double s = 0.0;
        for (const auto& inst : insts)
            s += std::max(0.0, model_loss(ck, remove_metapath(sub, {inst})) - base);
        oracle.push_back(insts.empty() ? 0.0 : s / static_cast<double>(insts.size()));
    }
    c.require(oracle[0] > oracle[1],
              fmt("oracle scores %.4f vs %.4f lack a strict winner", oracle[0], oracle[1]));

    auto t0 = Clock::now();
    AttributionSubgraph att = build_attribution_subgraph(ck, sub, pats, 1, false);
    double ms = seconds_since(t0) * 1e3;

    c.require(!att.warning, "unexpected empty-attribution warning");
    c.require(att.kept_patterns.size() == 1 && att.kept_patterns[0] == 0,
              "top-1 pick disagrees with the removal oracle");
    for (std::size_t i = 0; i < oracle.size(); ++i)
        c.require(std::fabs(att.pattern_scores[i] - oracle[i]) <= 1e-12,
                  fmt("ranking statistic %zu drifted from the oracle", i));
    c.require(att.adjacency[0].at(0, 1) == 1.0 && att.adjacency[0].at(1, 2) == 1.0,
              "winning pattern's edges are not at maximal weight");
    double total = 0.0;
    for (const Tensor& ar : att.adjacency)
        for (int i = 0; i < ar.rows(); ++i)
            for (int j = 0; j < ar.cols(); ++j) total += ar.at(i, j);
    c.require(total == 2.0, fmt("attribution mass %.6f leaked off the winning pattern", total));
    c.require(ms < 1000.0, fmt("took %.0f ms, budget 1s", ms));
    c.info(fmt("oracle %.4f vs %.4f, pick matches, %.1f ms", oracle[0], oracle[1], ms));
    return c;
}

// --- 9: rater agreement ------------------------------------------------------

double oracle_kappa(const std::vector<std::vector<int>>& counts) {
    const int rows = static_cast<int>(counts.size());
    const int cats = static_cast<int>(counts[0].size());
    int raters = 0;
    for (int v : counts[0]) raters += v;
    double pbar = 0.0, pe = 0.0;
    std::vector<double> pj(cats, 0.0);
    for (const auto& row : counts) {
        double q = 0.0;
        for (int j = 0; j < cats; ++j) {
            q += static_cast<double>(row[j]) * (row[j] - 1);
            pj[j] += row[j];
        }
        pbar += q / (static_cast<double>(raters) * (raters - 1));
    }
    pbar /= rows;
    for (int j = 0; j < cats; ++j) {
        pj[j] /= static_cast<double>(rows) * raters;
        pe += pj[j] * pj[j];
    }
    return (pbar - pe) / (1.0 - pe);
}

Criterion kappa_anchors() {
    Criterion c;
    double perfect = fleiss_kappa({{3, 0}, {3, 0}, {0, 3}, {0, 3}});
    c.require(perfect == 1.0, fmt("perfect agreement gave %.12f, want exactly 1", perfect));
    std::vector<std::vector<int>> table{{3, 0}, {2, 1}, {1, 2}, {0, 3}};
    double got = fleiss_kappa(table);
    double want = oracle_kappa(table);
    c.require(std::fabs(got - want) <= 1e-12,
              fmt("kappa %.15f vs independent oracle %.15f", got, want));
    c.require(std::fabs(got - 1.0 / 3.0) <= 1e-12, fmt("hand value 1/3 missed: %.15f", got));
    c.info(fmt("perfect table=%.1f, graded table=%.12f (oracle %.12f)", perfect, got, want));
    return c;
}

// --- full pipeline state shared by 5, 6, 7, 8 --------------------------------

struct PipelineState {
    std::string dir_a, dir_b;
    double seconds_a = 0.0;
    RunConfig cfg; // parsed with out_dir = dir_a
    HetGraph graph;
    GroundTruth truth;
    TargetCheckpoint ckpt;
    ExplainerParams params;
    std::vector<CompSubgraph> test_instances;
};

RunConfig run_full(const std::string& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    nlohmann::json j;
    j["out_dir"] = dir;
    RunConfig cfg = parse_run_config(j);
    cmd_synth(cfg);
    cmd_train_target(cfg);
    cmd_attribute(cfg);
    cmd_train_explainer(cfg);
    cmd_explain(cfg);
    cmd_evaluate(cfg);
    return cfg;
}

// --- 8: determinism ----------------------------------------------------------

Criterion determinism(const PipelineState& st) {
    Criterion c;
    std::string ea = read_bytes(st.dir_a + "/evidence.json");
    std::string eb = read_bytes(st.dir_b + "/evidence.json");
    std::string ra = read_bytes(st.dir_a + "/report.json");
    std::string rb = read_bytes(st.dir_b + "/report.json");
    c.require(!ea.empty() && !ra.empty(), "artifacts are empty");
    c.require(ea == eb, "evidence.json differs between identically-seeded runs");
    c.require(ra == rb, "report.json differs between identically-seeded runs");
    c.info(fmt("evidence.json %zu bytes, report.json %zu bytes, byte-identical", ea.size(),
               ra.size()));
    return c;
}

// --- 5: planted evidence recovery ---------------------------------------------

Criterion benchmark_recovery(const PipelineState& st) {
    Criterion c;
    c.require(st.test_instances.size() >= 5,
              fmt("only %zu test instances", st.test_instances.size()));

    double auc = 0.0, prec = 0.0, rauc = 0.0, rprec = 0.0;
    int m = 0, rn = 0;
    Rng noise(20260825);
    for (const auto& inst : st.test_instances) {
        EvidenceSubgraph ev = explain(inst, st.ckpt, st.params, st.cfg.explainer);
        auc += explanation_edge_auc(ev, st.truth);
        prec += feature_precision_at_k(ev, st.truth, 8);
        ++m;
        for (int rep = 0; rep < 20; ++rep) {
            EvidenceSubgraph rs = ev; // same support, random edge scores
            for (const auto& e : rs.support_edges)
                rs.fused_soft.at(e.src, e.dst) = noise.uniform();
            rauc += explanation_edge_auc(rs, st.truth);

            EvidenceSubgraph rm = ev; // random feature mask
            for (int i = 0; i < rm.global_mask.rows(); ++i)
                for (int j = 0; j < rm.global_mask.cols(); ++j)
                    rm.global_mask.at(i, j) = noise.uniform();
            rprec += feature_precision_at_k(rm, st.truth, 8);
            ++rn;
        }
    }
    if (m > 0) {
        auc /= m;
        prec /= m;
        rauc /= rn;
        rprec /= rn;
    }
    c.require(auc >= 0.85, fmt("mean edge AUC %.4f < 0.85", auc));
    c.require(rauc <= 0.6, fmt("random-score edge AUC %.4f > 0.6", rauc));
    c.require(prec >= 0.6, fmt("mean feature precision@8 %.4f < 0.6", prec));
    c.require(rprec >= 0.1 && rprec <= 0.4,
              fmt("random-mask precision %.4f outside [0.1,0.4]", rprec));
    c.require(st.seconds_a < 300.0, fmt("pipeline took %.1fs, budget 300s", st.seconds_a));
    c.info(fmt("edge AUC %.4f (random %.4f), precision@8 %.4f (random %.4f), pipeline %.1fs",
               auc, rauc, prec, rprec, st.seconds_a));
    return c;
}

// --- 6: counterfactual training effect ----------------------------------------

Criterion counterfactual_effect(const PipelineState& st) {
    Criterion c;
    nlohmann::json tr = read_json_file(st.dir_a + "/explainer_trace.json");
    auto cf = tr.at("counterfactual_ce").get<std::vector<double>>();
    auto tot = tr.at("total").get<std::vector<double>>();
    c.require(cf.size() >= 2 && tot.size() == cf.size(), "trace too short");
    c.require(cf.back() < cf.front(),
              fmt("flipped-label CE %.4f -> %.4f did not drop", cf.front(), cf.back()));
    c.require(tot.back() < 0.9 * tot.front(),
              fmt("total loss %.4f -> %.4f fell less than 10%%", tot.front(), tot.back()));

    MetricsReport trained =
        evaluate_explainer(st.test_instances, st.ckpt, st.params, st.cfg.explainer);
    EvalOptions ro;
    ro.random_edges = true;
    ro.random_seed = 1;
    MetricsReport rnd =
        evaluate_explainer(st.test_instances, st.ckpt, st.params, st.cfg.explainer, nullptr, ro);
    c.require(trained.fid_plus - rnd.fid_plus >= 0.1,
              fmt("fid+ %.3f vs random selector %.3f: margin below 0.1", trained.fid_plus,
                  rnd.fid_plus));
    c.info(fmt("flipped-label CE %.4f -> %.4f, total %.4f -> %.4f, fid+ %.3f vs random %.3f",
               cf.front(), cf.back(), tot.front(), tot.back(), trained.fid_plus, rnd.fid_plus));
    return c;
}

// --- 7: inference-only extraction with bounded scaling ------------------------

Criterion inference_only(const PipelineState& st, const std::string& scratch) {
    Criterion c;

    ExplainerParams snapshot = st.params;
    const std::string before = scratch + "/params-before.json";
    const std::string after = scratch + "/params-after.json";
    save_explainer_params(st.params, before);
    (void)explain(st.test_instances.front(), st.ckpt, st.params, st.cfg.explainer);
    save_explainer_params(st.params, after);
    c.require(read_bytes(before) == read_bytes(after),
              "serialized parameters changed across explain");
    bool same = snapshot.trained == st.params.trained &&
                snapshot.loss_weights == st.params.loss_weights;
    for (int r = 0; r < st.params.num_relations; ++r)
        same = same && bitwise_equal(snapshot.enc_w0[r], st.params.enc_w0[r]) &&
               bitwise_equal(snapshot.enc_w1[r], st.params.enc_w1[r]);
    for (int l = 0; l < st.params.num_layers; ++l)
        same = same && bitwise_equal(snapshot.mask_m[l], st.params.mask_m[l]);
    c.require(same, "in-memory parameters changed across explain");

    // same node count, double the edges: the median wall time may grow at most 3x
    const int n = 24, d = 32, h = 32, R = 2, reps = 50, base_edges = 48;
    ExplainerConfig ecfg;
    ecfg.hidden_dim = h;
    ExplainerParams params = ExplainerParams::init(d, h, R, 2, 5);
    params.trained = true;
    TargetConfig tc;
    TargetCheckpoint ck = TargetCheckpoint::init(tc, d, R);

    auto build = [&](std::uint64_t seed, int edges) {
        Rng r(seed);
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(static_cast<std::size_t>(n) * (n - 1));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) pairs.emplace_back(i, j);
        for (int i = 0; i < edges; ++i) {
            int j = i + r.uniform_int(0, static_cast<int>(pairs.size()) - 1 - i);
            std::swap(pairs[i], pairs[j]);
        }
        std::vector<Tensor> adj(R, Tensor(n, n));
        for (int i = 0; i < edges; ++i) adj[i % R].at(pairs[i].first, pairs[i].second) = 1.0;
        std::vector<std::string> ids;
        for (int i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
        std::vector<NodeType> types(static_cast<std::size_t>(n), NodeType::Company);
        return testsupport::make_subgraph(ids, types, {"r0", "r1"}, std::move(adj),
                                          testsupport::random_tensor(r, n, d, -1.0, 1.0), 0, 1);
    };

    std::vector<CompSubgraph> small, big;
    small.reserve(reps);
    big.reserve(reps);
    for (int i = 0; i < reps; ++i) {
        small.push_back(build(1000 + i, base_edges));
        big.push_back(build(5000 + i, 2 * base_edges));
    }
    (void)explain(small[0], ck, params, ecfg); // warm up
    (void)explain(big[0], ck, params, ecfg);

    std::vector<double> ts, tb;
    for (int i = 0; i < reps; ++i) {
        auto t0 = Clock::now();
        (void)explain(small[i], ck, params, ecfg);
        ts.push_back(seconds_since(t0) * 1e3);
        auto t1 = Clock::now();
        (void)explain(big[i], ck, params, ecfg);
        tb.push_back(seconds_since(t1) * 1e3);
    }
    double ms_small = median(ts), ms_big = median(tb);
    c.require(ms_small > 0.0, "timer resolution too coarse to measure");
    double ratio = ms_big / ms_small;
    c.require(ratio <= 3.0,
              fmt("median %.3f ms at %d edges vs %.3f ms at %d: ratio %.2f > 3", ms_small,
                  base_edges, ms_big, 2 * base_edges, ratio));
    c.info(fmt("parameters frozen; median %.3f ms at %d edges, %.3f ms at %d (ratio %.2f)",
               ms_small, base_edges, ms_big, 2 * base_edges, ratio));
    return c;
}

const char* kNames[9] = {
    "closed-form metric anchors (charact, gef)",
    "joint-loss gradients match finite differences",
    "generator invariants hold on randomized inputs",
    "meta-path attribution agrees with the removal oracle",
    "planted evidence recovered on the synthetic benchmark",
    "counterfactual training shows a removal effect",
    "extraction is inference-only and scales with the support",
    "identical seeds give byte-identical artifacts",
    "rater-agreement statistic matches hand-computed values",
};

} // namespace

int main() {
    std::vector<Criterion> out(9);
    auto guard = [&](int slot, auto&& fn) {
        try {
            out[slot] = fn();
        } catch (const std::exception& e) {
            out[slot].ok = false;
            out[slot].detail = std::string("unhandled: ") + e.what();
        }
    };

    std::printf("stage: scalar anchors and oracles\n");
    guard(0, metric_anchors);
    guard(8, kappa_anchors);
    guard(3, attribution_oracle);
    std::printf("stage: randomized generator trials\n");
    guard(2, generator_invariants);
    std::printf("stage: finite-difference gradient probe\n");
    guard(1, gradient_check);

    const std::string base = (fs::temp_directory_path() / "gevex-acceptance").string();
    const std::string dir_a = base + "-a", dir_b = base + "-b", scratch = base + "-scratch";

    PipelineState st;
    st.dir_a = dir_a;
    st.dir_b = dir_b;
    bool pipeline_ok = true;
    std::string pipeline_err;
    try {
        fs::remove_all(scratch);
        fs::create_directories(scratch);
        std::printf("stage: full pipeline, first run\n");
        auto t0 = Clock::now();
        st.cfg = run_full(dir_a);
        st.seconds_a = seconds_since(t0);
        std::printf("stage: full pipeline, repeat run\n");
        run_full(dir_b);

        st.graph = load_graph(st.cfg.data.nodes, st.cfg.data.edges, st.cfg.data.features);
        auto labels = load_labels(st.cfg.data.labels);
        st.truth = load_ground_truth(st.cfg.data.ground_truth);
        Splits sp = load_splits(st.cfg.data.splits);
        st.ckpt = load_checkpoint(dir_a + "/target.json");
        st.params = load_explainer_params(dir_a + "/explainer.json");
        st.test_instances = build_instances(st.graph, labels, sp.test, st.cfg.hops);
        if (st.test_instances.empty()) throw DataError("empty test split");
    } catch (const std::exception& e) {
        pipeline_ok = false;
        pipeline_err = e.what();
    }

    if (!pipeline_ok) {
        for (int slot : {4, 5, 6, 7}) {
            out[slot].ok = false;
            out[slot].detail = "pipeline run failed: " + pipeline_err;
        }
    } else {
        std::printf("stage: artifact comparison and held-out evaluation\n");
        guard(7, [&] { return determinism(st); });
        guard(4, [&] { return benchmark_recovery(st); });
        guard(5, [&] { return counterfactual_effect(st); });
        guard(6, [&] { return inference_only(st, scratch); });
    }

    int failed = 0;
    std::printf("\n=== acceptance criteria ===\n");
    for (int i = 0; i < 9; ++i) {
        std::printf("[%s] %d. %s%s%s\n", out[i].ok ? "PASS" : "FAIL", i + 1, kNames[i],
                    out[i].detail.empty() ? "" : " -- ", out[i].detail.c_str());
        if (!out[i].ok) ++failed;
    }
    std::printf("%d/9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
