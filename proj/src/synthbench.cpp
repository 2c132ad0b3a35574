#include "gevex/synthbench.hpp"

#include "gevex/errors.hpp"
#include "gevex/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <tuple>

namespace gevex {

MotifKind motif_kind_from_string(const std::string& s) {
    if (s == "risk-triangle") return MotifKind::RiskTriangle;
    if (s == "risk-chain") return MotifKind::RiskChain;
    throw ConfigError("unknown motif kind '" + s + "' (risk-triangle | risk-chain)");
}

std::string motif_kind_to_string(MotifKind k) {
    return k == MotifKind::RiskTriangle ? "risk-triangle" : "risk-chain";
}

void SynthConfig::validate() const {
    if (num_companies < 1 || num_persons < 1 || num_relations < 1)
        throw ConfigError("node and relation counts must be >= 1");
    if (attach_degree < 1) throw ConfigError("attach_degree must be >= 1");
    if (motif_count < 0) throw ConfigError("motif_count must be >= 0");
    if (noise_dims < 0 || noise_motif_edges < 0 || decoy_count < 0 || motif_spread < 0)
        throw ConfigError("noise_dims, noise_motif_edges, decoy_count and motif_spread must be >= 0");
    if (signal_dims.empty()) throw ConfigError("signal_dims must be non-empty");
    std::set<int> uniq(signal_dims.begin(), signal_dims.end());
    if (static_cast<int>(uniq.size()) != static_cast<int>(signal_dims.size()))
        throw ConfigError("signal_dims must be distinct");
    for (int s : signal_dims)
        if (s < 0 || s >= feature_dim())
            throw ConfigError("signal dim " + std::to_string(s) + " outside feature range [0," +
                              std::to_string(feature_dim()) + ")");
    if (hot_min_per_motif < 1 || hot_min_per_motif > 3)
        throw ConfigError("hot_min_per_motif must be in [1,3]");
    if (hot_sigma <= 0.0) throw ConfigError("hot_sigma must be positive");
    int need = motif_count * 3 + decoy_count;
    // motifs avoid the oldest (hub) quarter of the attachment backbone
    int pool = num_companies - num_companies / 4;
    if (need > pool)
        throw ConfigError("motif_count " + std::to_string(motif_count) + " plus " +
                          std::to_string(decoy_count) + " decoys need " + std::to_string(need) +
                          " companies but only " + std::to_string(pool) +
                          " are outside the hub region");
}

namespace {

std::string company_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "C%04d", i);
    return buf;
}

std::string person_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "P%04d", i);
    return buf;
}

std::vector<std::string> relation_names(int r) {
    static const char* canon[] = {"loan", "invest", "supply", "manage"};
    std::vector<std::string> names;
    for (int i = 0; i < r; ++i)
        names.push_back(i < 4 ? canon[i] : "rel" + std::to_string(i));
    return names;
}

} // namespace

SynthResult generate(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    const int nc = cfg.num_companies;
    const int np = cfg.num_persons;
    const int d = cfg.feature_dim();
    const int motif_len = 3; // both motif kinds sit on three nodes
    const int motif_rel = 0;
    const int person_rel = cfg.num_relations - 1;
    std::vector<int> backbone_rels;
    if (cfg.num_relations >= 3)
        for (int r = 1; r < cfg.num_relations - 1; ++r) backbone_rels.push_back(r);
    else
        backbone_rels.push_back(cfg.num_relations == 2 ? 1 : 0);

    SynthResult out;
    HetGraph& g = out.graph;
    for (int i = 0; i < nc; ++i) {
        g.node_index[company_id(i)] = g.num_nodes();
        g.nodes.push_back({company_id(i), NodeType::Company});
    }
    for (int i = 0; i < np; ++i) {
        g.node_index[person_id(i)] = g.num_nodes();
        g.nodes.push_back({person_id(i), NodeType::Person});
    }
    g.relations = relation_names(cfg.num_relations);
    for (int r = 0; r < cfg.num_relations; ++r) g.relation_index[g.relations[r]] = r;

    std::set<std::tuple<int, int, int>> seen;
    auto add_edge = [&](int src, int dst, int rel) -> bool {
        if (src == dst) return false;
        if (!seen.insert({src, dst, rel}).second) return false;
        g.edges.push_back({src, dst, rel});
        return true;
    };

    // preferential-attachment backbone over the companies: each new company
    // wires attach_degree edges to earlier ones, degree-proportional
    std::vector<int> pool; // one entry per edge endpoint
    int seedlen = std::min(nc, cfg.attach_degree + 1);
    int rel_cursor = 0;
    for (int i = 1; i < seedlen; ++i) {
        add_edge(i, i - 1, backbone_rels[rel_cursor++ % backbone_rels.size()]);
        pool.push_back(i);
        pool.push_back(i - 1);
    }
    for (int i = seedlen; i < nc; ++i) {
        std::set<int> picked;
        int want = std::min(cfg.attach_degree, i);
        int guard = 0;
        while (static_cast<int>(picked.size()) < want && guard < 50 * want) {
            ++guard;
            int t = pool.empty() ? rng.uniform_int(0, i - 1)
                                 : pool[rng.uniform_int(0, static_cast<int>(pool.size()) - 1)];
            if (t != i) picked.insert(t);
        }
        for (int j = 0; static_cast<int>(picked.size()) < want && j < i; ++j) picked.insert(j);
        for (int t : picked) {
            if (add_edge(i, t, backbone_rels[rel_cursor++ % backbone_rels.size()])) {
                pool.push_back(i);
                pool.push_back(t);
            }
        }
    }

    // persons manage one or two companies each
    for (int p = 0; p < np; ++p) {
        int want = rng.uniform_int(1, 2);
        for (int k = 0; k < want; ++k) {
            for (int tries = 0; tries < 50; ++tries)
                if (add_edge(nc + p, rng.uniform_int(0, nc - 1), person_rel)) break;
        }
    }

    // plant motifs (and pick decoys) among the younger, low-degree companies
    int lo = nc / 4;
    std::vector<int> candidates(nc - lo);
    std::iota(candidates.begin(), candidates.end(), lo);
    for (int i = static_cast<int>(candidates.size()) - 1; i > 0; --i)
        std::swap(candidates[i], candidates[rng.uniform_int(0, i)]);

    // keep motifs out of each other's receptive fields: a member claims a ball
    // of motif_spread backbone hops, later motifs avoid claimed balls (best effort)
    int n_nodes = nc + np;
    std::vector<std::vector<int>> und(n_nodes);
    for (const auto& e : g.edges) {
        und[e.src].push_back(e.dst);
        und[e.dst].push_back(e.src);
    }
    std::vector<char> forbidden(n_nodes, 0), used(n_nodes, 0);
    auto claim_ball = [&](int v) {
        std::vector<int> frontier{v}, dist(n_nodes, -1);
        dist[v] = 0;
        forbidden[v] = 1;
        for (size_t head = 0; head < frontier.size(); ++head) {
            int u = frontier[head];
            if (dist[u] >= cfg.motif_spread) continue;
            for (int w : und[u])
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    forbidden[w] = 1;
                    frontier.push_back(w);
                }
        }
    };
    auto take = [&](int count, bool respect_spread) {
        std::vector<int> picked;
        for (int v : candidates) {
            if (static_cast<int>(picked.size()) == count) break;
            if (used[v] || (respect_spread && forbidden[v])) continue;
            picked.push_back(v);
        }
        return picked;
    };

    std::vector<std::vector<int>> motifs;
    std::set<int> in_motif;
    for (int m = 0; m < cfg.motif_count; ++m) {
        std::vector<int> members = take(motif_len, true);
        if (static_cast<int>(members.size()) < motif_len)
            members = take(motif_len, false); // spread exhausted, pack the rest
        for (int v : members) {
            used[v] = 1;
            in_motif.insert(v);
            if (cfg.motif_spread > 0) claim_ball(v);
        }
        std::set<EdgeTriple> planted;
        auto plant = [&](int a, int b) {
            add_edge(a, b, motif_rel);
            planted.insert({g.nodes[a].id, g.nodes[b].id, motif_rel});
        };
        plant(members[0], members[1]);
        plant(members[1], members[2]);
        if (cfg.motif == MotifKind::RiskTriangle) plant(members[2], members[0]);
        for (const auto& e : planted) out.truth.motif_edges.push_back(e);
        motifs.push_back(std::move(members));
    }
    std::sort(out.truth.motif_edges.begin(), out.truth.motif_edges.end());

    std::set<int> hot;
    for (const auto& members : motifs) {
        int extra = motif_len - cfg.hot_min_per_motif;
        int count = cfg.hot_min_per_motif + (extra > 0 ? rng.uniform_int(0, 1) : 0);
        for (int k = 0; k < count; ++k) hot.insert(members[k]);
    }
    std::vector<int> decoys = take(cfg.decoy_count, false);
    for (int v : decoys) {
        used[v] = 1;
        hot.insert(v);
    }

    auto pick_cold = [&]() {
        for (int tries = 0; tries < 200; ++tries) {
            int v = rng.uniform_int(0, nc - 1);
            if (!in_motif.count(v) && !hot.count(v)) return v;
        }
        return -1;
    };

    // decoys come in hot loan chains d1 -> d2 -> cold, so one-hop signatures
    // match the planted cycles and only the closed hot ring is risky
    for (int k = 0; k + 1 < static_cast<int>(decoys.size()); k += 2) {
        add_edge(decoys[k], decoys[k + 1], motif_rel);
        int tail = pick_cold();
        if (tail >= 0) add_edge(decoys[k + 1], tail, motif_rel);
    }
    if (decoys.size() % 2 == 1) {
        int tail = pick_cold();
        if (tail >= 0) add_edge(decoys.back(), tail, motif_rel);
    }

    // stray relation-0 edges between cold non-motif companies
    for (int k = 0; k < cfg.noise_motif_edges; ++k) {
        for (int tries = 0; tries < 200; ++tries) {
            int a = rng.uniform_int(0, nc - 1);
            int b = rng.uniform_int(0, nc - 1);
            if (in_motif.count(a) || in_motif.count(b) || hot.count(a) || hot.count(b)) continue;
            if (add_edge(a, b, motif_rel)) break;
        }
    }

    std::sort(g.edges.begin(), g.edges.end(), [](const HetGraph::Edge& a, const HetGraph::Edge& b) {
        return std::tie(a.rel, a.src, a.dst) < std::tie(b.rel, b.src, b.dst);
    });

    std::set<int> signal(cfg.signal_dims.begin(), cfg.signal_dims.end());
    Tensor x(g.num_nodes(), d);
    for (int i = 0; i < g.num_nodes(); ++i)
        for (int j = 0; j < d; ++j) {
            double z = rng.normal();
            bool hot_cell = i < nc && hot.count(i) && signal.count(j);
            x.at(i, j) = hot_cell ? cfg.hot_mu + cfg.hot_sigma * z : z;
        }
    g.features = std::move(x);
    for (int j = 0; j < d; ++j)
        g.feature_names.push_back((signal.count(j) ? "s" : "x") + std::to_string(j));

    std::vector<int> sorted_signal(cfg.signal_dims.begin(), cfg.signal_dims.end());
    std::sort(sorted_signal.begin(), sorted_signal.end());
    for (int m = 0; m < static_cast<int>(motifs.size()); ++m) {
        std::vector<EdgeTriple> edges;
        const auto& members = motifs[m];
        auto rec = [&](int a, int b) {
            edges.push_back({g.nodes[a].id, g.nodes[b].id, motif_rel});
        };
        rec(members[0], members[1]);
        rec(members[1], members[2]);
        if (cfg.motif == MotifKind::RiskTriangle) rec(members[2], members[0]);
        std::sort(edges.begin(), edges.end());
        for (int v : members) {
            double mean = 0.0;
            for (int s : cfg.signal_dims) mean += g.features.at(v, s);
            mean /= cfg.signal_dims.size();
            if (mean > cfg.label_threshold) {
                out.truth.evidence_edges[g.nodes[v].id] = edges;
                out.truth.evidence_dims[g.nodes[v].id] = sorted_signal;
            }
        }
    }

    for (int i = 0; i < nc; ++i) {
        double mean = 0.0;
        for (int s : cfg.signal_dims) mean += g.features.at(i, s);
        mean /= cfg.signal_dims.size();
        out.labels[g.nodes[i].id] = (in_motif.count(i) && mean > cfg.label_threshold) ? 1 : 0;
    }
    return out;
}

double explanation_edge_auc(const EvidenceSubgraph& ev, const GroundTruth& truth) {
    auto it = truth.evidence_edges.find(ev.center_id);
    if (it == truth.evidence_edges.end() || it->second.empty())
        throw DataError("no ground-truth evidence for '" + ev.center_id + "'");
    std::set<EdgeTriple> pos(it->second.begin(), it->second.end());

    struct Scored {
        double score;
        bool positive;
    };
    std::vector<Scored> scored;
    for (const auto& e : ev.support_edges) {
        EdgeTriple t{ev.node_ids[e.src], ev.node_ids[e.dst], e.rel};
        scored.push_back({ev.fused_soft.at(e.src, e.dst), pos.count(t) > 0});
    }
    std::size_t npos = 0;
    for (const auto& s : scored) npos += s.positive ? 1 : 0;
    std::size_t nneg = scored.size() - npos;
    if (npos == 0 || nneg == 0)
        throw DataError("edge AUC needs both evidence and non-evidence support edges");

    // Mann-Whitney with average ranks for ties
    std::sort(scored.begin(), scored.end(),
              [](const Scored& a, const Scored& b) { return a.score < b.score; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < scored.size()) {
        std::size_t j = i;
        while (j < scored.size() && scored[j].score == scored[i].score) ++j;
        double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (scored[k].positive) rank_sum_pos += avg_rank;
        i = j;
    }
    double np_d = static_cast<double>(npos), nn_d = static_cast<double>(nneg);
    return (rank_sum_pos - np_d * (np_d + 1.0) / 2.0) / (np_d * nn_d);
}

double feature_precision_at_k(const EvidenceSubgraph& ev, const GroundTruth& truth, int k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    auto it = truth.evidence_dims.find(ev.center_id);
    if (it == truth.evidence_dims.end() || it->second.empty())
        throw DataError("no ground-truth signal dims for '" + ev.center_id + "'");
    int d = ev.global_mask.cols();
    if (k > d) k = d;

    std::vector<double> colmean(d, 0.0);
    for (int i = 0; i < ev.global_mask.rows(); ++i)
        for (int j = 0; j < d; ++j) colmean[j] += ev.global_mask.at(i, j);
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return colmean[a] > colmean[b]; });

    std::set<int> sig(it->second.begin(), it->second.end());
    int hit = 0;
    for (int i = 0; i < k; ++i) hit += sig.count(order[i]) ? 1 : 0;
    return static_cast<double>(hit) / k;
}

} // namespace gevex
