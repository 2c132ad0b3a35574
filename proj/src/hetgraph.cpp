#include "gevex/hetgraph.hpp"

#include "gevex/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

using nlohmann::json;

namespace gevex {

NodeType node_type_from_string(const std::string& s) {
    if (s == "company") return NodeType::Company;
    if (s == "person") return NodeType::Person;
    throw ParseError("unknown node type '" + s + "' (expected \"company\" or \"person\")");
}

std::string node_type_to_string(NodeType t) {
    return t == NodeType::Company ? "company" : "person";
}

int HetGraph::index_of(const std::string& id) const {
    auto it = node_index.find(id);
    if (it == node_index.end())
        throw ReferentialError("unknown node id '" + id + "'");
    return it->second;
}

namespace {

json parse_jsonl_line(const std::string& path, int lineno, const std::string& line) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(path + " line " + std::to_string(lineno) + ": " + e.what());
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

bool blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

} // namespace

HetGraph load_graph(const std::string& nodes_path, const std::string& edges_path,
                    const std::string& features_path) {
    HetGraph g;

    {
        auto in = open_or_throw(nodes_path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (blank(line)) continue;
            json j = parse_jsonl_line(nodes_path, lineno, line);
            if (!j.contains("id") || !j.contains("type") || !j["id"].is_string() ||
                !j["type"].is_string())
                throw ParseError(nodes_path + " line " + std::to_string(lineno) +
                                 ": expected {\"id\": str, \"type\": str}");
            std::string id = j["id"].get<std::string>();
            if (g.node_index.count(id))
                throw DataError(nodes_path + " line " + std::to_string(lineno) +
                                ": duplicate node id '" + id + "'");
            NodeType type;
            try {
                type = node_type_from_string(j["type"].get<std::string>());
            } catch (const ParseError& e) {
                throw ParseError(nodes_path + " line " + std::to_string(lineno) + ": " + e.what());
            }
            g.node_index[id] = static_cast<int>(g.nodes.size());
            g.nodes.push_back({id, type});
        }
    }

    {
        auto in = open_or_throw(edges_path);
        std::string line;
        int lineno = 0;
        std::set<std::tuple<int, int, int>> seen;
        while (std::getline(in, line)) {
            ++lineno;
            if (blank(line)) continue;
            json j = parse_jsonl_line(edges_path, lineno, line);
            if (!j.contains("src") || !j.contains("dst") || !j.contains("rel") ||
                !j["src"].is_string() || !j["dst"].is_string() || !j["rel"].is_string())
                throw ParseError(edges_path + " line " + std::to_string(lineno) +
                                 ": expected {\"src\": str, \"dst\": str, \"rel\": str}");
            std::string src = j["src"].get<std::string>();
            std::string dst = j["dst"].get<std::string>();
            std::string rel = j["rel"].get<std::string>();
            auto si = g.node_index.find(src);
            if (si == g.node_index.end())
                throw ReferentialError(edges_path + " line " + std::to_string(lineno) +
                                       ": src '" + src + "' is not a declared node");
            auto di = g.node_index.find(dst);
            if (di == g.node_index.end())
                throw ReferentialError(edges_path + " line " + std::to_string(lineno) +
                                       ": dst '" + dst + "' is not a declared node");
            auto ri = g.relation_index.find(rel);
            int r;
            if (ri == g.relation_index.end()) {
                r = static_cast<int>(g.relations.size());
                g.relation_index[rel] = r;
                g.relations.push_back(rel);
            } else {
                r = ri->second;
            }
            auto key = std::make_tuple(si->second, di->second, r);
            if (!seen.insert(key).second)
                throw DataError(edges_path + " line " + std::to_string(lineno) +
                                ": duplicate edge (" + src + ", " + dst + ", " + rel + ")");
            g.edges.push_back({si->second, di->second, r});
        }
    }

    {
        auto in = open_or_throw(features_path);
        std::string line;
        if (!std::getline(in, line))
            throw ParseError(features_path + ": missing header row");
        {
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                if (!cell.empty() && cell.back() == '\r') cell.pop_back();
                g.feature_names.push_back(cell);
            }
        }
        int d = static_cast<int>(g.feature_names.size());
        if (d == 0) throw ParseError(features_path + ": empty header row");

        std::vector<double> data;
        data.reserve(static_cast<std::size_t>(g.nodes.size()) * d);
        int lineno = 1;
        int rows = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (blank(line)) continue;
            std::stringstream ss(line);
            std::string cell;
            int col = 0;
            while (std::getline(ss, cell, ',')) {
                if (!cell.empty() && cell.back() == '\r') cell.pop_back();
                ++col;
                if (col > d)
                    throw DimensionError(features_path + " line " + std::to_string(lineno) +
                                         ": expected " + std::to_string(d) + " columns");
                try {
                    std::size_t used = 0;
                    double v = std::stod(cell, &used);
                    if (used != cell.size()) throw std::invalid_argument(cell);
                    data.push_back(v);
                } catch (const std::exception&) {
                    throw ParseError(features_path + " line " + std::to_string(lineno) +
                                     ": '" + cell + "' is not a number");
                }
            }
            if (col != d)
                throw DimensionError(features_path + " line " + std::to_string(lineno) +
                                     ": expected " + std::to_string(d) + " columns, got " +
                                     std::to_string(col));
            ++rows;
        }
        if (rows != static_cast<int>(g.nodes.size()))
            throw DimensionError(features_path + ": " + std::to_string(rows) +
                                 " feature rows for " + std::to_string(g.nodes.size()) + " nodes");
        try {
            g.features = Tensor(rows, d, std::move(data));
        } catch (const NumericError&) {
            throw NumericError(features_path + ": non-finite feature value");
        }
    }

    return g;
}

std::unordered_map<std::string, int> load_labels(const std::string& path) {
    auto in = open_or_throw(path);
    std::unordered_map<std::string, int> labels;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        json j = parse_jsonl_line(path, lineno, line);
        if (!j.contains("id") || !j.contains("label") || !j["id"].is_string() ||
            !j["label"].is_number_integer())
            throw ParseError(path + " line " + std::to_string(lineno) +
                             ": expected {\"id\": str, \"label\": 0|1}");
        int y = j["label"].get<int>();
        if (y != 0 && y != 1)
            throw ParseError(path + " line " + std::to_string(lineno) +
                             ": label must be 0 or 1, got " + std::to_string(y));
        std::string id = j["id"].get<std::string>();
        if (labels.count(id))
            throw DataError(path + " line " + std::to_string(lineno) + ": duplicate label for '" +
                            id + "'");
        labels[id] = y;
    }
    return labels;
}

void CompSubgraph::rebuild_edges_from_adjacency() {
    edges.clear();
    int n = num_nodes();
    for (int r = 0; r < num_relations(); ++r)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (adjacency[r].at(i, j) != 0.0) edges.push_back({i, j, r});
}

CompSubgraph computation_subgraph(const HetGraph& g, const std::string& center_id, int hops) {
    if (hops < 0) throw ConfigError("computation_subgraph: hops must be >= 0");
    int center = g.index_of(center_id);

    // undirected BFS out to the hop budget
    std::vector<std::vector<int>> und(g.num_nodes());
    for (const auto& e : g.edges) {
        und[e.src].push_back(e.dst);
        und[e.dst].push_back(e.src);
    }
    std::vector<int> dist(g.num_nodes(), -1);
    std::deque<int> q{center};
    dist[center] = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        if (dist[u] == hops) continue;
        for (int v : und[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }

    CompSubgraph sub;
    sub.center_id = center_id;
    sub.hops = hops;
    sub.relations = g.relations;
    for (int v = 0; v < g.num_nodes(); ++v)
        if (dist[v] >= 0) sub.orig_index.push_back(v);

    std::vector<int> local(g.num_nodes(), -1);
    for (int i = 0; i < static_cast<int>(sub.orig_index.size()); ++i) {
        int v = sub.orig_index[i];
        local[v] = i;
        sub.node_ids.push_back(g.nodes[v].id);
        sub.node_types.push_back(g.nodes[v].type);
        if (v == center) sub.center_local = i;
    }

    int n = sub.num_nodes();
    int d = g.feature_dim();
    sub.features = Tensor(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) sub.features.at(i, j) = g.features.at(sub.orig_index[i], j);

    sub.adjacency.assign(g.num_relations(), Tensor(n, n));
    for (const auto& e : g.edges) {
        int ls = local[e.src], ld = local[e.dst];
        if (ls >= 0 && ld >= 0) sub.adjacency[e.rel].at(ls, ld) = 1.0;
    }
    sub.rebuild_edges_from_adjacency();
    return sub;
}

void MetaPathPattern::validate() const {
    if (relations.empty())
        throw ConfigError("meta-path pattern needs at least one relation");
    if (node_types.size() != relations.size() + 1)
        throw ConfigError("meta-path pattern has " + std::to_string(node_types.size()) +
                          " node types for " + std::to_string(relations.size()) + " relations");
}

std::string MetaPathPattern::to_string() const {
    std::string s = node_type_to_string(node_types[0]);
    for (std::size_t i = 0; i < relations.size(); ++i)
        s += " -[" + relations[i] + "]-> " + node_type_to_string(node_types[i + 1]);
    return s;
}

std::vector<MetaPathInstance> enumerate_metapath_instances(const CompSubgraph& sub,
                                                           const MetaPathPattern& pattern) {
    pattern.validate();

    std::vector<int> rel_ids;
    for (const auto& name : pattern.relations) {
        auto it = std::find(sub.relations.begin(), sub.relations.end(), name);
        if (it == sub.relations.end()) return {}; // relation absent: nothing can match
        rel_ids.push_back(static_cast<int>(it - sub.relations.begin()));
    }

    // outgoing edge index per (node, relation), edge list order preserved
    int n = sub.num_nodes();
    std::vector<std::vector<std::vector<int>>> out(
        n, std::vector<std::vector<int>>(sub.num_relations()));
    for (int ei = 0; ei < static_cast<int>(sub.edges.size()); ++ei) {
        const auto& e = sub.edges[ei];
        out[e.src][e.rel].push_back(ei);
    }

    std::vector<MetaPathInstance> result;
    std::vector<int> path_nodes, path_edges;
    std::vector<char> on_path(n, 0);

    auto extend = [&](auto&& self, int depth) -> void {
        if (depth == pattern.length()) {
            MetaPathInstance inst;
            inst.node_ids = path_nodes;
            inst.edge_refs = path_edges;
            inst.touches_center =
                std::find(path_nodes.begin(), path_nodes.end(), sub.center_local) !=
                path_nodes.end();
            result.push_back(std::move(inst));
            return;
        }
        int u = path_nodes.back();
        for (int ei : out[u][rel_ids[depth]]) {
            int v = sub.edges[ei].dst;
            if (on_path[v]) continue;
            if (sub.node_types[v] != pattern.node_types[depth + 1]) continue;
            on_path[v] = 1;
            path_nodes.push_back(v);
            path_edges.push_back(ei);
            self(self, depth + 1);
            path_edges.pop_back();
            path_nodes.pop_back();
            on_path[v] = 0;
        }
    };

    for (int s = 0; s < n; ++s) {
        if (sub.node_types[s] != pattern.node_types[0]) continue;
        on_path[s] = 1;
        path_nodes.push_back(s);
        extend(extend, 0);
        path_nodes.pop_back();
        on_path[s] = 0;
    }
    return result;
}

CompSubgraph remove_metapath(const CompSubgraph& sub,
                             const std::vector<MetaPathInstance>& instances) {
    CompSubgraph out = sub;
    for (const auto& inst : instances) {
        for (int ei : inst.edge_refs) {
            if (ei < 0 || ei >= static_cast<int>(sub.edges.size()))
                throw ReferentialError("remove_metapath: edge ref " + std::to_string(ei) +
                                       " out of range");
            const auto& e = sub.edges[ei];
            out.adjacency[e.rel].at(e.src, e.dst) = 0.0;
        }
    }
    out.rebuild_edges_from_adjacency();
    return out;
}

} // namespace gevex
