#pragma once

#include "gevex/tensor.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gevex {

enum class NodeType { Company, Person };

NodeType node_type_from_string(const std::string& s); // throws ParseError
std::string node_type_to_string(NodeType t);

// Heterogeneous directed multigraph with typed nodes, named edge relations and
// one dense feature row per node. Relations are indexed in order of first
// appearance in the edge file.
struct HetGraph {
    struct Node {
        std::string id;
        NodeType type;
    };
    struct Edge {
        int src, dst, rel;
    };

    std::vector<Node> nodes;
    std::unordered_map<std::string, int> node_index;
    std::vector<std::string> relations;
    std::unordered_map<std::string, int> relation_index;
    std::vector<Edge> edges;
    std::vector<std::string> feature_names;
    Tensor features; // nodes x feature dims

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_relations() const { return static_cast<int>(relations.size()); }
    int feature_dim() const { return features.cols(); }

    int index_of(const std::string& id) const; // throws ReferentialError
};

HetGraph load_graph(const std::string& nodes_path, const std::string& edges_path,
                    const std::string& features_path);

// id -> {0,1}
std::unordered_map<std::string, int> load_labels(const std::string& path);

// L-hop computation subgraph around a center node. Reachability ignores edge
// direction; the extracted adjacency keeps it. Node order is ascending by the
// parent graph's node index. Edge list order is (relation, src, dst) ascending
// and always mirrors the adjacency support.
struct CompSubgraph {
    struct Edge {
        int src, dst, rel; // local indices
        bool operator==(const Edge& o) const {
            return src == o.src && dst == o.dst && rel == o.rel;
        }
    };

    std::string center_id;
    int center_local = -1;
    int hops = 0;
    std::vector<int> orig_index;
    std::vector<std::string> node_ids;
    std::vector<NodeType> node_types;
    std::vector<std::string> relations; // copy of the parent graph's R
    std::vector<Tensor> adjacency;      // per relation, n x n, entries in [0,1]
    Tensor features;                    // n x d
    std::vector<Edge> edges;
    std::optional<int> label;

    int num_nodes() const { return static_cast<int>(node_ids.size()); }
    int num_relations() const { return static_cast<int>(relations.size()); }
    void rebuild_edges_from_adjacency();
};

CompSubgraph computation_subgraph(const HetGraph& g, const std::string& center_id, int hops);

// A meta-path pattern: typed node sequence joined by named relations.
// node_types.size() == relations.size() + 1, at least one relation.
struct MetaPathPattern {
    std::vector<NodeType> node_types;
    std::vector<std::string> relations;

    int length() const { return static_cast<int>(relations.size()); }
    void validate() const; // throws ConfigError
    std::string to_string() const;
};

// One concrete match of a pattern inside a subgraph.
struct MetaPathInstance {
    std::vector<int> node_ids;  // local indices, pattern order
    std::vector<int> edge_refs; // indices into CompSubgraph::edges
    bool touches_center = false;
};

// Every simple directed path matching the pattern, in deterministic order
// (start node ascending, then neighbor indices ascending at each step).
// A pattern naming a relation the subgraph does not carry yields no matches.
std::vector<MetaPathInstance> enumerate_metapath_instances(const CompSubgraph& sub,
                                                           const MetaPathPattern& pattern);

// Copy of the subgraph with every edge referenced by any instance zeroed out
// of its relation's adjacency. Nodes and features are untouched; the edge
// list is rebuilt, so edge indices are only meaningful per subgraph copy.
CompSubgraph remove_metapath(const CompSubgraph& sub,
                             const std::vector<MetaPathInstance>& instances);

} // namespace gevex
