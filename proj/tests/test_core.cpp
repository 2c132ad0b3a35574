#include "gevex/errors.hpp"
#include "gevex/expr.hpp"
#include "gevex/hetgraph.hpp"
#include "gevex/rng.hpp"
#include "gevex/tensor.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

using namespace gevex;
using testsupport::TempDir;
using testsupport::write_file;

TEST_SUITE("tensor") {

TEST_CASE("constructors validate shape and finiteness") {
    Tensor z(2, 3);
    CHECK(z.rows() == 2);
    CHECK(z.cols() == 3);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(z.vec()[i] == 0.0);

    CHECK_THROWS_AS(Tensor(2, 2, {1.0, 2.0, 3.0}), ShapeError);
    CHECK_THROWS_AS(Tensor(2, 1, {1.0, std::numeric_limits<double>::quiet_NaN()}), NumericError);
    CHECK_THROWS_AS(Tensor(1, 1, {std::numeric_limits<double>::infinity()}), NumericError);
    CHECK_THROWS_AS(Tensor::from_rows({{1.0, 2.0}, {3.0}}), ShapeError);

    Tensor i3 = Tensor::identity(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(i3.at(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("raw skips validation, bitwise_equal is exact") {
    Tensor a = Tensor::raw(1, 2, {0.5, std::numeric_limits<double>::infinity()});
    CHECK_FALSE(a.all_finite());

    Tensor b = Tensor::from_rows({{0.1 + 0.2}});
    Tensor c = Tensor::from_rows({{0.3}});
    CHECK_FALSE(bitwise_equal(b, c)); // 0.1+0.2 != 0.3 in binary floating point
    CHECK(bitwise_equal(b, b));
    CHECK(max_abs_diff(b, c) > 0.0);
    CHECK(max_abs_diff(b, c) < 1e-15);
}

} // TEST_SUITE("tensor")

TEST_SUITE("expr") {

TEST_CASE("sigmoid of zero is one half") {
    Expression ex;
    NodeId x = ex.input("x", 1, 1);
    ex.set_root(ex.sigmoid(x));
    Tensor out = evaluate(ex, {{"x", Tensor(1, 1)}});
    CHECK(out.at(0, 0) == 0.5);
}

TEST_CASE("matmul by identity returns the operand") {
    Rng rng(3);
    Tensor m = testsupport::random_tensor(rng, 2, 2);
    Expression ex;
    NodeId i = ex.input("i", 2, 2);
    NodeId x = ex.input("m", 2, 2);
    ex.set_root(ex.matmul(i, x));
    Tensor out = evaluate(ex, {{"i", Tensor::identity(2)}, {"m", m}});
    CHECK(bitwise_equal(out, m));
}

TEST_CASE("relu(A*B + C) matches hand-computed values") {
    Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
    Tensor b = Tensor::from_rows({{5, 6}, {7, 8}});
    Tensor c = Tensor::from_rows({{-30, 1}, {2, -100}});
    Expression ex;
    ex.set_root(ex.relu(ex.add(ex.matmul(ex.input("a", 2, 2), ex.input("b", 2, 2)),
                               ex.input("c", 2, 2))));
    Tensor out = evaluate(ex, {{"a", a}, {"b", b}, {"c", c}});
    // A*B = [[19,22],[43,50]]; +C = [[-11,23],[45,-50]]; relu clips the negatives
    CHECK(out.at(0, 0) == 0.0);
    CHECK(out.at(0, 1) == 23.0);
    CHECK(out.at(1, 0) == 45.0);
    CHECK(out.at(1, 1) == 0.0);
}

TEST_CASE("construction-time shape checks") {
    Expression ex;
    NodeId a = ex.input("a", 2, 3);
    NodeId b = ex.input("b", 2, 2);
    CHECK_THROWS_AS(ex.matmul(a, b), ShapeError);
    CHECK_THROWS_AS(ex.add(a, b), ShapeError);
    CHECK_THROWS_AS(ex.hadamard(a, b), ShapeError);
    CHECK_THROWS_AS(ex.softmax_cross_entropy(a, b), ShapeError);
}

TEST_CASE("unbound and mis-shaped leaves are rejected at evaluation") {
    Expression ex;
    NodeId a = ex.input("a", 2, 2);
    ex.set_root(ex.relu(a));
    CHECK_THROWS_AS(evaluate(ex, {}), ShapeError);
    CHECK_THROWS_AS(evaluate(ex, {{"a", Tensor(3, 3)}}), ShapeError);
}

TEST_CASE("non-finite intermediate raises a numeric error naming the op") {
    Expression ex;
    NodeId a = ex.input("a", 1, 1);
    ex.set_root(ex.add(a, a));
    Bindings binds{{"a", Tensor(1, 1, {1.7e308})}};
    CHECK_THROWS_WITH_AS(evaluate(ex, binds), doctest::Contains("add"), NumericError);
}

TEST_CASE("evaluation is deterministic bit for bit") {
    Rng rng(11);
    Expression ex;
    NodeId a = ex.input("a", 3, 3);
    NodeId b = ex.input("b", 3, 3);
    ex.set_root(ex.sigmoid(ex.matmul(ex.row_normalize(ex.relu(a)), b)));
    Bindings binds{{"a", testsupport::random_tensor(rng, 3, 3, 0.1, 2.0)},
                   {"b", testsupport::random_tensor(rng, 3, 3)}};
    CHECK(bitwise_equal(evaluate(ex, binds), evaluate(ex, binds)));
}

TEST_CASE("linearity of linear subgraphs") {
    Rng rng(5);
    Expression ex;
    NodeId w = ex.input("w", 3, 4);
    NodeId x = ex.input("x", 4, 2);
    ex.set_root(ex.scalar_mul(ex.matmul(w, x), 1.5));
    Tensor wv = testsupport::random_tensor(rng, 3, 4);
    Tensor xv = testsupport::random_tensor(rng, 4, 2);
    Tensor yv = testsupport::random_tensor(rng, 4, 2);
    double ca = 0.7, cb = -1.3;
    Tensor combo(4, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j) combo.at(i, j) = ca * xv.at(i, j) + cb * yv.at(i, j);
    Tensor fx = evaluate(ex, {{"w", wv}, {"x", xv}});
    Tensor fy = evaluate(ex, {{"w", wv}, {"x", yv}});
    Tensor fc = evaluate(ex, {{"w", wv}, {"x", combo}});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(fc.at(i, j) == doctest::Approx(ca * fx.at(i, j) + cb * fy.at(i, j)).epsilon(1e-9));
}

TEST_CASE("gradient of reduce_sum is all ones") {
    Expression ex;
    NodeId x = ex.input("x", 2, 3);
    ex.set_root(ex.reduce_sum(x));
    Rng rng(2);
    GradResult g = gradients(ex, {{"x", testsupport::random_tensor(rng, 2, 3)}}, {"x"});
    CHECK(bitwise_equal(g.grads.at("x"), Tensor::ones(2, 3)));
}

TEST_CASE("gradient of MSE at its minimum is zero") {
    Rng rng(9);
    Tensor t = testsupport::random_tensor(rng, 2, 2);
    Expression ex;
    NodeId w = ex.param("w", 2, 2);
    NodeId tt = ex.input("t", 2, 2);
    ex.set_root(ex.mean_squared_error(w, tt));
    GradResult g = gradients(ex, {{"w", t}, {"t", t}}, {"w"});
    CHECK(bitwise_equal(g.grads.at("w"), Tensor(2, 2)));
}

TEST_CASE("gradients demand a scalar root") {
    Expression ex;
    NodeId x = ex.input("x", 2, 2);
    ex.set_root(ex.relu(x));
    CHECK_THROWS_AS(gradients(ex, {{"x", Tensor(2, 2)}}, {"x"}), ShapeError);
}

TEST_CASE("finite_diff_check on a quadratic is tiny") {
    Rng rng(4);
    Expression ex;
    NodeId x = ex.param("x", 3, 2);
    ex.set_root(ex.scalar_mul(ex.reduce_sum(ex.hadamard(x, x)), 0.5));
    Bindings binds{{"x", testsupport::random_tensor(rng, 3, 2)}};
    CHECK(finite_diff_check(ex, binds, {"x"}, 1e-5) < 1e-6);
}

TEST_CASE("finite_diff_check of a constant expression is zero") {
    Expression ex;
    NodeId x = ex.param("x", 2, 2);
    NodeId c = ex.input("c", 1, 1);
    // root ignores x entirely; the analytic and numeric gradients are both 0
    ex.set_root(ex.reduce_sum(c));
    (void)x;
    Bindings binds{{"x", Tensor::ones(2, 2)}, {"c", Tensor(1, 1, {3.0})}};
    CHECK(finite_diff_check(ex, binds, {"x"}, 1e-5) == 0.0);
}

TEST_CASE("finite_diff_check on a sigmoid chain stays under 1e-4") {
    Rng rng(6);
    Expression ex;
    NodeId x = ex.param("x", 2, 3);
    NodeId w = ex.param("w", 3, 2);
    ex.set_root(ex.reduce_sum(ex.sigmoid(ex.matmul(ex.sigmoid(x), w))));
    Bindings binds{{"x", testsupport::random_tensor(rng, 2, 3)},
                   {"w", testsupport::random_tensor(rng, 3, 2)}};
    CHECK(finite_diff_check(ex, binds, {"x", "w"}, 1e-5) < 1e-4);
}

TEST_CASE("every primitive passes a finite-difference probe") {
    Rng rng(7);
    auto bounded = [&](int r, int c) {
        // keep relu inputs away from the kink and row sums away from zero
        Tensor t(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) {
                double mag = rng.uniform(0.2, 2.0);
                t.at(i, j) = rng.uniform() < 0.5 ? -mag : mag;
            }
        return t;
    };

    SUBCASE("matmul") {
        Expression ex;
        ex.set_root(ex.reduce_sum(ex.matmul(ex.param("a", 2, 3), ex.param("b", 3, 2))));
        Bindings binds{{"a", bounded(2, 3)}, {"b", bounded(3, 2)}};
        CHECK(finite_diff_check(ex, binds, {"a", "b"}, 1e-5) < 1e-4);
    }
    SUBCASE("add and hadamard") {
        Expression ex;
        NodeId a = ex.param("a", 2, 2);
        NodeId b = ex.param("b", 2, 2);
        ex.set_root(ex.reduce_sum(ex.hadamard(ex.add(a, b), b)));
        Bindings binds{{"a", bounded(2, 2)}, {"b", bounded(2, 2)}};
        CHECK(finite_diff_check(ex, binds, {"a", "b"}, 1e-5) < 1e-4);
    }
    SUBCASE("concat_cols and transpose") {
        Expression ex;
        NodeId a = ex.param("a", 2, 2);
        NodeId b = ex.param("b", 2, 3);
        ex.set_root(ex.reduce_sum(ex.matmul(ex.concat_cols(a, b), ex.transpose(ex.concat_cols(a, b)))));
        Bindings binds{{"a", bounded(2, 2)}, {"b", bounded(2, 3)}};
        CHECK(finite_diff_check(ex, binds, {"a", "b"}, 1e-5) < 1e-4);
    }
    SUBCASE("relu away from the kink") {
        Expression ex;
        ex.set_root(ex.reduce_sum(ex.relu(ex.param("a", 3, 3))));
        Bindings binds{{"a", bounded(3, 3)}};
        CHECK(finite_diff_check(ex, binds, {"a"}, 1e-5) < 1e-4);
    }
    SUBCASE("sigmoid") {
        Expression ex;
        ex.set_root(ex.reduce_sum(ex.sigmoid(ex.param("a", 3, 3))));
        Bindings binds{{"a", bounded(3, 3)}};
        CHECK(finite_diff_check(ex, binds, {"a"}, 1e-5) < 1e-4);
    }
    SUBCASE("row_normalize on positive rows") {
        Expression ex;
        NodeId rn = ex.row_normalize(ex.param("a", 3, 4));
        ex.set_root(ex.reduce_sum(ex.hadamard(rn, rn)));
        Tensor pos(3, 4);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) pos.at(i, j) = rng.uniform(0.3, 2.0);
        Bindings binds{{"a", pos}};
        CHECK(finite_diff_check(ex, binds, {"a"}, 1e-5) < 1e-4);
    }
    SUBCASE("scalar_mul") {
        Expression ex;
        ex.set_root(ex.scalar_mul(ex.reduce_sum(ex.param("a", 2, 2)), -0.37));
        Bindings binds{{"a", bounded(2, 2)}};
        CHECK(finite_diff_check(ex, binds, {"a"}, 1e-5) < 1e-4);
    }
    SUBCASE("softmax_cross_entropy") {
        Expression ex;
        NodeId logits = ex.param("logits", 1, 2);
        NodeId target = ex.input("target", 1, 2);
        ex.set_root(ex.softmax_cross_entropy(logits, target));
        Bindings binds{{"logits", bounded(1, 2)}, {"target", Tensor::from_rows({{0.0, 1.0}})}};
        CHECK(finite_diff_check(ex, binds, {"logits"}, 1e-5) < 1e-4);
    }
    SUBCASE("mean_squared_error") {
        Expression ex;
        ex.set_root(ex.mean_squared_error(ex.param("a", 2, 3), ex.param("b", 2, 3)));
        Bindings binds{{"a", bounded(2, 3)}, {"b", bounded(2, 3)}};
        CHECK(finite_diff_check(ex, binds, {"a", "b"}, 1e-5) < 1e-4);
    }
}

TEST_CASE("row_normalize divides each row by its sum") {
    Expression ex;
    ex.set_root(ex.row_normalize(ex.input("a", 2, 2)));
    Tensor out = evaluate(ex, {{"a", Tensor::from_rows({{1, 3}, {2, 2}})}});
    CHECK(out.at(0, 0) == doctest::Approx(0.25));
    CHECK(out.at(0, 1) == doctest::Approx(0.75));
    CHECK(out.at(1, 0) == doctest::Approx(0.5));
    CHECK(out.at(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("softmax cross entropy survives extreme logits") {
    Expression ex;
    NodeId logits = ex.input("logits", 1, 2);
    NodeId target = ex.input("target", 1, 2);
    ex.set_root(ex.softmax_cross_entropy(logits, target));
    Tensor big = Tensor::from_rows({{700.0, -700.0}});
    Tensor oh = Tensor::from_rows({{1.0, 0.0}});
    Tensor loss = evaluate(ex, {{"logits", big}, {"target", oh}});
    CHECK(loss.at(0, 0) >= 0.0);
    CHECK(loss.at(0, 0) < 1e-10);
}

} // TEST_SUITE("expr")

TEST_SUITE("hetgraph") {

static void write_tiny_dataset(const TempDir& dir) {
    write_file(dir.file("nodes.jsonl"),
               "{\"id\":\"A\",\"type\":\"company\"}\n{\"id\":\"B\",\"type\":\"company\"}\n");
    write_file(dir.file("edges.jsonl"), "{\"src\":\"A\",\"dst\":\"B\",\"rel\":\"loan\"}\n");
    write_file(dir.file("features.csv"), "f0,f1,f2\n1.0,2.0,3.0\n4.0,5.0,6.0\n");
}

TEST_CASE("smallest well-formed dataset loads") {
    TempDir dir("load_min");
    write_tiny_dataset(dir);
    HetGraph g = load_graph(dir.file("nodes.jsonl"), dir.file("edges.jsonl"),
                            dir.file("features.csv"));
    CHECK(g.num_nodes() == 2);
    CHECK(g.num_relations() == 1);
    CHECK(g.feature_dim() == 3);
    CHECK(g.edges.size() == 1);
    CHECK(g.features.at(1, 2) == 6.0);
    CHECK(g.index_of("B") == 1);
    CHECK_THROWS_AS(g.index_of("nope"), ReferentialError);
}

TEST_CASE("dangling edge endpoint names the bad id") {
    TempDir dir("load_dangling");
    write_tiny_dataset(dir);
    write_file(dir.file("edges.jsonl"), "{\"src\":\"A\",\"dst\":\"X9\",\"rel\":\"loan\"}\n");
    CHECK_THROWS_WITH_AS(load_graph(dir.file("nodes.jsonl"), dir.file("edges.jsonl"),
                                    dir.file("features.csv")),
                         doctest::Contains("X9"), ReferentialError);
}

TEST_CASE("malformed record reports file and line") {
    TempDir dir("load_malformed");
    write_tiny_dataset(dir);
    write_file(dir.file("nodes.jsonl"),
               "{\"id\":\"A\",\"type\":\"company\"}\nnot json at all\n");
    CHECK_THROWS_WITH_AS(load_graph(dir.file("nodes.jsonl"), dir.file("edges.jsonl"),
                                    dir.file("features.csv")),
                         doctest::Contains("line 2"), ParseError);
}

TEST_CASE("ragged feature rows raise a dimension error") {
    TempDir dir("load_ragged");
    write_tiny_dataset(dir);
    write_file(dir.file("features.csv"), "f0,f1,f2\n1.0,2.0,3.0\n4.0,5.0\n");
    CHECK_THROWS_AS(load_graph(dir.file("nodes.jsonl"), dir.file("edges.jsonl"),
                               dir.file("features.csv")),
                    DimensionError);
}

TEST_CASE("ten relation names give ten indexed relations") {
    TempDir dir("load_rels");
    std::string nodes, edges;
    for (int i = 0; i < 11; ++i)
        nodes += "{\"id\":\"C" + std::to_string(i) + "\",\"type\":\"company\"}\n";
    std::string feats = "f0\n";
    for (int i = 0; i < 11; ++i) feats += "0.0\n";
    for (int i = 0; i < 10; ++i)
        edges += "{\"src\":\"C" + std::to_string(i) + "\",\"dst\":\"C" + std::to_string(i + 1) +
                 "\",\"rel\":\"r" + std::to_string(i) + "\"}\n";
    write_file(dir.file("nodes.jsonl"), nodes);
    write_file(dir.file("edges.jsonl"), edges);
    write_file(dir.file("features.csv"), feats);
    HetGraph g = load_graph(dir.file("nodes.jsonl"), dir.file("edges.jsonl"),
                            dir.file("features.csv"));
    CHECK(g.num_relations() == 10);
    CHECK(g.relations.front() == "r0");
    CHECK(g.relations.back() == "r9");
}

TEST_CASE("duplicate edge triples are rejected") {
    TempDir dir("load_dup");
    write_tiny_dataset(dir);
    write_file(dir.file("edges.jsonl"),
               "{\"src\":\"A\",\"dst\":\"B\",\"rel\":\"loan\"}\n"
               "{\"src\":\"A\",\"dst\":\"B\",\"rel\":\"loan\"}\n");
    CHECK_THROWS_AS(load_graph(dir.file("nodes.jsonl"), dir.file("edges.jsonl"),
                               dir.file("features.csv")),
                    DataError);
}

static HetGraph path_graph_abc() {
    HetGraph g;
    for (auto id : {"a", "b", "c"}) {
        g.node_index[id] = g.num_nodes();
        g.nodes.push_back({id, NodeType::Company});
    }
    g.relations = {"loan"};
    g.relation_index["loan"] = 0;
    g.edges = {{0, 1, 0}, {1, 2, 0}};
    g.feature_names = {"f0"};
    g.features = Tensor::from_rows({{1.0}, {2.0}, {3.0}});
    return g;
}

TEST_CASE("one and two hop extraction on a path graph") {
    HetGraph g = path_graph_abc();
    CompSubgraph s1 = computation_subgraph(g, "a", 1);
    CHECK(s1.node_ids == std::vector<std::string>{"a", "b"});
    CHECK(s1.center_local == 0);
    CHECK(s1.edges.size() == 1);

    CompSubgraph s2 = computation_subgraph(g, "a", 2);
    CHECK(s2.node_ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(s2.features.rows() == 3);
    CHECK(s2.features.at(2, 0) == 3.0);

    // reachability ignores direction: from c, one hop reaches b
    CompSubgraph back = computation_subgraph(g, "c", 1);
    CHECK(back.node_ids == std::vector<std::string>{"b", "c"});

    CHECK_THROWS_AS(computation_subgraph(g, "zz", 1), ReferentialError);
}

TEST_CASE("extraction agrees with an independent BFS and is monotone in hops") {
    Rng rng(21);
    HetGraph g = testsupport::random_company_graph(rng, 50, 120, 2, 3);

    // undirected breadth-first distances, computed without the library
    auto bfs_within = [&](int start, int max_d) {
        std::vector<int> dist(50, -1);
        std::queue<int> q;
        dist[start] = 0;
        q.push(start);
        std::vector<std::vector<int>> und(50);
        for (const auto& e : g.edges) {
            und[e.src].push_back(e.dst);
            und[e.dst].push_back(e.src);
        }
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            if (dist[u] == max_d) continue;
            for (int v : und[u])
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
        }
        std::set<std::string> ids;
        for (int v = 0; v < 50; ++v)
            if (dist[v] >= 0) ids.insert(g.nodes[v].id);
        return ids;
    };

    for (int start : {0, 7, 23, 49}) {
        CompSubgraph sub = computation_subgraph(g, g.nodes[start].id, 2);
        std::set<std::string> got(sub.node_ids.begin(), sub.node_ids.end());
        CHECK(got == bfs_within(start, 2));

        std::set<std::string> smaller, larger;
        for (int L = 1; L <= 3; ++L) {
            CompSubgraph s = computation_subgraph(g, g.nodes[start].id, L);
            larger = std::set<std::string>(s.node_ids.begin(), s.node_ids.end());
            if (L > 1)
                CHECK(std::includes(larger.begin(), larger.end(), smaller.begin(),
                                    smaller.end()));
            smaller = larger;
        }
    }
}

TEST_CASE("adjacency mirrors the edge list and keeps direction") {
    HetGraph g = path_graph_abc();
    CompSubgraph sub = computation_subgraph(g, "b", 1);
    REQUIRE(sub.node_ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(sub.adjacency[0].at(0, 1) == 1.0); // a -> b
    CHECK(sub.adjacency[0].at(1, 0) == 0.0);
    CHECK(sub.adjacency[0].at(1, 2) == 1.0); // b -> c
    int from_adj = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (sub.adjacency[0].at(i, j) != 0.0) ++from_adj;
    CHECK(from_adj == static_cast<int>(sub.edges.size()));
}

// six companies and two relations; the invest->supply two-step has exactly
// three matches, found here by an exhaustive scan over edge pairs
static HetGraph six_node_graph() {
    HetGraph g;
    for (auto id : {"A", "B", "C", "D", "E", "F"}) {
        g.node_index[id] = g.num_nodes();
        g.nodes.push_back({id, NodeType::Company});
    }
    g.node_index["P"] = g.num_nodes();
    g.nodes.push_back({"P", NodeType::Person});
    g.relations = {"invest", "supply", "manage"};
    for (int r = 0; r < 3; ++r) g.relation_index[g.relations[r]] = r;
    g.edges = {{0, 1, 0}, {1, 2, 1}, {0, 3, 0}, {3, 2, 1}, {2, 4, 0}, {4, 5, 1}, {6, 0, 2}};
    g.feature_names = {"f0"};
    g.features = Tensor::from_rows({{1}, {1}, {1}, {1}, {1}, {1}, {1}});
    return g;
}

TEST_CASE("single-relation pattern enumerates exactly that relation's edges") {
    HetGraph g = six_node_graph();
    CompSubgraph sub = computation_subgraph(g, "C", 3);
    REQUIRE(sub.num_nodes() == 7);
    MetaPathPattern p{{NodeType::Company, NodeType::Company}, {"invest"}};
    auto got = enumerate_metapath_instances(sub, p);
    std::set<std::pair<int, int>> got_pairs, want_pairs;
    for (const auto& inst : got) got_pairs.insert({inst.node_ids[0], inst.node_ids[1]});
    for (const auto& e : sub.edges)
        if (sub.relations[e.rel] == "invest" &&
            sub.node_types[e.src] == NodeType::Company &&
            sub.node_types[e.dst] == NodeType::Company)
            want_pairs.insert({e.src, e.dst});
    CHECK(got_pairs == want_pairs);

    // the person-sourced relation only matches with a person head type
    MetaPathPattern wrong{{NodeType::Company, NodeType::Company}, {"manage"}};
    CHECK(enumerate_metapath_instances(sub, wrong).empty());
    MetaPathPattern right{{NodeType::Person, NodeType::Company}, {"manage"}};
    CHECK(enumerate_metapath_instances(sub, right).size() == 1);
}

TEST_CASE("two-step pattern matches the brute-force edge-pair scan") {
    HetGraph g = six_node_graph();
    CompSubgraph sub = computation_subgraph(g, "C", 3);
    MetaPathPattern p{{NodeType::Company, NodeType::Company, NodeType::Company},
                      {"invest", "supply"}};
    auto got = enumerate_metapath_instances(sub, p);

    std::set<std::vector<int>> want;
    for (const auto& e1 : sub.edges)
        for (const auto& e2 : sub.edges) {
            if (sub.relations[e1.rel] != "invest" || sub.relations[e2.rel] != "supply") continue;
            if (e1.dst != e2.src) continue;
            if (e1.src == e1.dst || e2.src == e2.dst || e1.src == e2.dst) continue; // simple
            if (sub.node_types[e1.src] != NodeType::Company) continue;
            want.insert({e1.src, e1.dst, e2.dst});
        }
    std::set<std::vector<int>> got_paths;
    for (const auto& inst : got) got_paths.insert(inst.node_ids);
    CHECK(got_paths == want);
    CHECK(got_paths.size() == 3);

    // flagged instances are exactly the ones that visit the center
    for (const auto& inst : got) {
        bool visits = std::find(inst.node_ids.begin(), inst.node_ids.end(), sub.center_local) !=
                      inst.node_ids.end();
        CHECK(inst.touches_center == visits);
    }
}

TEST_CASE("pattern naming an absent relation yields no matches") {
    HetGraph g = six_node_graph();
    CompSubgraph sub = computation_subgraph(g, "A", 2);
    MetaPathPattern p{{NodeType::Company, NodeType::Company}, {"guarantee"}};
    CHECK(enumerate_metapath_instances(sub, p).empty());
}

TEST_CASE("pattern validation rejects malformed shapes") {
    MetaPathPattern bad{{NodeType::Company}, {}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    MetaPathPattern mismatched{{NodeType::Company, NodeType::Company}, {"a", "b"}};
    CHECK_THROWS_AS(mismatched.validate(), ConfigError);
}

TEST_CASE("removal with no instances is the identity") {
    HetGraph g = six_node_graph();
    CompSubgraph sub = computation_subgraph(g, "C", 3);
    CompSubgraph out = remove_metapath(sub, {});
    CHECK(out.edges.size() == sub.edges.size());
    for (int r = 0; r < sub.num_relations(); ++r)
        CHECK(bitwise_equal(out.adjacency[r], sub.adjacency[r]));
    CHECK(bitwise_equal(out.features, sub.features));
}

TEST_CASE("removing every instance of a relation zeroes its adjacency") {
    HetGraph g = six_node_graph();
    CompSubgraph sub = computation_subgraph(g, "C", 3);
    MetaPathPattern p{{NodeType::Company, NodeType::Company}, {"supply"}};
    auto instances = enumerate_metapath_instances(sub, p);
    REQUIRE(!instances.empty());
    CompSubgraph out = remove_metapath(sub, instances);
    int rel = 1;
    CHECK(bitwise_equal(out.adjacency[rel], Tensor(sub.num_nodes(), sub.num_nodes())));
    CHECK(bitwise_equal(out.features, sub.features));
}

TEST_CASE("overlapping instances drop the edge-ref union once") {
    HetGraph g = six_node_graph();
    CompSubgraph sub = computation_subgraph(g, "C", 3);
    MetaPathPattern p{{NodeType::Company, NodeType::Company, NodeType::Company},
                      {"invest", "supply"}};
    auto instances = enumerate_metapath_instances(sub, p);
    // pick the two paths that share the supply edge into C
    std::vector<MetaPathInstance> both;
    for (const auto& inst : instances)
        if (inst.node_ids.back() == sub.center_local) both.push_back(inst);
    REQUIRE(both.size() == 2);
    std::set<int> union_refs;
    for (const auto& inst : both)
        union_refs.insert(inst.edge_refs.begin(), inst.edge_refs.end());
    CompSubgraph out = remove_metapath(sub, both);
    CHECK(sub.edges.size() - out.edges.size() == union_refs.size());
}

TEST_CASE("removal never raises entries and re-enumeration finds nothing") {
    HetGraph g = six_node_graph();
    CompSubgraph sub = computation_subgraph(g, "C", 3);
    MetaPathPattern p{{NodeType::Company, NodeType::Company, NodeType::Company},
                      {"invest", "supply"}};
    auto instances = enumerate_metapath_instances(sub, p);
    CompSubgraph out = remove_metapath(sub, instances);
    for (int r = 0; r < sub.num_relations(); ++r)
        for (int i = 0; i < sub.num_nodes(); ++i)
            for (int j = 0; j < sub.num_nodes(); ++j)
                CHECK(out.adjacency[r].at(i, j) <= sub.adjacency[r].at(i, j));
    CHECK(enumerate_metapath_instances(out, p).empty());
}

TEST_CASE("label file loads and validates") {
    TempDir dir("labels");
    write_file(dir.file("labels.jsonl"),
               "{\"id\":\"A\",\"label\":1}\n{\"id\":\"B\",\"label\":0}\n");
    auto labels = load_labels(dir.file("labels.jsonl"));
    CHECK(labels.at("A") == 1);
    CHECK(labels.at("B") == 0);
    write_file(dir.file("bad.jsonl"), "{\"id\":\"A\",\"label\":7}\n");
    CHECK_THROWS_AS(load_labels(dir.file("bad.jsonl")), DataError);
}

} // TEST_SUITE("hetgraph")
