#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "meshroute/topology.hpp"

using namespace meshroute;

namespace {

// Hand-built topology: explicit nodes, explicit edges, rebuilt adjacency.
Topology make_manual(std::vector<Node> nodes, const std::vector<std::pair<int, int>>& links,
                     double width = 100.0, double height = 100.0) {
    Topology t;
    t.width = width;
    t.height = height;
    t.nodes = std::move(nodes);
    for (auto [u, v] : links) t.edges[edge_key(u, v)] = Edge{{0.5, 10.0, 1.0}};
    detail::rebuild_adjacency(t);
    return t;
}

Node at(int id, double x, double y, double range = 50.0, double energy = 1.0) {
    return {id, x, y, energy, range};
}

} // namespace

TEST_CASE("generate places n nodes inside the area with legal energy") {
    const Topology t = generate_random_topology(25, 500, 500, 250, 7);
    REQUIRE(t.nodes.size() == 25);
    REQUIRE(t.epoch == 0);
    for (const Node& n : t.nodes) {
        REQUIRE(n.x >= 0.0);
        REQUIRE(n.x <= 500.0);
        REQUIRE(n.y >= 0.0);
        REQUIRE(n.y <= 500.0);
        REQUIRE(n.residual_energy >= 0.2);
        REQUIRE(n.residual_energy <= 1.0);
        REQUIRE(n.range == 250.0);
    }
    // Ids are 1..n in sorted order.
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        REQUIRE(t.nodes[i].id == static_cast<int>(i) + 1);
}

TEST_CASE("generate is deterministic per seed") {
    const Topology a = generate_random_topology(25, 500, 500, 250, 7);
    const Topology b = generate_random_topology(25, 500, 500, 250, 7);
    const Topology c = generate_random_topology(25, 500, 500, 250, 8);
    REQUIRE(topology_to_string(a) == topology_to_string(b));
    REQUIRE(topology_to_string(a) != topology_to_string(c));
}

TEST_CASE("single node means zero edges") {
    const Topology t = generate_random_topology(1, 100, 100, 50, 1);
    REQUIRE(t.nodes.size() == 1);
    REQUIRE(t.edges.empty());
}

TEST_CASE("links follow the unit-disk rule with inclusive boundary") {
    const Topology t = generate_random_topology(40, 300, 300, 90, 3);
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < t.nodes.size(); ++j) {
            const Node& a = t.nodes[i];
            const Node& b = t.nodes[j];
            const double d = std::hypot(a.x - b.x, a.y - b.y);
            const bool should = d <= std::min(a.range, b.range);
            REQUIRE(t.edges.count(edge_key(a.id, b.id)) == (should ? 1u : 0u));
        }
    }

    // Distance exactly equal to range: edge exists (inclusive).
    Rng rng(1);
    const Topology exact = topology_from_nodes({at(1, 0, 0, 10), at(2, 10, 0, 10)}, 20, 20, 0, rng);
    REQUIRE(exact.edges.count({1, 2}) == 1);
    // One endpoint's shorter range breaks the link (min rule).
    Rng rng2(1);
    const Topology asym = topology_from_nodes({at(1, 0, 0, 10), at(2, 10, 0, 9.5)}, 20, 20, 0, rng2);
    REQUIRE(asym.edges.empty());
}

TEST_CASE("edge metrics are drawn inside the configured distributions") {
    const Topology t = generate_random_topology(30, 200, 200, 120, 5);
    REQUIRE(!t.edges.empty());
    for (const auto& [key, e] : t.edges) {
        REQUIRE(key.first < key.second);
        REQUIRE(e.metrics.throughput >= 0.0);
        REQUIRE(e.metrics.throughput <= 1.0);
        REQUIRE(e.metrics.delay_ms >= 1.0);
        REQUIRE(e.metrics.delay_ms <= 100.0);
        REQUIRE(e.metrics.jitter_ms >= 0.0);
        REQUIRE(e.metrics.jitter_ms <= 20.0);
        REQUIRE(std::isnan(e.cost)); // not costed yet
    }
}

TEST_CASE("generate validates its arguments") {
    REQUIRE_THROWS_AS(generate_random_topology(0, 100, 100, 50, 1), InvalidArgumentError);
    REQUIRE_THROWS_AS(generate_random_topology(5, -1, 100, 50, 1), InvalidArgumentError);
    REQUIRE_THROWS_AS(generate_random_topology(5, 100, 100, 0, 1), InvalidArgumentError);
}

TEST_CASE("apply_churn removes a node and its links, bumping the epoch") {
    // Triangle 1-2-3.
    const Topology t = make_manual({at(1, 0, 0), at(2, 10, 0), at(3, 0, 10)},
                                   {{1, 2}, {1, 3}, {2, 3}});
    Rng rng(1);
    const Topology next = apply_churn(t, {ChurnEvent::leave(2)}, rng);
    REQUIRE(next.epoch == t.epoch + 1);
    REQUIRE(next.nodes.size() == 2);
    REQUIRE(!next.has_node(2));
    REQUIRE(next.edges.size() == 1);
    REQUIRE(next.edges.count({1, 3}) == 1);
    // Original snapshot untouched.
    REQUIRE(t.nodes.size() == 3);
    REQUIRE(t.edges.size() == 3);
}

TEST_CASE("apply_churn join connects against survivors by the disk rule") {
    const Topology t = make_manual({at(1, 0, 0), at(2, 100, 0, 30)}, {});
    Rng rng(1);
    const Topology next = apply_churn(t, {ChurnEvent::join(at(3, 10, 0))}, rng);
    REQUIRE(next.nodes.size() == 3);
    // Node 3 at (10,0) is within range 50 of node 1, but node 2's range 30
    // cannot reach it at distance 90.
    REQUIRE(next.edges.count({1, 3}) == 1);
    REQUIRE(next.edges.count({2, 3}) == 0);
    // Fresh edges carry drawn metrics and no cost.
    REQUIRE(std::isnan(next.edges.at({1, 3}).cost));
}

TEST_CASE("apply_churn rejects unknown leaves and duplicate joins") {
    const Topology t = make_manual({at(1, 0, 0), at(2, 10, 0)}, {{1, 2}});
    Rng rng(1);
    REQUIRE_THROWS_AS(apply_churn(t, {ChurnEvent::leave(9)}, rng), InvalidArgumentError);
    REQUIRE_THROWS_AS(apply_churn(t, {ChurnEvent::join(at(2, 5, 5))}, rng), InvalidArgumentError);
    REQUIRE_THROWS_AS(apply_churn(t, {ChurnEvent::join(at(3, 500, 5))}, rng),
                      InvalidArgumentError); // outside the area
}

TEST_CASE("joins in one churn batch see earlier arrivals") {
    const Topology t = make_manual({at(1, 0, 0)}, {});
    Rng rng(1);
    const Topology next =
        apply_churn(t, {ChurnEvent::join(at(2, 20, 0)), ChurnEvent::join(at(3, 30, 0))}, rng);
    REQUIRE(next.edges.count({2, 3}) == 1); // 2 joined first, then 3 connected to it
}

TEST_CASE("neighbors lists sorted adjacent ids and rejects unknown nodes") {
    const Topology t = make_manual({at(1, 0, 0), at(2, 10, 0), at(3, 0, 10), at(4, 90, 90)},
                                   {{1, 3}, {1, 2}});
    const auto& nb = neighbors(t, 1);
    REQUIRE(nb == std::vector<int>{2, 3});
    REQUIRE(neighbors(t, 4).empty());
    REQUIRE_THROWS_AS(neighbors(t, 99), InvalidArgumentError);
}

TEST_CASE("node and edge lookups throw on unknowns") {
    const Topology t = make_manual({at(1, 0, 0), at(2, 10, 0)}, {{1, 2}});
    REQUIRE(t.node(2).id == 2);
    REQUIRE_THROWS_AS(t.node(5), InvalidArgumentError);
    REQUIRE(t.edge(2, 1).metrics.delay_ms == 10.0); // order-insensitive lookup
    REQUIRE_THROWS_AS(t.edge(1, 5), InvalidArgumentError);
    REQUIRE_THROWS_AS(edge_key(3, 3), InvalidArgumentError); // self loop
}

TEST_CASE("save/load round-trips and the second save is byte-identical") {
    const Topology t = generate_random_topology(25, 500, 500, 250, 7);
    const std::string first = topology_to_string(t);
    REQUIRE(first.rfind("wmn v1 25 500 500 0\n", 0) == 0);
    std::istringstream in(first);
    const Topology back = load_topology(in);
    REQUIRE(back.nodes.size() == t.nodes.size());
    REQUIRE(back.edges.size() == t.edges.size());
    REQUIRE(topology_to_string(back) == first);
}

TEST_CASE("loader rejects malformed documents with line numbers") {
    const auto reject = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            load_topology(in);
            FAIL("expected ParseError for: " << text);
        } catch (const ParseError& e) {
            REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring(needle));
        }
    };
    reject("bogus v1 2 100 100 0\nnode 1 0 0 1 50\nnode 2 10 0 1 50\n", "header");
    reject("wmn v2 2 100 100 0\nnode 1 0 0 1 50\nnode 2 10 0 1 50\n", "header");
    reject("wmn v1 2 100 100 0\nnode 1 0 0 1 50\n", "node");            // truncated
    reject("wmn v1 2 100 100 0\nnode 1 0 0 1 50\nnode 1 10 0 1 50\n",
           "duplicate");                                                 // repeated id
    reject("wmn v1 1 100 100 0\nnode 1 0 0 2 50\n", "line 2");           // energy out of range
    reject("wmn v1 2 100 100 0\nnode 1 0 0 1 50\nnode 2 10 0 1 50\nedge 2 1 0.5 10 1\n",
           "u < v");
    reject("wmn v1 2 100 100 0\nnode 1 0 0 1 50\nnode 2 10 0 1 50\nedge 1 3 0.5 10 1\n",
           "unknown");
    reject("wmn v1 2 100 100 0\nnode 1 0 0 1 50\nnode 2 10 0 1 50\nedge 1 2 1.5 10 1\n",
           "range");
    reject("wmn v1 2 100 100 0\nnode 1 0 0 1 50\nnode 2 10 0 1 50\n"
           "edge 1 2 0.5 10 1\nedge 1 2 0.5 10 1\n",
           "duplicate");
    reject("wmn v1 2 100 100 0\nnode 1 0 0 1 50 extra\nnode 2 10 0 1 50\n", "trailing");
    reject("wmn v1 2 100 100 0\nnode 1 0 0 1 50\nnode 2 10 0 1 50\nunexpected\n", "edge");
}

TEST_CASE("loaded numbers survive a parse-print cycle at 9 significant digits") {
    const std::string doc =
        "wmn v1 2 123.456789 98.7654321 4\n"
        "node 1 0.123456789 7.5 0.987654321 33.3\n"
        "node 2 50 60 1 33.3\n"
        "edge 1 2 0.333333333 45.6789012 12.3456789\n";
    std::istringstream in(doc);
    REQUIRE(topology_to_string(load_topology(in)) == doc);
}
