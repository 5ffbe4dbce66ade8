#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fuzzy.hpp"
#include "rng.hpp"

namespace meshroute {

// ======================================================================
// Undirected unit-disk (range-limited) geometric graph snapshots.
// Node ids are 1-based, stable across churn, and never reused.
// ======================================================================

// ---- domain types ----
struct Node {
    int id = 0;
    double x = 0.0, y = 0.0;       // meters
    double residual_energy = 1.0;  // normalized [0, 1]
    double range = 250.0;          // transmission radius, meters
};

struct LinkMetrics {
    double throughput = 0.0; // normalized [0, 1]
    double delay_ms = 0.0;   // >= 0
    double jitter_ms = 0.0;  // >= 0, independent of delay
};

struct Edge {
    LinkMetrics metrics;
    // Integrated fuzzy cost; NaN until cost_all_links (or a manual set).
    double cost = std::numeric_limits<double>::quiet_NaN();
};

using EdgeKey = std::pair<int, int>; // normalized u < v

inline EdgeKey edge_key(int u, int v) {
    if (u == v) throw InvalidArgumentError("edge_key: self-loop " + std::to_string(u));
    return u < v ? EdgeKey{u, v} : EdgeKey{v, u};
}

struct Topology {
    double width = 0.0, height = 0.0; // deployment area, meters
    int epoch = 0;                    // snapshot index G_epoch
    std::vector<Node> nodes;          // sorted by id
    std::map<EdgeKey, Edge> edges;    // deterministic (u,v)-ascending order
    std::map<int, std::vector<int>> adjacency; // sorted neighbor lists

    bool has_node(int id) const {
        return adjacency.find(id) != adjacency.end();
    }
    const Node& node(int id) const {
        for (const Node& n : nodes)
            if (n.id == id) return n;
        throw InvalidArgumentError("unknown node id " + std::to_string(id));
    }
    const Edge& edge(int u, int v) const {
        const auto it = edges.find(edge_key(u, v));
        if (it == edges.end())
            throw InvalidArgumentError("no link " + std::to_string(u) + "-" + std::to_string(v));
        return it->second;
    }
};

// Uniform metric / energy distributions used at generation and join time.
struct MetricDistributions {
    double throughput_lo = 0.0, throughput_hi = 1.0;
    double delay_lo = 1.0, delay_hi = 100.0; // ms
    double jitter_lo = 0.0, jitter_hi = 20.0; // ms
    double energy_lo = 0.2, energy_hi = 1.0;  // no node starts dead
};

struct ChurnEvent {
    enum class Kind { Join, Leave };
    Kind kind = Kind::Leave;
    Node node;        // full payload for joins
    int leave_id = 0; // target for leaves

    static ChurnEvent join(Node n) { return {Kind::Join, std::move(n), 0}; }
    static ChurnEvent leave(int id) { return {Kind::Leave, {}, id}; }
};

// ---- internals ----
namespace detail {

inline double node_distance(const Node& a, const Node& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

// Unit-disk rule: inclusive <= against the weaker of the two radios.
inline bool in_range(const Node& a, const Node& b) {
    return node_distance(a, b) <= std::min(a.range, b.range);
}

inline LinkMetrics draw_metrics(Rng& rng, const MetricDistributions& dists) {
    LinkMetrics m;
    m.throughput = uniform_in(rng, dists.throughput_lo, dists.throughput_hi);
    m.delay_ms = uniform_in(rng, dists.delay_lo, dists.delay_hi);
    m.jitter_ms = uniform_in(rng, dists.jitter_lo, dists.jitter_hi);
    return m;
}

inline void rebuild_adjacency(Topology& t) {
    t.adjacency.clear();
    for (const Node& n : t.nodes) t.adjacency[n.id]; // every node gets an entry
    for (const auto& [key, edge] : t.edges) {
        (void)edge;
        t.adjacency[key.first].push_back(key.second);
        t.adjacency[key.second].push_back(key.first);
    }
    for (auto& [id, nbrs] : t.adjacency) {
        (void)id;
        std::sort(nbrs.begin(), nbrs.end());
    }
}

inline void check_node(const Node& n, double width, double height) {
    if (n.id < 1) throw InvalidArgumentError("node id must be >= 1");
    if (!(n.x >= 0.0 && n.x <= width && n.y >= 0.0 && n.y <= height))
        throw InvalidArgumentError("node " + std::to_string(n.id) + " lies outside the area");
    if (!(n.residual_energy >= 0.0 && n.residual_energy <= 1.0))
        throw InvalidArgumentError("node " + std::to_string(n.id) + " energy outside [0,1]");
    if (!(n.range > 0.0))
        throw InvalidArgumentError("node " + std::to_string(n.id) + " range must be > 0");
}

} // namespace detail

// Build a topology from fixed node placements: derives the unit-disk edge
// set and draws link metrics. Backbone for generation, joins, and fixtures.
inline Topology topology_from_nodes(std::vector<Node> nodes, double width, double height,
                                    int epoch, Rng& rng, const MetricDistributions& dists = {}) {
    if (!(width > 0.0 && height > 0.0))
        throw InvalidArgumentError("area dimensions must be positive");
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        detail::check_node(nodes[i], width, height);
        if (i > 0 && nodes[i].id == nodes[i - 1].id)
            throw InvalidArgumentError("duplicate node id " + std::to_string(nodes[i].id));
    }
    Topology t;
    t.width = width;
    t.height = height;
    t.epoch = epoch;
    t.nodes = std::move(nodes);
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < t.nodes.size(); ++j)
            if (detail::in_range(t.nodes[i], t.nodes[j]))
                t.edges[{t.nodes[i].id, t.nodes[j].id}] = Edge{detail::draw_metrics(rng, dists)};
    detail::rebuild_adjacency(t);
    return t;
}

// ---- generation ----
inline Topology generate_random_topology(int n, double width, double height, double range,
                                         std::uint64_t seed,
                                         const MetricDistributions& dists = {}) {
    if (n < 1) throw InvalidArgumentError("node count must be >= 1");
    if (!(width > 0.0 && height > 0.0))
        throw InvalidArgumentError("area dimensions must be positive");
    if (!(range > 0.0)) throw InvalidArgumentError("range must be positive");
    Rng rng(seed);
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(n));
    for (int id = 1; id <= n; ++id) {
        Node node;
        node.id = id;
        node.x = uniform_in(rng, 0.0, width);
        node.y = uniform_in(rng, 0.0, height);
        node.residual_energy = uniform_in(rng, dists.energy_lo, dists.energy_hi);
        node.range = range;
        nodes.push_back(node);
    }
    return topology_from_nodes(std::move(nodes), width, height, /*epoch=*/0, rng, dists);
}

// ---- churn ----
// Returns a new snapshot with epoch incremented; the input is untouched.
// Events apply in list order; joins re-evaluate the unit-disk rule against
// the survivors present at that moment, drawing fresh metrics from `rng`.
inline Topology apply_churn(const Topology& topo, const std::vector<ChurnEvent>& events,
                            Rng& rng, const MetricDistributions& dists = {}) {
    Topology next = topo;
    next.epoch = topo.epoch + 1;
    for (const ChurnEvent& ev : events) {
        if (ev.kind == ChurnEvent::Kind::Leave) {
            const auto it = std::find_if(next.nodes.begin(), next.nodes.end(),
                                         [&](const Node& n) { return n.id == ev.leave_id; });
            if (it == next.nodes.end())
                throw InvalidArgumentError("churn leave: unknown node id " +
                                           std::to_string(ev.leave_id));
            next.nodes.erase(it);
            for (auto eit = next.edges.begin(); eit != next.edges.end();) {
                if (eit->first.first == ev.leave_id || eit->first.second == ev.leave_id)
                    eit = next.edges.erase(eit);
                else
                    ++eit;
            }
        } else {
            detail::check_node(ev.node, next.width, next.height);
            const bool taken = std::any_of(next.nodes.begin(), next.nodes.end(),
                                           [&](const Node& n) { return n.id == ev.node.id; });
            if (taken)
                throw InvalidArgumentError("churn join: node id " + std::to_string(ev.node.id) +
                                           " already present");
            // Connect against survivors in ascending id order (deterministic
            // metric draw sequence).
            for (const Node& other : next.nodes)
                if (detail::in_range(other, ev.node))
                    next.edges[edge_key(other.id, ev.node.id)] =
                        Edge{detail::draw_metrics(rng, dists)};
            next.nodes.push_back(ev.node);
            std::sort(next.nodes.begin(), next.nodes.end(),
                      [](const Node& a, const Node& b) { return a.id < b.id; });
        }
    }
    detail::rebuild_adjacency(next);
    return next;
}

// ---- queries ----
inline const std::vector<int>& neighbors(const Topology& topo, int v) {
    const auto it = topo.adjacency.find(v);
    if (it == topo.adjacency.end())
        throw InvalidArgumentError("neighbors: unknown node id " + std::to_string(v));
    return it->second;
}

// ---- fuzzy cost glue ----
// Residual energy for an undirected cached cost is the weaker endpoint's:
// a low-energy node must transmit less no matter the direction.
inline double link_cost(const FuzzyInferenceSystem& fis, const LinkMetrics& metrics,
                        double residual_energy) {
    if (!(metrics.throughput >= 0.0 && metrics.throughput <= 1.0))
        throw InvalidArgumentError("link_cost: throughput outside [0,1]");
    if (!(metrics.delay_ms >= 0.0)) throw InvalidArgumentError("link_cost: negative delay");
    if (!(metrics.jitter_ms >= 0.0)) throw InvalidArgumentError("link_cost: negative jitter");
    if (!(residual_energy >= 0.0 && residual_energy <= 1.0))
        throw InvalidArgumentError("link_cost: energy outside [0,1]");
    return link_cost_raw(fis, metrics.throughput, metrics.delay_ms, metrics.jitter_ms,
                         residual_energy);
}

// ---- text format ----
// Header `wmn v1 <n> <width> <height> <epoch>`, one `node` line per node,
// one `edge` line per undirected edge with u < v. Values print with 9
// significant digits, which round-trips decimal->double->decimal exactly.
namespace detail {

inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace detail

inline void save_topology(const Topology& topo, std::ostream& out) {
    out << "wmn v1 " << topo.nodes.size() << ' ' << detail::fmt9(topo.width) << ' '
        << detail::fmt9(topo.height) << ' ' << topo.epoch << '\n';
    for (const Node& n : topo.nodes)
        out << "node " << n.id << ' ' << detail::fmt9(n.x) << ' ' << detail::fmt9(n.y) << ' '
            << detail::fmt9(n.residual_energy) << ' ' << detail::fmt9(n.range) << '\n';
    for (const auto& [key, e] : topo.edges)
        out << "edge " << key.first << ' ' << key.second << ' ' << detail::fmt9(e.metrics.throughput)
            << ' ' << detail::fmt9(e.metrics.delay_ms) << ' ' << detail::fmt9(e.metrics.jitter_ms)
            << '\n';
}

inline Topology load_topology(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("topology: empty input");
    std::istringstream hs(line);
    std::string magic, version;
    std::size_t n = 0;
    double width = 0.0, height = 0.0;
    int epoch = 0;
    if (!(hs >> magic >> version >> n >> width >> height >> epoch) || magic != "wmn" ||
        version != "v1")
        throw ParseError("topology: bad header '" + line + "'");
    if (!(width > 0.0 && height > 0.0)) throw ParseError("topology: non-positive area");
    Topology t;
    t.width = width;
    t.height = height;
    t.epoch = epoch;
    int line_no = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw ParseError("topology: expected " + std::to_string(n) + " node lines");
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        Node node;
        if (!(ls >> tag >> node.id >> node.x >> node.y >> node.residual_energy >> node.range) ||
            tag != "node")
            throw ParseError("topology line " + std::to_string(line_no) + ": bad node line");
        std::string trailing;
        if (ls >> trailing)
            throw ParseError("topology line " + std::to_string(line_no) + ": trailing content");
        try {
            detail::check_node(node, width, height);
        } catch (const InvalidArgumentError& e) {
            throw ParseError("topology line " + std::to_string(line_no) + ": " + e.what());
        }
        t.nodes.push_back(node);
    }
    std::sort(t.nodes.begin(), t.nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < t.nodes.size(); ++i)
        if (t.nodes[i].id == t.nodes[i - 1].id)
            throw ParseError("topology: duplicate node id " + std::to_string(t.nodes[i].id));
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        int u = 0, v = 0;
        LinkMetrics m;
        if (!(ls >> tag >> u >> v >> m.throughput >> m.delay_ms >> m.jitter_ms) || tag != "edge")
            throw ParseError("topology line " + std::to_string(line_no) + ": bad edge line");
        std::string trailing;
        if (ls >> trailing)
            throw ParseError("topology line " + std::to_string(line_no) + ": trailing content");
        if (u >= v) throw ParseError("topology line " + std::to_string(line_no) +
                                     ": edge endpoints must satisfy u < v");
        const auto known = [&](int id) {
            return std::any_of(t.nodes.begin(), t.nodes.end(),
                               [&](const Node& node) { return node.id == id; });
        };
        if (!known(u) || !known(v))
            throw ParseError("topology line " + std::to_string(line_no) + ": edge references unknown node");
        if (t.edges.count({u, v}))
            throw ParseError("topology line " + std::to_string(line_no) + ": duplicate edge");
        if (!(m.throughput >= 0.0 && m.throughput <= 1.0) || !(m.delay_ms >= 0.0) ||
            !(m.jitter_ms >= 0.0))
            throw ParseError("topology line " + std::to_string(line_no) + ": metric out of range");
        t.edges[{u, v}] = Edge{m};
    }
    detail::rebuild_adjacency(t);
    return t;
}

inline std::string topology_to_string(const Topology& topo) {
    std::ostringstream os;
    save_topology(topo, os);
    return os.str();
}

} // namespace meshroute
