#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bbbc.hpp"
#include "errors.hpp"
#include "topology.hpp"

namespace meshroute {

// ======================================================================
// Exact shortest-path oracles over cached link costs. Both implement the
// same total order - cost, then hop count, then lexicographic node
// sequence - so on any instance they agree on one canonical answer, and
// both accumulate link costs in path order so equal paths have bitwise
// equal costs.
// ======================================================================

namespace detail {

inline double checked_cost(const Topology& topo, int u, int v) {
    const double c = topo.edge(u, v).cost;
    if (!std::isfinite(c))
        throw InvalidArgumentError("oracle: link " + std::to_string(u) + "-" + std::to_string(v) +
                                   " has no computed cost");
    if (!(c > 0.0))
        throw InvalidArgumentError("oracle: link " + std::to_string(u) + "-" + std::to_string(v) +
                                   " has non-positive cost");
    return c;
}

inline void check_endpoints(const Topology& topo, int s, int t, const char* who) {
    if (!topo.has_node(s))
        throw InvalidArgumentError(std::string(who) + ": unknown source " + std::to_string(s));
    if (!topo.has_node(t))
        throw InvalidArgumentError(std::string(who) + ": unknown terminal " + std::to_string(t));
    if (s == t) throw InvalidArgumentError(std::string(who) + ": source equals terminal");
}

} // namespace detail

// Dijkstra with composite labels. Link costs are strictly positive, so the
// first time the terminal's label is popped it is minimal under the full
// total order, not just under cost.
inline Path dijkstra(const Topology& topo, int s, int t) {
    detail::check_endpoints(topo, s, t, "dijkstra");

    struct Label {
        double cost;
        std::vector<int> nodes;
        bool operator<(const Label& other) const {
            return path_order_less(cost, nodes, other.cost, other.nodes);
        }
    };
    std::set<Label> queue;
    std::map<int, Label> settled_best; // best label seen per node
    queue.insert({0.0, {s}});
    settled_best[s] = {0.0, {s}};

    while (!queue.empty()) {
        Label cur = *queue.begin();
        queue.erase(queue.begin());
        const int u = cur.nodes.back();
        const auto it = settled_best.find(u);
        if (it != settled_best.end() && it->second < cur) continue; // stale entry
        if (u == t) {
            return Path{cur.nodes, cur.cost};
        }
        for (int v : neighbors(topo, u)) {
            if (std::find(cur.nodes.begin(), cur.nodes.end(), v) != cur.nodes.end()) continue;
            Label next{cur.cost + detail::checked_cost(topo, u, v), cur.nodes};
            next.nodes.push_back(v);
            const auto best_it = settled_best.find(v);
            if (best_it == settled_best.end() || next < best_it->second) {
                if (best_it != settled_best.end()) queue.erase(best_it->second);
                settled_best[v] = next;
                queue.insert(std::move(next));
            }
        }
    }
    throw NoPathError("no path exists from " + std::to_string(s) + " to " + std::to_string(t));
}

// Exhaustive enumeration of every simple s-t path. Exponential by design;
// refuses instances beyond 12 nodes.
inline Path brute_force_shortest(const Topology& topo, int s, int t) {
    detail::check_endpoints(topo, s, t, "brute_force_shortest");
    if (topo.nodes.size() > 12)
        throw InvalidArgumentError("brute_force_shortest: instance too large (n = " +
                                   std::to_string(topo.nodes.size()) + " > 12)");

    Path best;
    bool found = false;
    std::vector<int> stack{s};
    std::set<int> on_path{s};

    const std::function<void(double)> visit = [&](double cost_so_far) {
        const int u = stack.back();
        if (u == t) {
            if (!found || path_order_less(cost_so_far, stack, best.cost, best.nodes)) {
                best.nodes = stack;
                best.cost = cost_so_far;
                found = true;
            }
            return;
        }
        for (int v : neighbors(topo, u)) {
            if (on_path.count(v)) continue;
            stack.push_back(v);
            on_path.insert(v);
            visit(cost_so_far + detail::checked_cost(topo, u, v));
            on_path.erase(v);
            stack.pop_back();
        }
    };
    visit(0.0);

    if (!found)
        throw NoPathError("no path exists from " + std::to_string(s) + " to " + std::to_string(t));
    return best;
}

} // namespace meshroute
