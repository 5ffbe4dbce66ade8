#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "topology.hpp"

namespace meshroute {

// ======================================================================
// Big Bang - Big Crunch optimizer, in two forms:
//   * optimize_continuous - the classic fitness-weighted center-of-mass
//                           form over a box,
//   * optimize_path       - the discrete path-space adaptation (elite
//                           candidate as the crunch center, cut-and-regrow
//                           big bang with shrinking randomness).
//
// Reported times are deterministic model time: the optimizer counts
// abstract work units (neighbor scans, cost evaluations, bookkeeping) and
// converts them at a fixed rate. That keeps every emitted artifact
// byte-reproducible for a fixed seed; real wall time is for benchmarks
// and is measured by callers around these calls.
// ======================================================================

inline constexpr double kWorkUnitsPerSecond = 1e7;

struct WorkMeter {
    std::uint64_t units = 0;
    void add(std::uint64_t n) { units += n; }
    double seconds() const { return static_cast<double>(units) / kWorkUnitsPerSecond; }
    double millis() const { return seconds() * 1e3; }
};

// ---- domain types ----
struct Path {
    std::vector<int> nodes; // s first, t last, loop-free
    double cost = std::numeric_limits<double>::quiet_NaN();
};

struct BbbcConfig {
    int population_size = 50;
    int max_generations = 100;
    std::optional<double> time_budget; // model seconds; unset = no budget
    double shrink_exponent = 1.0;      // randomness decays as 1/(k+1)^exponent
    bool elite_as_center = false;      // continuous mode: weighted center when false
                                       // (path mode always uses the elite)
    std::uint64_t seed = 0;
    int stagnation_limit = 0;          // stop after this many stale generations; 0 = off
    // Test instrumentation: observes every candidate path held in any
    // population. Must not mutate anything the optimizer reads.
    std::function<void(const std::vector<int>&)> on_candidate;

    void validate() const {
        if (population_size < 2) throw InvalidArgumentError("BbbcConfig: population_size must be >= 2");
        if (max_generations < 1) throw InvalidArgumentError("BbbcConfig: max_generations must be >= 1");
        if (time_budget && !(*time_budget > 0.0))
            throw InvalidArgumentError("BbbcConfig: time_budget must be > 0 when present");
        if (stagnation_limit < 0) throw InvalidArgumentError("BbbcConfig: stagnation_limit must be >= 0");
    }
};

struct TraceRow {
    int generation = 0;
    double best_cost = 0.0;
    double elapsed_ms = 0.0;            // model time since the run started
    std::vector<int> best_path;         // path mode
    std::vector<double> best_point;     // continuous mode
};

struct Trace {
    std::vector<TraceRow> rows;
    double total_time_sec = 0.0;        // model time
    std::string termination = "generations"; // or "time_budget" / "stagnation"
};

// Trace CSV: the data behind cost-vs-generation convergence plots.
inline void trace_to_csv(const Trace& trace, std::ostream& out) {
    out << "generation,best_cost,elapsed_ms\n";
    char buf[80];
    for (const TraceRow& row : trace.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.3f\n", row.generation, row.best_cost,
                      row.elapsed_ms);
        out << buf;
    }
    out << "# termination: " << trace.termination << "\n";
}

// Shared total order on scored paths: cost, then hop count, then
// lexicographic node sequence. Used by both the optimizer and the oracles
// so "equal" answers are identical answers.
inline bool path_order_less(double cost_a, const std::vector<int>& nodes_a, double cost_b,
                            const std::vector<int>& nodes_b) {
    if (cost_a != cost_b) return cost_a < cost_b;
    if (nodes_a.size() != nodes_b.size()) return nodes_a.size() < nodes_b.size();
    return nodes_a < nodes_b;
}

// ---- path validation and cost ----
inline void validate_path(const Topology& topo, const std::vector<int>& nodes, int s, int t) {
    if (nodes.size() < 2) throw InvalidArgumentError("path must have at least two nodes");
    if (nodes.front() != s || nodes.back() != t)
        throw InvalidArgumentError("path endpoints do not match (s, t)");
    std::set<int> seen;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!topo.has_node(nodes[i]))
            throw InvalidArgumentError("path visits unknown node " + std::to_string(nodes[i]));
        if (!seen.insert(nodes[i]).second)
            throw InvalidArgumentError("path repeats node " + std::to_string(nodes[i]));
        if (i > 0) {
            const auto& nbrs = neighbors(topo, nodes[i - 1]);
            if (!std::binary_search(nbrs.begin(), nbrs.end(), nodes[i]))
                throw InvalidArgumentError("path pair " + std::to_string(nodes[i - 1]) + "-" +
                                           std::to_string(nodes[i]) + " is not a link");
        }
    }
}

inline double path_cost(const Topology& topo, const std::vector<int>& nodes) {
    if (nodes.size() < 2)
        throw InvalidArgumentError("path_cost: a path needs at least one link (s = t is disallowed)");
    double total = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const auto& nbrs_it = topo.adjacency.find(nodes[i - 1]);
        if (nbrs_it == topo.adjacency.end() ||
            !std::binary_search(nbrs_it->second.begin(), nbrs_it->second.end(), nodes[i]))
            throw InvalidArgumentError("path_cost: pair " + std::to_string(nodes[i - 1]) + "-" +
                                       std::to_string(nodes[i]) + " is not a link");
        const double c = topo.edge(nodes[i - 1], nodes[i]).cost;
        if (!std::isfinite(c))
            throw InvalidArgumentError("path_cost: link " + std::to_string(nodes[i - 1]) + "-" +
                                       std::to_string(nodes[i]) + " has no computed cost");
        total += c;
    }
    return total;
}

// ---- random loop-free walks ----
namespace detail {

// Randomized depth-first walk: pick a uniform random unvisited neighbor;
// on a dead end, backtrack one step and permanently exclude the dead-end
// node. Finds a path iff one exists (it is a DFS with random child order).
// `prefix` seeds the stack for cut-and-regrow; erosion of the prefix by
// backtracking is allowed and keeps the walk complete.
inline std::vector<int> random_walk(const Topology& topo, const std::vector<int>& prefix, int t,
                                    Rng& rng, WorkMeter& work) {
    std::vector<int> path = prefix;
    std::set<int> blocked(prefix.begin(), prefix.end());
    std::vector<int> candidates;
    while (!path.empty() && path.back() != t) {
        candidates.clear();
        for (int nb : neighbors(topo, path.back()))
            if (!blocked.count(nb)) candidates.push_back(nb); // neighbors() is sorted
        work.add(candidates.size() + 1);
        if (candidates.empty()) {
            path.pop_back(); // dead end: back off, node stays excluded
            continue;
        }
        const int next = candidates[uniform_index(rng, candidates.size())];
        blocked.insert(next);
        path.push_back(next);
    }
    if (path.empty())
        throw NoPathError("no path exists from " + std::to_string(prefix.front()) + " to " +
                          std::to_string(t));
    return path;
}

} // namespace detail

inline Path random_path(const Topology& topo, int s, int t, Rng& rng) {
    if (!topo.has_node(s)) throw InvalidArgumentError("random_path: unknown source " + std::to_string(s));
    if (!topo.has_node(t)) throw InvalidArgumentError("random_path: unknown terminal " + std::to_string(t));
    if (s == t) throw InvalidArgumentError("random_path: source equals terminal");
    WorkMeter scratch;
    Path p;
    p.nodes = detail::random_walk(topo, {s}, t, rng, scratch);
    // Cost the walk if the topology has cached link costs.
    double total = 0.0;
    bool costed = true;
    for (std::size_t i = 1; i < p.nodes.size() && costed; ++i) {
        const double c = topo.edge(p.nodes[i - 1], p.nodes[i]).cost;
        if (std::isfinite(c))
            total += c;
        else
            costed = false;
    }
    if (costed) p.cost = total;
    return p;
}

// ---- fitness-weighted center of mass ----
// x_c = (sum x_i / f_i) / (sum 1 / f_i), componentwise: inverse-fitness
// weighting, so lower cost weighs more under minimization.
inline std::vector<double> center_of_mass(const std::vector<std::vector<double>>& points,
                                          const std::vector<double>& fitnesses) {
    if (points.empty()) throw InvalidArgumentError("center_of_mass: empty input");
    if (points.size() != fitnesses.size())
        throw InvalidArgumentError("center_of_mass: points/fitnesses size mismatch");
    const std::size_t dim = points.front().size();
    std::vector<double> num(dim, 0.0);
    double den = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim)
            throw InvalidArgumentError("center_of_mass: inconsistent dimensionality");
        if (!(fitnesses[i] > 0.0))
            throw InvalidArgumentError("center_of_mass: fitness must be > 0");
        const double w = 1.0 / fitnesses[i];
        for (std::size_t d = 0; d < dim; ++d) num[d] += points[i][d] * w;
        den += w;
    }
    for (std::size_t d = 0; d < dim; ++d) num[d] /= den;
    return num;
}

// ---- continuous BB-BC ----
struct ContinuousResult {
    std::vector<double> best_point;
    double best_value = 0.0;
    Trace trace;
};

inline ContinuousResult optimize_continuous(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& lower, const std::vector<double>& upper, const BbbcConfig& config) {
    config.validate();
    const std::size_t dim = lower.size();
    if (dim == 0 || upper.size() != dim)
        throw InvalidArgumentError("optimize_continuous: bounds must be non-empty and consistent");
    for (std::size_t d = 0; d < dim; ++d) {
        if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]) || !(lower[d] < upper[d]))
            throw InvalidArgumentError("optimize_continuous: bounds must be finite with lower < upper");
    }
    Rng rng(config.seed);
    WorkMeter work;
    const auto eval = [&](const std::vector<double>& x) {
        const double f = objective(x);
        work.add(dim + 1);
        if (!std::isfinite(f)) {
            std::string where = "(";
            for (std::size_t d = 0; d < dim; ++d)
                where += (d ? ", " : "") + std::to_string(x[d]);
            throw InvalidArgumentError("optimize_continuous: objective returned non-finite value at " +
                                       where + ")");
        }
        return f;
    };
    const std::size_t n = static_cast<std::size_t>(config.population_size);

    std::vector<std::vector<double>> pop(n, std::vector<double>(dim));
    std::vector<double> fit(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) pop[i][d] = uniform_in(rng, lower[d], upper[d]);
        work.add(dim);
        fit[i] = eval(pop[i]);
    }
    std::size_t best_i = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (fit[i] < fit[best_i]) best_i = i;
    std::vector<double> best_point = pop[best_i];
    double best_value = fit[best_i];

    ContinuousResult result;
    Trace& trace = result.trace;
    const auto push_row = [&](int generation) {
        trace.rows.push_back({generation, best_value, work.millis(), {}, best_point});
    };
    const auto over_budget = [&] {
        return config.time_budget && work.seconds() > *config.time_budget;
    };
    push_row(1);

    int stale = 0;
    for (int g = 2; g <= config.max_generations && trace.termination == "generations"; ++g) {
        if (over_budget()) {
            trace.termination = "time_budget";
            break;
        }
        // Big crunch: contract to a single representative.
        std::vector<double> center;
        if (config.elite_as_center) {
            center = best_point;
        } else {
            double fmin = *std::min_element(fit.begin(), fit.end());
            if (fmin > 0.0) {
                center = center_of_mass(pop, fit);
            } else {
                // Reciprocal weights need positive fitness; shift so the weighting
                // stays finite when the objective touches zero or below.
                std::vector<double> shifted(fit);
                for (double& f : shifted) f = f - fmin + 1e-9;
                center = center_of_mass(pop, shifted);
            }
        }
        work.add(n * dim);
        // Big bang: scatter around the center with shrinking randomness.
        const double k = static_cast<double>(g - 1);
        const double scale = 1.0 / std::pow(k + 1.0, config.shrink_exponent);
        const double prev_best = best_value;
        pop[0] = best_point; // elitism
        fit[0] = best_value;
        bool partial = false;
        for (std::size_t i = 1; i < n && !partial; ++i) {
            for (std::size_t d = 0; d < dim; ++d) {
                const double x = center[d] + normal(rng) * (upper[d] - lower[d]) * scale;
                pop[i][d] = std::clamp(x, lower[d], upper[d]);
            }
            work.add(2 * dim);
            fit[i] = eval(pop[i]);
            if (fit[i] < best_value) {
                best_value = fit[i];
                best_point = pop[i];
            }
            if (over_budget()) {
                trace.termination = "time_budget";
                partial = true;
            }
        }
        push_row(g);
        if (best_value < prev_best)
            stale = 0;
        else if (config.stagnation_limit > 0 && ++stale >= config.stagnation_limit)
            trace.termination = "stagnation";
    }

    trace.total_time_sec = work.seconds();
    result.best_point = best_point;
    result.best_value = best_value;
    return result;
}

// ---- path-space BB-BC ----
struct PathResult {
    Path best;
    Trace trace;
};

inline PathResult optimize_path(const Topology& topology, int s, int t,
                                const FuzzyInferenceSystem& fis, const BbbcConfig& config) {
    config.validate();
    if (!topology.has_node(s)) throw InvalidArgumentError("optimize_path: unknown source " + std::to_string(s));
    if (!topology.has_node(t)) throw InvalidArgumentError("optimize_path: unknown terminal " + std::to_string(t));
    if (s == t) throw InvalidArgumentError("optimize_path: source equals terminal");

    // Score against cached fuzzy costs; compute them here if the caller
    // handed over a raw topology (idempotent with sim::cost_all_links).
    const Topology* topo = &topology;
    Topology costed;
    if (std::any_of(topology.edges.begin(), topology.edges.end(),
                    [](const auto& kv) { return !std::isfinite(kv.second.cost); })) {
        costed = topology;
        for (auto& [key, edge] : costed.edges) {
            const double energy = std::min(costed.node(key.first).residual_energy,
                                           costed.node(key.second).residual_energy);
            edge.cost = link_cost(fis, edge.metrics, energy);
        }
        topo = &costed;
    }

    Rng rng(config.seed);
    WorkMeter work;
    const std::size_t n = static_cast<std::size_t>(config.population_size);
    const auto observe = [&](const std::vector<int>& nodes) {
        if (config.on_candidate) config.on_candidate(nodes);
    };
    const auto score = [&](const std::vector<int>& nodes) {
        work.add(nodes.size() - 1);
        return path_cost(*topo, nodes);
    };

    // Step 1: big bang — N random loop-free paths.
    std::vector<Path> pop(n);
    for (std::size_t i = 0; i < n; ++i) {
        pop[i].nodes = detail::random_walk(*topo, {s}, t, rng, work);
        pop[i].cost = score(pop[i].nodes);
        observe(pop[i].nodes);
    }
    Path best = pop[0];
    for (std::size_t i = 1; i < n; ++i)
        if (path_order_less(pop[i].cost, pop[i].nodes, best.cost, best.nodes)) best = pop[i];

    PathResult result;
    Trace& trace = result.trace;
    const auto push_row = [&](int generation) {
        trace.rows.push_back({generation, best.cost, work.millis(), best.nodes, {}});
    };
    const auto over_budget = [&] {
        return config.time_budget && work.seconds() > *config.time_budget;
    };
    push_row(1);

    const int G = config.max_generations;
    int stale = 0;
    for (int g = 2; g <= G && trace.termination == "generations"; ++g) {
        if (over_budget()) {
            trace.termination = "time_budget";
            break;
        }
        // Step 3/4: crunch to the elite, then bang N-1 cut-and-regrow
        // variations. The cut index is uniform on the first regeneration
        // and linearly tail-biased by the final one (shrinking randomness:
        // late generations keep more of the elite prefix and explore near
        // the terminal).
        const double t01 = static_cast<double>(g - 2) / std::max(G - 2, 1);
        const Path elite = best;
        pop[0] = elite;
        observe(pop[0].nodes);
        work.add(n);
        const double prev_best = best.cost;
        bool partial = false;
        for (std::size_t i = 1; i < n && !partial; ++i) {
            std::vector<int> child;
            const std::size_t len = elite.nodes.size();
            if (len == 2) {
                child = detail::random_walk(*topo, {s}, t, rng, work);
            } else {
                // Weighted cut position p in [1, len-1]; weight 1 + t01*(p-1).
                const std::size_t cuts = len - 1;
                double total_w = 0.0;
                for (std::size_t p = 1; p <= cuts; ++p)
                    total_w += 1.0 + t01 * static_cast<double>(p - 1);
                double u = uniform_double(rng) * total_w;
                std::size_t cut = cuts;
                for (std::size_t p = 1; p <= cuts; ++p) {
                    u -= 1.0 + t01 * static_cast<double>(p - 1);
                    if (u < 0.0) {
                        cut = p;
                        break;
                    }
                }
                const std::vector<int> prefix(elite.nodes.begin(),
                                              elite.nodes.begin() + static_cast<std::ptrdiff_t>(cut));
                child = detail::random_walk(*topo, prefix, t, rng, work);
            }
            pop[i].nodes = std::move(child);
            pop[i].cost = score(pop[i].nodes);
            observe(pop[i].nodes);
            if (path_order_less(pop[i].cost, pop[i].nodes, best.cost, best.nodes)) best = pop[i];
            if (over_budget()) {
                trace.termination = "time_budget";
                partial = true;
            }
        }
        push_row(g);
        if (best.cost < prev_best)
            stale = 0;
        else if (config.stagnation_limit > 0 && ++stale >= config.stagnation_limit)
            trace.termination = "stagnation";
    }

    trace.total_time_sec = work.seconds();
    result.best = best;
    return result;
}

} // namespace meshroute
