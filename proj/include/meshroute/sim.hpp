#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bbbc.hpp"
#include "errors.hpp"
#include "fuzzy.hpp"
#include "oracle.hpp"
#include "rng.hpp"
#include "topology.hpp"

namespace meshroute {

// ======================================================================
// Dynamic-scenario driver: per round, cost every link through the fuzzy
// system, optimize each (source, terminal) pair with BB-BC, update the
// routing table, drain energy along the chosen paths, then churn the
// topology. Rounds are 1-based in the emitted records.
// ======================================================================

struct ScenarioConfig {
    // Initial topology.
    int node_count = 25;
    double width = 500.0;
    double height = 500.0;
    double range = 250.0;
    MetricDistributions distributions;
    // Traffic: (source, terminal) id pairs; empty means the default
    // [(1, node_count)] — node 1 transmits to the last node.
    std::vector<std::pair<int, int>> pairs;
    // Rounds and churn.
    int epochs = 1;
    int joins_per_epoch = 0;
    int leaves_per_epoch = 0;
    // Energy a node loses in each round it sits on a selected path.
    double energy_drain = 0.02;
    // Optimizer settings. The per-run seed is derived from `seed`, the
    // round, and the pair index, so bbbc.seed itself is not consulted.
    BbbcConfig bbbc;
    std::uint64_t seed = 0;

    std::vector<std::pair<int, int>> effective_pairs() const {
        if (!pairs.empty()) return pairs;
        return {{1, node_count}};
    }

    void validate() const {
        if (node_count < 2) throw InvalidArgumentError("ScenarioConfig: node_count must be >= 2");
        if (!(width > 0.0) || !(height > 0.0))
            throw InvalidArgumentError("ScenarioConfig: area dimensions must be positive");
        if (!(range > 0.0)) throw InvalidArgumentError("ScenarioConfig: range must be positive");
        if (epochs < 1) throw InvalidArgumentError("ScenarioConfig: epochs must be >= 1");
        if (joins_per_epoch < 0 || leaves_per_epoch < 0)
            throw InvalidArgumentError("ScenarioConfig: churn counts must be >= 0");
        if (!(energy_drain >= 0.0 && energy_drain <= 1.0))
            throw InvalidArgumentError("ScenarioConfig: energy_drain must be in [0, 1]");
        for (const auto& [s, t] : effective_pairs()) {
            if (s == t) throw InvalidArgumentError("ScenarioConfig: pair source equals terminal");
            if (s < 1 || s > node_count || t < 1 || t > node_count)
                throw InvalidArgumentError("ScenarioConfig: pair ids must be initial node ids");
        }
        bbbc.validate();
    }
};

struct EpochRecord {
    int epoch = 0; // 1-based round index
    int source = 0;
    int terminal = 0;
    int nodes = 0;       // node count of this round's snapshot
    int generations = 0; // generations the optimizer actually ran
    std::vector<int> path;
    double path_cost = std::numeric_limits<double>::quiet_NaN();
    double time_sec = 0.0; // optimizer model time
    std::string termination;
    bool reachable = true;
};

struct RoutingTable {
    struct Entry {
        Path path;
        int epoch = 0;
    };
    std::map<std::pair<int, int>, Entry> entries;
};

struct OracleComparison {
    int epoch = 0;
    int source = 0;
    int terminal = 0;
    bool reachable = true;
    double bbbc_cost = std::numeric_limits<double>::quiet_NaN();
    double dijkstra_cost = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    double bbbc_time_sec = 0.0;     // real wall time of the optimize_path call
    double dijkstra_time_sec = 0.0; // real wall time of the dijkstra call
    std::vector<int> bbbc_path;
    std::vector<int> dijkstra_path;
};

// New snapshot with every edge's cached cost recomputed from its metrics
// and the weaker endpoint's residual energy. Idempotent.
inline Topology cost_all_links(const Topology& topology, const FuzzyInferenceSystem& system) {
    Topology next = topology;
    for (auto& [key, edge] : next.edges) {
        const double energy = std::min(next.node(key.first).residual_energy,
                                       next.node(key.second).residual_energy);
        edge.cost = link_cost(system, edge.metrics, energy);
    }
    return next;
}

namespace detail {

struct ScenarioOutput {
    std::vector<EpochRecord> records;
    RoutingTable table;
    std::vector<OracleComparison> comparisons; // filled only when asked
};

inline ScenarioOutput run_scenario_impl(const ScenarioConfig& config,
                                        const FuzzyInferenceSystem& fis, bool with_oracle) {
    config.validate();
    const auto pairs = config.effective_pairs();

    Topology topo = generate_random_topology(config.node_count, config.width, config.height,
                                             config.range, derive_seed(config.seed, 0, 0),
                                             config.distributions);
    int max_id_ever = config.node_count;

    ScenarioOutput out;
    for (int round = 1; round <= config.epochs; ++round) {
        const Topology costed = cost_all_links(topo, fis);
        std::vector<int> drained; // nodes on any selected path this round

        for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
            const auto [s, t] = pairs[pi];
            BbbcConfig bcfg = config.bbbc;
            bcfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(round),
                                    0x100 + static_cast<std::uint64_t>(pi));

            EpochRecord rec;
            rec.epoch = round;
            rec.source = s;
            rec.terminal = t;
            rec.nodes = static_cast<int>(costed.nodes.size());

            OracleComparison cmp;
            cmp.epoch = round;
            cmp.source = s;
            cmp.terminal = t;

            try {
                const auto t0 = std::chrono::steady_clock::now();
                const PathResult res = optimize_path(costed, s, t, fis, bcfg);
                const auto t1 = std::chrono::steady_clock::now();
                rec.path = res.best.nodes;
                rec.path_cost = res.best.cost;
                rec.generations = res.trace.rows.empty() ? 0 : res.trace.rows.back().generation;
                rec.time_sec = res.trace.total_time_sec;
                rec.termination = res.trace.termination;
                out.table.entries[{s, t}] = {res.best, round};
                for (int id : res.best.nodes) drained.push_back(id);

                if (with_oracle) {
                    const auto t2 = std::chrono::steady_clock::now();
                    const Path exact = dijkstra(costed, s, t);
                    const auto t3 = std::chrono::steady_clock::now();
                    cmp.bbbc_cost = res.best.cost;
                    cmp.bbbc_path = res.best.nodes;
                    cmp.dijkstra_cost = exact.cost;
                    cmp.dijkstra_path = exact.nodes;
                    cmp.gap = res.best.cost - exact.cost;
                    cmp.bbbc_time_sec = std::chrono::duration<double>(t1 - t0).count();
                    cmp.dijkstra_time_sec = std::chrono::duration<double>(t3 - t2).count();
                }
            } catch (const NoPathError&) {
                rec.reachable = false;
                rec.termination = "unreachable";
                cmp.reachable = false;
            }
            out.records.push_back(std::move(rec));
            if (with_oracle) out.comparisons.push_back(std::move(cmp));
        }

        // Energy drain: every node that served on a selected path this
        // round pays once, feeding back into the next round's costs.
        std::sort(drained.begin(), drained.end());
        drained.erase(std::unique(drained.begin(), drained.end()), drained.end());
        for (int id : drained)
            for (Node& node : topo.nodes)
                if (node.id == id)
                    node.residual_energy = std::max(0.0, node.residual_energy - config.energy_drain);

        // Churn: leaves never target a live source/terminal; joins get
        // fresh ids and uniform placement.
        Rng churn_rng(derive_seed(config.seed, static_cast<std::uint64_t>(round), 1));
        std::vector<ChurnEvent> events;
        std::vector<int> pool;
        for (const Node& node : topo.nodes) {
            const bool protected_id =
                std::any_of(pairs.begin(), pairs.end(),
                            [&](const auto& p) { return p.first == node.id || p.second == node.id; });
            if (!protected_id) pool.push_back(node.id);
        }
        for (int i = 0; i < config.leaves_per_epoch && !pool.empty(); ++i) {
            const std::size_t pick = uniform_index(churn_rng, pool.size());
            events.push_back(ChurnEvent::leave(pool[pick]));
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        for (int i = 0; i < config.joins_per_epoch; ++i) {
            Node fresh;
            fresh.id = ++max_id_ever;
            fresh.x = uniform_in(churn_rng, 0.0, config.width);
            fresh.y = uniform_in(churn_rng, 0.0, config.height);
            fresh.residual_energy = uniform_in(churn_rng, config.distributions.energy_lo,
                                               config.distributions.energy_hi);
            fresh.range = config.range;
            events.push_back(ChurnEvent::join(fresh));
        }
        topo = apply_churn(topo, events, churn_rng, config.distributions);
    }
    return out;
}

} // namespace detail

inline std::pair<std::vector<EpochRecord>, RoutingTable>
run_scenario(const ScenarioConfig& config,
             const FuzzyInferenceSystem& fis = FuzzyInferenceSystem::standard()) {
    auto out = detail::run_scenario_impl(config, fis, false);
    return {std::move(out.records), std::move(out.table)};
}

inline std::vector<OracleComparison>
compare_with_oracle(const ScenarioConfig& config,
                    const FuzzyInferenceSystem& fis = FuzzyInferenceSystem::standard()) {
    return detail::run_scenario_impl(config, fis, true).comparisons;
}

// Per-epoch CSV report. Unreachable rounds write "nan" cost and the
// literal path "unreachable".
inline void records_to_csv(const std::vector<EpochRecord>& records, std::ostream& out) {
    out << "epoch,nodes,generations,path_cost,time_sec,path\n";
    char buf[96];
    for (const EpochRecord& rec : records) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.9g,%.3f,", rec.epoch, rec.nodes,
                      rec.generations, rec.path_cost, rec.time_sec);
        out << buf;
        if (!rec.reachable) {
            out << "unreachable";
        } else {
            for (std::size_t i = 0; i < rec.path.size(); ++i)
                out << (i ? "-" : "") << rec.path[i];
        }
        out << "\n";
    }
}

} // namespace meshroute
