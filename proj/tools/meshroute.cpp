// meshroute - command-line workbench for fuzzy-cost BB-BC mesh routing.
//
// Subcommands: gen | cost | route | oracle | bench | sim | rules
// Exit codes:  0 success, 1 usage/parse error, 2 unreachable destination,
//              3 I/O error.
//
// All stochastic subcommands take --seed; the MESHROUTE_SEED environment
// variable supplies a default (an explicit flag always wins). Reported
// times are deterministic model time unless --real-time is given to
// `bench`, so outputs are byte-stable for fixed inputs.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meshroute/meshroute.hpp"

namespace {

using namespace meshroute;

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt_time(double sec) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", sec);
    return buf;
}

std::string join_path(const std::vector<int>& nodes) {
    std::string out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        out += (i ? "-" : "") + std::to_string(nodes[i]);
    return out;
}

std::uint64_t parse_seed(const std::string& text, const std::string& where) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw InvalidArgumentError(where + ": bad seed value '" + text + "'");
    }
}

// Default seed: MESHROUTE_SEED if set, else 0. A --seed flag overrides.
std::uint64_t env_seed() {
    if (const char* env = std::getenv("MESHROUTE_SEED"); env && *env)
        return parse_seed(env, "MESHROUTE_SEED");
    return 0;
}

Topology load_topology_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open topology file '" + path + "'");
    return load_topology(in);
}

FuzzyInferenceSystem make_fis(const std::string& rules_path) {
    FuzzyInferenceSystem fis = FuzzyInferenceSystem::standard();
    if (!rules_path.empty()) {
        std::ifstream in(rules_path);
        if (!in) throw IoError("cannot open rules file '" + rules_path + "'");
        fis.rule_base = parse_rules(in);
    }
    return fis;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file '" + path + "'");
    return out;
}

// ---- scenario config file: flat key=value lines, '#' comments ----
ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file '" + path + "'");
    ScenarioConfig cfg;
    std::string line;
    int line_no = 0;
    bool seed_set = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fail = [&](const std::string& why) {
            throw ParseError("scenario line " + std::to_string(line_no) + ": " + why);
        };
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
        if (trimmed.empty() || trimmed[0] == '#') continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos || eq == 0) fail("expected key=value");
        const std::string key = trimmed.substr(0, eq);
        const std::string val = trimmed.substr(eq + 1);
        if (val.empty()) fail("empty value for '" + key + "'");
        const auto as_int = [&] {
            try {
                std::size_t pos = 0;
                const int v = std::stoi(val, &pos);
                if (pos != val.size()) throw std::invalid_argument("trailing");
                return v;
            } catch (const std::exception&) {
                fail("bad integer '" + val + "'");
                return 0;
            }
        };
        const auto as_double = [&] {
            try {
                std::size_t pos = 0;
                const double v = std::stod(val, &pos);
                if (pos != val.size()) throw std::invalid_argument("trailing");
                return v;
            } catch (const std::exception&) {
                fail("bad number '" + val + "'");
                return 0.0;
            }
        };
        if (key == "nodes") cfg.node_count = as_int();
        else if (key == "width") cfg.width = as_double();
        else if (key == "height") cfg.height = as_double();
        else if (key == "range") cfg.range = as_double();
        else if (key == "epochs") cfg.epochs = as_int();
        else if (key == "joins") cfg.joins_per_epoch = as_int();
        else if (key == "leaves") cfg.leaves_per_epoch = as_int();
        else if (key == "energy_drain") cfg.energy_drain = as_double();
        else if (key == "population") cfg.bbbc.population_size = as_int();
        else if (key == "generations") cfg.bbbc.max_generations = as_int();
        else if (key == "time_budget") cfg.bbbc.time_budget = as_double();
        else if (key == "shrink_exponent") cfg.bbbc.shrink_exponent = as_double();
        else if (key == "stagnation_limit") cfg.bbbc.stagnation_limit = as_int();
        else if (key == "seed") { cfg.seed = parse_seed(val, "scenario"); seed_set = true; }
        else if (key == "throughput_lo") cfg.distributions.throughput_lo = as_double();
        else if (key == "throughput_hi") cfg.distributions.throughput_hi = as_double();
        else if (key == "delay_lo") cfg.distributions.delay_lo = as_double();
        else if (key == "delay_hi") cfg.distributions.delay_hi = as_double();
        else if (key == "jitter_lo") cfg.distributions.jitter_lo = as_double();
        else if (key == "jitter_hi") cfg.distributions.jitter_hi = as_double();
        else if (key == "energy_lo") cfg.distributions.energy_lo = as_double();
        else if (key == "energy_hi") cfg.distributions.energy_hi = as_double();
        else if (key == "pairs") {
            // "1-25;3-7": dash within a pair, semicolon between pairs.
            cfg.pairs.clear();
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ';')) {
                const auto dash = item.find('-');
                if (dash == std::string::npos || dash == 0 || dash + 1 == item.size())
                    fail("bad pair '" + item + "'");
                try {
                    cfg.pairs.emplace_back(std::stoi(item.substr(0, dash)),
                                           std::stoi(item.substr(dash + 1)));
                } catch (const std::exception&) {
                    fail("bad pair '" + item + "'");
                }
            }
            if (cfg.pairs.empty()) fail("empty pairs list");
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (!seed_set) cfg.seed = env_seed();
    return cfg;
}

// ---- subcommand bodies ----

int cmd_gen(int n, double width, double height, double range, std::uint64_t seed,
            const std::string& out_path) {
    const Topology topo = generate_random_topology(n, width, height, range, seed);
    auto out = open_out(out_path);
    save_topology(topo, out);
    if (!out) throw IoError("failed writing '" + out_path + "'");
    std::cout << "nodes=" << topo.nodes.size() << " edges=" << topo.edges.size() << "\n";
    return 0;
}

int cmd_cost(const std::string& in_path, const std::string& rules_path) {
    const FuzzyInferenceSystem fis = make_fis(rules_path);
    std::ifstream in(in_path);
    if (!in) throw IoError("cannot open metrics file '" + in_path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "throughput,delay_ms,jitter_ms,energy")
        throw ParseError("metrics line 1: expected header 'throughput,delay_ms,jitter_ms,energy'");
    std::cout << "throughput,delay_ms,jitter_ms,energy,cost\n";
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        double thr, delay, jitter, energy;
        char comma[3];
        std::string rest;
        std::istringstream ls(line);
        if (!(ls >> thr >> comma[0] >> delay >> comma[1] >> jitter >> comma[2] >> energy) ||
            comma[0] != ',' || comma[1] != ',' || comma[2] != ',' || (ls >> rest))
            throw ParseError("metrics line " + std::to_string(line_no) + ": bad row");
        LinkMetrics m{thr, delay, jitter};
        const double c = link_cost(fis, m, energy);
        std::cout << fmt9(thr) << "," << fmt9(delay) << "," << fmt9(jitter) << "," << fmt9(energy)
                  << "," << fmt9(c) << "\n";
    }
    return 0;
}

int cmd_route(const std::string& topo_path, int s, int t, int population, int generations,
              std::optional<double> budget, std::uint64_t seed, const std::string& trace_path,
              const std::string& rules_path) {
    const Topology topo = load_topology_file(topo_path);
    const FuzzyInferenceSystem fis = make_fis(rules_path);
    BbbcConfig cfg;
    cfg.population_size = population;
    cfg.max_generations = generations;
    cfg.time_budget = budget;
    cfg.seed = seed;
    const PathResult res = optimize_path(topo, s, t, fis, cfg);
    if (!trace_path.empty()) {
        auto out = open_out(trace_path);
        trace_to_csv(res.trace, out);
        if (!out) throw IoError("failed writing '" + trace_path + "'");
    }
    std::cout << "cost=" << fmt9(res.best.cost) << " time=" << fmt_time(res.trace.total_time_sec)
              << " path=" << join_path(res.best.nodes) << "\n";
    return 0;
}

int cmd_oracle(const std::string& topo_path, int s, int t, const std::string& rules_path) {
    Topology topo = load_topology_file(topo_path);
    const FuzzyInferenceSystem fis = make_fis(rules_path);
    topo = cost_all_links(topo, fis);
    const Path best = dijkstra(topo, s, t);
    std::cout << "cost=" << fmt9(best.cost) << " path=" << join_path(best.nodes) << "\n";
    return 0;
}

int cmd_bench(const std::vector<int>& sizes, const std::vector<int>& generations, int seeds,
              double width, double height, double range, std::uint64_t seed,
              const std::string& out_path, const std::string& rules_path, bool real_time) {
    if (seeds < 1) throw InvalidArgumentError("bench: --seeds must be >= 1");
    const FuzzyInferenceSystem fis = make_fis(rules_path);
    std::ostringstream rows;
    rows << "nodes,generations,cost,sec,path,gap\n";
    for (int n : sizes) {
        for (int gens : generations) {
            for (int k = 0; k < seeds; ++k) {
                const std::uint64_t cell =
                    derive_seed(seed, static_cast<std::uint64_t>(n) * 1000003u +
                                          static_cast<std::uint64_t>(gens),
                                static_cast<std::uint64_t>(k));
                Topology topo = generate_random_topology(n, width, height, range,
                                                         derive_seed(cell, 1, 0));
                topo = cost_all_links(topo, fis);
                BbbcConfig cfg;
                cfg.max_generations = gens;
                cfg.seed = derive_seed(cell, 2, 0);
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    const PathResult res = optimize_path(topo, 1, n, fis, cfg);
                    const auto t1 = std::chrono::steady_clock::now();
                    const Path exact = dijkstra(topo, 1, n);
                    const double sec = real_time ? std::chrono::duration<double>(t1 - t0).count()
                                                 : res.trace.total_time_sec;
                    rows << n << "," << gens << "," << fmt9(res.best.cost) << "," << fmt_time(sec)
                         << "," << join_path(res.best.nodes) << ","
                         << fmt9(res.best.cost - exact.cost) << "\n";
                } catch (const NoPathError&) {
                    rows << n << "," << gens << ",nan," << fmt_time(0.0) << ",unreachable,nan\n";
                }
            }
        }
    }
    if (out_path.empty()) {
        std::cout << rows.str();
    } else {
        auto out = open_out(out_path);
        out << rows.str();
        if (!out) throw IoError("failed writing '" + out_path + "'");
    }
    return 0;
}

int cmd_sim(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
            const std::string& out_path, const std::string& rules_path) {
    ScenarioConfig cfg = parse_scenario_file(config_path);
    if (seed_flag) cfg.seed = *seed_flag;
    const FuzzyInferenceSystem fis = make_fis(rules_path);
    const auto [records, table] = run_scenario(cfg, fis);
    (void)table;
    if (out_path.empty()) {
        records_to_csv(records, std::cout);
    } else {
        auto out = open_out(out_path);
        records_to_csv(records, out);
        if (!out) throw IoError("failed writing '" + out_path + "'");
    }
    return 0;
}

int cmd_rules(const std::string& check_path, const std::string& out_path) {
    if (!check_path.empty()) {
        std::ifstream in(check_path);
        if (!in) throw IoError("cannot open rules file '" + check_path + "'");
        const RuleBase rb = parse_rules(in);
        std::cout << "ok rules=" << rb.rules.size() << "\n";
        return 0;
    }
    const RuleBase rb = RuleBase::standard();
    if (out_path.empty()) {
        dump_rules(rb, std::cout);
    } else {
        auto out = open_out(out_path);
        dump_rules(rb, out);
        if (!out) throw IoError("failed writing '" + out_path + "'");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"meshroute: fuzzy-cost BB-BC routing workbench for wireless mesh networks"};
    app.require_subcommand(1);

    std::string seed_text; // parsed as uint64 after CLI11, so 0 vs unset is visible

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random unit-disk topology file");
    int gen_n = 25;
    double gen_w = 500.0, gen_h = 500.0, gen_r = 250.0;
    std::string gen_out;
    gen->add_option("--n", gen_n, "Node count")->required();
    gen->add_option("--width", gen_w, "Area width");
    gen->add_option("--height", gen_h, "Area height");
    gen->add_option("--range", gen_r, "Radio range");
    gen->add_option("--seed", seed_text, "RNG seed (default: MESHROUTE_SEED or 0)");
    gen->add_option("--out", gen_out, "Output topology file")->required();

    // cost
    auto* cost = app.add_subcommand("cost", "Score link metrics CSV through the fuzzy system");
    std::string cost_in, cost_rules;
    cost->add_option("--in", cost_in, "Metrics CSV (throughput,delay_ms,jitter_ms,energy)")
        ->required();
    cost->add_option("--rules", cost_rules, "Custom rule-base file");

    // route
    auto* route = app.add_subcommand("route", "BB-BC route between two nodes of a topology file");
    std::string route_topo, route_trace, route_rules;
    int route_s = 1, route_t = 0, route_pop = 50, route_gens = 100;
    double route_budget = 0.0;
    route->add_option("--topology", route_topo, "Topology file")->required();
    route->add_option("--s", route_s, "Source node id")->required();
    route->add_option("--t", route_t, "Terminal node id")->required();
    route->add_option("--population", route_pop, "Population size");
    route->add_option("--generations", route_gens, "Generation count");
    route->add_option("--time-budget", route_budget, "Model-time budget in seconds");
    route->add_option("--seed", seed_text, "RNG seed (default: MESHROUTE_SEED or 0)");
    route->add_option("--trace", route_trace, "Write generation trace CSV here");
    route->add_option("--rules", route_rules, "Custom rule-base file");

    // oracle
    auto* orc = app.add_subcommand("oracle", "Exact Dijkstra route between two nodes");
    std::string orc_topo, orc_rules;
    int orc_s = 1, orc_t = 0;
    orc->add_option("--topology", orc_topo, "Topology file")->required();
    orc->add_option("--s", orc_s, "Source node id")->required();
    orc->add_option("--t", orc_t, "Terminal node id")->required();
    orc->add_option("--rules", orc_rules, "Custom rule-base file");

    // bench
    auto* bench = app.add_subcommand("bench", "Benchmark CSV (cost, time, gap) over a size grid");
    std::vector<int> bench_sizes{25, 50, 100};
    std::vector<int> bench_gens{100};
    int bench_seeds = 1;
    double bench_w = 500.0, bench_h = 500.0, bench_r = 250.0;
    std::string bench_out, bench_rules;
    bool bench_real = false;
    bench->add_option("--sizes", bench_sizes, "Node counts")->delimiter(',');
    bench->add_option("--generations", bench_gens, "Generation counts")->delimiter(',');
    bench->add_option("--seeds", bench_seeds, "Seeds per cell");
    bench->add_option("--width", bench_w, "Area width");
    bench->add_option("--height", bench_h, "Area height");
    bench->add_option("--range", bench_r, "Radio range");
    bench->add_option("--seed", seed_text, "Base RNG seed (default: MESHROUTE_SEED or 0)");
    bench->add_option("--out", bench_out, "Output CSV (default: stdout)");
    bench->add_option("--rules", bench_rules, "Custom rule-base file");
    bench->add_flag("--real-time", bench_real,
                    "Report wall-clock seconds instead of model time (not byte-stable)");

    // sim
    auto* sim = app.add_subcommand("sim", "Run a scenario config file, print per-epoch CSV");
    std::string sim_cfg, sim_out, sim_rules;
    sim->add_option("--config", sim_cfg, "Scenario key=value file")->required();
    sim->add_option("--seed", seed_text, "Seed override (wins over config file)");
    sim->add_option("--out", sim_out, "Output CSV (default: stdout)");
    sim->add_option("--rules", sim_rules, "Custom rule-base file");

    // rules
    auto* rules = app.add_subcommand("rules", "Dump the standard rule base, or check a file");
    std::string rules_check, rules_out;
    rules->add_option("--check", rules_check, "Parse and validate this rule-base file");
    rules->add_option("--out", rules_out, "Write dump here (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // help/version exit 0; any usage problem exits 1
    }

    try {
        const bool seed_given = !seed_text.empty();
        const std::uint64_t seed = seed_given ? parse_seed(seed_text, "--seed") : env_seed();
        if (gen->parsed()) return cmd_gen(gen_n, gen_w, gen_h, gen_r, seed, gen_out);
        if (cost->parsed()) return cmd_cost(cost_in, cost_rules);
        if (route->parsed())
            return cmd_route(route_topo, route_s, route_t, route_pop, route_gens,
                             route_budget > 0.0 ? std::optional<double>(route_budget)
                                                : std::nullopt,
                             seed, route_trace, route_rules);
        if (orc->parsed()) return cmd_oracle(orc_topo, orc_s, orc_t, orc_rules);
        if (bench->parsed())
            return cmd_bench(bench_sizes, bench_gens, bench_seeds, bench_w, bench_h, bench_r, seed,
                             bench_out, bench_rules, bench_real);
        if (sim->parsed())
            return cmd_sim(sim_cfg,
                           seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt,
                           sim_out, sim_rules);
        if (rules->parsed()) return cmd_rules(rules_check, rules_out);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const NoPathError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
