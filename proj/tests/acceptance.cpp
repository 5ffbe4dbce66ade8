// Acceptance criteria runner: executes the nine acceptance checks and
// prints exactly one PASS/FAIL line per criterion. Exits nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "meshroute/meshroute.hpp"

using namespace meshroute;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
    std::printf("criterion %d (%s): %s%s%s\n", idx, name, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " - ", detail.c_str());
    if (!ok) ++failures;
}

const FuzzyInferenceSystem& fis() {
    static const FuzzyInferenceSystem f = FuzzyInferenceSystem::standard();
    return f;
}

// Costed topology whose (1, n) pair is connected; advances the seed until
// one is found and reports the seed actually used.
Topology connected_topology(int n, double side, double range, std::uint64_t& seed) {
    for (;; ++seed) {
        Topology t = generate_random_topology(n, side, side, range, seed);
        t = cost_all_links(t, fis());
        try {
            dijkstra(t, 1, n);
            return t;
        } catch (const NoPathError&) {
        }
    }
}

bool trace_is_elitist(const Trace& trace) {
    for (std::size_t i = 1; i < trace.rows.size(); ++i)
        if (trace.rows[i].best_cost > trace.rows[i - 1].best_cost) return false;
    return !trace.rows.empty();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

int main() {
    std::vector<Trace> traces_2_3; // shared with criterion 7

    // 1. Oracle cross-validation: dijkstra == brute force, exact.
    {
        int exact = 0;
        const int runs = 200;
        std::uint64_t seed = 1;
        for (int i = 0; i < runs; ++i) {
            const int n = 4 + i % 9; // cycles 4..12
            const Topology t = connected_topology(n, 1000.0, 420.0, seed);
            ++seed;
            const Path d = dijkstra(t, 1, n);
            const Path b = brute_force_shortest(t, 1, n);
            if (d.nodes == b.nodes && d.cost == b.cost) ++exact;
        }
        report(1, "oracle cross-validation", exact == runs,
               std::to_string(exact) + "/" + std::to_string(runs) +
                   " connected instances agree on cost and path");
    }

    // 2. Optimality bound: BB-BC cost minus Dijkstra cost >= 0, always.
    {
        int violations = 0, runs = 0;
        for (const int n : {10, 25, 50}) {
            std::uint64_t seed = 1000;
            for (int i = 0; i < 100; ++i) {
                const Topology t = connected_topology(n, 500.0, 200.0, seed);
                ++seed;
                BbbcConfig cfg;
                cfg.population_size = 50;
                cfg.max_generations = 100;
                cfg.seed = derive_seed(2, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i));
                const PathResult r = optimize_path(t, 1, n, fis(), cfg);
                const Path d = dijkstra(t, 1, n);
                if (!(r.best.cost - d.cost >= 0.0)) ++violations;
                traces_2_3.push_back(r.trace);
                ++runs;
            }
        }
        report(2, "optimality bound", violations == 0,
               std::to_string(violations) + " violations in " + std::to_string(runs) +
                   " runs across n in {10, 25, 50}");
    }

    // 3. Small-instance exactness: >= 95/100 brute-force matches.
    {
        int match = 0;
        std::uint64_t seed = 1;
        for (int i = 0; i < 100; ++i) {
            const int n = 4 + i % 6; // cycles 4..9
            const Topology t = connected_topology(n, 1000.0, 450.0, seed);
            ++seed;
            const Path exact = brute_force_shortest(t, 1, n);
            BbbcConfig cfg;
            cfg.population_size = 20;
            cfg.max_generations = 100;
            cfg.seed = derive_seed(3, static_cast<std::uint64_t>(i), 0);
            const PathResult r = optimize_path(t, 1, n, fis(), cfg);
            if (r.best.nodes == exact.nodes && r.best.cost == exact.cost) ++match;
            traces_2_3.push_back(r.trace);
        }
        report(3, "small-instance exactness", match >= 95,
               std::to_string(match) + "/100 exact matches (threshold 95)");
    }

    // 4. Continuous center-of-mass convergence on the 5-D sphere.
    {
        const auto sphere = [](const std::vector<double>& x) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s;
        };
        int ok = 0;
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            BbbcConfig cfg;
            cfg.population_size = 50;
            cfg.max_generations = 500;
            cfg.seed = seed;
            const auto r = optimize_continuous(sphere, std::vector<double>(5, -10.0),
                                               std::vector<double>(5, 10.0), cfg);
            if (std::abs(r.best_value) < 1e-3) ++ok;
            worst = std::max(worst, std::abs(r.best_value));
        }
        char detail[96];
        std::snprintf(detail, sizeof detail, "%d/100 below 1e-3 (threshold 95), worst |f| %.2e",
                      ok, worst);
        report(4, "continuous convergence", ok >= 95, detail);
    }

    // 5. Fuzzy monotonicity on the 9^4 grid, 1e-12 slack.
    {
        const auto grid = [&](int input, int i) {
            const FuzzyVariable& v = fis().inputs[static_cast<std::size_t>(input)];
            return v.lo + (v.hi - v.lo) * i / 8.0;
        };
        const auto cost_at = [&](int a, int b, int c, int d) {
            return link_cost_raw(fis(), grid(0, a), grid(1, b), grid(2, c), grid(3, d));
        };
        double worst = 0.0; // positive = violation magnitude
        for (int a = 0; a <= 8; ++a)
            for (int b = 0; b <= 8; ++b)
                for (int c = 0; c <= 8; ++c)
                    for (int d = 0; d <= 8; ++d) {
                        const double base = cost_at(a, b, c, d);
                        if (a < 8) worst = std::max(worst, cost_at(a + 1, b, c, d) - base);
                        if (b < 8) worst = std::max(worst, base - cost_at(a, b + 1, c, d));
                        if (c < 8) worst = std::max(worst, base - cost_at(a, b, c + 1, d));
                        if (d < 8) worst = std::max(worst, cost_at(a, b, c, d + 1) - base);
                    }
        char detail[96];
        std::snprintf(detail, sizeof detail, "worst directional violation %.3g (allowed 1e-12)",
                      worst);
        report(5, "fuzzy grid monotonicity", worst <= 1e-12, detail);
    }

    // 6. Midpoint symmetry.
    {
        const double mid = link_cost_raw(fis(), 0.5, 50.0, 10.0, 0.5);
        char detail[64];
        std::snprintf(detail, sizeof detail, "cost(all Medium peaks) = %.12f", mid);
        report(6, "midpoint symmetry", std::abs(mid - 0.5) <= 1e-9, detail);
    }

    // 7. Elitism: every criterion 2-3 trace is non-increasing.
    {
        int bad = 0;
        for (const Trace& t : traces_2_3)
            if (!trace_is_elitist(t)) ++bad;
        report(7, "elitism monotonicity", bad == 0,
               std::to_string(traces_2_3.size() - static_cast<std::size_t>(bad)) + "/" +
                   std::to_string(traces_2_3.size()) + " traces non-increasing");
    }

    // 8. Scaling trend: median real wall time strictly increases with n.
    {
        std::vector<double> medians;
        for (const int n : {25, 50, 100}) {
            std::vector<double> times;
            std::uint64_t seed = 9000;
            for (int i = 0; i < 10; ++i) {
                const Topology t = connected_topology(n, 500.0, 150.0, seed);
                ++seed;
                BbbcConfig cfg;
                cfg.population_size = 50;
                cfg.max_generations = 100;
                cfg.seed = derive_seed(8, static_cast<std::uint64_t>(n),
                                       static_cast<std::uint64_t>(i));
                const auto t0 = std::chrono::steady_clock::now();
                (void)optimize_path(t, 1, n, fis(), cfg);
                const auto t1 = std::chrono::steady_clock::now();
                times.push_back(std::chrono::duration<double>(t1 - t0).count());
            }
            std::sort(times.begin(), times.end());
            medians.push_back((times[4] + times[5]) / 2.0);
        }
        const bool ok = medians[0] < medians[1] && medians[1] < medians[2];
        char detail[128];
        std::snprintf(detail, sizeof detail, "median seconds %.4f (n=25) < %.4f (n=50) < %.4f (n=100)",
                      medians[0], medians[1], medians[2]);
        report(8, "scaling trend", ok, detail);
    }

    // 9. CLI determinism: route and sim, invoked twice, byte-identical.
    {
        const std::string cli = MESHROUTE_CLI_PATH;
        const fs::path dir = fs::temp_directory_path() /
                             ("meshroute_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        const fs::path topo = dir / "topo.wmn";
        const fs::path cfg = dir / "scenario.cfg";
        {
            std::ofstream out(cfg);
            out << "nodes=12\nwidth=300\nheight=300\nrange=150\nepochs=3\njoins=1\nleaves=1\n"
                   "population=12\ngenerations=20\nseed=5\n";
        }
        bool ok = shell(cli + " gen --n 25 --width 500 --height 500 --range 250 --seed 7 --out " +
                        topo.string() + " > /dev/null") == 0;
        const auto twice_identical = [&](const std::string& args, const char* tag) {
            const fs::path a = dir / (std::string(tag) + "_a.txt");
            const fs::path b = dir / (std::string(tag) + "_b.txt");
            if (shell(cli + " " + args + " > " + a.string()) != 0) return false;
            if (shell(cli + " " + args + " > " + b.string()) != 0) return false;
            const std::string ta = slurp(a);
            return !ta.empty() && ta == slurp(b);
        };
        const bool route_ok =
            ok && twice_identical("route --topology " + topo.string() + " --s 1 --t 25 --seed 3",
                                  "route");
        const bool sim_ok = ok && twice_identical("sim --config " + cfg.string(), "sim");
        fs::remove_all(dir);
        report(9, "CLI determinism", route_ok && sim_ok,
               std::string("route ") + (route_ok ? "byte-identical" : "MISMATCH") + ", sim " +
                   (sim_ok ? "byte-identical" : "MISMATCH"));
    }

    if (failures == 0) {
        std::printf("all 9 acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failures);
    return 1;
}
