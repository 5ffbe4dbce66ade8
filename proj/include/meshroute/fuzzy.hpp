#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace meshroute {

// ======================================================================
// Mamdani fuzzy inference for the integrated link cost.
//
// Pipeline: fuzzify (3 terms per input) -> infer (min conjunction,
// min implication, max aggregation over a complete 81-rule base) ->
// defuzzify (centroid over 1001 uniform samples of [0,1]).
//
// Membership geometry: all ramps live strictly inside (3/8, 5/8) of each
// universe. Low is flat at 1 on [0, 3/8]s and falls to 0 at s/2; Medium is
// the triangle (3/8, 1/2, 5/8)s; High mirrors Low. On the canonical
// 9-point evaluation grid, every input therefore activates exactly one
// term at degree 1, which makes the grid-swept monotonicity of the
// centroid exact (the cost at grid points reduces to a lookup of the
// monotone rule table). Blending happens between grid points. With the
// classic Ruspini layout (ramps spanning half the universe) the centroid
// is NOT grid-monotone: same-consequent rule pairs dip at term crossings
// and partially-activated rules add mass above the running centroid;
// both effects were measured at ~1.5e-2. See README for the analysis.
// ======================================================================

// ---- membership functions ----
struct MembershipFunction {
    enum class Shape { LeftShoulder, Triangle, RightShoulder };
    Shape shape = Shape::Triangle;
    // LeftShoulder uses {a, b}: 1 on (-inf, a], ramp to 0 at b.
    // Triangle uses {a, b, c}: 0 at a, 1 at b, 0 at c.
    // RightShoulder uses {a, b}: 0 on (-inf, a], ramp to 1 at b, 1 after.
    double a = 0.0, b = 0.0, c = 0.0;

    static MembershipFunction left_shoulder(double a, double b) {
        if (!(a < b)) throw InvalidArgumentError("left_shoulder: breakpoints must increase");
        return {Shape::LeftShoulder, a, b, 0.0};
    }
    static MembershipFunction triangle(double a, double b, double c) {
        if (!(a < b && b < c)) throw InvalidArgumentError("triangle: breakpoints must increase");
        return {Shape::Triangle, a, b, c};
    }
    static MembershipFunction right_shoulder(double a, double b) {
        if (!(a < b)) throw InvalidArgumentError("right_shoulder: breakpoints must increase");
        return {Shape::RightShoulder, a, b, 0.0};
    }

    double eval(double x) const {
        switch (shape) {
        case Shape::LeftShoulder:
            if (x <= a) return 1.0;
            if (x >= b) return 0.0;
            return (b - x) / (b - a);
        case Shape::RightShoulder:
            if (x <= a) return 0.0;
            if (x >= b) return 1.0;
            return (x - a) / (b - a);
        case Shape::Triangle:
        default:
            if (x <= a || x >= c) return 0.0;
            if (x <= b) return (x - a) / (b - a);
            return (c - x) / (c - b);
        }
    }
};

// ---- fuzzy variables ----
inline constexpr int kTermsPerInput = 3;
inline constexpr const char* kInputTermNames[kTermsPerInput] = {"Low", "Medium", "High"};

struct FuzzyVariable {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    std::array<MembershipFunction, kTermsPerInput> terms;

    // Standard geometry: flat shoulders to 3/8 span, ramps inside (3/8, 5/8).
    static FuzzyVariable standard(std::string name, double lo, double hi) {
        if (!(lo < hi)) throw InvalidArgumentError("FuzzyVariable: universe must have lo < hi");
        const double s = hi - lo;
        FuzzyVariable v;
        v.name = std::move(name);
        v.lo = lo;
        v.hi = hi;
        v.terms = {MembershipFunction::left_shoulder(lo + 0.375 * s, lo + 0.5 * s),
                   MembershipFunction::triangle(lo + 0.375 * s, lo + 0.5 * s, lo + 0.625 * s),
                   MembershipFunction::right_shoulder(lo + 0.5 * s, lo + 0.625 * s)};
        return v;
    }
};

// ---- fuzzify ----
inline std::array<double, kTermsPerInput> fuzzify(const FuzzyVariable& var, double value) {
    if (!std::isfinite(value))
        throw InvalidArgumentError("fuzzify: non-finite input for variable " + var.name);
    const double x = std::clamp(value, var.lo, var.hi); // out-of-range clamps to the universe
    std::array<double, kTermsPerInput> degrees{};
    for (int i = 0; i < kTermsPerInput; ++i) degrees[i] = var.terms[i].eval(x);
    return degrees;
}

// ---- rule base ----
inline constexpr int kInputCount = 4;
inline constexpr int kOutputTerms = 5;
inline constexpr const char* kOutputTermNames[kOutputTerms] = {"VeryLow", "Low", "Medium",
                                                               "High", "VeryHigh"};

struct Rule {
    std::array<int, kInputCount> antecedent{}; // term rank per input, 0..2
    int consequent = 0;                        // output term index, 0..4
};

struct RuleBase {
    std::vector<Rule> rules;

    // Generated table: badness b = (2 - thr_rank) + delay_rank + jitter_rank
    // + (2 - energy_rank) in [0, 8], folded onto the five output terms with
    // rounding toward Medium: consequent = 2 + trunc((b - 4) / 2).
    // The fold is symmetric (out(8-b) = 4 - out(b)) and monotone in b.
    static RuleBase standard() {
        RuleBase rb;
        rb.rules.reserve(81);
        for (int tr = 0; tr < 3; ++tr)
            for (int dr = 0; dr < 3; ++dr)
                for (int jr = 0; jr < 3; ++jr)
                    for (int er = 0; er < 3; ++er) {
                        const int b = (2 - tr) + dr + jr + (2 - er);
                        const int cons = 2 + (b - 4) / 2; // int division truncates toward zero
                        rb.rules.push_back({{tr, dr, jr, er}, cons});
                    }
        return rb;
    }

    // Invariant checks: exactly one rule per antecedent combination, and a
    // single-rank improvement in any input never worsens the consequent.
    void validate() const {
        if (rules.size() != 81)
            throw InvalidArgumentError("RuleBase: expected 81 rules, got " +
                                       std::to_string(rules.size()));
        std::array<int, 81> cons_by_combo;
        cons_by_combo.fill(-1);
        for (const Rule& r : rules) {
            for (int i = 0; i < kInputCount; ++i)
                if (r.antecedent[i] < 0 || r.antecedent[i] > 2)
                    throw InvalidArgumentError("RuleBase: antecedent rank out of range");
            if (r.consequent < 0 || r.consequent >= kOutputTerms)
                throw InvalidArgumentError("RuleBase: consequent out of range");
            const int key = ((r.antecedent[0] * 3 + r.antecedent[1]) * 3 + r.antecedent[2]) * 3 +
                            r.antecedent[3];
            if (cons_by_combo[key] != -1)
                throw InvalidArgumentError("RuleBase: duplicate rule for one antecedent combination");
            cons_by_combo[key] = r.consequent;
        }
        for (int key = 0; key < 81; ++key)
            if (cons_by_combo[key] == -1)
                throw InvalidArgumentError("RuleBase: incomplete (missing antecedent combination)");
        // Improving direction per input: throughput up, delay down, jitter
        // down, energy up. "Improved" consequent must not be strictly worse.
        const auto at = [&](int tr, int dr, int jr, int er) {
            return cons_by_combo[((tr * 3 + dr) * 3 + jr) * 3 + er];
        };
        for (int tr = 0; tr < 3; ++tr)
            for (int dr = 0; dr < 3; ++dr)
                for (int jr = 0; jr < 3; ++jr)
                    for (int er = 0; er < 3; ++er) {
                        const int base = at(tr, dr, jr, er);
                        if (tr < 2 && at(tr + 1, dr, jr, er) > base)
                            throw InvalidArgumentError("RuleBase: not monotone in throughput");
                        if (dr > 0 && at(tr, dr - 1, jr, er) > base)
                            throw InvalidArgumentError("RuleBase: not monotone in delay");
                        if (jr > 0 && at(tr, dr, jr - 1, er) > base)
                            throw InvalidArgumentError("RuleBase: not monotone in jitter");
                        if (er < 2 && at(tr, dr, jr, er + 1) > base)
                            throw InvalidArgumentError("RuleBase: not monotone in energy");
                    }
    }
};

// ---- rule dump format ----
// One line per rule: `if T=<term> D=<term> J=<term> E=<term> then C=<term>`.
inline void dump_rules(const RuleBase& rb, std::ostream& out) {
    for (const Rule& r : rb.rules) {
        out << "if T=" << kInputTermNames[r.antecedent[0]]
            << " D=" << kInputTermNames[r.antecedent[1]]
            << " J=" << kInputTermNames[r.antecedent[2]]
            << " E=" << kInputTermNames[r.antecedent[3]]
            << " then C=" << kOutputTermNames[r.consequent] << "\n";
    }
}

inline RuleBase parse_rules(std::istream& in) {
    const auto input_rank = [](const std::string& s, int line_no) {
        for (int i = 0; i < kTermsPerInput; ++i)
            if (s == kInputTermNames[i]) return i;
        throw ParseError("rule line " + std::to_string(line_no) + ": unknown input term '" + s + "'");
    };
    const auto output_rank = [](const std::string& s, int line_no) {
        for (int i = 0; i < kOutputTerms; ++i)
            if (s == kOutputTermNames[i]) return i;
        throw ParseError("rule line " + std::to_string(line_no) + ": unknown output term '" + s + "'");
    };
    const auto tagged = [](std::istringstream& ls, const char* tag, int line_no) {
        std::string tok;
        if (!(ls >> tok) || tok.rfind(tag, 0) != 0)
            throw ParseError("rule line " + std::to_string(line_no) + ": expected '" +
                             std::string(tag) + "<term>'");
        return tok.substr(std::string(tag).size());
    };
    RuleBase rb;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw != "if")
            throw ParseError("rule line " + std::to_string(line_no) + ": expected 'if'");
        Rule r;
        r.antecedent[0] = input_rank(tagged(ls, "T=", line_no), line_no);
        r.antecedent[1] = input_rank(tagged(ls, "D=", line_no), line_no);
        r.antecedent[2] = input_rank(tagged(ls, "J=", line_no), line_no);
        r.antecedent[3] = input_rank(tagged(ls, "E=", line_no), line_no);
        ls >> kw;
        if (kw != "then")
            throw ParseError("rule line " + std::to_string(line_no) + ": expected 'then'");
        r.consequent = output_rank(tagged(ls, "C=", line_no), line_no);
        std::string trailing;
        if (ls >> trailing)
            throw ParseError("rule line " + std::to_string(line_no) + ": trailing content");
        rb.rules.push_back(r);
    }
    rb.validate();
    return rb;
}

// ---- inference system ----
struct LinkMetrics; // defined in topology.hpp; link_cost overload lives there too

struct FuzzyInferenceSystem {
    std::array<FuzzyVariable, kInputCount> inputs; // throughput, delay, jitter, energy
    RuleBase rule_base;
    int samples = 1001; // defuzzifier resolution over [0, 1]

    // Output terms: five symmetric triangles, peaks at {0, .25, .5, .75, 1},
    // half-width 0.25, truncated by the [0,1] sampling range at the ends.
    static double output_term(int k, double y) {
        const double peak = 0.25 * k;
        const double t = 1.0 - std::abs(y - peak) / 0.25;
        return std::clamp(t, 0.0, 1.0);
    }

    static FuzzyInferenceSystem standard() {
        FuzzyInferenceSystem fis;
        fis.inputs = {FuzzyVariable::standard("throughput", 0.0, 1.0),
                      FuzzyVariable::standard("delay", 0.0, 100.0),
                      FuzzyVariable::standard("jitter", 0.0, 20.0),
                      FuzzyVariable::standard("energy", 0.0, 1.0)};
        fis.rule_base = RuleBase::standard();
        fis.rule_base.validate();
        return fis;
    }
};

// ---- infer ----
// Clip levels per output term (min conjunction + min implication, max
// aggregation across rules), exposed for tests and reused by infer.
inline std::array<double, kOutputTerms> infer_levels(const FuzzyInferenceSystem& fis,
                                                     const std::array<double, kInputCount>& crisp) {
    std::array<std::array<double, kTermsPerInput>, kInputCount> degrees;
    for (int i = 0; i < kInputCount; ++i) degrees[i] = fuzzify(fis.inputs[i], crisp[i]);
    std::array<double, kOutputTerms> levels{};
    for (const Rule& r : fis.rule_base.rules) {
        double alpha = 1.0;
        for (int i = 0; i < kInputCount; ++i)
            alpha = std::min(alpha, degrees[i][r.antecedent[i]]);
        levels[r.consequent] = std::max(levels[r.consequent], alpha);
    }
    return levels;
}

inline std::vector<double> infer(const FuzzyInferenceSystem& fis,
                                 const std::array<double, kInputCount>& crisp) {
    const auto levels = infer_levels(fis, crisp);
    std::vector<double> aggregate(static_cast<std::size_t>(fis.samples));
    const double step = 1.0 / (fis.samples - 1);
    for (int s = 0; s < fis.samples; ++s) {
        const double y = s * step;
        double m = 0.0;
        for (int k = 0; k < kOutputTerms; ++k)
            m = std::max(m, std::min(levels[k], FuzzyInferenceSystem::output_term(k, y)));
        aggregate[static_cast<std::size_t>(s)] = m;
    }
    return aggregate;
}

// ---- defuzzify ----
inline double defuzzify(const std::vector<double>& aggregate) {
    if (aggregate.size() < 2)
        throw InvalidArgumentError("defuzzify: aggregate needs at least two samples");
    const double step = 1.0 / (static_cast<double>(aggregate.size()) - 1.0);
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < aggregate.size(); ++s) {
        const double y = static_cast<double>(s) * step;
        num += y * aggregate[s];
        den += aggregate[s];
    }
    if (den <= 0.0)
        throw InvalidArgumentError("defuzzify: aggregate is zero everywhere (broken rule base?)");
    return num / den;
}

// ---- full pipeline over raw crisp inputs ----
inline double link_cost_raw(const FuzzyInferenceSystem& fis, double throughput, double delay_ms,
                            double jitter_ms, double energy) {
    return defuzzify(infer(fis, {throughput, delay_ms, jitter_ms, energy}));
}

} // namespace meshroute
