// Testing phase: find pool rules consistent with rows 1-2, predict the
// missing cell, score the candidates.
#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rpm/induction.hpp"
#include "rpm/problem.hpp"

namespace rpm {

class EmptyPoolError : public std::runtime_error {
public:
    EmptyPoolError() : std::runtime_error("rule pool is empty") {}
};

struct FeasibleRules {
    int component = 0;
    AttributeKind attribute = AttributeKind::Number;
    std::vector<Rule> rules;
};

struct PredictedConstraint {
    int component = 0;
    AttributeKind attribute = AttributeKind::Number;
    int predicted_value = 0;
    Rule source_rule;
};

struct SolveReport {
    std::optional<int> chosen_index;  // nullopt = abstained
    std::array<int, kCandidateCount> scores{};
    std::vector<PredictedConstraint> constraints;
    std::vector<FeasibleRules> feasible_rules;
    std::vector<int> tied;  // every index sharing the maximal score when more than one does
};

/// Every (component, attribute) pair with the pool rules that reproduce rows
/// 1 and 2 of its query matrix. Pairs may end up with zero or several rules.
inline std::vector<FeasibleRules> find_feasible_rules(const Problem& p, const RulePool& pool) {
    if (pool.empty()) throw EmptyPoolError();
    const Layout layout = layout_of(p.config);
    std::vector<FeasibleRules> out;
    for (int c = 0; c < layout.component_count(); ++c) {
        const auto& role = layout.components[static_cast<std::size_t>(c)].role;
        for (AttributeKind kind : kReasonedKinds) {
            FeasibleRules fr{c, kind, {}};
            const AttributeMatrix m = query_matrix(p, c, kind);
            for (const Rule& r : pool.rules_for(role, kind)) {
                if (check_consistency(r, m)) fr.rules.push_back(r);
            }
            out.push_back(std::move(fr));
        }
    }
    return out;
}

/// One constraint per feasible rule whose prediction stays in range.
inline std::vector<PredictedConstraint> predict_constraints(const Problem& p, const std::vector<FeasibleRules>& feasible) {
    const Layout layout = layout_of(p.config);
    std::vector<PredictedConstraint> out;
    for (const auto& fr : feasible) {
        if (fr.rules.empty()) continue;
        const auto& comp = layout.components.at(static_cast<std::size_t>(fr.component));
        const AttributeMatrix m = query_matrix(p, fr.component, fr.attribute);
        for (const Rule& r : fr.rules) {
            if (auto v = predict_attribute(r, m, comp.range_of(fr.attribute))) {
                if (!comp.admits(fr.attribute, *v)) continue;
                out.push_back({fr.component, fr.attribute, *v, r});
            }
        }
    }
    return out;
}

/// Score of a candidate = number of constrained (component, attribute) pairs
/// for which some prediction equals the candidate's value.
inline std::array<int, kCandidateCount> score_candidates(const std::vector<PredictedConstraint>& constraints,
                                                         const std::vector<AttributeTuple>& candidates) {
    if (candidates.size() != static_cast<std::size_t>(kCandidateCount)) {
        throw ContractViolation("score_candidates: expected 8 candidates, got " + std::to_string(candidates.size()));
    }
    std::map<AnnotationKey, std::vector<int>> groups;
    for (const auto& pc : constraints) groups[{pc.component, pc.attribute}].push_back(pc.predicted_value);

    std::array<int, kCandidateCount> scores{};
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        for (const auto& [key, values] : groups) {
            const int v = candidates[i].at(static_cast<std::size_t>(key.first)).get(key.second);
            if (std::find(values.begin(), values.end(), v) != values.end()) ++scores[i];
        }
    }
    return scores;
}

inline SolveReport solve_problem(const Problem& p, const RulePool& pool) {
    SolveReport report;
    report.feasible_rules = find_feasible_rules(p, pool);
    report.constraints = predict_constraints(p, report.feasible_rules);

    std::vector<AttributeTuple> tuples;
    for (int i = 0; i < static_cast<int>(p.candidates.size()); ++i) tuples.push_back(candidate_tuple(p, i));
    report.scores = score_candidates(report.constraints, tuples);

    const int best = *std::max_element(report.scores.begin(), report.scores.end());
    if (best == 0) return report;
    for (int i = 0; i < kCandidateCount; ++i) {
        if (report.scores[static_cast<std::size_t>(i)] == best) {
            if (!report.chosen_index) report.chosen_index = i;
            report.tied.push_back(i);
        }
    }
    if (report.tied.size() == 1) report.tied.clear();
    return report;
}

}  // namespace rpm
