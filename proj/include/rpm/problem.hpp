// The structured RPM question: 8 context panels, 8 candidates, ground truth
// and the rule annotations recorded at generation time.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rpm/core.hpp"
#include "rpm/rules.hpp"

namespace rpm {

inline constexpr int kContextPanels = 8;
inline constexpr int kCandidateCount = 8;

/// What generated an attribute: a rule, uniformity noise, or nothing (the
/// non-governing one of Number/Position in grids).
struct Annotation {
    enum class Tag : std::uint8_t { Rule, Noise, Irrelevant };
    Tag tag = Tag::Rule;
    RuleKind kind;

    static Annotation rule(RuleKind k) { return {Tag::Rule, k}; }
    static Annotation noise() { return {Tag::Noise, RuleKind::unclassified()}; }
    static Annotation irrelevant() { return {Tag::Irrelevant, RuleKind::unclassified()}; }

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

inline std::string to_string(const Annotation& a) {
    switch (a.tag) {
        case Annotation::Tag::Rule: return to_string(a.kind);
        case Annotation::Tag::Noise: return "Noise";
        case Annotation::Tag::Irrelevant: return "Irrelevant";
    }
    return "?";
}

inline Annotation parse_annotation(std::string_view s) {
    if (s == "Noise") return Annotation::noise();
    if (s == "Irrelevant") return Annotation::irrelevant();
    return Annotation::rule(parse_rule_kind(s));
}

using AnnotationKey = std::pair<int, AttributeKind>;  // (component index, attribute)

struct Problem {
    std::string id;
    Configuration config = Configuration::Center;
    std::vector<Panel> context;     // row-major cells (1,1)..(3,2)
    std::vector<Panel> candidates;  // 8 in a valid problem
    std::optional<int> truth_index;
    std::map<AnnotationKey, Annotation> annotations;

    friend bool operator==(const Problem&, const Problem&) = default;
};

inline AttributeTuple candidate_tuple(const Problem& p, int index) {
    return values_of(p.candidates.at(static_cast<std::size_t>(index)));
}

/// Query-form matrix of one (component, attribute) pair.
inline AttributeMatrix query_matrix(const Problem& p, int component, AttributeKind kind) {
    const Layout layout = layout_of(p.config);
    AttributeMatrix m;
    m.kind = kind;
    m.slot_count = layout.components.at(static_cast<std::size_t>(component)).slot_count();
    for (int i = 0; i < kContextPanels; ++i) {
        const auto& panel = p.context.at(static_cast<std::size_t>(i));
        m.cells[static_cast<std::size_t>(i)] = values_of(panel.components.at(static_cast<std::size_t>(component))).get(kind);
    }
    return m;
}

/// The matrix with the ground-truth candidate in cell (3,3).
inline AttributeMatrix completed_matrix(const Problem& p, int component, AttributeKind kind) {
    if (!p.truth_index) throw ContractViolation("problem '" + p.id + "' has no ground truth");
    const auto tuple = candidate_tuple(p, *p.truth_index);
    return query_matrix(p, component, kind).completed_with(tuple.at(static_cast<std::size_t>(component)).get(kind));
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

namespace detail {

inline void check_panel(const Panel& panel, const Layout& layout, const std::string& where,
                        std::vector<std::string>& out) {
    if (panel.components.size() != layout.components.size()) {
        out.push_back(where + ": component count " + std::to_string(panel.components.size()) + " != " +
                      std::to_string(layout.components.size()));
        return;
    }
    for (std::size_t c = 0; c < panel.components.size(); ++c) {
        const auto& comp = layout.components[c];
        const auto& cp = panel.components[c];
        const std::string at = where + "/" + comp.name;
        if (!comp.admits(AttributeKind::Position, static_cast<int>(cp.position))) {
            out.push_back(at + ": Position mask " + std::to_string(cp.position) + " invalid for " +
                          std::to_string(comp.slot_count()) + " slots");
        }
        if (static_cast<int>(cp.entities.size()) != popcount(cp.position)) {
            out.push_back(at + ": entity count " + std::to_string(cp.entities.size()) +
                          " != popcount(Position) " + std::to_string(popcount(cp.position)));
        }
        if (!comp.number.contains(popcount(cp.position))) {
            out.push_back(at + ": Number " + std::to_string(popcount(cp.position)) + " out of range");
        }
        for (const auto& e : cp.entities) {
            if (!comp.type.contains(e.type)) out.push_back(at + ": Type " + std::to_string(e.type) + " out of range");
            if (!comp.size.contains(e.size)) out.push_back(at + ": Size " + std::to_string(e.size) + " out of range");
            if (!comp.color.contains(e.color)) out.push_back(at + ": Color " + std::to_string(e.color) + " out of range");
        }
    }
}

}  // namespace detail

/// Reports every violated Problem invariant; never throws on bad data.
inline ValidationReport validate_problem(const Problem& p) {
    ValidationReport report;
    auto& out = report.violations;
    const Layout layout = layout_of(p.config);

    if (p.context.size() != static_cast<std::size_t>(kContextPanels)) {
        out.push_back("context panel count " + std::to_string(p.context.size()) + " != 8");
    }
    if (p.candidates.size() != static_cast<std::size_t>(kCandidateCount)) {
        out.push_back("candidate count " + std::to_string(p.candidates.size()) + " != 8");
    }
    if (p.truth_index && (*p.truth_index < 0 || *p.truth_index >= static_cast<int>(p.candidates.size()))) {
        out.push_back("truth index " + std::to_string(*p.truth_index) + " out of range");
    }
    for (std::size_t i = 0; i < p.context.size(); ++i) {
        detail::check_panel(p.context[i], layout, "q" + std::to_string(i), out);
    }
    for (std::size_t i = 0; i < p.candidates.size(); ++i) {
        detail::check_panel(p.candidates[i], layout, "c" + std::to_string(i), out);
    }
    if (!out.empty()) return report;  // structure broken; the checks below would misreport

    for (const auto& [key, ann] : p.annotations) {
        if (key.first < 0 || key.first >= layout.component_count() || !is_reasoned(key.second)) {
            out.push_back("annotation for unknown (component " + std::to_string(key.first) + ", " +
                          std::string(to_string(key.second)) + ")");
        }
    }
    if (!out.empty() || !p.truth_index) return report;

    const AttributeTuple truth = candidate_tuple(p, *p.truth_index);
    for (int i = 0; i < kCandidateCount; ++i) {
        if (i == *p.truth_index) continue;
        if (attribute_tuple_distance(truth, candidate_tuple(p, i)) == 0) {
            out.push_back("distractor c" + std::to_string(i) + " equals the ground truth");
        }
    }
    for (const auto& [key, ann] : p.annotations) {
        if (ann.tag != Annotation::Tag::Rule) continue;
        const auto m = completed_matrix(p, key.first, key.second);
        if (!satisfies(make_rule(ann.kind, key.second), m)) {
            out.push_back("(" + layout.components[static_cast<std::size_t>(key.first)].name + ", " +
                          std::string(to_string(key.second)) + ") violates annotated " + to_string(ann.kind));
        }
    }
    return report;
}

}  // namespace rpm
