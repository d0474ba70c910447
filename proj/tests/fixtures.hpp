// Hand-built problems shared by the test binaries.
#pragma once

#include <array>
#include <map>
#include <vector>

#include "rpm/problem.hpp"

namespace rpm::fixture {

using Cells = std::array<int, 9>;  // row-major, cell 8 = the answer

/// Lowest `n` slots of an `slots`-slot component.
inline PositionMask first_slots(int n) { return full_mask(n); }

/// Problem whose single component carries the given attribute matrices. For
/// grids Position defaults to the lowest Number slots when not given.
inline Problem single_component_problem(Configuration config, const std::map<AttributeKind, Cells>& cells,
                                        const std::vector<ComponentValues>& distractors, int truth_index) {
    Problem p;
    p.id = "hand";
    p.config = config;
    auto value = [&](int cell) {
        ComponentValues v;
        v.number = cells.count(AttributeKind::Number) ? cells.at(AttributeKind::Number)[static_cast<std::size_t>(cell)] : 1;
        v.position = cells.count(AttributeKind::Position)
                         ? static_cast<PositionMask>(cells.at(AttributeKind::Position)[static_cast<std::size_t>(cell)])
                         : first_slots(v.number);
        v.number = popcount(v.position);
        for (AttributeKind k : {AttributeKind::Type, AttributeKind::Size, AttributeKind::Color}) {
            v.set(k, cells.at(k)[static_cast<std::size_t>(cell)]);
        }
        return v;
    };
    auto panel = [](const ComponentValues& v) {
        Panel pn;
        pn.components.push_back(uniform_component_panel(v));
        return pn;
    };
    for (int i = 0; i < kContextPanels; ++i) p.context.push_back(panel(value(i)));
    std::size_t d = 0;
    for (int i = 0; i < kCandidateCount; ++i) {
        p.candidates.push_back(i == truth_index ? panel(value(8)) : panel(distractors.at(d++)));
    }
    p.truth_index = truth_index;
    return p;
}

/// ArithmeticMinus on Number, DistributeThree on Type, Progression on Size,
/// Constant on Color, on a 3x3 grid. Answer: Number 6, Type 2, Size 4,
/// Color 7, at candidate 5.
inline Problem fig1_problem() {
    const std::map<AttributeKind, Cells> cells{
        {AttributeKind::Number, {5, 2, 3, 7, 4, 3, 9, 3, 6}},
        {AttributeKind::Type, {1, 2, 3, 2, 3, 1, 3, 1, 2}},
        {AttributeKind::Size, {0, 1, 2, 1, 2, 3, 2, 3, 4}},
        {AttributeKind::Color, {3, 3, 3, 5, 5, 5, 7, 7, 7}},
    };
    const ComponentValues truth{6, first_slots(6), 2, 4, 7};
    std::vector<ComponentValues> distractors;
    for (int i = 0; i < 7; ++i) {
        ComponentValues v = truth;
        switch (i % 4) {
            case 0: v.number = 4 + i / 4 * 3, v.position = first_slots(v.number); break;
            case 1: v.type = i / 4 == 0 ? 0 : 4; break;
            case 2: v.size = i / 4 == 0 ? 3 : 5; break;
            default: v.color = 2; break;
        }
        distractors.push_back(v);
    }
    Problem p = single_component_problem(Configuration::Grid3x3, cells, distractors, 5);
    p.id = "fig1";
    p.annotations = {
        {{0, AttributeKind::Number}, Annotation::rule({RuleFamily::ArithmeticMinus, 0})},
        {{0, AttributeKind::Position}, Annotation::irrelevant()},
        {{0, AttributeKind::Type}, Annotation::rule({RuleFamily::DistributeThreeUp, 0})},
        {{0, AttributeKind::Size}, Annotation::rule({RuleFamily::Progression, 0})},
        {{0, AttributeKind::Color}, Annotation::rule(RuleKind::constant())},
    };
    return p;
}

}  // namespace rpm::fixture
