#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rpm/induction.hpp"
#include "rpm/solver.hpp"

using namespace rpm;

namespace {

RulePool pool_of(const std::vector<std::pair<RuleKind, AttributeKind>>& rules, const std::string& role) {
    RulePool p;
    for (const auto& [k, a] : rules) p.insert(role, make_rule(k, a));
    return p;
}

}  // namespace

TEST(Solve, Fig1ProblemWithItsOwnPool) {
    const Problem p = fixture::fig1_problem();
    const RulePool pool = pool_insert({}, induce_from_sample(p).rules);
    const auto r = solve_problem(p, pool);
    ASSERT_TRUE(r.chosen_index.has_value());
    EXPECT_EQ(*r.chosen_index, 5);
    EXPECT_EQ(r.scores[5], 4);
    EXPECT_TRUE(r.tied.empty());
}

TEST(Solve, EmptyPoolIsAnError) {
    EXPECT_THROW(solve_problem(fixture::fig1_problem(), RulePool{}), EmptyPoolError);
}

TEST(Solve, RulesOfAnotherRoleAbstain) {
    const auto pool = pool_of({{RuleKind::constant(), AttributeKind::Color}}, "single");
    const auto r = solve_problem(fixture::fig1_problem(), pool);
    EXPECT_FALSE(r.chosen_index.has_value());
    EXPECT_TRUE(r.constraints.empty());
}

TEST(Solve, TiesResolveToLowestIndexAndAreListed) {
    // Only Color is constrained; every candidate with Color 7 ties.
    const auto pool = pool_of({{RuleKind::constant(), AttributeKind::Color}}, "grid3x3");
    const auto r = solve_problem(fixture::fig1_problem(), pool);
    ASSERT_TRUE(r.chosen_index.has_value());
    EXPECT_EQ(*r.chosen_index, r.tied.front());
    EXPECT_GT(r.tied.size(), 1u);
    EXPECT_NE(std::find(r.tied.begin(), r.tied.end(), 5), r.tied.end());
}

TEST(Solve, InconsistentRulesAreFilteredOut) {
    const auto pool = pool_of({{RuleKind::constant(), AttributeKind::Size},
                               {{RuleFamily::Progression, 0}, AttributeKind::Size},
                               {{RuleFamily::ArithmeticPlus, 0}, AttributeKind::Size}},
                              "grid3x3");
    const auto feasible = find_feasible_rules(fixture::fig1_problem(), pool);
    for (const auto& f : feasible) {
        if (f.attribute != AttributeKind::Size) continue;
        ASSERT_EQ(f.rules.size(), 1u);
        EXPECT_EQ(f.rules[0].kind, (RuleKind{RuleFamily::Progression, 0}));
    }
}

TEST(Score, CountsMatchedAttributes) {
    std::vector<PredictedConstraint> cs{{0, AttributeKind::Size, 3, make_rule(RuleKind::constant(), AttributeKind::Size)},
                                        {0, AttributeKind::Size, 4, make_rule({RuleFamily::Progression, 0}, AttributeKind::Size)},
                                        {0, AttributeKind::Color, 1, make_rule(RuleKind::constant(), AttributeKind::Color)}};
    std::vector<AttributeTuple> cands(8, AttributeTuple{ComponentValues{1, 1, 0, 0, 0}});
    cands[2][0].size = 4;
    cands[2][0].color = 1;
    cands[6][0].size = 3;
    const auto s = score_candidates(cs, cands);
    EXPECT_EQ(s[2], 2);
    EXPECT_EQ(s[6], 1);
    EXPECT_EQ(s[0], 0);
    cands.pop_back();
    EXPECT_THROW(score_candidates(cs, cands), ContractViolation);
}
