#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "rpm/generator.hpp"
#include "rpm/induction.hpp"

using namespace rpm;

namespace {

std::map<AttributeKind, RuleKind> kinds_of(const SampleRules& s) {
    std::map<AttributeKind, RuleKind> out;
    for (const auto& r : s.rules) out[r.rule.attribute] = r.rule.kind;
    return out;
}

}  // namespace

TEST(Induce, Fig1ProblemYieldsItsRules) {
    const Problem p = fixture::fig1_problem();
    ASSERT_TRUE(validate_problem(p).ok()) << validate_problem(p).violations.front();
    const auto kinds = kinds_of(induce_from_sample(p));
    EXPECT_EQ(kinds.at(AttributeKind::Number), (RuleKind{RuleFamily::ArithmeticMinus, 0}));
    EXPECT_EQ(kinds.at(AttributeKind::Type), (RuleKind{RuleFamily::DistributeThreeUp, 0}));
    EXPECT_EQ(kinds.at(AttributeKind::Size), (RuleKind{RuleFamily::Progression, 0}));
    EXPECT_EQ(kinds.at(AttributeKind::Color), RuleKind::constant());
}

TEST(Induce, RequiresTruth) {
    Problem p = fixture::fig1_problem();
    p.truth_index.reset();
    EXPECT_THROW(induce_from_sample(p), ContractViolation);
}

TEST(Induce, NoisyColorEmitsNoColorRule) {
    int checked = 0;
    for (std::uint64_t i = 0; i < 200 && checked < 20; ++i) {
        Rng rng(derive_seed(5, i));
        const Problem p = generate_problem(Configuration::Center, Scheme::IRaven, 0.5, rng);
        if (p.annotations.at({0, AttributeKind::Color}).tag != Annotation::Tag::Noise) continue;
        ++checked;
        EXPECT_EQ(kinds_of(induce_from_sample(p)).count(AttributeKind::Color), 0u);
    }
    EXPECT_EQ(checked, 20);
}

TEST(Induce, DegenerateFlagWhenRowsRepeat) {
    const std::map<AttributeKind, fixture::Cells> cells{
        {AttributeKind::Type, {1, 2, 3, 1, 2, 3, 1, 2, 3}},
        {AttributeKind::Size, {2, 2, 2, 2, 2, 2, 2, 2, 2}},
        {AttributeKind::Color, {4, 4, 4, 4, 4, 4, 4, 4, 4}},
    };
    std::vector<ComponentValues> d(7, ComponentValues{1, 1, 0, 2, 4});
    for (int i = 0; i < 7; ++i) d[static_cast<std::size_t>(i)].type = i % 2 ? 0 : 4, d[static_cast<std::size_t>(i)].color = i;
    const Problem p = fixture::single_component_problem(Configuration::Center, cells, d, 0);
    const auto s = induce_from_sample(p);
    EXPECT_TRUE(s.degenerate);
    // identical rows leave the fit rank-deficient: no Progression can be read off
    EXPECT_EQ(kinds_of(s).count(AttributeKind::Type), 0u);
    EXPECT_EQ(kinds_of(s).at(AttributeKind::Size), RuleKind::constant());
}

TEST(Pool, MergeIsCommutativeAndAssociative) {
    RulePool a, b, c;
    a.insert("single", make_rule(RuleKind::constant(), AttributeKind::Color));
    b.insert("single", make_rule({RuleFamily::Progression, 0}, AttributeKind::Size), 3);
    c.insert("grid2x2", make_rule(RuleKind::shift(1), AttributeKind::Position));
    c.insert("single", make_rule(RuleKind::constant(), AttributeKind::Color));
    RulePool ab = a, ba = b, ab_c = a, bc = b;
    ab.merge(b);
    ba.merge(a);
    EXPECT_EQ(ab, ba);
    ab_c.merge(b);
    ab_c.merge(c);
    bc.merge(c);
    RulePool a_bc = a;
    a_bc.merge(bc);
    EXPECT_EQ(ab_c, a_bc);
    EXPECT_EQ(a_bc.provenance({"single", AttributeKind::Color, RuleKind::constant()}), 2u);
}

TEST(Pool, UnclassifiedIsNotStored) {
    RulePool p;
    p.insert("single", make_rule(RuleKind::unclassified(), AttributeKind::Type));
    EXPECT_TRUE(p.empty());
}

TEST(Pool, TextFormatIsSortedAndRoundTrips) {
    RulePool p;
    p.insert("single", make_rule(RuleKind::constant(), AttributeKind::Type), 4);
    p.insert("grid3x3", make_rule(RuleKind::shift(2), AttributeKind::Position), 1);
    p.insert("grid3x3", make_rule({RuleFamily::ArithmeticPlus, 0}, AttributeKind::Number), 2);
    const std::string text = pool_to_text(p);
    EXPECT_EQ(text,
              "grid3x3\tNumber\tArithmeticPlus\t2\n"
              "grid3x3\tPosition\tPositionShift(2)\t1\n"
              "single\tType\tConstant\t4\n");
    std::istringstream is(text);
    EXPECT_EQ(read_pool(is), p);
}

TEST(Pool, MalformedLinesReportLineNumbers) {
    auto fails_at = [](const std::string& text, const std::string& where) {
        std::istringstream is(text);
        try {
            read_pool(is);
        } catch (const DataError& e) {
            return std::string(e.what()).find(where) != std::string::npos;
        }
        return false;
    };
    EXPECT_TRUE(fails_at("single\tType\tConstant\t1\nsingle\tType\n", "line 2"));
    EXPECT_TRUE(fails_at("single\tHue\tConstant\t1\n", "line 1"));
    EXPECT_TRUE(fails_at("single\tType\tConstant\t0\n", "line 1"));
    EXPECT_TRUE(fails_at("single\tType\tUnclassified\t1\n", "line 1"));
}

TEST(Pool, RulesForFiltersRoleAndAttribute) {
    RulePool p;
    p.insert("single", make_rule(RuleKind::constant(), AttributeKind::Type));
    p.insert("single", make_rule({RuleFamily::DistributeThreeDown, 0}, AttributeKind::Type));
    p.insert("single", make_rule(RuleKind::constant(), AttributeKind::Size));
    p.insert("out", make_rule(RuleKind::constant(), AttributeKind::Type));
    EXPECT_EQ(p.rules_for("single", AttributeKind::Type).size(), 2u);
    EXPECT_EQ(p.rules_for("out", AttributeKind::Size).size(), 0u);
}
