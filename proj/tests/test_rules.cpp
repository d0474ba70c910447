#include <gtest/gtest.h>

#include "rpm/rules.hpp"

using namespace rpm;

namespace {

RuleKind classify(Vec3 a1, Vec3 a2, Vec3 a3) { return classify_rule(least_squares_induce(a1, a2, a3), a1, a2, a3); }

AttributeMatrix matrix(AttributeKind kind, std::array<int, 9> cells, bool complete = true, int slots = 1) {
    AttributeMatrix m;
    m.kind = kind;
    m.cells = cells;
    m.complete = complete;
    m.slot_count = slots;
    return m;
}

constexpr RuleKind kProgression{RuleFamily::Progression, 0};
constexpr RuleKind kPlus{RuleFamily::ArithmeticPlus, 0};
constexpr RuleKind kMinus{RuleFamily::ArithmeticMinus, 0};
constexpr RuleKind kUp{RuleFamily::DistributeThreeUp, 0};
constexpr RuleKind kDown{RuleFamily::DistributeThreeDown, 0};
constexpr RuleKind kUnion{RuleFamily::PositionUnion, 0};
constexpr RuleKind kDifference{RuleFamily::PositionDifference, 0};

}  // namespace

TEST(Classify, SpecExamples) {
    EXPECT_EQ(classify({1, 2, 3}, {2, 3, 4}, {3, 4, 5}), kProgression);
    EXPECT_EQ(classify({2, 6, 9}, {2, 6, 9}, {2, 6, 9}), RuleKind::constant());
    EXPECT_EQ(classify({1, 2, 3}, {4, 5, 6}, {5, 7, 9}), kPlus);
    EXPECT_EQ(classify({1, 2, 3}, {2, 3, 1}, {3, 1, 2}), kUp);
    EXPECT_EQ(classify({1, 2, 3}, {9, 9, 9}, {7, 3, 1}), RuleKind::unclassified());
}

TEST(Classify, MinusAndDown) {
    EXPECT_EQ(classify({9, 8, 7}, {3, 5, 2}, {6, 3, 5}), kMinus);
    EXPECT_EQ(classify({1, 2, 3}, {3, 1, 2}, {2, 3, 1}), kDown);
}

TEST(Classify, ConstantTakesPrecedence) {
    // a1 = a2 = a3 also fits theta = [-1, 2] with zero offset
    EXPECT_EQ(classify({4, 4, 4}, {4, 4, 4}, {4, 4, 4}), RuleKind::constant());
}

TEST(DistributeThree, ClosedFormParameters) {
    const auto p = distribute_three_params({1, 2, 3}, CycleDirection::Up);
    EXPECT_DOUBLE_EQ(p.p, 14);
    EXPECT_DOUBLE_EQ(p.s, 11);
    EXPECT_NEAR(p.theta[0], 0.44, 1e-15);
    EXPECT_NEAR(p.phi[0], 1.68, 1e-12);
    EXPECT_NEAR(p.phi[1], -1.20, 1e-12);
    EXPECT_NEAR(p.phi[2], 0.24, 1e-12);
}

TEST(DetectPosition, UnionExample) {
    EXPECT_EQ(detect_position_rule({0b1001, 0b1001, 0b1001}, {0b0110, 0b0110, 0b0110}, {0b1111, 0b1111, 0b1111}, 4),
              kUnion);
}

TEST(DetectPosition, ShiftByOne) {
    EXPECT_EQ(detect_position_rule({0b0001, 0b0001, 0b0001}, {0b0010, 0b0010, 0b0010}, {0b0100, 0b0100, 0b0100}, 4),
              RuleKind::shift(1));
}

TEST(DetectPosition, DifferenceConstantAndCycle) {
    EXPECT_EQ(detect_position_rule({0b1111, 0b0111, 0b1100}, {0b0011, 0b0001, 0b0100}, {0b1100, 0b0110, 0b1000}, 4),
              kDifference);
    EXPECT_EQ(detect_position_rule({3, 5, 6}, {3, 5, 6}, {3, 5, 6}, 4), RuleKind::constant());
    EXPECT_EQ(detect_position_rule({1, 6, 9}, {6, 9, 1}, {9, 1, 6}, 4), kUp);
    EXPECT_EQ(detect_position_rule({1, 2, 3}, {9, 9, 9}, {7, 3, 1}, 4), RuleKind::unclassified());
}

TEST(DetectPosition, MasksBeyondSlotsRejected) {
    EXPECT_THROW(detect_position_rule({16, 1, 1}, {1, 1, 1}, {1, 1, 1}, 4), ContractViolation);
    EXPECT_THROW(detect_position_rule({1, 1, 1}, {1, 1, 1}, {1, 1, 1}, 10), ContractViolation);
}

TEST(RuleKinds, TextRoundTrip) {
    for (RuleKind k : {RuleKind::constant(), kProgression, kPlus, kMinus, kUp, kDown, kUnion, kDifference,
                       RuleKind::shift(1), RuleKind::shift(8)}) {
        EXPECT_EQ(parse_rule_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_rule_kind("Shift"), DataError);
    EXPECT_THROW(parse_rule_kind("PositionShift(x)"), DataError);
}

TEST(Predict, ProgressionFourSix) {
    const auto m = matrix(AttributeKind::Size, {0, 1, 2, 1, 2, 3, 4, 6, 0}, false);
    EXPECT_EQ(predict_attribute(make_rule(kProgression, AttributeKind::Size), m, {0, 9}), 8);
    EXPECT_EQ(predict_attribute(make_rule(kProgression, AttributeKind::Size), m, {0, 5}), std::nullopt);
}

TEST(Predict, ArithmeticMinusNineThree) {
    const auto m = matrix(AttributeKind::Number, {5, 2, 3, 7, 4, 3, 9, 3, 0}, false);
    EXPECT_EQ(predict_attribute(make_rule(kMinus, AttributeKind::Number), m, {1, 9}), 6);
}

TEST(Predict, DistributeThreeUp) {
    // columns a1 = [1,2,3], a2 = [2,3,1]
    const auto m = matrix(AttributeKind::Type, {1, 2, 3, 2, 3, 1, 3, 1, 0}, false);
    EXPECT_EQ(predict_attribute(make_rule(kUp, AttributeKind::Type), m, {0, 4}), 2);
    EXPECT_EQ(predict_attribute(make_rule(kDown, AttributeKind::Type), m, {0, 4}), std::nullopt);
}

TEST(Predict, PositionRules) {
    const auto m = matrix(AttributeKind::Position, {1, 2, 4, 2, 4, 8, 4, 8, 0}, false, 4);
    EXPECT_EQ(predict_attribute(make_rule(RuleKind::shift(1), AttributeKind::Position), m, {1, 15}), 1);
    EXPECT_EQ(predict_attribute(make_rule(kUnion, AttributeKind::Position), m, {1, 15}), 12);
    EXPECT_EQ(predict_attribute(make_rule(kProgression, AttributeKind::Position), m, {1, 15}), std::nullopt);
    // empty result is not a mask
    const auto d = matrix(AttributeKind::Position, {3, 1, 2, 3, 2, 1, 5, 5, 0}, false, 4);
    EXPECT_EQ(predict_attribute(make_rule(kDifference, AttributeKind::Position), d, {1, 15}), std::nullopt);
}

TEST(Consistency, RowsOneAndTwoMustReproduce) {
    const auto m = matrix(AttributeKind::Size, {1, 2, 3, 2, 3, 4, 1, 3, 0}, false);
    EXPECT_TRUE(check_consistency(make_rule(kProgression, AttributeKind::Size), m));
    EXPECT_FALSE(check_consistency(make_rule(kPlus, AttributeKind::Size), m));
    EXPECT_FALSE(check_consistency(make_rule(RuleKind::constant(), AttributeKind::Size), m));
    EXPECT_FALSE(check_consistency(make_rule(kProgression, AttributeKind::Color), m));
}

TEST(Consistency, ConstantNeedsEqualThirdRowOperands) {
    const auto m = matrix(AttributeKind::Color, {3, 3, 3, 5, 5, 5, 2, 4, 0}, false);
    EXPECT_FALSE(check_consistency(make_rule(RuleKind::constant(), AttributeKind::Color), m));
}

TEST(Satisfies, CompletedMatrices) {
    const auto m = matrix(AttributeKind::Size, {1, 2, 3, 2, 3, 4, 0, 1, 2});
    EXPECT_TRUE(satisfies(make_rule(kProgression, AttributeKind::Size), m));
    EXPECT_FALSE(satisfies(make_rule(kProgression, AttributeKind::Size), m.completed_with(3)));
    EXPECT_THROW(satisfies(make_rule(kProgression, AttributeKind::Size), matrix(AttributeKind::Size, {}, false)),
                 ContractViolation);
}

TEST(ClassifyCompleted, DispatchesPositionToDetector) {
    const auto m = matrix(AttributeKind::Position, {9, 6, 15, 9, 6, 15, 9, 6, 15}, true, 4);
    EXPECT_EQ(classify_completed(m), kUnion);
    EXPECT_THROW(classify_completed(matrix(AttributeKind::Size, {}, false)), ContractViolation);
}
