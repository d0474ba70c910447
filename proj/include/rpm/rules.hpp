// Rule families, attribute matrices, classification of least-squares fits,
// the bitmask detector for Position, and rule application.
#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "rpm/core.hpp"
#include "rpm/least_squares.hpp"

namespace rpm {

// ---------------------------------------------------------------------------
// Attribute matrices
// ---------------------------------------------------------------------------

/// 3x3 matrix of one attribute's integer codes, row-major. In query form the
/// (3,3) cell is unknown and `cells[8]` is ignored.
struct AttributeMatrix {
    AttributeKind kind = AttributeKind::Number;
    std::array<int, 9> cells{};
    bool complete = false;
    int slot_count = 1;  // needed to interpret Position masks

    int at(int row, int col) const { return cells[static_cast<std::size_t>(row * 3 + col)]; }

    /// Column j as the 3-vector (a_{1,j}, a_{2,j}, a_{3,j}).
    std::array<int, 3> column(int j) const { return {at(0, j), at(1, j), at(2, j)}; }

    Vec3 column_real(int j) const {
        auto c = column(j);
        return {static_cast<double>(c[0]), static_cast<double>(c[1]), static_cast<double>(c[2])};
    }

    AttributeMatrix completed_with(int answer) const {
        AttributeMatrix m = *this;
        m.cells[8] = answer;
        m.complete = true;
        return m;
    }
};

// ---------------------------------------------------------------------------
// Rule kinds
// ---------------------------------------------------------------------------

enum class RuleFamily : std::uint8_t {
    Constant,
    Progression,
    ArithmeticPlus,
    ArithmeticMinus,
    DistributeThreeUp,
    DistributeThreeDown,
    PositionShift,
    PositionUnion,
    PositionDifference,
    Unclassified,
};

struct RuleKind {
    RuleFamily family = RuleFamily::Unclassified;
    int offset = 0;  // slot shift, PositionShift only

    static constexpr RuleKind constant() { return {RuleFamily::Constant, 0}; }
    static constexpr RuleKind unclassified() { return {RuleFamily::Unclassified, 0}; }
    static constexpr RuleKind shift(int k) { return {RuleFamily::PositionShift, k}; }

    constexpr bool classified() const noexcept { return family != RuleFamily::Unclassified; }
    constexpr bool is_distribute_three() const noexcept {
        return family == RuleFamily::DistributeThreeUp || family == RuleFamily::DistributeThreeDown;
    }

    friend constexpr bool operator==(const RuleKind&, const RuleKind&) = default;
    friend constexpr auto operator<=>(const RuleKind&, const RuleKind&) = default;
};

inline std::string to_string(RuleKind k) {
    switch (k.family) {
        case RuleFamily::Constant: return "Constant";
        case RuleFamily::Progression: return "Progression";
        case RuleFamily::ArithmeticPlus: return "ArithmeticPlus";
        case RuleFamily::ArithmeticMinus: return "ArithmeticMinus";
        case RuleFamily::DistributeThreeUp: return "DistributeThreeUp";
        case RuleFamily::DistributeThreeDown: return "DistributeThreeDown";
        case RuleFamily::PositionShift: return "PositionShift(" + std::to_string(k.offset) + ")";
        case RuleFamily::PositionUnion: return "PositionUnion";
        case RuleFamily::PositionDifference: return "PositionDifference";
        case RuleFamily::Unclassified: return "Unclassified";
    }
    return "?";
}

inline RuleKind parse_rule_kind(std::string_view s) {
    constexpr std::string_view shift_prefix = "PositionShift(";
    if (s.starts_with(shift_prefix) && s.ends_with(")")) {
        const auto digits = s.substr(shift_prefix.size(), s.size() - shift_prefix.size() - 1);
        if (digits.empty() || digits.size() > 2) throw DataError("bad shift offset in '" + std::string(s) + "'");
        int k = 0;
        for (char ch : digits) {
            if (ch < '0' || ch > '9') throw DataError("bad shift offset in '" + std::string(s) + "'");
            k = k * 10 + (ch - '0');
        }
        return RuleKind::shift(k);
    }
    for (auto f : {RuleFamily::Constant, RuleFamily::Progression, RuleFamily::ArithmeticPlus,
                   RuleFamily::ArithmeticMinus, RuleFamily::DistributeThreeUp,
                   RuleFamily::DistributeThreeDown, RuleFamily::PositionUnion,
                   RuleFamily::PositionDifference, RuleFamily::Unclassified}) {
        if (to_string(RuleKind{f, 0}) == s) return RuleKind{f, 0};
    }
    throw DataError("unknown rule kind '" + std::string(s) + "'");
}

enum class PhiForm : std::uint8_t { Zero, DistributeThreeForm };

/// A canonical rule. Linear families carry their fixed theta; DistributeThree
/// and the Position kinds have instance-dependent parameters and carry none.
struct Rule {
    RuleKind kind;
    AttributeKind attribute = AttributeKind::Number;
    std::optional<Vec2> canonical_theta;
    PhiForm phi_form = PhiForm::Zero;

    friend bool operator==(const Rule& a, const Rule& b) {
        return a.kind == b.kind && a.attribute == b.attribute;
    }
};

inline Rule make_rule(RuleKind kind, AttributeKind attribute) {
    Rule r{kind, attribute, std::nullopt, PhiForm::Zero};
    switch (kind.family) {
        case RuleFamily::Constant: r.canonical_theta = Vec2{0.5, 0.5}; break;
        case RuleFamily::Progression: r.canonical_theta = Vec2{-1.0, 2.0}; break;
        case RuleFamily::ArithmeticPlus: r.canonical_theta = Vec2{1.0, 1.0}; break;
        case RuleFamily::ArithmeticMinus: r.canonical_theta = Vec2{1.0, -1.0}; break;
        case RuleFamily::DistributeThreeUp:
        case RuleFamily::DistributeThreeDown: r.phi_form = PhiForm::DistributeThreeForm; break;
        default: break;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Cyclic permutations
// ---------------------------------------------------------------------------

/// The two 3-cycles. Up is [[0,1,0],[0,0,1],[1,0,0]], Down is its transpose.
enum class CycleDirection : std::uint8_t { Up, Down };

template <typename T>
constexpr std::array<T, 3> apply_cycle(CycleDirection d, const std::array<T, 3>& v) noexcept {
    if (d == CycleDirection::Up) return {v[1], v[2], v[0]};
    return {v[2], v[0], v[1]};
}

template <typename T>
constexpr std::array<T, 3> apply_cycle_transpose(CycleDirection d, const std::array<T, 3>& v) noexcept {
    return apply_cycle(d == CycleDirection::Up ? CycleDirection::Down : CycleDirection::Up, v);
}

inline CycleDirection direction_of(RuleKind k) {
    return k.family == RuleFamily::DistributeThreeUp ? CycleDirection::Up : CycleDirection::Down;
}

/// Closed-form least-squares parameters of a DistributeThree matrix whose
/// columns are a1, S a1, S^2 a1:
///   theta = [s/(p+s), s/(p+s)],  phi = (S^T - s/(p+s) (I + S)) a1,
/// with p = a1.a1 and s = a1.(S a1).
struct DistributeThreeParams {
    Vec2 theta{};
    Vec3 phi{};
    double p = 0;
    double s = 0;
};

inline DistributeThreeParams distribute_three_params(const Vec3& a1, CycleDirection d) {
    DistributeThreeParams out;
    const Vec3 sa1 = apply_cycle(d, a1);
    const Vec3 sta1 = apply_cycle_transpose(d, a1);
    out.p = detail::dot(a1, a1);
    out.s = detail::dot(a1, sa1);
    const double t = (out.p + out.s) != 0.0 ? out.s / (out.p + out.s) : 0.0;
    out.theta = {t, t};
    for (std::size_t i = 0; i < 3; ++i) out.phi[i] = sta1[i] - t * (a1[i] + sa1[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

inline constexpr double kClassifyTolerance = 1e-6;

namespace detail {

inline bool near(double a, double b) noexcept { return std::abs(a - b) <= kClassifyTolerance; }

inline bool near(const Vec3& a, const Vec3& b) noexcept {
    return near(a[0], b[0]) && near(a[1], b[1]) && near(a[2], b[2]);
}

inline bool near(const Vec2& a, const Vec2& b) noexcept { return near(a[0], b[0]) && near(a[1], b[1]); }

}  // namespace detail

/// Maps a fit to the rule family it represents. Constant wins whenever
/// a1 = a2 = a3; otherwise Progression, Arithmetic, DistributeThree are tried
/// in that order.
inline RuleKind classify_rule(const LinearFit& fit, const Vec3& a1, const Vec3& a2, const Vec3& a3) {
    using detail::near;
    if (near(a1, a2) && near(a2, a3)) return RuleKind::constant();

    const bool zero_offset = near(fit.phi, Vec3{0, 0, 0});
    if (zero_offset) {
        if (near(fit.theta, Vec2{-1.0, 2.0}) && !near(a1, a2)) return {RuleFamily::Progression, 0};
        if (near(fit.theta, Vec2{1.0, 1.0})) return {RuleFamily::ArithmeticPlus, 0};
        if (near(fit.theta, Vec2{1.0, -1.0})) return {RuleFamily::ArithmeticMinus, 0};
    }
    for (auto d : {CycleDirection::Up, CycleDirection::Down}) {
        if (near(a2, apply_cycle(d, a1)) && near(a3, apply_cycle(d, a2))) {
            return {d == CycleDirection::Up ? RuleFamily::DistributeThreeUp : RuleFamily::DistributeThreeDown, 0};
        }
    }
    return RuleKind::unclassified();
}

/// Fit + classify for a completed scalar matrix.
inline RuleKind classify_matrix(const AttributeMatrix& m) {
    const Vec3 a1 = m.column_real(0), a2 = m.column_real(1), a3 = m.column_real(2);
    return classify_rule(least_squares_induce(a1, a2, a3), a1, a2, a3);
}

using MaskColumn = std::array<PositionMask, 3>;

/// Position rules over slot bitmasks. Checks run Constant, Union, Difference,
/// Shift(k) for k = 1..n-1, DistributeThree; the first match wins.
inline RuleKind detect_position_rule(const MaskColumn& p1, const MaskColumn& p2, const MaskColumn& p3,
                                     int slot_count) {
    if (slot_count < 1 || slot_count > kMaxSlots) {
        throw ContractViolation("detect_position_rule: slot count " + std::to_string(slot_count) + " out of range");
    }
    const PositionMask full = full_mask(slot_count);
    for (const MaskColumn* col : {&p1, &p2, &p3}) {
        for (PositionMask m : *col) {
            if (m & ~full) {
                throw ContractViolation("detect_position_rule: mask " + std::to_string(m) + " uses bits beyond " +
                                        std::to_string(slot_count) + " slots");
            }
        }
    }
    auto all_rows = [&](auto&& pred) {
        for (std::size_t i = 0; i < 3; ++i) {
            if (!pred(p1[i], p2[i], p3[i])) return false;
        }
        return true;
    };
    if (all_rows([](auto x, auto y, auto z) { return x == y && y == z; })) return RuleKind::constant();
    if (all_rows([](auto x, auto y, auto z) { return z == (x | y); })) return {RuleFamily::PositionUnion, 0};
    if (all_rows([](auto x, auto y, auto z) { return z == (x & ~y); })) return {RuleFamily::PositionDifference, 0};
    for (int k = 1; k < slot_count; ++k) {
        if (all_rows([&](auto x, auto y, auto z) {
                return y == rotate_slots(x, k, slot_count) && z == rotate_slots(x, 2 * k, slot_count);
            })) {
            return RuleKind::shift(k);
        }
    }
    for (auto d : {CycleDirection::Up, CycleDirection::Down}) {
        if (p2 == apply_cycle(d, p1) && p3 == apply_cycle(d, p2)) {
            return {d == CycleDirection::Up ? RuleFamily::DistributeThreeUp : RuleFamily::DistributeThreeDown, 0};
        }
    }
    return RuleKind::unclassified();
}

inline MaskColumn mask_column(const AttributeMatrix& m, int j) {
    auto c = m.column(j);
    return {static_cast<PositionMask>(c[0]), static_cast<PositionMask>(c[1]), static_cast<PositionMask>(c[2])};
}

/// Classifies a completed matrix with the routine appropriate to its kind.
inline RuleKind classify_completed(const AttributeMatrix& m) {
    if (!m.complete) throw ContractViolation("classify_completed: matrix is in query form");
    if (m.kind == AttributeKind::Position) {
        return detect_position_rule(mask_column(m, 0), mask_column(m, 1), mask_column(m, 2), m.slot_count);
    }
    return classify_matrix(m);
}

// ---------------------------------------------------------------------------
// Application
// ---------------------------------------------------------------------------

namespace detail {

/// Third entry of one row implied by a row-local rule, or nullopt if the
/// rule's own precondition on (x1, x2) fails.
inline std::optional<long long> apply_row(RuleKind k, long long x1, long long x2, int slot_count) {
    const auto m1 = static_cast<PositionMask>(x1), m2 = static_cast<PositionMask>(x2);
    switch (k.family) {
        case RuleFamily::Constant:
            if (x1 != x2) return std::nullopt;
            return x2;
        case RuleFamily::Progression: return 2 * x2 - x1;
        case RuleFamily::ArithmeticPlus: return x1 + x2;
        case RuleFamily::ArithmeticMinus: return x1 - x2;
        case RuleFamily::PositionUnion: return static_cast<long long>(m1 | m2);
        case RuleFamily::PositionDifference: return static_cast<long long>(m1 & ~m2);
        case RuleFamily::PositionShift:
            if (m2 != rotate_slots(m1, k.offset, slot_count)) return std::nullopt;
            return static_cast<long long>(rotate_slots(m1, 2 * k.offset, slot_count));
        default: return std::nullopt;
    }
}

inline bool applicable_to(const Rule& r, const AttributeMatrix& m) {
    const RuleFamily f = r.kind.family;
    const bool position_only = f == RuleFamily::PositionShift || f == RuleFamily::PositionUnion ||
                               f == RuleFamily::PositionDifference;
    const bool scalar_only = f == RuleFamily::Progression || f == RuleFamily::ArithmeticPlus ||
                             f == RuleFamily::ArithmeticMinus;
    if (f == RuleFamily::Unclassified) return false;
    if (m.kind == AttributeKind::Position) return !scalar_only;
    return !position_only;
}

}  // namespace detail

/// True iff applying `r` to rows 1 and 2 reproduces their third entries.
/// DistributeThree additionally needs the fully observed a2 = S a1, and
/// row-local preconditions (Constant's x1 = x2, Shift's x2 = rot(x1, k)) must
/// also hold on row 3.
inline bool check_consistency(const Rule& r, const AttributeMatrix& m) {
    if (r.attribute != m.kind || !detail::applicable_to(r, m)) return false;
    if (r.kind.is_distribute_three()) {
        const CycleDirection d = direction_of(r.kind);
        const auto a1 = m.column(0), a2 = m.column(1);
        if (a2 != apply_cycle(d, a1)) return false;
        const auto sa2 = apply_cycle(d, a2);
        return sa2[0] == m.at(0, 2) && sa2[1] == m.at(1, 2);
    }
    for (int row = 0; row < 2; ++row) {
        auto third = detail::apply_row(r.kind, m.at(row, 0), m.at(row, 1), m.slot_count);
        if (!third || *third != m.at(row, 2)) return false;
    }
    return detail::apply_row(r.kind, m.at(2, 0), m.at(2, 1), m.slot_count).has_value();
}

/// Value of cell (3,3) implied by `r`; nullopt when the rule cannot extend
/// (precondition fails, or the value falls outside `range`). Position masks
/// outside the component's slots or empty are likewise rejected.
inline std::optional<int> predict_attribute(const Rule& r, const AttributeMatrix& m, ValueRange range) {
    if (!detail::applicable_to(r, m)) return std::nullopt;
    long long value = 0;
    if (r.kind.is_distribute_three()) {
        const CycleDirection d = direction_of(r.kind);
        if (m.column(1) != apply_cycle(d, m.column(0))) return std::nullopt;
        if (m.kind == AttributeKind::Position) {
            value = apply_cycle(d, m.column(1))[2];
        } else {
            // a3 = [a1 a2] theta + phi with the instance-dependent parameters.
            const Vec3 a1 = m.column_real(0), a2 = m.column_real(1);
            const auto params = distribute_three_params(a1, d);
            const double est = a1[2] * params.theta[0] + a2[2] * params.theta[1] + params.phi[2];
            value = std::llround(est);
        }
    } else {
        auto third = detail::apply_row(r.kind, m.at(2, 0), m.at(2, 1), m.slot_count);
        if (!third) return std::nullopt;
        value = *third;
    }
    if (m.kind == AttributeKind::Position) {
        const auto mask = static_cast<PositionMask>(value);
        if (value <= 0 || (mask & ~full_mask(m.slot_count)) != 0) return std::nullopt;
        return static_cast<int>(value);
    }
    if (value < range.lo || value > range.hi) return std::nullopt;
    return static_cast<int>(value);
}

/// Whether a completed matrix satisfies `r` on all three rows.
inline bool satisfies(const Rule& r, const AttributeMatrix& m) {
    if (!m.complete) throw ContractViolation("satisfies: matrix is in query form");
    if (!check_consistency(r, m)) return false;
    const ValueRange any{-(1 << 30), 1 << 30};
    const auto p = predict_attribute(r, m, any);
    return p && *p == m.cells[8];
}

}  // namespace rpm
