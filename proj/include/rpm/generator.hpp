// Procedural RAVEN / I-RAVEN style problem generation.
//
// Every problem draws its randomness from its own stream derived from
// (seed, index), so a corpus is a pure function of the GenSpec regardless of
// how many workers produce it.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpm/core.hpp"
#include "rpm/parallel.hpp"
#include "rpm/problem.hpp"
#include "rpm/random.hpp"
#include "rpm/rules.hpp"

namespace rpm {

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scheme : std::uint8_t { Raven, IRaven };

inline std::string_view to_string(Scheme s) { return s == Scheme::Raven ? "raven" : "iraven"; }

inline Scheme parse_scheme(std::string_view s) {
    if (s == "raven") return Scheme::Raven;
    if (s == "iraven") return Scheme::IRaven;
    throw DataError("unknown scheme '" + std::string(s) + "' (expected raven|iraven)");
}

struct GenSpec {
    std::vector<Configuration> configs{Configuration::Center};  // problem i uses configs[i % size]
    Scheme scheme = Scheme::IRaven;
    double uniformity_noise = 0.3;
    std::uint64_t seed = 0;
    int count = 1;
};

using RuleAssignment = std::map<AnnotationKey, Annotation>;

// Bounded rejection sampling: 64 draws per stream, then a fresh stream.
inline constexpr int kRetryBound = 64;
inline constexpr int kReseedBound = 64;

/// A perturbable unit of a candidate tuple. Number and Position of a
/// component move together.
struct AttributeGroup {
    enum class Field : std::uint8_t { NumberPosition, Type, Size, Color };
    int component = 0;
    Field field = Field::Type;
    friend bool operator==(const AttributeGroup&, const AttributeGroup&) = default;
};

struct CandidateSet {
    std::vector<Panel> panels;  // 8
    int truth_index = 0;
    std::vector<AttributeGroup> permuted;  // I-RAVEN: the three tree levels, in order
};

namespace detail {

inline bool arithmetic_feasible(ValueRange r, bool plus) {
    std::vector<std::pair<int, int>> pairs;
    for (int x1 = r.lo; x1 <= r.hi; ++x1) {
        for (int x2 = std::max(r.lo, 1); x2 <= r.hi; ++x2) {
            if (r.contains(plus ? x1 + x2 : x1 - x2)) pairs.emplace_back(x1, x2);
        }
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            if (pairs[i].first * pairs[j].second != pairs[i].second * pairs[j].first) return true;
        }
    }
    return false;
}

inline std::vector<int> progression_steps(ValueRange r) {
    std::vector<int> steps;
    for (int d : {-2, -1, 1, 2}) {
        if (r.width() - 2 * std::abs(d) >= 2) steps.push_back(d);  // at least two distinct row starts
    }
    return steps;
}

}  // namespace detail

/// Rule families the generator can realize for an attribute of a component
/// with a non-degenerate (rank-2) matrix. Arithmetic is never offered for Type.
inline std::vector<RuleFamily> feasible_families(const Component& comp, AttributeKind kind) {
    std::vector<RuleFamily> out{RuleFamily::Constant};
    if (kind == AttributeKind::Position) {
        if (!comp.variable_layout()) return out;
        return {RuleFamily::Constant, RuleFamily::PositionShift, RuleFamily::PositionUnion,
                RuleFamily::PositionDifference, RuleFamily::DistributeThreeUp, RuleFamily::DistributeThreeDown};
    }
    const ValueRange r = comp.range_of(kind);
    if (!detail::progression_steps(r).empty()) out.push_back(RuleFamily::Progression);
    if (kind != AttributeKind::Type) {
        if (detail::arithmetic_feasible(r, true)) out.push_back(RuleFamily::ArithmeticPlus);
        if (detail::arithmetic_feasible(r, false)) out.push_back(RuleFamily::ArithmeticMinus);
    }
    if (r.width() >= 3) {
        out.push_back(RuleFamily::DistributeThreeUp);
        out.push_back(RuleFamily::DistributeThreeDown);
    }
    return out;
}

namespace detail {

// Families are drawn per rule group (Constant, Progression, Arithmetic,
// DistributeThree) so each group is equally likely; sign and direction are
// then drawn within the group.
inline RuleKind draw_kind(const std::vector<RuleFamily>& families, const Component& comp, AttributeKind kind, Rng& rng) {
    auto has = [&](RuleFamily f) { return std::find(families.begin(), families.end(), f) != families.end(); };
    std::vector<int> groups;
    if (has(RuleFamily::Constant)) groups.push_back(0);
    if (has(RuleFamily::Progression) || has(RuleFamily::PositionShift)) groups.push_back(1);
    if (has(RuleFamily::ArithmeticPlus) || has(RuleFamily::ArithmeticMinus) || has(RuleFamily::PositionUnion) ||
        has(RuleFamily::PositionDifference)) {
        groups.push_back(2);
    }
    if (has(RuleFamily::DistributeThreeUp)) groups.push_back(3);

    auto one_of = [&](RuleFamily a, RuleFamily b) {
        if (has(a) && has(b)) return rng.bernoulli(0.5) ? a : b;
        return has(a) ? a : b;
    };
    switch (rng.pick(groups)) {
        case 0: return RuleKind::constant();
        case 1:
            if (kind == AttributeKind::Position) return RuleKind::shift(rng.uniform(1, comp.slot_count() - 1));
            return {RuleFamily::Progression, 0};
        case 2:
            if (kind == AttributeKind::Position) return {one_of(RuleFamily::PositionUnion, RuleFamily::PositionDifference), 0};
            return {one_of(RuleFamily::ArithmeticPlus, RuleFamily::ArithmeticMinus), 0};
        default: return {one_of(RuleFamily::DistributeThreeUp, RuleFamily::DistributeThreeDown), 0};
    }
}

}  // namespace detail

/// Draws the rule (or Noise / Irrelevant marker) of every (component,
/// reasoned attribute). Grid components govern exactly one of Number and
/// Position; single-slot components hold both Constant.
inline RuleAssignment sample_rule_assignment(Configuration config, double uniformity_noise, Rng& rng) {
    const Layout layout = layout_of(config);
    RuleAssignment out;
    for (int c = 0; c < layout.component_count(); ++c) {
        const Component& comp = layout.components[static_cast<std::size_t>(c)];
        auto draw = [&](AttributeKind k) {
            return Annotation::rule(detail::draw_kind(feasible_families(comp, k), comp, k, rng));
        };
        if (comp.variable_layout()) {
            const bool number_governs = rng.bernoulli(0.5);
            out[{c, AttributeKind::Number}] = number_governs ? draw(AttributeKind::Number) : Annotation::irrelevant();
            out[{c, AttributeKind::Position}] = number_governs ? Annotation::irrelevant() : draw(AttributeKind::Position);
        } else {
            out[{c, AttributeKind::Number}] = Annotation::rule(RuleKind::constant());
            out[{c, AttributeKind::Position}] = Annotation::rule(RuleKind::constant());
        }
        out[{c, AttributeKind::Type}] = draw(AttributeKind::Type);
        for (AttributeKind k : {AttributeKind::Size, AttributeKind::Color}) {
            const bool noisy = comp.range_of(k).width() > 1 && rng.bernoulli(uniformity_noise);
            out[{c, k}] = noisy ? Annotation::noise() : draw(k);
        }
    }
    return out;
}

namespace detail {

using Cells = std::array<int, 9>;

inline PositionMask random_nonempty_mask(int n, Rng& rng) {
    return static_cast<PositionMask>(rng.uniform(1, static_cast<int>(full_mask(n))));
}

inline PositionMask random_mask_of_size(int n, int count, Rng& rng) {
    std::vector<int> slots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) slots[static_cast<std::size_t>(i)] = i;
    rng.shuffle(slots);
    PositionMask m = 0;
    for (int i = 0; i < count; ++i) m |= PositionMask{1} << slots[static_cast<std::size_t>(i)];
    return m;
}

inline void fill_cycle(Cells& cells, const std::array<int, 3>& values, CycleDirection d) {
    std::array<int, 3> col = values;
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) cells[static_cast<std::size_t>(i * 3 + j)] = col[static_cast<std::size_t>(i)];
        col = apply_cycle(d, col);
    }
}

inline std::array<int, 3> distinct_three(const std::vector<int>& pool, Rng& rng) {
    std::vector<int> v = pool;
    rng.shuffle(v);
    return {v[0], v[1], v[2]};
}

/// One draw of a scalar matrix under `kind`; closure by construction.
inline Cells draw_scalar(RuleKind kind, ValueRange r, Rng& rng) {
    Cells cells{};
    auto set_row = [&](int i, int a, int b, int c) {
        cells[static_cast<std::size_t>(i * 3)] = a;
        cells[static_cast<std::size_t>(i * 3 + 1)] = b;
        cells[static_cast<std::size_t>(i * 3 + 2)] = c;
    };
    switch (kind.family) {
        case RuleFamily::Constant:
            for (int i = 0; i < 3; ++i) {
                const int x = rng.uniform(r.lo, r.hi);
                set_row(i, x, x, x);
            }
            break;
        case RuleFamily::Progression: {
            const int d = rng.pick(progression_steps(r));
            const int lo = r.lo - std::min(0, 2 * d), hi = r.hi - std::max(0, 2 * d);
            for (int i = 0; i < 3; ++i) {
                const int x = rng.uniform(lo, hi);
                set_row(i, x, x + d, x + 2 * d);
            }
            break;
        }
        case RuleFamily::ArithmeticPlus:
        case RuleFamily::ArithmeticMinus: {
            const bool plus = kind.family == RuleFamily::ArithmeticPlus;
            const int op_lo = std::max(r.lo, 1), op_hi = r.hi - r.lo;
            for (int i = 0; i < 3; ++i) {
                const int x2 = rng.uniform(op_lo, op_hi);
                const int x1 = plus ? rng.uniform(r.lo, r.hi - x2) : rng.uniform(r.lo + x2, r.hi);
                set_row(i, x1, x2, plus ? x1 + x2 : x1 - x2);
            }
            break;
        }
        case RuleFamily::DistributeThreeUp:
        case RuleFamily::DistributeThreeDown: {
            std::vector<int> pool;
            for (int v = r.lo; v <= r.hi; ++v) pool.push_back(v);
            fill_cycle(cells, distinct_three(pool, rng), direction_of(kind));
            break;
        }
        default: throw GenerationError("cannot draw scalar matrix for " + to_string(kind));
    }
    return cells;
}

inline Cells draw_position(RuleKind kind, int n, Rng& rng) {
    Cells cells{};
    const PositionMask full = full_mask(n);
    auto set_row = [&](int i, PositionMask a, PositionMask b, PositionMask c) {
        cells[static_cast<std::size_t>(i * 3)] = static_cast<int>(a);
        cells[static_cast<std::size_t>(i * 3 + 1)] = static_cast<int>(b);
        cells[static_cast<std::size_t>(i * 3 + 2)] = static_cast<int>(c);
    };
    switch (kind.family) {
        case RuleFamily::Constant:
            for (int i = 0; i < 3; ++i) {
                const PositionMask m = random_nonempty_mask(n, rng);
                set_row(i, m, m, m);
            }
            break;
        case RuleFamily::PositionShift:
            for (int i = 0; i < 3; ++i) {
                PositionMask m;
                do m = random_nonempty_mask(n, rng);
                while (m == full);
                set_row(i, m, rotate_slots(m, kind.offset, n), rotate_slots(m, 2 * kind.offset, n));
            }
            break;
        case RuleFamily::PositionUnion:
            for (int i = 0; i < 3; ++i) {
                PositionMask a;
                do a = random_nonempty_mask(n, rng);
                while (a == full);
                PositionMask b;
                do b = random_nonempty_mask(n, rng) & ~a;
                while (b == 0);
                set_row(i, a, b, a | b);
            }
            break;
        case RuleFamily::PositionDifference:
            for (int i = 0; i < 3; ++i) {
                PositionMask a;
                do a = random_nonempty_mask(n, rng);
                while (popcount(a) < 2);
                PositionMask b;
                do b = random_nonempty_mask(n, rng) & a;
                while (b == 0 || b == a);
                set_row(i, a, b, a & ~b);
            }
            break;
        case RuleFamily::DistributeThreeUp:
        case RuleFamily::DistributeThreeDown: {
            std::vector<int> pool;
            for (int v = 1; v <= static_cast<int>(full); ++v) pool.push_back(v);
            fill_cycle(cells, distinct_three(pool, rng), direction_of(kind));
            break;
        }
        default: throw GenerationError("cannot draw Position matrix for " + to_string(kind));
    }
    return cells;
}

/// Draws until the completed matrix classifies back to `kind`.
inline Cells draw_governed(RuleKind kind, AttributeKind attribute, const Component& comp, Rng& rng) {
    Rng stream(rng.next());
    for (int reseed = 0; reseed < kReseedBound; ++reseed) {
        for (int attempt = 0; attempt < kRetryBound; ++attempt) {
            AttributeMatrix m;
            m.kind = attribute;
            m.slot_count = comp.slot_count();
            m.complete = true;
            m.cells = attribute == AttributeKind::Position ? draw_position(kind, comp.slot_count(), stream)
                                                           : draw_scalar(kind, comp.range_of(attribute), stream);
            if (classify_completed(m) == kind) return m.cells;
        }
        stream = Rng(derive_seed(stream.next(), static_cast<std::uint64_t>(reseed)));
    }
    throw GenerationError("could not realize " + to_string(kind) + " on " + std::string(to_string(attribute)) +
                          " of component '" + comp.name + "'");
}

inline int random_angle(Rng& rng) { return rng.pick(std::span<const int>(kAngleSet)); }

}  // namespace detail

/// The 9 panels (cell (3,3) included) realizing `assignment`.
inline std::vector<Panel> realize_panels(Configuration config, const RuleAssignment& assignment, Rng& rng) {
    const Layout layout = layout_of(config);
    std::vector<Panel> panels(9);
    for (auto& p : panels) p.components.resize(layout.components.size());

    for (int c = 0; c < layout.component_count(); ++c) {
        const Component& comp = layout.components[static_cast<std::size_t>(c)];
        const int n = comp.slot_count();
        auto ann = [&](AttributeKind k) { return assignment.at({c, k}); };

        std::map<AttributeKind, detail::Cells> governed;
        for (AttributeKind k : kReasonedKinds) {
            if (ann(k).tag == Annotation::Tag::Rule) governed[k] = detail::draw_governed(ann(k).kind, k, comp, rng);
        }

        // Layout of entities.
        for (int cell = 0; cell < 9; ++cell) {
            PositionMask mask;
            if (governed.count(AttributeKind::Position) && comp.variable_layout()) {
                mask = static_cast<PositionMask>(governed[AttributeKind::Position][static_cast<std::size_t>(cell)]);
            } else if (comp.variable_layout()) {
                mask = detail::random_mask_of_size(n, governed.at(AttributeKind::Number)[static_cast<std::size_t>(cell)], rng);
            } else {
                mask = 1;
            }
            auto& cp = panels[static_cast<std::size_t>(cell)].components[static_cast<std::size_t>(c)];
            cp.position = mask;
            cp.entities.assign(static_cast<std::size_t>(popcount(mask)), Entity{});
            for (auto& e : cp.entities) e.angle = detail::random_angle(rng);
        }

        // Entity attributes; noise attributes are redrawn until no rule fits them.
        for (AttributeKind k : {AttributeKind::Type, AttributeKind::Size, AttributeKind::Color}) {
            int Entity::*field = k == AttributeKind::Type ? &Entity::type : k == AttributeKind::Size ? &Entity::size : &Entity::color;
            const ValueRange r = comp.range_of(k);
            if (ann(k).tag == Annotation::Tag::Rule) {
                for (int cell = 0; cell < 9; ++cell) {
                    for (auto& e : panels[static_cast<std::size_t>(cell)].components[static_cast<std::size_t>(c)].entities) {
                        e.*field = governed[k][static_cast<std::size_t>(cell)];
                    }
                }
                continue;
            }
            for (int attempt = 0;; ++attempt) {
                AttributeMatrix m;
                m.kind = k;
                m.complete = true;
                for (int cell = 0; cell < 9; ++cell) {
                    auto& cp = panels[static_cast<std::size_t>(cell)].components[static_cast<std::size_t>(c)];
                    for (auto& e : cp.entities) e.*field = rng.uniform(r.lo, r.hi);
                    m.cells[static_cast<std::size_t>(cell)] = values_of(cp).get(k);
                }
                if (!classify_completed(m).classified()) break;
                if (attempt > kRetryBound * kReseedBound) {
                    throw GenerationError("noise on " + std::string(to_string(k)) + " keeps matching a rule");
                }
            }
        }
    }
    return panels;
}

// ---------------------------------------------------------------------------
// Candidates
// ---------------------------------------------------------------------------

/// Groups that can be re-valued on this layout (range wider than one value).
inline std::vector<AttributeGroup> perturbable_groups(const Layout& layout) {
    std::vector<AttributeGroup> out;
    for (int c = 0; c < layout.component_count(); ++c) {
        const Component& comp = layout.components[static_cast<std::size_t>(c)];
        if (comp.variable_layout()) out.push_back({c, AttributeGroup::Field::NumberPosition});
        if (comp.type.width() > 1) out.push_back({c, AttributeGroup::Field::Type});
        if (comp.size.width() > 1) out.push_back({c, AttributeGroup::Field::Size});
        if (comp.color.width() > 1) out.push_back({c, AttributeGroup::Field::Color});
    }
    return out;
}

/// Perturbable groups that some rule governs (not noise, not irrelevant).
inline std::vector<AttributeGroup> governed_groups(const Layout& layout, const RuleAssignment& assignment) {
    std::vector<AttributeGroup> out;
    auto governed = [&](int c, AttributeKind k) {
        auto it = assignment.find({c, k});
        return it != assignment.end() && it->second.tag == Annotation::Tag::Rule;
    };
    for (const auto& g : perturbable_groups(layout)) {
        bool ok = false;
        switch (g.field) {
            case AttributeGroup::Field::NumberPosition:
                ok = governed(g.component, AttributeKind::Number) || governed(g.component, AttributeKind::Position);
                break;
            case AttributeGroup::Field::Type: ok = governed(g.component, AttributeKind::Type); break;
            case AttributeGroup::Field::Size: ok = governed(g.component, AttributeKind::Size); break;
            case AttributeGroup::Field::Color: ok = governed(g.component, AttributeKind::Color); break;
        }
        if (ok) out.push_back(g);
    }
    return out;
}

/// Drawn replacement for one attribute group: a value for Type/Size/Color,
/// a slot mask for Number/Position.
struct Alternative {
    AttributeGroup group;
    int value = 0;
    PositionMask mask = 0;
};

/// Uniform draw among the admissible values of `g` other than the one
/// `panel` currently shows.
inline Alternative draw_alternative(const Panel& panel, const Layout& layout, const AttributeGroup& g,
                                    const RuleAssignment& assignment, Rng& rng) {
    const Component& comp = layout.components.at(static_cast<std::size_t>(g.component));
    const ComponentValues current = values_of(panel.components.at(static_cast<std::size_t>(g.component)));
    Alternative alt{g, 0, 0};
    auto other = [&](AttributeKind k) {
        const ValueRange r = comp.range_of(k);
        int v = rng.uniform(r.lo, r.hi - 1);
        if (v >= current.get(k)) ++v;
        return v;
    };
    switch (g.field) {
        case AttributeGroup::Field::Type: alt.value = other(AttributeKind::Type); break;
        case AttributeGroup::Field::Size: alt.value = other(AttributeKind::Size); break;
        case AttributeGroup::Field::Color: alt.value = other(AttributeKind::Color); break;
        case AttributeGroup::Field::NumberPosition: {
            const int n = comp.slot_count();
            auto it = assignment.find({g.component, AttributeKind::Position});
            if (it != assignment.end() && it->second.tag == Annotation::Tag::Rule) {
                std::vector<PositionMask> options;
                for (PositionMask m = 1; m <= full_mask(n); ++m) {
                    if (m != current.position && comp.number.contains(popcount(m))) options.push_back(m);
                }
                alt.mask = rng.pick(options);
            } else {
                alt.mask = detail::random_mask_of_size(n, other(AttributeKind::Number), rng);
            }
            break;
        }
    }
    return alt;
}

/// Copy of `panel` showing `alt`. New entities take the component's modal
/// Type/Size/Color so no other attribute moves.
inline Panel apply_alternative(const Panel& panel, const Alternative& alt, Rng& rng) {
    Panel out = panel;
    auto& cp = out.components.at(static_cast<std::size_t>(alt.group.component));
    const ComponentValues current = values_of(cp);
    auto set_all = [&](int Entity::*field) {
        for (auto& e : cp.entities) e.*field = alt.value;
    };
    switch (alt.group.field) {
        case AttributeGroup::Field::Type: set_all(&Entity::type); break;
        case AttributeGroup::Field::Size: set_all(&Entity::size); break;
        case AttributeGroup::Field::Color: set_all(&Entity::color); break;
        case AttributeGroup::Field::NumberPosition:
            cp.position = alt.mask;
            cp.entities.assign(static_cast<std::size_t>(popcount(alt.mask)), Entity{current.type, current.size, current.color, 0});
            for (auto& e : cp.entities) e.angle = detail::random_angle(rng);
            break;
    }
    return out;
}

/// RAVEN scheme: 7 distractors, each differing from the truth in exactly one
/// attribute group, mutually distinct; truth inserted at a random index.
inline CandidateSet make_candidates_raven(const Panel& truth, const Layout& layout, const RuleAssignment& assignment,
                                          Rng& rng) {
    std::vector<AttributeGroup> groups = governed_groups(layout, assignment);
    const std::vector<AttributeGroup> all = perturbable_groups(layout);
    if (all.empty()) throw GenerationError("layout has no perturbable attribute");
    if (groups.empty()) groups = all;

    const AttributeTuple truth_values = values_of(truth);
    std::vector<Panel> distractors;
    std::vector<AttributeTuple> seen{truth_values};
    for (int attempt = 0; distractors.size() < 7; ++attempt) {
        if (attempt == 512) groups = all;  // governed groups alone are too small
        if (attempt > 4096) throw GenerationError("attribute space too small for 7 distinct distractors");
        const Alternative alt = draw_alternative(truth, layout, rng.pick(groups), assignment, rng);
        Panel d = apply_alternative(truth, alt, rng);
        AttributeTuple v = values_of(d);
        if (std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
        seen.push_back(std::move(v));
        distractors.push_back(std::move(d));
    }
    CandidateSet out;
    out.truth_index = rng.uniform(0, kCandidateCount - 1);
    for (int i = 0, k = 0; i < kCandidateCount; ++i) {
        out.panels.push_back(i == out.truth_index ? truth : distractors[static_cast<std::size_t>(k++)]);
    }
    return out;
}

/// I-RAVEN scheme: three levels of a binary tree. Each level draws one
/// alternative value for a distinct attribute group and gives it to one
/// child of every node, so every candidate value of a permuted group shows
/// up exactly four times. The all-unchanged leaf is the truth.
inline CandidateSet make_candidates_iraven(const Panel& truth, const Layout& layout, const RuleAssignment& assignment,
                                           Rng& rng) {
    std::vector<AttributeGroup> governed = governed_groups(layout, assignment);
    std::vector<AttributeGroup> all = perturbable_groups(layout);
    if (all.size() < 3) throw GenerationError("fewer than 3 perturbable attributes");
    rng.shuffle(governed);
    std::vector<AttributeGroup> chosen(governed.begin(), governed.begin() + std::min<std::size_t>(3, governed.size()));
    if (chosen.size() < 3) {
        std::vector<AttributeGroup> rest;
        for (const auto& g : all) {
            if (std::find(chosen.begin(), chosen.end(), g) == chosen.end()) rest.push_back(g);
        }
        rng.shuffle(rest);
        for (std::size_t i = 0; chosen.size() < 3; ++i) chosen.push_back(rest[i]);
    }

    struct Node {
        Panel panel;
        bool is_truth;
    };
    std::vector<Node> level{{truth, true}};
    for (const auto& g : chosen) {
        const Alternative alt = draw_alternative(truth, layout, g, assignment, rng);
        std::vector<Node> next;
        for (const auto& node : level) {
            next.push_back(node);
            next.push_back({apply_alternative(node.panel, alt, rng), false});
        }
        level = std::move(next);
    }
    rng.shuffle(level);
    CandidateSet out;
    out.permuted = chosen;
    for (int i = 0; i < kCandidateCount; ++i) {
        if (level[static_cast<std::size_t>(i)].is_truth) out.truth_index = i;
        out.panels.push_back(std::move(level[static_cast<std::size_t>(i)].panel));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Problems and corpora
// ---------------------------------------------------------------------------

inline std::string problem_id(std::uint64_t index, Configuration config) {
    std::string n = std::to_string(index);
    if (n.size() < 6) n.insert(0, 6 - n.size(), '0');
    return n + "_" + std::string(to_string(config));
}

inline Problem generate_problem(Configuration config, Scheme scheme, double uniformity_noise, Rng& rng,
                                std::string id = {}) {
    if (!(uniformity_noise >= 0.0 && uniformity_noise <= 1.0)) {
        throw ContractViolation("uniformity noise must lie in [0, 1]");
    }
    const Layout layout = layout_of(config);
    Problem p;
    p.id = std::move(id);
    p.config = config;
    p.annotations = sample_rule_assignment(config, uniformity_noise, rng);
    std::vector<Panel> panels = realize_panels(config, p.annotations, rng);
    p.context.assign(panels.begin(), panels.begin() + kContextPanels);
    CandidateSet cs = scheme == Scheme::Raven ? make_candidates_raven(panels[8], layout, p.annotations, rng)
                                              : make_candidates_iraven(panels[8], layout, p.annotations, rng);
    p.candidates = std::move(cs.panels);
    p.truth_index = cs.truth_index;
    return p;
}

/// Problem `index` of the corpus described by `spec`.
inline Problem generate_indexed(const GenSpec& spec, std::uint64_t index) {
    if (spec.configs.empty()) throw ContractViolation("GenSpec has no configuration");
    const Configuration config = spec.configs[index % spec.configs.size()];
    Rng rng(derive_seed(spec.seed, index));
    return generate_problem(config, spec.scheme, spec.uniformity_noise, rng, problem_id(index, config));
}

inline std::vector<Problem> generate_corpus(const GenSpec& spec, unsigned workers = 0) {
    if (spec.count < 0) throw ContractViolation("GenSpec count must be positive");
    std::vector<Problem> out(static_cast<std::size_t>(spec.count));
    parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = generate_indexed(spec, i); });
    return out;
}

}  // namespace rpm
