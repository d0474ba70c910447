// Domain types shared by every part of the engine: attribute kinds, value
// ranges, panel layouts, entities, candidate tuples.
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rpm {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Caller broke a documented precondition.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data (files, records).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Attributes
// ---------------------------------------------------------------------------

enum class AttributeKind : std::uint8_t { Number, Position, Type, Size, Color, Angle };

/// The five kinds rules are induced over. Angle is render noise only.
inline constexpr std::array<AttributeKind, 5> kReasonedKinds{
    AttributeKind::Number, AttributeKind::Position, AttributeKind::Type,
    AttributeKind::Size,   AttributeKind::Color};

constexpr bool is_reasoned(AttributeKind k) noexcept { return k != AttributeKind::Angle; }

inline std::string_view to_string(AttributeKind k) {
    switch (k) {
        case AttributeKind::Number: return "Number";
        case AttributeKind::Position: return "Position";
        case AttributeKind::Type: return "Type";
        case AttributeKind::Size: return "Size";
        case AttributeKind::Color: return "Color";
        case AttributeKind::Angle: return "Angle";
    }
    return "?";
}

inline AttributeKind parse_attribute_kind(std::string_view s) {
    for (auto k : {AttributeKind::Number, AttributeKind::Position, AttributeKind::Type,
                   AttributeKind::Size, AttributeKind::Color, AttributeKind::Angle}) {
        if (to_string(k) == s) return k;
    }
    throw DataError("unknown attribute kind '" + std::string(s) + "'");
}

/// Closed integer interval.
struct ValueRange {
    int lo = 0;
    int hi = 0;

    constexpr bool contains(int v) const noexcept { return v >= lo && v <= hi; }
    constexpr int width() const noexcept { return hi - lo + 1; }
    friend constexpr bool operator==(const ValueRange&, const ValueRange&) = default;
};

// Integer codebook. Type ordinals follow {triangle, square, pentagon, hexagon, circle}.
inline constexpr ValueRange kNumberRange{1, 9};
inline constexpr ValueRange kTypeRange{0, 4};
inline constexpr ValueRange kSizeRange{0, 5};
inline constexpr ValueRange kColorRange{0, 9};

inline constexpr std::array<std::string_view, 5> kTypeNames{"triangle", "square", "pentagon",
                                                            "hexagon", "circle"};

/// Render-time rotation noise, degrees.
inline constexpr std::array<int, 8> kAngleSet{-135, -90, -45, 0, 45, 90, 135, 180};

// ---------------------------------------------------------------------------
// Position encoding
// ---------------------------------------------------------------------------

using PositionMask = std::uint32_t;

inline constexpr int kMaxSlots = 9;

constexpr PositionMask full_mask(int slot_count) noexcept {
    return slot_count >= 32 ? ~PositionMask{0} : (PositionMask{1} << slot_count) - 1;
}

constexpr int popcount(PositionMask m) noexcept { return std::popcount(m); }

/// Bit i set iff slot i is occupied.
inline PositionMask encode_position(std::span<const bool> occupancy, int slot_count) {
    if (static_cast<int>(occupancy.size()) != slot_count) {
        throw ContractViolation("occupancy vector has " + std::to_string(occupancy.size()) +
                                " entries, layout has " + std::to_string(slot_count) + " slots");
    }
    PositionMask m = 0;
    for (int i = 0; i < slot_count; ++i) {
        if (occupancy[static_cast<std::size_t>(i)]) m |= PositionMask{1} << i;
    }
    return m;
}

inline std::vector<bool> decode_position(PositionMask mask, int slot_count) {
    std::vector<bool> out(static_cast<std::size_t>(slot_count));
    for (int i = 0; i < slot_count; ++i) out[static_cast<std::size_t>(i)] = (mask >> i) & 1U;
    return out;
}

/// Cyclic left rotation of a slot mask by k slots.
constexpr PositionMask rotate_slots(PositionMask m, int k, int slot_count) noexcept {
    k = ((k % slot_count) + slot_count) % slot_count;
    if (k == 0) return m;
    const PositionMask full = full_mask(slot_count);
    return ((m << k) | (m >> (slot_count - k))) & full;
}

// ---------------------------------------------------------------------------
// Layouts
// ---------------------------------------------------------------------------

enum class Configuration : std::uint8_t {
    Center,
    Grid2x2,
    Grid3x3,
    LeftRight,
    UpDown,
    OutInCenter,
    OutInGrid,
};

inline constexpr std::array<Configuration, 7> kAllConfigurations{
    Configuration::Center,   Configuration::Grid2x2,     Configuration::Grid3x3,
    Configuration::LeftRight, Configuration::UpDown,     Configuration::OutInCenter,
    Configuration::OutInGrid};

inline std::string_view to_string(Configuration c) {
    switch (c) {
        case Configuration::Center: return "center";
        case Configuration::Grid2x2: return "grid2x2";
        case Configuration::Grid3x3: return "grid3x3";
        case Configuration::LeftRight: return "left_right";
        case Configuration::UpDown: return "up_down";
        case Configuration::OutInCenter: return "out_in_center";
        case Configuration::OutInGrid: return "out_in_grid";
    }
    return "?";
}

/// Display names in table headers.
inline std::string_view display_name(Configuration c) {
    switch (c) {
        case Configuration::Center: return "Center";
        case Configuration::Grid2x2: return "2x2Grid";
        case Configuration::Grid3x3: return "3x3Grid";
        case Configuration::LeftRight: return "Left-Right";
        case Configuration::UpDown: return "Up-Down";
        case Configuration::OutInCenter: return "Out-InCenter";
        case Configuration::OutInGrid: return "Out-InGrid";
    }
    return "?";
}

inline Configuration parse_configuration(std::string_view s) {
    for (auto c : kAllConfigurations) {
        if (to_string(c) == s || display_name(c) == s) return c;
    }
    throw DataError("unknown configuration '" + std::string(s) + "'");
}

/// Square cell an entity is drawn in; normalized panel coordinates in [0,1].
struct SlotCell {
    double cx = 0.5;
    double cy = 0.5;
    double half = 0.5;
};

/// Pixel region owned by a component during segmentation. Disks are centered
/// on the panel.
struct Region {
    enum class Shape : std::uint8_t { Box, Disk, BoxMinusDisk };
    Shape shape = Shape::Box;
    double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
    double radius = 0;

    bool contains(double x, double y) const noexcept {
        const double dx = x - 0.5, dy = y - 0.5;
        const bool in_disk = dx * dx + dy * dy < radius * radius;
        const bool in_box = x >= x0 && x < x1 && y >= y0 && y < y1;
        switch (shape) {
            case Shape::Box: return in_box;
            case Shape::Disk: return in_disk;
            case Shape::BoxMinusDisk: return in_box && !in_disk;
        }
        return false;
    }
};

struct Component {
    std::string name;  // "center", "left", "out", "grid", ...
    std::string role;  // rule-pool key shared by structurally equal components
    std::vector<SlotCell> slots;
    Region region;
    ValueRange number;
    ValueRange type;
    ValueRange size;
    ValueRange color;

    int slot_count() const noexcept { return static_cast<int>(slots.size()); }
    bool variable_layout() const noexcept { return slots.size() > 1; }

    ValueRange range_of(AttributeKind k) const {
        switch (k) {
            case AttributeKind::Number: return number;
            case AttributeKind::Type: return type;
            case AttributeKind::Size: return size;
            case AttributeKind::Color: return color;
            case AttributeKind::Position:
                return {1, static_cast<int>(full_mask(slot_count()))};
            case AttributeKind::Angle: return {-135, 180};
        }
        return {};
    }

    bool admits(AttributeKind k, int v) const {
        if (k == AttributeKind::Position) {
            const auto m = static_cast<PositionMask>(v);
            return v > 0 && (m & ~full_mask(slot_count())) == 0;
        }
        return range_of(k).contains(v);
    }
};

struct Layout {
    Configuration config = Configuration::Center;
    std::vector<Component> components;

    int component_count() const noexcept { return static_cast<int>(components.size()); }
};

namespace detail {

inline std::vector<SlotCell> grid_cells(int n, double x0, double y0, double extent) {
    std::vector<SlotCell> cells;
    const double step = extent / n;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            cells.push_back({x0 + (c + 0.5) * step, y0 + (r + 0.5) * step, step / 2});
        }
    }
    return cells;
}

inline Component single(std::string name, SlotCell cell, Region region) {
    return Component{std::move(name), "single", {cell}, region,
                     {1, 1},          kTypeRange, kSizeRange, kColorRange};
}

// The outer entity's outline never comes closer than ~0.27 to the center
// (pentagon, Size 3); the inner grid's corners sit at 0.212.
inline constexpr double kInnerDisk = 0.25;

inline Component outer() {
    Region r{Region::Shape::BoxMinusDisk, 0, 0, 1, 1, kInnerDisk};
    return Component{"out", "out", {{0.5, 0.5, 0.5}}, r, {1, 1}, {2, 4}, {3, 5}, {0, 0}};
}

}  // namespace detail

/// Geometry and admissible value ranges of each configuration.
inline Layout layout_of(Configuration config) {
    using detail::grid_cells;
    using detail::single;
    const Region full{};
    Layout l{config, {}};
    switch (config) {
        case Configuration::Center:
            l.components.push_back(single("center", {0.5, 0.5, 0.5}, full));
            break;
        case Configuration::Grid2x2:
            l.components.push_back(Component{"grid", "grid2x2", grid_cells(2, 0, 0, 1), full,
                                             {1, 4}, kTypeRange, kSizeRange, kColorRange});
            break;
        case Configuration::Grid3x3:
            l.components.push_back(Component{"grid", "grid3x3", grid_cells(3, 0, 0, 1), full,
                                             {1, 9}, kTypeRange, kSizeRange, kColorRange});
            break;
        case Configuration::LeftRight:
            l.components.push_back(single("left", {0.25, 0.5, 0.25}, {Region::Shape::Box, 0, 0, 0.5, 1, 0}));
            l.components.push_back(single("right", {0.75, 0.5, 0.25}, {Region::Shape::Box, 0.5, 0, 1, 1, 0}));
            break;
        case Configuration::UpDown:
            l.components.push_back(single("up", {0.5, 0.25, 0.25}, {Region::Shape::Box, 0, 0, 1, 0.5, 0}));
            l.components.push_back(single("down", {0.5, 0.75, 0.25}, {Region::Shape::Box, 0, 0.5, 1, 1, 0}));
            break;
        case Configuration::OutInCenter: {
            l.components.push_back(detail::outer());
            l.components.push_back(single("in", {0.5, 0.5, 0.25},
                                          {Region::Shape::Disk, 0, 0, 1, 1, detail::kInnerDisk}));
            break;
        }
        case Configuration::OutInGrid: {
            l.components.push_back(detail::outer());
            l.components.push_back(Component{"in", "grid2x2", grid_cells(2, 0.35, 0.35, 0.3),
                                             {Region::Shape::Disk, 0, 0, 1, 1, detail::kInnerDisk},
                                             {1, 4}, kTypeRange, {1, 5}, kColorRange});
            break;
        }
    }
    return l;
}

// ---------------------------------------------------------------------------
// Entities and panels
// ---------------------------------------------------------------------------

struct Entity {
    int type = 0;
    int size = 0;
    int color = 0;
    int angle = 0;
    friend bool operator==(const Entity&, const Entity&) = default;
};

/// State of one component inside one panel. `entities` follow the set bits of
/// `position` in ascending slot order.
struct ComponentPanel {
    PositionMask position = 1;
    std::vector<Entity> entities;
    friend bool operator==(const ComponentPanel&, const ComponentPanel&) = default;
};

struct Panel {
    std::vector<ComponentPanel> components;
    friend bool operator==(const Panel&, const Panel&) = default;
};

/// Attribute values of one component as seen by the reasoner.
struct ComponentValues {
    int number = 1;
    PositionMask position = 1;
    int type = 0;
    int size = 0;
    int color = 0;

    int get(AttributeKind k) const {
        switch (k) {
            case AttributeKind::Number: return number;
            case AttributeKind::Position: return static_cast<int>(position);
            case AttributeKind::Type: return type;
            case AttributeKind::Size: return size;
            case AttributeKind::Color: return color;
            case AttributeKind::Angle: break;
        }
        throw ContractViolation("Angle is not part of a component's reasoned values");
    }

    void set(AttributeKind k, int v) {
        switch (k) {
            case AttributeKind::Number: number = v; return;
            case AttributeKind::Position: position = static_cast<PositionMask>(v); return;
            case AttributeKind::Type: type = v; return;
            case AttributeKind::Size: size = v; return;
            case AttributeKind::Color: color = v; return;
            case AttributeKind::Angle: break;
        }
        throw ContractViolation("Angle is not part of a component's reasoned values");
    }

    friend bool operator==(const ComponentValues&, const ComponentValues&) = default;
};

/// The candidate tuple (one ComponentValues per component, layout order).
using AttributeTuple = std::vector<ComponentValues>;

namespace detail {
inline int modal(const std::vector<Entity>& es, int Entity::*field) {
    std::map<int, int> hist;
    for (const auto& e : es) ++hist[e.*field];
    int best = 0, best_count = -1;
    for (auto [v, n] : hist) {
        if (n > best_count) {  // ties resolve to the smaller value
            best = v;
            best_count = n;
        }
    }
    return best;
}
}  // namespace detail

/// Reasoned values of a component panel. Type/Size/Color are the modal
/// values over its entities (smallest value wins ties).
inline ComponentValues values_of(const ComponentPanel& cp) {
    ComponentValues v;
    v.position = cp.position;
    v.number = popcount(cp.position);
    if (!cp.entities.empty()) {
        v.type = detail::modal(cp.entities, &Entity::type);
        v.size = detail::modal(cp.entities, &Entity::size);
        v.color = detail::modal(cp.entities, &Entity::color);
    }
    return v;
}

inline AttributeTuple values_of(const Panel& p) {
    AttributeTuple t;
    t.reserve(p.components.size());
    for (const auto& c : p.components) t.push_back(values_of(c));
    return t;
}

/// A component panel whose entities all carry the tuple's Type/Size/Color.
inline ComponentPanel uniform_component_panel(const ComponentValues& v, int angle = 0) {
    ComponentPanel cp;
    cp.position = v.position;
    cp.entities.assign(static_cast<std::size_t>(popcount(v.position)),
                       Entity{v.type, v.size, v.color, angle});
    return cp;
}

/// Number of differing attributes between two tuples. Number and Position of
/// a component count as one attribute since each constrains the other.
inline int attribute_tuple_distance(const AttributeTuple& a, const AttributeTuple& b) {
    if (a.size() != b.size()) {
        throw ContractViolation("tuples have different component counts (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += (a[i].number != b[i].number || a[i].position != b[i].position);
        d += a[i].type != b[i].type;
        d += a[i].size != b[i].size;
        d += a[i].color != b[i].color;
    }
    return d;
}

}  // namespace rpm
