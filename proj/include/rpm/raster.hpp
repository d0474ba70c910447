// Grayscale panel rasters and the deterministic renderer.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "rpm/core.hpp"

namespace rpm {

struct PanelRaster {
    enum class Provenance : std::uint8_t { Generated, External };
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major
    Provenance provenance = Provenance::Generated;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y * width + x)]; }

    friend bool operator==(const PanelRaster& a, const PanelRaster& b) {
        return a.width == b.width && a.height == b.height && a.pixels == b.pixels;
    }
};

inline constexpr int kMinRasterSize = 64;
inline constexpr int kDefaultRasterSize = 160;
inline constexpr int kOutlinePixels = 2;

inline void check_raster(const PanelRaster& r) {
    if (r.width != r.height || r.width < kMinRasterSize ||
        r.pixels.size() != static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height)) {
        throw ContractViolation("raster must be square, at least 64 px, with width*height bytes (got " +
                                std::to_string(r.width) + "x" + std::to_string(r.height) + ")");
    }
}

struct RenderOptions {
    int size = kDefaultRasterSize;
    int supersample = 1;  // render at size*supersample, then box-filter down
};

/// Palette intensity of a Color ordinal: 0 is white, 9 is black.
inline std::uint8_t palette_intensity(int color) {
    if (!kColorRange.contains(color)) throw ContractViolation("Color " + std::to_string(color) + " out of range");
    return static_cast<std::uint8_t>(std::lround(255.0 - color * 255.0 / 9.0));
}

/// Nearest palette entry; ties go to the lower ordinal.
inline int nearest_palette_color(int intensity) {
    int best = 0, best_d = 1 << 30;
    for (int c = kColorRange.lo; c <= kColorRange.hi; ++c) {
        const int d = std::abs(intensity - palette_intensity(c));
        if (d < best_d) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

/// Shape scale as a fraction of the cell half-extent.
inline double size_scale(int size) { return 0.4 + 0.1 * size; }

/// Half-open pixel window [x0,x1) x [y0,y1).
struct PixelBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    int w() const noexcept { return x1 - x0; }
    int h() const noexcept { return y1 - y0; }
};

/// Pixel window covering a slot cell plus a one-pixel margin.
inline PixelBox cell_window(const SlotCell& cell, int n) {
    PixelBox b;
    b.x0 = std::max(0, static_cast<int>(std::floor((cell.cx - cell.half) * n)) - 1);
    b.y0 = std::max(0, static_cast<int>(std::floor((cell.cy - cell.half) * n)) - 1);
    b.x1 = std::min(n, static_cast<int>(std::ceil((cell.cx + cell.half) * n)) + 1);
    b.y1 = std::min(n, static_cast<int>(std::ceil((cell.cy + cell.half) * n)) + 1);
    return b;
}

namespace detail {

/// Pixel-center inclusion mask of an entity over `box` (row-major in the box).
inline std::vector<std::uint8_t> shape_mask(const SlotCell& cell, int type, int size, int angle, int n,
                                            const PixelBox& box) {
    const double cx = cell.cx * n, cy = cell.cy * n;
    const double radius = size_scale(size) * cell.half * n;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(box.w() * box.h()), 0);

    if (type == 4) {
        for (int y = box.y0; y < box.y1; ++y) {
            for (int x = box.x0; x < box.x1; ++x) {
                const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
                if (dx * dx + dy * dy <= radius * radius) {
                    mask[static_cast<std::size_t>((y - box.y0) * box.w() + (x - box.x0))] = 1;
                }
            }
        }
        return mask;
    }
    const int sides = type + 3;
    const double start = (type == 1 ? -45.0 : -90.0) + angle;
    std::vector<double> vx(static_cast<std::size_t>(sides)), vy(static_cast<std::size_t>(sides));
    for (int k = 0; k < sides; ++k) {
        const double a = (start + 360.0 * k / sides) * std::numbers::pi / 180.0;
        vx[static_cast<std::size_t>(k)] = cx + radius * std::cos(a);
        vy[static_cast<std::size_t>(k)] = cy + radius * std::sin(a);
    }
    for (int y = box.y0; y < box.y1; ++y) {
        for (int x = box.x0; x < box.x1; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            bool inside = true;
            for (int k = 0; k < sides && inside; ++k) {
                const auto i = static_cast<std::size_t>(k), j = static_cast<std::size_t>((k + 1) % sides);
                // vertices run clockwise on screen, so interior points give non-negative cross products
                const double cross = (vx[j] - vx[i]) * (py - vy[i]) - (vy[j] - vy[i]) * (px - vx[i]);
                inside = cross >= 0;
            }
            if (inside) mask[static_cast<std::size_t>((y - box.y0) * box.w() + (x - box.x0))] = 1;
        }
    }
    return mask;
}

/// City-block distance of every mask pixel to the nearest non-mask pixel
/// (pixels beyond the window count as outside).
inline std::vector<int> l1_depth(const std::vector<std::uint8_t>& mask, int w, int h) {
    std::vector<int> d(mask.size(), 0);
    auto at = [&](int x, int y) -> int { return (x < 0 || y < 0 || x >= w || y >= h) ? 0 : d[static_cast<std::size_t>(y * w + x)]; };
    const int inf = w + h + 2;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto i = static_cast<std::size_t>(y * w + x);
            d[i] = mask[i] ? std::min({inf, at(x - 1, y) + 1, at(x, y - 1) + 1}) : 0;
        }
    }
    for (int y = h - 1; y >= 0; --y) {
        for (int x = w - 1; x >= 0; --x) {
            const auto i = static_cast<std::size_t>(y * w + x);
            if (mask[i]) d[i] = std::min({d[i], at(x + 1, y) + 1, at(x, y + 1) + 1});
        }
    }
    return d;
}

inline void draw_entity(std::vector<std::uint8_t>& img, int n, const SlotCell& cell, const Entity& e, int outline) {
    const PixelBox box = cell_window(cell, n);
    const auto mask = shape_mask(cell, e.type, e.size, e.angle, n, box);
    const auto depth = l1_depth(mask, box.w(), box.h());
    const std::uint8_t fill = palette_intensity(e.color);
    for (int y = box.y0; y < box.y1; ++y) {
        for (int x = box.x0; x < box.x1; ++x) {
            const auto i = static_cast<std::size_t>((y - box.y0) * box.w() + (x - box.x0));
            if (!mask[i]) continue;
            img[static_cast<std::size_t>(y * n + x)] = depth[i] <= outline ? 0 : fill;
        }
    }
}

inline bool cells_overlap(const SlotCell& a, const SlotCell& b) {
    constexpr double eps = 1e-9;
    return std::abs(a.cx - b.cx) < a.half + b.half - eps && std::abs(a.cy - b.cy) < a.half + b.half - eps;
}

}  // namespace detail

/// Draws every entity of `panel` in its slot cell, components in layout
/// order (the outer shape of Out-In layouts first).
inline PanelRaster render_panel(const Panel& panel, const Layout& layout, const RenderOptions& opt = {}) {
    if (opt.size < kMinRasterSize || opt.supersample < 1) throw ContractViolation("invalid render options");
    if (panel.components.size() != layout.components.size()) {
        throw ContractViolation("panel has " + std::to_string(panel.components.size()) + " components, layout " +
                                std::to_string(layout.components.size()));
    }
    const int n = opt.size * opt.supersample;
    std::vector<std::uint8_t> img(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 255);

    for (std::size_t c = 0; c < layout.components.size(); ++c) {
        const Component& comp = layout.components[c];
        const ComponentPanel& cp = panel.components[c];
        for (std::size_t i = 0; i < comp.slots.size(); ++i) {
            for (std::size_t j = i + 1; j < comp.slots.size(); ++j) {
                if (detail::cells_overlap(comp.slots[i], comp.slots[j])) {
                    throw ContractViolation("slot cells " + std::to_string(i) + " and " + std::to_string(j) + " of '" +
                                            comp.name + "' overlap");
                }
            }
        }
        if (!comp.admits(AttributeKind::Position, static_cast<int>(cp.position)) && cp.position != 0) {
            throw ContractViolation("Position mask invalid for component '" + comp.name + "'");
        }
        if (static_cast<int>(cp.entities.size()) != popcount(cp.position)) {
            throw ContractViolation("entity count does not match Position of component '" + comp.name + "'");
        }
        std::size_t k = 0;
        for (int s = 0; s < comp.slot_count(); ++s) {
            if (!((cp.position >> s) & 1U)) continue;
            const Entity& e = cp.entities[k++];
            if (!comp.type.contains(e.type) || !comp.size.contains(e.size) || !comp.color.contains(e.color)) {
                throw ContractViolation("entity attribute out of range in component '" + comp.name + "'");
            }
            detail::draw_entity(img, n, comp.slots[static_cast<std::size_t>(s)], e, kOutlinePixels * opt.supersample);
        }
    }

    PanelRaster out;
    out.width = out.height = opt.size;
    if (opt.supersample == 1) {
        out.pixels = std::move(img);
        return out;
    }
    const int ss = opt.supersample;
    out.pixels.resize(static_cast<std::size_t>(opt.size) * static_cast<std::size_t>(opt.size));
    for (int y = 0; y < opt.size; ++y) {
        for (int x = 0; x < opt.size; ++x) {
            int sum = 0;
            for (int dy = 0; dy < ss; ++dy) {
                for (int dx = 0; dx < ss; ++dx) sum += img[static_cast<std::size_t>((y * ss + dy) * n + x * ss + dx)];
            }
            out.pixels[static_cast<std::size_t>(y * opt.size + x)] = static_cast<std::uint8_t>((sum + ss * ss / 2) / (ss * ss));
        }
    }
    return out;
}

}  // namespace rpm
