// Recovering structured panels from rasters: connected components, template
// matching for Type/Size, median interior intensity for Color.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rpm/core.hpp"
#include "rpm/raster.hpp"

namespace rpm {

class PerceptionError : public DataError {
public:
    using DataError::DataError;
};

inline constexpr int kBinarizeThreshold = 250;  // intensity < 250 is foreground
inline constexpr double kMatchThreshold = 0.85;

struct EntityBlob {
    int component = 0;
    int slot = 0;
    std::vector<int> pixels;  // raster indices, ascending
    PixelBox bbox;
    double cx = 0, cy = 0;  // centroid, pixel units
};

struct ComponentSegmentation {
    std::vector<EntityBlob> blobs;  // one per occupied slot, ascending slot
    int number = 0;
    PositionMask position = 0;
};

struct TemplateMatch {
    int type = 0;
    int size = 0;
    int angle = 0;
    double iou = 0;
    double runner_up = 0;  // best IoU of any other (Type, Size)
};

namespace detail {

/// Component owning each pixel (by pixel center), -1 for none.
inline std::vector<int> pixel_owners(const Layout& layout, int n) {
    std::vector<int> owner(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double px = (x + 0.5) / n, py = (y + 0.5) / n;
            for (int c = 0; c < layout.component_count(); ++c) {
                if (layout.components[static_cast<std::size_t>(c)].region.contains(px, py)) {
                    owner[static_cast<std::size_t>(y * n + x)] = c;
                    break;
                }
            }
        }
    }
    return owner;
}

inline int slot_of(const Component& comp, double cx, double cy, int n) {
    const double x = cx / n, y = cy / n;
    for (int s = 0; s < comp.slot_count(); ++s) {
        const auto& cell = comp.slots[static_cast<std::size_t>(s)];
        if (std::abs(x - cell.cx) <= cell.half && std::abs(y - cell.cy) <= cell.half) return s;
    }
    return -1;
}

inline void finish_blob(EntityBlob& b, int n) {
    std::sort(b.pixels.begin(), b.pixels.end());
    double sx = 0, sy = 0;
    b.bbox = {n, n, 0, 0};
    for (int i : b.pixels) {
        const int x = i % n, y = i / n;
        sx += x + 0.5;
        sy += y + 0.5;
        b.bbox.x0 = std::min(b.bbox.x0, x);
        b.bbox.y0 = std::min(b.bbox.y0, y);
        b.bbox.x1 = std::max(b.bbox.x1, x + 1);
        b.bbox.y1 = std::max(b.bbox.y1, y + 1);
    }
    b.cx = sx / static_cast<double>(b.pixels.size());
    b.cy = sy / static_cast<double>(b.pixels.size());
}

/// Window bitmap of the blob with enclosed holes filled.
inline std::vector<std::uint8_t> filled_mask(const EntityBlob& blob, const PixelBox& win, int n) {
    const int w = win.w(), h = win.h();
    std::vector<std::uint8_t> m(static_cast<std::size_t>(w * h), 0);
    for (int i : blob.pixels) {
        const int x = i % n - win.x0, y = i / n - win.y0;
        if (x >= 0 && y >= 0 && x < w && y < h) m[static_cast<std::size_t>(y * w + x)] = 1;
    }
    // 2 = reached from the window border through non-blob pixels
    std::vector<int> stack;
    auto seed = [&](int x, int y) {
        auto& v = m[static_cast<std::size_t>(y * w + x)];
        if (v == 0) {
            v = 2;
            stack.push_back(y * w + x);
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const int x = i % w, y = i / w;
        if (x > 0) seed(x - 1, y);
        if (x + 1 < w) seed(x + 1, y);
        if (y > 0) seed(x, y - 1);
        if (y + 1 < h) seed(x, y + 1);
    }
    for (auto& v : m) v = v == 2 ? 0 : 1;
    return m;
}

inline std::vector<std::uint64_t> to_bits(const std::vector<std::uint8_t>& m) {
    std::vector<std::uint64_t> bits((m.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]) bits[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return bits;
}

struct Template {
    int type = 0, size = 0, angle = 0;
    std::vector<std::uint8_t> mask;
    std::vector<std::uint64_t> bits;
    int area = 0;
    double cx = 0, cy = 0;  // window coordinates
};

inline void centroid(const std::vector<std::uint8_t>& m, int w, int& area, double& cx, double& cy) {
    double sx = 0, sy = 0;
    area = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i]) continue;
        ++area;
        sx += static_cast<double>(static_cast<int>(i) % w) + 0.5;
        sy += static_cast<double>(static_cast<int>(i) / w) + 0.5;
    }
    cx = area ? sx / area : 0;
    cy = area ? sy / area : 0;
}

}  // namespace detail

/// Perception for one layout at one raster size; holds the template bank.
/// Immutable after construction, so one instance may serve many threads.
class Perceiver {
public:
    Perceiver(Configuration config, int raster_size = kDefaultRasterSize)
        : layout_(layout_of(config)), n_(raster_size), owner_(detail::pixel_owners(layout_, raster_size)) {
        if (raster_size < kMinRasterSize) throw ContractViolation("raster size below 64");
        for (const Component& comp : layout_.components) {
            std::vector<Slot> slots;
            for (const SlotCell& cell : comp.slots) {
                Slot s;
                s.window = cell_window(cell, n_);
                for (int t = comp.type.lo; t <= comp.type.hi; ++t) {
                    for (int z = comp.size.lo; z <= comp.size.hi; ++z) {
                        for (int a : kAngleSet) {
                            if (t == 4 && a != kAngleSet[0]) continue;  // circles are rotation invariant
                            detail::Template tp{t, z, a, detail::shape_mask(cell, t, z, a, n_, s.window), {}, 0, 0, 0};
                            tp.bits = detail::to_bits(tp.mask);
                            detail::centroid(tp.mask, s.window.w(), tp.area, tp.cx, tp.cy);
                            s.templates.push_back(std::move(tp));
                        }
                    }
                }
                slots.push_back(std::move(s));
            }
            banks_.push_back(std::move(slots));
        }
    }

    const Layout& layout() const noexcept { return layout_; }
    int raster_size() const noexcept { return n_; }

    /// Blobs per component. A blob whose centroid lies in no slot cell is a
    /// perception error; fragments sharing a slot are merged.
    std::vector<ComponentSegmentation> segment(const PanelRaster& r) const {
        check(r);
        const std::size_t total = r.pixels.size();
        std::vector<int> label(total, -1);
        std::vector<std::map<int, EntityBlob>> by_slot(layout_.components.size());
        std::vector<int> stack;
        for (std::size_t start = 0; start < total; ++start) {
            if (label[start] != -1 || r.pixels[start] >= kBinarizeThreshold || owner_[start] < 0) continue;
            const int comp = owner_[start];
            EntityBlob b;
            b.component = comp;
            label[start] = 1;
            stack.push_back(static_cast<int>(start));
            while (!stack.empty()) {
                const int i = stack.back();
                stack.pop_back();
                b.pixels.push_back(i);
                const int x = i % n_, y = i / n_;
                auto visit = [&](int j) {
                    const auto u = static_cast<std::size_t>(j);
                    if (label[u] == -1 && r.pixels[u] < kBinarizeThreshold && owner_[u] == comp) {
                        label[u] = 1;
                        stack.push_back(j);
                    }
                };
                if (x > 0) visit(i - 1);
                if (x + 1 < n_) visit(i + 1);
                if (y > 0) visit(i - n_);
                if (y + 1 < n_) visit(i + n_);
            }
            detail::finish_blob(b, n_);
            const Component& c = layout_.components[static_cast<std::size_t>(comp)];
            const int slot = detail::slot_of(c, b.cx, b.cy, n_);
            if (slot < 0) {
                throw PerceptionError("blob centroid (" + std::to_string(b.cx) + ", " + std::to_string(b.cy) +
                                      ") lies in no slot cell of component '" + c.name + "'");
            }
            b.slot = slot;
            auto [it, fresh] = by_slot[static_cast<std::size_t>(comp)].try_emplace(slot, std::move(b));
            if (!fresh) {
                it->second.pixels.insert(it->second.pixels.end(), b.pixels.begin(), b.pixels.end());
                detail::finish_blob(it->second, n_);
            }
        }
        std::vector<ComponentSegmentation> out(layout_.components.size());
        for (std::size_t c = 0; c < out.size(); ++c) {
            for (auto& [slot, blob] : by_slot[c]) {
                out[c].position |= PositionMask{1} << slot;
                out[c].blobs.push_back(std::move(blob));
            }
            out[c].number = static_cast<int>(out[c].blobs.size());
        }
        return out;
    }

    /// Best template by IoU of the hole-filled blob, centroids aligned.
    TemplateMatch classify(const EntityBlob& blob) const {
        const Slot& s = slot(blob);
        const auto filled = detail::filled_mask(blob, s.window, n_);
        const auto bits = detail::to_bits(filled);
        int area = 0;
        double cx = 0, cy = 0;
        detail::centroid(filled, s.window.w(), area, cx, cy);
        if (area == 0) throw PerceptionError("empty blob");

        const int max_offset = std::max(2, s.window.w() / 16);
        std::map<std::pair<int, int>, double> best_per_label;
        TemplateMatch m;
        for (const auto& t : s.templates) {
            const double ratio = static_cast<double>(std::min(area, t.area)) / std::max(area, t.area);
            if (ratio < kMatchThreshold) continue;
            const int dx = static_cast<int>(std::lround(cx - t.cx)), dy = static_cast<int>(std::lround(cy - t.cy));
            if (std::abs(dx) > max_offset || std::abs(dy) > max_offset) continue;  // entities sit at their cell centre
            const int inter = dx == 0 && dy == 0 ? intersect(bits, t.bits) : intersect_shifted(filled, t, s.window, dx, dy);
            const double iou = static_cast<double>(inter) / (area + t.area - inter);
            auto& b = best_per_label[{t.type, t.size}];
            b = std::max(b, iou);
            if (iou > m.iou) {
                m.type = t.type;
                m.size = t.size;
                m.angle = t.angle;
                m.iou = iou;
            }
        }
        for (const auto& [label, iou] : best_per_label) {
            if (label != std::pair{m.type, m.size}) m.runner_up = std::max(m.runner_up, iou);
        }
        if (m.iou < kMatchThreshold) {
            throw PerceptionError("unrecognized entity in component '" +
                                  layout_.components[static_cast<std::size_t>(blob.component)].name + "' slot " +
                                  std::to_string(blob.slot) + " (best IoU " + std::to_string(m.iou) + ")");
        }
        return m;
    }

    /// Median intensity of the blob interior (outline eroded off, pixels of
    /// other components excluded), mapped to the nearest palette entry.
    int color(const EntityBlob& blob, const PanelRaster& r) const {
        const Slot& s = slot(blob);
        const auto filled = detail::filled_mask(blob, s.window, n_);
        const auto depth = detail::l1_depth(filled, s.window.w(), s.window.h());
        const int deepest = *std::max_element(depth.begin(), depth.end());
        const int cut = std::min(kOutlinePixels, deepest - 1);  // tiny blobs keep their core
        std::vector<int> values;
        for (int y = 0; y < s.window.h(); ++y) {
            for (int x = 0; x < s.window.w(); ++x) {
                const auto wi = static_cast<std::size_t>(y * s.window.w() + x);
                const auto ri = static_cast<std::size_t>((y + s.window.y0) * n_ + x + s.window.x0);
                if (depth[wi] > cut && owner_[ri] == blob.component) values.push_back(r.pixels[ri]);
            }
        }
        if (values.empty()) throw PerceptionError("entity has no interior pixels");
        auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
        std::nth_element(values.begin(), mid, values.end());
        return nearest_palette_color(*mid);
    }

    Panel perceive(const PanelRaster& r) const {
        const auto seg = segment(r);
        Panel p;
        for (std::size_t c = 0; c < seg.size(); ++c) {
            const Component& comp = layout_.components[c];
            if (!comp.number.contains(seg[c].number)) {
                throw PerceptionError("component '" + comp.name + "' shows " + std::to_string(seg[c].number) +
                                      " entities, outside " + std::to_string(comp.number.lo) + ".." +
                                      std::to_string(comp.number.hi));
            }
            ComponentPanel cp;
            cp.position = seg[c].position;
            for (const auto& blob : seg[c].blobs) {
                const TemplateMatch m = classify(blob);
                cp.entities.push_back(Entity{m.type, m.size, color(blob, r), m.angle});
            }
            p.components.push_back(std::move(cp));
        }
        return p;
    }

private:
    struct Slot {
        PixelBox window;
        std::vector<detail::Template> templates;
    };

    void check(const PanelRaster& r) const {
        check_raster(r);
        if (r.width != n_) {
            throw ContractViolation("raster is " + std::to_string(r.width) + " px, perceiver expects " + std::to_string(n_));
        }
    }

    const Slot& slot(const EntityBlob& b) const {
        return banks_.at(static_cast<std::size_t>(b.component)).at(static_cast<std::size_t>(b.slot));
    }

    static int intersect(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
        int n = 0;
        for (std::size_t i = 0; i < a.size(); ++i) n += std::popcount(a[i] & b[i]);
        return n;
    }

    static int intersect_shifted(const std::vector<std::uint8_t>& m, const detail::Template& t, const PixelBox& win,
                                 int dx, int dy) {
        const int w = win.w(), h = win.h();
        int n = 0;
        for (int y = 0; y < h; ++y) {
            const int ty = y - dy;
            if (ty < 0 || ty >= h) continue;
            for (int x = 0; x < w; ++x) {
                const int tx = x - dx;
                if (tx < 0 || tx >= w) continue;
                n += m[static_cast<std::size_t>(y * w + x)] & t.mask[static_cast<std::size_t>(ty * w + tx)];
            }
        }
        return n;
    }

    Layout layout_;
    int n_;
    std::vector<int> owner_;
    std::vector<std::vector<Slot>> banks_;
};

namespace detail {

inline const Perceiver& cached_perceiver(Configuration config, int size) {
    static std::mutex mu;
    static std::map<std::pair<Configuration, int>, std::unique_ptr<Perceiver>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{config, size}];
    if (!slot) slot = std::make_unique<Perceiver>(config, size);
    return *slot;
}

}  // namespace detail

inline std::vector<ComponentSegmentation> segment_entities(const PanelRaster& r, const Layout& layout) {
    check_raster(r);
    return detail::cached_perceiver(layout.config, r.width).segment(r);
}

inline TemplateMatch classify_type_size(const EntityBlob& blob, const PanelRaster& r, const Layout& layout) {
    check_raster(r);
    return detail::cached_perceiver(layout.config, r.width).classify(blob);
}

inline int extract_color(const EntityBlob& blob, const PanelRaster& r, const Layout& layout) {
    check_raster(r);
    return detail::cached_perceiver(layout.config, r.width).color(blob, r);
}

inline Panel perceive_panel(const PanelRaster& r, const Layout& layout) {
    check_raster(r);
    return detail::cached_perceiver(layout.config, r.width).perceive(r);
}

}  // namespace rpm
