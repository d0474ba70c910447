#include <gtest/gtest.h>

#include <filesystem>

#include "rpm/generator.hpp"
#include "rpm/perception.hpp"
#include "rpm/png.hpp"

using namespace rpm;

namespace {

/// Panel with one entity at slot `slot` of component `comp`; other
/// components get their smallest valid entity at slot 0.
Panel single_entity(const Layout& l, int comp, int slot, Entity e) {
    Panel p;
    for (int c = 0; c < l.component_count(); ++c) {
        const auto& k = l.components[static_cast<std::size_t>(c)];
        if (c == comp) {
            p.components.push_back({PositionMask{1} << slot, {e}});
        } else {
            p.components.push_back({1, {Entity{k.type.lo, k.size.lo, k.color.lo, 0}}});
        }
    }
    return p;
}

}  // namespace

// Every (Type, Size, Angle) of every component, at its first and last slot,
// must come back as itself with a clear margin over every other label.
TEST(TemplateBank, ExhaustiveSelfMatch) {
    for (auto config : kAllConfigurations) {
        const Layout l = layout_of(config);
        const Perceiver perceiver(config);
        for (int c = 0; c < l.component_count(); ++c) {
            const auto& comp = l.components[static_cast<std::size_t>(c)];
            for (int slot : {0, comp.slot_count() - 1}) {
                for (int t = comp.type.lo; t <= comp.type.hi; ++t) {
                    for (int z = comp.size.lo; z <= comp.size.hi; ++z) {
                        for (int a : kAngleSet) {
                            const auto r = render_panel(single_entity(l, c, slot, {t, z, comp.color.hi, a}), l);
                            const auto seg = perceiver.segment(r);
                            ASSERT_EQ(seg[static_cast<std::size_t>(c)].blobs.size(), 1u);
                            const auto m = perceiver.classify(seg[static_cast<std::size_t>(c)].blobs[0]);
                            ASSERT_EQ(m.type, t) << to_string(config) << " size " << z << " angle " << a;
                            ASSERT_EQ(m.size, z) << to_string(config) << " type " << t << " angle " << a;
                            EXPECT_GE(m.iou, 0.95);
                            EXPECT_GT(m.iou - m.runner_up, 0.02);
                        }
                    }
                }
            }
        }
    }
}

// The smallest shape of each component still has interior pixels for every color.
TEST(Color, EveryPaletteEntryOnSmallestShapes) {
    for (auto config : kAllConfigurations) {
        const Layout l = layout_of(config);
        const Perceiver perceiver(config);
        for (int c = 0; c < l.component_count(); ++c) {
            const auto& comp = l.components[static_cast<std::size_t>(c)];
            for (int t = comp.type.lo; t <= comp.type.hi; ++t) {
                for (int col = comp.color.lo; col <= comp.color.hi; ++col) {
                    const auto r = render_panel(single_entity(l, c, 0, {t, comp.size.lo, col, 0}), l);
                    const auto seg = perceiver.segment(r);
                    EXPECT_EQ(perceiver.color(seg[static_cast<std::size_t>(c)].blobs[0], r), col)
                        << to_string(config) << " type " << t;
                }
            }
        }
    }
}

TEST(Segment, BlankFullAndExample) {
    const Layout g3 = layout_of(Configuration::Grid3x3);
    PanelRaster blank{kDefaultRasterSize, kDefaultRasterSize,
                      std::vector<std::uint8_t>(kDefaultRasterSize * kDefaultRasterSize, 255)};
    const auto none = segment_entities(blank, g3);
    EXPECT_EQ(none[0].number, 0);
    EXPECT_EQ(none[0].position, 0u);
    EXPECT_THROW(perceive_panel(blank, g3), PerceptionError);

    ComponentPanel full{511, std::vector<Entity>(9, Entity{0, 0, 9, 0})};
    const auto seg = segment_entities(render_panel(Panel{{full}}, g3), g3);
    EXPECT_EQ(seg[0].number, 9);
    EXPECT_EQ(seg[0].position, 511u);
}

TEST(Perceive, OutInCenterGivesTwoTuples) {
    const Layout l = layout_of(Configuration::OutInCenter);
    const Panel p{{ComponentPanel{1, {Entity{3, 5, 0, 0}}}, ComponentPanel{1, {Entity{0, 1, 6, 180}}}}};
    const auto back = values_of(perceive_panel(render_panel(p, l), l));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back, values_of(p));
}

TEST(Perceive, RoundTripOnGeneratedPanels) {
    for (auto config : kAllConfigurations) {
        const Layout l = layout_of(config);
        for (std::uint64_t i = 0; i < 40; ++i) {
            Rng rng(derive_seed(3, i));
            const auto a = sample_rule_assignment(config, 0.3, rng);
            const auto panels = realize_panels(config, a, rng);
            for (const Panel& p : {panels[0], panels[8]}) {
                const Panel back = perceive_panel(render_panel(p, l), l);
                ASSERT_EQ(values_of(back), values_of(p)) << to_string(config);
                for (std::size_t c = 0; c < p.components.size(); ++c) {
                    for (std::size_t k = 0; k < p.components[c].entities.size(); ++k) {
                        const auto& x = p.components[c].entities[k];
                        const auto& y = back.components[c].entities[k];
                        EXPECT_EQ(std::tie(x.type, x.size, x.color), std::tie(y.type, y.size, y.color));
                    }
                }
            }
        }
    }
}

TEST(Perceive, WrongLayoutIsAnErrorNotASilentTuple) {
    const Panel center{{ComponentPanel{1, {Entity{2, 4, 3, 0}}}}};
    const auto r = render_panel(center, layout_of(Configuration::Center));
    for (auto other : {Configuration::Grid2x2, Configuration::Grid3x3, Configuration::LeftRight,
                       Configuration::UpDown, Configuration::OutInCenter}) {
        EXPECT_THROW(perceive_panel(r, layout_of(other)), PerceptionError) << to_string(other);
    }
}

TEST(Perceive, NoiseImageIsRejected) {
    Rng rng(8);
    PanelRaster r{kDefaultRasterSize, kDefaultRasterSize, {}};
    for (int i = 0; i < kDefaultRasterSize * kDefaultRasterSize; ++i) r.pixels.push_back(static_cast<std::uint8_t>(rng.uniform(0, 255)));
    for (auto config : kAllConfigurations) {
        EXPECT_THROW(perceive_panel(r, layout_of(config)), PerceptionError) << to_string(config);
    }
}

TEST(Perceive, SameBytesSameOutput) {
    const Layout l = layout_of(Configuration::Grid2x2);
    const Panel p{{ComponentPanel{0b0111, {Entity{1, 3, 2, 0}, Entity{1, 3, 2, 90}, Entity{4, 3, 2, 0}}}}};
    const auto r = render_panel(p, l);
    EXPECT_EQ(perceive_panel(r, l), perceive_panel(r, l));
}

TEST(Perceive, RasterContracts) {
    PanelRaster tiny{32, 32, std::vector<std::uint8_t>(32 * 32, 255)};
    EXPECT_THROW(perceive_panel(tiny, layout_of(Configuration::Center)), ContractViolation);
    PanelRaster ragged{80, 81, std::vector<std::uint8_t>(80 * 81, 255)};
    EXPECT_THROW(perceive_panel(ragged, layout_of(Configuration::Center)), ContractViolation);
}

TEST(Png, RoundTrip) {
    const Layout l = layout_of(Configuration::UpDown);
    const Panel p{{ComponentPanel{1, {Entity{0, 5, 8, 45}}}, ComponentPanel{1, {Entity{3, 0, 1, 0}}}}};
    const auto r = render_panel(p, l);
    const auto path = std::filesystem::temp_directory_path() / "rpm_png_roundtrip.png";
    write_png(path, r);
    const auto back = read_png(path);
    EXPECT_EQ(back, r);
    EXPECT_EQ(back.provenance, PanelRaster::Provenance::External);
    std::filesystem::remove(path);
    EXPECT_THROW(read_png(path), DataError);
}
