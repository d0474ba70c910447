// Corpus files (one JSON record per line plus a sibling manifest), and
// ingestion of externally perceived attribute records.
//
// Record layout, keys sorted:
//   {"annotations":[{"attribute":A,"component":c,"rule":K},...],
//    "candidates":[PANEL x8],"config":NAME,"context":[PANEL x8],
//    "id":STR,"truth_index":INT|null}
//   PANEL = [{"entities":[[type,size,color,angle],...],"position":MASK}, ...]
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpm/core.hpp"
#include "rpm/generator.hpp"
#include "rpm/problem.hpp"

namespace rpm {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    return s;
}

struct CorpusManifest {
    int format_version = kFormatVersion;
    std::optional<GenSpec> gen_spec;
    std::map<std::string, std::size_t> counts;  // per configuration name
    std::size_t total = 0;
    std::string checksum;  // FNV-1a 64 of the corpus file bytes
    std::vector<std::string> record_digests;

    friend bool operator==(const CorpusManifest& a, const CorpusManifest& b) {
        return a.format_version == b.format_version && a.counts == b.counts && a.total == b.total &&
               a.checksum == b.checksum && a.record_digests == b.record_digests;
    }
};

struct Corpus {
    std::vector<Problem> problems;
    CorpusManifest manifest;
};

inline std::filesystem::path manifest_path(const std::filesystem::path& corpus) {
    auto p = corpus;
    return p.replace_extension(".manifest");
}

// ---------------------------------------------------------------------------
// JSON mapping
// ---------------------------------------------------------------------------

inline json panel_to_json(const Panel& p) {
    json out = json::array();
    for (const auto& cp : p.components) {
        json es = json::array();
        for (const auto& e : cp.entities) es.push_back({e.type, e.size, e.color, e.angle});
        out.push_back({{"entities", es}, {"position", cp.position}});
    }
    return out;
}

inline json problem_to_json(const Problem& p) {
    json j;
    j["id"] = p.id;
    j["config"] = std::string(to_string(p.config));
    j["context"] = json::array();
    for (const auto& panel : p.context) j["context"].push_back(panel_to_json(panel));
    j["candidates"] = json::array();
    for (const auto& panel : p.candidates) j["candidates"].push_back(panel_to_json(panel));
    j["truth_index"] = p.truth_index ? json(*p.truth_index) : json(nullptr);
    j["annotations"] = json::array();
    for (const auto& [key, ann] : p.annotations) {
        j["annotations"].push_back(
            {{"component", key.first}, {"attribute", std::string(to_string(key.second))}, {"rule", to_string(ann)}});
    }
    return j;
}

namespace detail {

inline int json_int(const json& j, const char* what) {
    if (!j.is_number_integer()) throw DataError(std::string(what) + " must be an integer");
    return j.get<int>();
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
    return j.at(key);
}

}  // namespace detail

inline Panel panel_from_json(const json& j) {
    if (!j.is_array()) throw DataError("panel must be an array of components");
    Panel p;
    for (const auto& cj : j) {
        ComponentPanel cp;
        const json& pos = detail::field(cj, "position");
        if (!pos.is_number_unsigned()) throw DataError("position must be a non-negative integer");
        cp.position = pos.get<PositionMask>();
        for (const auto& ej : detail::field(cj, "entities")) {
            if (!ej.is_array() || ej.size() != 4) throw DataError("entity must be [type,size,color,angle]");
            cp.entities.push_back(Entity{detail::json_int(ej[0], "type"), detail::json_int(ej[1], "size"),
                                         detail::json_int(ej[2], "color"), detail::json_int(ej[3], "angle")});
        }
        p.components.push_back(std::move(cp));
    }
    return p;
}

inline Problem problem_from_json(const json& j) {
    Problem p;
    const json& id = detail::field(j, "id");
    if (!id.is_string()) throw DataError("id must be a string");
    p.id = id.get<std::string>();
    p.config = parse_configuration(detail::field(j, "config").get<std::string>());
    for (const auto& pj : detail::field(j, "context")) p.context.push_back(panel_from_json(pj));
    for (const auto& pj : detail::field(j, "candidates")) p.candidates.push_back(panel_from_json(pj));
    if (j.contains("truth_index") && !j.at("truth_index").is_null()) {
        p.truth_index = detail::json_int(j.at("truth_index"), "truth_index");
    }
    if (j.contains("annotations")) {
        for (const auto& aj : j.at("annotations")) {
            const int c = detail::json_int(detail::field(aj, "component"), "component");
            const AttributeKind k = parse_attribute_kind(detail::field(aj, "attribute").get<std::string>());
            p.annotations[{c, k}] = parse_annotation(detail::field(aj, "rule").get<std::string>());
        }
    }
    return p;
}

inline std::string encode_record(const Problem& p) { return problem_to_json(p).dump(); }

inline json gen_spec_to_json(const GenSpec& g) {
    json configs = json::array();
    for (auto c : g.configs) configs.push_back(std::string(to_string(c)));
    return {{"configs", configs},
            {"count", g.count},
            {"noise", g.uniformity_noise},
            {"scheme", std::string(to_string(g.scheme))},
            {"seed", g.seed}};
}

inline GenSpec gen_spec_from_json(const json& j) {
    GenSpec g;
    g.configs.clear();
    for (const auto& c : detail::field(j, "configs")) g.configs.push_back(parse_configuration(c.get<std::string>()));
    g.count = detail::field(j, "count").get<int>();
    g.uniformity_noise = detail::field(j, "noise").get<double>();
    g.scheme = parse_scheme(detail::field(j, "scheme").get<std::string>());
    g.seed = detail::field(j, "seed").get<std::uint64_t>();
    return g;
}

inline json manifest_to_json(const CorpusManifest& m) {
    return {{"checksum", m.checksum},
            {"counts", m.counts},
            {"format_version", m.format_version},
            {"gen_spec", m.gen_spec ? gen_spec_to_json(*m.gen_spec) : json(nullptr)},
            {"record_digests", m.record_digests},
            {"total", m.total}};
}

// ---------------------------------------------------------------------------
// Corpus files
// ---------------------------------------------------------------------------

/// Writes records in the given order plus `<name>.manifest`. Records are not
/// validated here; read_corpus does that.
inline CorpusManifest write_corpus(const std::vector<Problem>& problems, const std::filesystem::path& path,
                                   const std::optional<GenSpec>& spec = std::nullopt) {
    CorpusManifest m;
    m.gen_spec = spec;
    m.total = problems.size();
    std::string bytes;
    for (const auto& p : problems) {
        std::string line = encode_record(p);
        m.record_digests.push_back(hex64(fnv1a64(line)));
        ++m.counts[std::string(to_string(p.config))];
        bytes += line;
        bytes += '\n';
    }
    m.checksum = hex64(fnv1a64(bytes));

    auto write = [](const std::filesystem::path& to, const std::string& data) {
        if (to.has_parent_path()) std::filesystem::create_directories(to.parent_path());
        std::ofstream os(to, std::ios::binary | std::ios::trunc);
        if (!os) throw DataError("cannot open " + to.string() + " for writing");
        os.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!os) throw DataError("write failed: " + to.string());
    };
    write(path, bytes);
    write(manifest_path(path), manifest_to_json(m).dump(2) + "\n");
    return m;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline CorpusManifest read_manifest(const std::filesystem::path& corpus) {
    const auto mp = manifest_path(corpus);
    if (!std::filesystem::exists(mp)) throw DataError("missing manifest " + mp.string());
    CorpusManifest m;
    try {
        const json j = json::parse(read_file(mp));
        m.format_version = detail::json_int(detail::field(j, "format_version"), "format_version");
        if (m.format_version != kFormatVersion) {
            throw DataError("unsupported format_version " + std::to_string(m.format_version) + " (this build reads " +
                            std::to_string(kFormatVersion) + ")");
        }
        if (!j.at("gen_spec").is_null()) m.gen_spec = gen_spec_from_json(j.at("gen_spec"));
        m.counts = detail::field(j, "counts").get<std::map<std::string, std::size_t>>();
        m.total = detail::field(j, "total").get<std::size_t>();
        m.checksum = detail::field(j, "checksum").get<std::string>();
        m.record_digests = detail::field(j, "record_digests").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw DataError(mp.string() + ": malformed manifest: " + e.what());
    } catch (const DataError& e) {
        throw DataError(mp.string() + ": " + e.what());
    }
    std::size_t sum = 0;
    for (const auto& [name, n] : m.counts) sum += n;
    if (sum != m.total || m.record_digests.size() != m.total) {
        throw DataError(mp.string() + ": counts, digests and total disagree");
    }
    return m;
}

namespace detail {

inline std::vector<std::string> split_lines(const std::string& bytes) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < bytes.size()) {
        auto nl = bytes.find('\n', start);
        if (nl == std::string::npos) nl = bytes.size();
        lines.push_back(bytes.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

}  // namespace detail

/// Verifies the manifest, every record digest and the stream checksum, then
/// parses and validates each record.
inline Corpus read_corpus(const std::filesystem::path& path) {
    Corpus out;
    out.manifest = read_manifest(path);
    const std::string bytes = read_file(path);
    const auto lines = detail::split_lines(bytes);
    const auto& m = out.manifest;
    const std::string where = path.string();

    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i >= m.total) throw DataError(where + ": record " + std::to_string(i) + " is not listed in the manifest");
        if (hex64(fnv1a64(lines[i])) != m.record_digests[i]) {
            throw DataError(where + ": checksum mismatch at record " + std::to_string(i) + " (line " +
                            std::to_string(i + 1) + ")");
        }
    }
    if (lines.size() < m.total) {
        throw DataError(where + ": truncated, record " + std::to_string(lines.size()) + " missing (manifest lists " +
                        std::to_string(m.total) + ")");
    }
    if (hex64(fnv1a64(bytes)) != m.checksum) throw DataError(where + ": stream checksum mismatch");

    out.problems.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string at = where + " line " + std::to_string(i + 1);
        Problem p;
        try {
            p = problem_from_json(json::parse(lines[i]));
        } catch (const json::exception& e) {
            throw DataError(at + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(at + ": " + e.what());
        }
        const auto report = validate_problem(p);
        if (!report.ok()) throw DataError(at + ": problem '" + p.id + "': " + report.violations.front());
        out.problems.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// External attributes
//
// One JSON object per line:
//   {"id":STR, "config":NAME,
//    "matrices":{COMPONENT:{ATTRIBUTE:[8 values, rows 1-3 without (3,3)]}},
//    "candidates":[{COMPONENT:{ATTRIBUTE:value}} x8],
//    "truth_index":INT (optional), "annotations":[...] (optional)}
// Number and Position may be omitted for single-slot components.
// ---------------------------------------------------------------------------

namespace detail {

inline ComponentValues component_values(const json& j, const Component& comp) {
    ComponentValues v;
    auto get = [&](AttributeKind k) -> std::optional<int> {
        const std::string key(to_string(k));
        if (!j.contains(key)) return std::nullopt;
        return json_int(j.at(key), key.c_str());
    };
    auto position = get(AttributeKind::Position);
    auto number = get(AttributeKind::Number);
    if (!position) {
        if (comp.variable_layout()) throw DataError("component '" + comp.name + "' needs Position");
        position = 1;
    }
    if (*position <= 0) throw DataError("component '" + comp.name + "': Position must be a non-empty mask");
    v.position = static_cast<PositionMask>(*position);
    v.number = popcount(v.position);
    if (number && *number != v.number) {
        throw DataError("component '" + comp.name + "': Number " + std::to_string(*number) + " != popcount(Position) " +
                        std::to_string(v.number));
    }
    for (AttributeKind k : {AttributeKind::Type, AttributeKind::Size, AttributeKind::Color}) {
        auto x = get(k);
        if (!x) throw DataError("component '" + comp.name + "' lacks " + std::string(to_string(k)));
        v.set(k, *x);
    }
    return v;
}

inline Problem external_record(const json& j) {
    Problem p;
    p.id = field(j, "id").get<std::string>();
    p.config = parse_configuration(field(j, "config").get<std::string>());
    const Layout layout = layout_of(p.config);

    std::vector<AttributeTuple> cells(static_cast<std::size_t>(kContextPanels),
                                      AttributeTuple(layout.components.size()));
    const json& matrices = field(j, "matrices");
    for (std::size_t c = 0; c < layout.components.size(); ++c) {
        const Component& comp = layout.components[c];
        const json& mj = field(matrices, comp.name.c_str());
        for (int i = 0; i < kContextPanels; ++i) {
            json cell = json::object();
            for (AttributeKind k : kReasonedKinds) {
                const std::string key(to_string(k));
                if (!mj.contains(key)) continue;
                const json& values = mj.at(key);
                if (!values.is_array() || values.size() != static_cast<std::size_t>(kContextPanels)) {
                    throw DataError("matrix " + comp.name + "/" + key + " needs 8 values");
                }
                cell[key] = values[static_cast<std::size_t>(i)];
            }
            cells[static_cast<std::size_t>(i)][c] = component_values(cell, comp);
        }
    }
    auto to_panel = [](const AttributeTuple& t) {
        Panel panel;
        for (const auto& v : t) panel.components.push_back(uniform_component_panel(v));
        return panel;
    };
    for (const auto& t : cells) p.context.push_back(to_panel(t));

    const json& cands = field(j, "candidates");
    if (!cands.is_array() || cands.size() != static_cast<std::size_t>(kCandidateCount)) {
        throw DataError("expected 8 candidates, got " + std::to_string(cands.is_array() ? cands.size() : 0));
    }
    for (const auto& cj : cands) {
        AttributeTuple t;
        for (const Component& comp : layout.components) t.push_back(component_values(field(cj, comp.name.c_str()), comp));
        p.candidates.push_back(to_panel(t));
    }
    if (j.contains("truth_index") && !j.at("truth_index").is_null()) {
        p.truth_index = json_int(j.at("truth_index"), "truth_index");
    }
    if (j.contains("annotations")) {
        for (const auto& aj : j.at("annotations")) {
            const int c = json_int(field(aj, "component"), "component");
            const AttributeKind k = parse_attribute_kind(field(aj, "attribute").get<std::string>());
            p.annotations[{c, k}] = parse_annotation(field(aj, "rule").get<std::string>());
        }
    }
    return p;
}

}  // namespace detail

/// Attribute-only problems, validated like generated ones. Blank lines are
/// skipped; an empty file yields no problems.
inline std::vector<Problem> import_external_attributes(const std::filesystem::path& path) {
    const auto lines = detail::split_lines(read_file(path));
    std::vector<Problem> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string at = path.string() + " line " + std::to_string(i + 1);
        Problem p;
        try {
            p = detail::external_record(json::parse(lines[i]));
        } catch (const json::exception& e) {
            throw DataError(at + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(at + ": " + e.what());
        }
        const auto report = validate_problem(p);
        if (!report.ok()) throw DataError(at + ": problem '" + p.id + "': " + report.violations.front());
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace rpm
