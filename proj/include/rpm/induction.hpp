// Training-phase rule induction and the rule pool.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rpm/problem.hpp"
#include "rpm/rules.hpp"

namespace rpm {

struct InducedRule {
    int component = 0;
    std::string role;
    Rule rule;
};

struct SampleRules {
    std::vector<InducedRule> rules;
    /// Rows 1 and 2 carry identical values everywhere, so the sample cannot
    /// pin down its rules; they are still emitted.
    bool degenerate = false;
};

namespace detail {

inline bool first_rows_identical(const Problem& p) {
    for (int col = 0; col < 3; ++col) {
        if (values_of(p.context[static_cast<std::size_t>(col)]) != values_of(p.context[static_cast<std::size_t>(3 + col)])) {
            return false;
        }
    }
    return true;
}

}  // namespace detail

/// One rule per (component, reasoned attribute) whose completed matrix is
/// classified jointly over all three rows; unclassified attributes emit none.
inline SampleRules induce_from_sample(const Problem& p) {
    if (!p.truth_index) throw ContractViolation("induce_from_sample: problem '" + p.id + "' has no ground truth");
    if (p.context.size() != static_cast<std::size_t>(kContextPanels) ||
        p.candidates.size() != static_cast<std::size_t>(kCandidateCount)) {
        throw ContractViolation("induce_from_sample: problem '" + p.id + "' is incomplete");
    }
    const Layout layout = layout_of(p.config);
    SampleRules out;
    out.degenerate = detail::first_rows_identical(p);
    for (int c = 0; c < layout.component_count(); ++c) {
        for (AttributeKind kind : kReasonedKinds) {
            const RuleKind k = classify_completed(completed_matrix(p, c, kind));
            if (!k.classified()) continue;
            out.rules.push_back({c, layout.components[static_cast<std::size_t>(c)].role, make_rule(k, kind)});
        }
    }
    return out;
}

struct PoolKey {
    std::string role;
    AttributeKind attribute = AttributeKind::Number;
    RuleKind kind;

    friend auto operator<=>(const PoolKey& a, const PoolKey& b) {
        return std::tie(a.role, a.attribute, a.kind) <=> std::tie(b.role, b.attribute, b.kind);
    }
    friend bool operator==(const PoolKey&, const PoolKey&) = default;
};

/// Deduplicated set of canonical rules with the number of training samples
/// that produced each. Merging is commutative and associative.
class RulePool {
public:
    void insert(const std::string& role, const Rule& rule, std::uint64_t count = 1) {
        if (!rule.kind.classified()) return;
        entries_[PoolKey{role, rule.attribute, rule.kind}] += count;
    }

    void merge(const RulePool& other) {
        for (const auto& [k, n] : other.entries_) entries_[k] += n;
    }

    /// Rules stored for a component role and attribute, in key order.
    std::vector<Rule> rules_for(const std::string& role, AttributeKind attribute) const {
        std::vector<Rule> out;
        auto it = entries_.lower_bound(PoolKey{role, attribute, RuleKind{static_cast<RuleFamily>(0), 0}});
        for (; it != entries_.end() && it->first.role == role && it->first.attribute == attribute; ++it) {
            out.push_back(make_rule(it->first.kind, attribute));
        }
        return out;
    }

    std::uint64_t provenance(const PoolKey& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second;
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::map<PoolKey, std::uint64_t>& entries() const noexcept { return entries_; }

    friend bool operator==(const RulePool&, const RulePool&) = default;

private:
    std::map<PoolKey, std::uint64_t> entries_;
};

inline RulePool pool_insert(RulePool pool, const std::vector<InducedRule>& rules) {
    for (const auto& r : rules) pool.insert(r.role, r.rule);
    return pool;
}

// ---------------------------------------------------------------------------
// Text form: role \t attribute \t kind \t count, lines sorted bytewise.
// ---------------------------------------------------------------------------

inline void write_pool(std::ostream& os, const RulePool& pool) {
    std::vector<std::string> lines;
    lines.reserve(pool.size());
    for (const auto& [k, n] : pool.entries()) {
        lines.push_back(k.role + "\t" + std::string(to_string(k.attribute)) + "\t" + to_string(k.kind) + "\t" +
                        std::to_string(n));
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) os << l << '\n';
}

inline std::string pool_to_text(const RulePool& pool) {
    std::ostringstream os;
    write_pool(os, pool);
    return os.str();
}

inline RulePool read_pool(std::istream& is) {
    RulePool pool;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 4) {
            throw DataError("rule pool line " + std::to_string(lineno) + ": expected 4 tab-separated fields, got " +
                            std::to_string(fields.size()));
        }
        try {
            const AttributeKind attribute = parse_attribute_kind(fields[1]);
            const RuleKind kind = parse_rule_kind(fields[2]);
            if (!kind.classified()) throw DataError("Unclassified is not a pool rule");
            std::uint64_t count = 0;
            const auto& c = fields[3];
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), count);
            if (ec != std::errc{} || ptr != c.data() + c.size() || count == 0) {
                throw DataError("bad provenance count '" + c + "'");
            }
            if (fields[0].empty()) throw DataError("empty component role");
            pool.insert(fields[0], make_rule(kind, attribute), count);
        } catch (const DataError& e) {
            throw DataError("rule pool line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return pool;
}

}  // namespace rpm
