// Experiment drivers behind the CLI: training, evaluation, the training-size
// study, raster sidecars and batch perception.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rpm/dataset.hpp"
#include "rpm/induction.hpp"
#include "rpm/parallel.hpp"
#include "rpm/perception.hpp"
#include "rpm/png.hpp"
#include "rpm/raster.hpp"
#include "rpm/solver.hpp"

namespace rpm {

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainSummary {
    RulePool pool;
    std::size_t samples = 0;
    std::size_t degenerate = 0;
};

inline TrainSummary train_pool(const std::vector<Problem>& problems, unsigned workers = 0) {
    for (const auto& p : problems) {
        if (!p.truth_index) throw DataError("training data error: problem '" + p.id + "' has no truth index");
    }
    std::vector<SampleRules> induced(problems.size());
    parallel_for(problems.size(), workers, [&](std::size_t i) { induced[i] = induce_from_sample(problems[i]); });
    TrainSummary s;
    s.samples = problems.size();
    for (const auto& r : induced) {
        s.pool = pool_insert(std::move(s.pool), r.rules);
        s.degenerate += r.degenerate;
    }
    return s;
}

/// Kinds per (role, attribute) with provenance counts, one line each.
inline std::string format_pool_summary(const TrainSummary& s) {
    std::ostringstream os;
    os << "samples " << s.samples << ", degenerate " << s.degenerate << ", pool size " << s.pool.size() << "\n";
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> groups;
    for (const auto& [k, n] : s.pool.entries()) {
        groups[{k.role, std::string(to_string(k.attribute))}].push_back(to_string(k.kind) + " x" + std::to_string(n));
    }
    for (const auto& [key, kinds] : groups) {
        os << "  " << std::left << std::setw(9) << key.first << std::setw(9) << key.second;
        for (std::size_t i = 0; i < kinds.size(); ++i) os << (i ? ", " : "") << kinds[i];
        os << "\n";
    }
    return os.str();
}

inline TrainSummary run_train(const std::filesystem::path& corpus, const std::filesystem::path& pool_out,
                              unsigned workers = 0) {
    const Corpus c = read_corpus(corpus);
    TrainSummary s = train_pool(c.problems, workers);
    if (pool_out.has_parent_path()) std::filesystem::create_directories(pool_out.parent_path());
    std::ofstream os(pool_out, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open " + pool_out.string() + " for writing");
    write_pool(os, s.pool);
    return s;
}

inline RulePool load_pool(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open " + path.string());
    try {
        return read_pool(is);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct ConfigTally {
    std::size_t correct = 0;
    std::size_t total = 0;
    double accuracy() const noexcept { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct EvalReport {
    std::map<Configuration, ConfigTally> per_config;
    std::size_t abstentions = 0;
    std::size_t pool_size = 0;
    double wall_seconds = 0;  // table only; never written to report files

    std::size_t correct() const {
        std::size_t n = 0;
        for (const auto& [c, t] : per_config) n += t.correct;
        return n;
    }
    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& [c, t] : per_config) n += t.total;
        return n;
    }
    /// Mean of per-configuration accuracies.
    double average() const {
        if (per_config.empty()) return 0;
        double s = 0;
        for (const auto& [c, t] : per_config) s += t.accuracy();
        return s / static_cast<double>(per_config.size());
    }
    /// Fraction of all problems answered correctly.
    double overall() const { return total() ? static_cast<double>(correct()) / static_cast<double>(total()) : 0.0; }
};

struct EvalResult {
    EvalReport report;
    std::vector<SolveReport> solves;  // corpus order
};

/// An empty pool makes every problem an abstention rather than an error.
inline EvalResult run_eval(const std::vector<Problem>& problems, const RulePool& pool, unsigned workers = 0) {
    const auto start = std::chrono::steady_clock::now();
    EvalResult out;
    out.solves.resize(problems.size());
    if (!pool.empty()) {
        parallel_for(problems.size(), workers, [&](std::size_t i) { out.solves[i] = solve_problem(problems[i], pool); });
    }
    out.report.pool_size = pool.size();
    for (std::size_t i = 0; i < problems.size(); ++i) {
        const auto& p = problems[i];
        if (!p.truth_index) throw DataError("evaluation needs truth indices; problem '" + p.id + "' has none");
        auto& t = out.report.per_config[p.config];
        ++t.total;
        const auto& chosen = out.solves[i].chosen_index;
        if (!chosen) ++out.report.abstentions;
        else if (*chosen == *p.truth_index) ++t.correct;
    }
    out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

inline std::string percent(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
    return buf;
}

/// Aligned table: one column per configuration present, then the average.
inline std::string format_eval_table(const EvalReport& r, bool with_time = true) {
    std::vector<std::string> head{"Method"}, row{"rules"};
    for (const auto& [c, t] : r.per_config) {
        head.emplace_back(display_name(c));
        row.push_back(percent(t.accuracy()));
    }
    head.emplace_back("Avg");
    row.push_back(percent(r.average()));
    std::ostringstream os;
    for (const auto* line : {&head, &row}) {
        for (std::size_t i = 0; i < line->size(); ++i) {
            const std::size_t w = std::max(head[i].size(), row[i].size()) + 2;
            os << std::left << std::setw(static_cast<int>(w)) << (*line)[i];
        }
        os << "\n";
    }
    os << "problems " << r.total() << ", correct " << r.correct() << ", abstained " << r.abstentions << ", pool size "
       << r.pool_size;
    if (with_time) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", r.wall_seconds);
        os << ", " << buf << " s";
    }
    os << "\n";
    return os.str();
}

/// Machine-readable report: tab-separated key/value records.
inline std::string format_eval_records(const EvalReport& r) {
    std::ostringstream os;
    for (const auto& [c, t] : r.per_config) {
        os << "config\t" << to_string(c) << "\t" << t.correct << "\t" << t.total << "\t" << percent(t.accuracy()) << "\n";
    }
    os << "average\t" << percent(r.average()) << "\n";
    os << "overall\t" << r.correct() << "\t" << r.total() << "\t" << percent(r.overall()) << "\n";
    os << "abstentions\t" << r.abstentions << "\n";
    os << "pool_size\t" << r.pool_size << "\n";
    return os.str();
}

/// One JSON line per solved problem.
inline std::string solve_record(const Problem& p, const SolveReport& s) {
    json j;
    j["id"] = p.id;
    j["config"] = std::string(to_string(p.config));
    j["chosen"] = s.chosen_index ? json(*s.chosen_index) : json(nullptr);
    j["truth"] = p.truth_index ? json(*p.truth_index) : json(nullptr);
    j["correct"] = p.truth_index && s.chosen_index ? json(*s.chosen_index == *p.truth_index) : json(nullptr);
    j["scores"] = s.scores;
    j["tied"] = s.tied;
    const Layout layout = layout_of(p.config);
    j["constraints"] = json::array();
    for (const auto& c : s.constraints) {
        j["constraints"].push_back({{"component", layout.components.at(static_cast<std::size_t>(c.component)).name},
                                    {"attribute", std::string(to_string(c.attribute))},
                                    {"rule", to_string(c.source_rule.kind)},
                                    {"value", c.predicted_value}});
    }
    return j.dump();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw DataError("write failed: " + path.string());
}

inline void write_solve_records(const std::filesystem::path& path, const std::vector<Problem>& problems,
                                const std::vector<SolveReport>& solves) {
    std::string text;
    for (std::size_t i = 0; i < problems.size(); ++i) text += solve_record(problems[i], solves[i]) + "\n";
    write_text(path, text);
}

// ---------------------------------------------------------------------------
// Training-size study
// ---------------------------------------------------------------------------

struct ShrinkRow {
    std::size_t size = 0;
    std::uint64_t seed = 0;
    double accuracy = 0;  // mean over configurations of the held-out split
    std::size_t pool_size = 0;
};

struct ShrinkTable {
    std::vector<ShrinkRow> rows;  // size-major, then seed
    std::size_t train_pool_available = 0;
    std::size_t held_out = 0;

    std::map<std::size_t, double> mean_by_size() const {
        std::map<std::size_t, std::pair<double, int>> acc;
        for (const auto& r : rows) {
            acc[r.size].first += r.accuracy;
            ++acc[r.size].second;
        }
        std::map<std::size_t, double> out;
        for (const auto& [s, v] : acc) out[s] = v.first / v.second;
        return out;
    }
};

/// For every (size, seed): a uniform subset without replacement of
/// `train`, its pool, and the accuracy on `held_out`.
inline ShrinkTable run_shrink(const std::vector<Problem>& train, const std::vector<Problem>& held_out,
                              const std::vector<std::size_t>& sizes, const std::vector<std::uint64_t>& seeds,
                              unsigned workers = 0) {
    ShrinkTable t;
    t.train_pool_available = train.size();
    t.held_out = held_out.size();
    for (std::size_t size : sizes) {
        if (size == 0 || size > train.size()) {
            throw ContractViolation("training size " + std::to_string(size) + " exceeds the " +
                                    std::to_string(train.size()) + " available training problems");
        }
    }
    for (std::size_t size : sizes) {
        for (std::uint64_t seed : seeds) {
            std::vector<std::size_t> idx(train.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            Rng rng(derive_seed(seed, size));
            rng.shuffle(idx);
            std::vector<Problem> subset;
            subset.reserve(size);
            for (std::size_t i = 0; i < size; ++i) subset.push_back(train[idx[i]]);
            const RulePool pool = train_pool(subset, workers).pool;
            const EvalReport r = run_eval(held_out, pool, workers).report;
            t.rows.push_back({size, seed, r.average(), pool.size()});
        }
    }
    return t;
}

/// Held-out split used when none is given: the last fifth of the corpus.
inline std::pair<std::vector<Problem>, std::vector<Problem>> split_train_held_out(const std::vector<Problem>& all) {
    const std::size_t cut = all.size() - all.size() / 5;
    return {std::vector<Problem>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cut)),
            std::vector<Problem>(all.begin() + static_cast<std::ptrdiff_t>(cut), all.end())};
}

inline std::string format_shrink_table(const ShrinkTable& t) {
    std::ostringstream os;
    os << "training pool " << t.train_pool_available << ", held-out " << t.held_out << "\n";
    os << std::left << std::setw(10) << "size" << std::setw(22) << "seed" << std::setw(12) << "accuracy"
       << "pool\n";
    for (const auto& r : t.rows) {
        os << std::left << std::setw(10) << r.size << std::setw(22) << r.seed << std::setw(12) << percent(r.accuracy)
           << r.pool_size << "\n";
    }
    os << "mean\n";
    for (const auto& [size, mean] : t.mean_by_size()) {
        os << std::left << std::setw(10) << size << percent(mean) << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Rasters
// ---------------------------------------------------------------------------

inline std::string raster_name(const std::string& problem_id, bool candidate, int index) {
    return problem_id + "_" + (candidate ? "c" : "q") + std::to_string(index) + ".png";
}

/// Writes the 16 panels of every problem as PNG sidecars in `dir`.
inline void write_raster_sidecars(const std::vector<Problem>& problems, const std::filesystem::path& dir,
                                  const RenderOptions& opt = {}, unsigned workers = 0) {
    std::filesystem::create_directories(dir);
    parallel_for(problems.size(), workers, [&](std::size_t i) {
        const Problem& p = problems[i];
        const Layout layout = layout_of(p.config);
        for (int k = 0; k < static_cast<int>(p.context.size()); ++k) {
            write_png(dir / raster_name(p.id, false, k), render_panel(p.context[static_cast<std::size_t>(k)], layout, opt));
        }
        for (int k = 0; k < static_cast<int>(p.candidates.size()); ++k) {
            write_png(dir / raster_name(p.id, true, k), render_panel(p.candidates[static_cast<std::size_t>(k)], layout, opt));
        }
    });
}

struct PerceivedFile {
    std::string file;
    std::optional<AttributeTuple> values;
    std::string error;
};

/// Perceives every PNG in `dir` (sorted by name). Failures are recorded per
/// file instead of aborting the batch.
inline std::vector<PerceivedFile> perceive_directory(const std::filesystem::path& dir, Configuration config,
                                                     unsigned workers = 0) {
    if (!std::filesystem::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<PerceivedFile> out(files.size());
    const Layout layout = layout_of(config);
    parallel_for(files.size(), workers, [&](std::size_t i) {
        out[i].file = files[i].filename().string();
        try {
            out[i].values = values_of(perceive_panel(read_png(files[i]), layout));
        } catch (const DataError& e) {
            out[i].error = e.what();
        } catch (const ContractViolation& e) {
            out[i].error = e.what();
        }
    });
    return out;
}

inline std::string perceived_record(const PerceivedFile& f, const Layout& layout) {
    json j;
    j["file"] = f.file;
    if (!f.values) {
        j["error"] = f.error;
        return j.dump();
    }
    j["components"] = json::array();
    for (std::size_t c = 0; c < f.values->size(); ++c) {
        const auto& v = (*f.values)[c];
        j["components"].push_back({{"name", layout.components[c].name},
                                   {"Number", v.number},
                                   {"Position", v.position},
                                   {"Type", v.type},
                                   {"Size", v.size},
                                   {"Color", v.color}});
    }
    return j.dump();
}

}  // namespace rpm
