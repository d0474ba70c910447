// rpm: generate, train, solve, evaluate and perceive RPM problems.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <CLI11.hpp>

#include <charconv>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "rpm/rpm.hpp"

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename T>
std::vector<T> parse_csv(const std::string& s, const char* what) {
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string::npos) comma = s.size();
        const std::string item = s.substr(start, comma - start);
        T v{};
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            throw UsageError(std::string("bad ") + what + " list '" + s + "'");
        }
        out.push_back(v);
        start = comma + 1;
    }
    return out;
}

std::vector<rpm::Configuration> parse_configs(const std::string& name) {
    if (name == "all") return {rpm::kAllConfigurations.begin(), rpm::kAllConfigurations.end()};
    try {
        return {rpm::parse_configuration(name)};
    } catch (const rpm::DataError& e) {
        throw UsageError(e.what());
    }
}

fs::path corpus_file(const fs::path& out_dir) { return out_dir / "corpus.jsonl"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rule-based Raven's Progressive Matrices engine"};
    app.require_subcommand(1);
    unsigned workers = 0;
    app.add_option("--workers", workers, "worker threads (0 = all cores)");

    // generate
    auto* gen = app.add_subcommand("generate", "generate a problem corpus");
    std::string gen_config = "all", gen_scheme = "iraven";
    int gen_count = 0;
    std::uint64_t gen_seed = 0;
    double gen_noise = 0.3;
    bool gen_render = false;
    int raster_size = rpm::kDefaultRasterSize, supersample = 1;
    fs::path gen_out;
    gen->add_option("--config", gen_config, "configuration name or 'all'");
    gen->add_option("--scheme", gen_scheme, "raven|iraven");
    gen->add_option("--count", gen_count, "number of problems")->required()->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--noise", gen_noise, "uniformity noise probability")->check(CLI::Range(0.0, 1.0));
    gen->add_flag("--render", gen_render, "also write PNG rasters to OUT/images");
    gen->add_option("--raster-size", raster_size, "raster edge in pixels")->check(CLI::Range(64, 4096));
    gen->add_option("--supersample", supersample, "render supersampling factor")->check(CLI::Range(1, 8));
    gen->add_option("--out", gen_out, "output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "build a rule pool from a corpus");
    fs::path train_corpus, train_out;
    train->add_option("--corpus", train_corpus)->required();
    train->add_option("--out", train_out, "pool file")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "solve a corpus and write per-problem reports");
    fs::path solve_corpus, solve_pool, solve_report;
    solve->add_option("--corpus", solve_corpus)->required();
    solve->add_option("--pool", solve_pool)->required();
    solve->add_option("--report", solve_report, "per-problem JSON lines")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a pool on a corpus");
    fs::path eval_corpus, eval_pool, eval_report, eval_problems;
    eval->add_option("--corpus", eval_corpus)->required();
    eval->add_option("--pool", eval_pool)->required();
    eval->add_option("--report", eval_report, "machine-readable summary records");
    eval->add_option("--problems", eval_problems, "per-problem JSON lines");

    // shrink
    auto* shrink = app.add_subcommand("shrink", "accuracy versus training-set size");
    fs::path shrink_corpus, shrink_held_out, shrink_report;
    std::string shrink_sizes, shrink_seeds = "0,1,2,3,4";
    shrink->add_option("--corpus", shrink_corpus)->required();
    shrink->add_option("--sizes", shrink_sizes, "comma-separated training sizes")->required();
    shrink->add_option("--seeds", shrink_seeds, "comma-separated subsampling seeds");
    shrink->add_option("--held-out", shrink_held_out, "held-out corpus (default: last fifth of --corpus)");
    shrink->add_option("--report", shrink_report, "write the table here as well");

    // perceive
    auto* perceive = app.add_subcommand("perceive", "recover attributes from PNG panels");
    fs::path perceive_images, perceive_out;
    std::string perceive_layout;
    perceive->add_option("--images", perceive_images)->required();
    perceive->add_option("--layout", perceive_layout)->required();
    perceive->add_option("--out", perceive_out, "JSON lines, one per image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            rpm::GenSpec spec;
            spec.configs = parse_configs(gen_config);
            try {
                spec.scheme = rpm::parse_scheme(gen_scheme);
            } catch (const rpm::DataError& e) {
                throw UsageError(e.what());
            }
            spec.count = gen_count;
            spec.seed = gen_seed;
            spec.uniformity_noise = gen_noise;
            const auto problems = rpm::generate_corpus(spec, workers);
            const auto manifest = rpm::write_corpus(problems, corpus_file(gen_out), spec);
            if (gen_render) {
                rpm::write_raster_sidecars(problems, gen_out / "images", {raster_size, supersample}, workers);
            }
            std::cout << "wrote " << manifest.total << " problems to " << corpus_file(gen_out).string() << " (checksum "
                      << manifest.checksum << ")\n";
            for (const auto& [name, n] : manifest.counts) std::cout << "  " << name << " " << n << "\n";
        } else if (*train) {
            const auto s = rpm::run_train(train_corpus, train_out, workers);
            std::cout << rpm::format_pool_summary(s);
        } else if (*solve || *eval) {
            const bool is_solve = static_cast<bool>(*solve);
            const auto corpus = rpm::read_corpus(is_solve ? solve_corpus : eval_corpus);
            const auto pool = rpm::load_pool(is_solve ? solve_pool : eval_pool);
            const auto result = rpm::run_eval(corpus.problems, pool, workers);
            std::cout << rpm::format_eval_table(result.report);
            if (is_solve) rpm::write_solve_records(solve_report, corpus.problems, result.solves);
            if (!is_solve && !eval_report.empty()) rpm::write_text(eval_report, rpm::format_eval_records(result.report));
            if (!is_solve && !eval_problems.empty()) {
                rpm::write_solve_records(eval_problems, corpus.problems, result.solves);
            }
        } else if (*shrink) {
            const auto sizes = parse_csv<std::size_t>(shrink_sizes, "size");
            const auto seeds = parse_csv<std::uint64_t>(shrink_seeds, "seed");
            const auto corpus = rpm::read_corpus(shrink_corpus);
            std::vector<rpm::Problem> train_set, held_out;
            if (shrink_held_out.empty()) {
                std::tie(train_set, held_out) = rpm::split_train_held_out(corpus.problems);
            } else {
                train_set = corpus.problems;
                held_out = rpm::read_corpus(shrink_held_out).problems;
            }
            for (auto s : sizes) {
                if (s == 0 || s > train_set.size()) {
                    throw UsageError("training size " + std::to_string(s) + " exceeds the " +
                                     std::to_string(train_set.size()) + " available training problems");
                }
            }
            const auto table = rpm::run_shrink(train_set, held_out, sizes, seeds, workers);
            const std::string text = rpm::format_shrink_table(table);
            std::cout << text;
            if (!shrink_report.empty()) rpm::write_text(shrink_report, text);
        } else if (*perceive) {
            rpm::Configuration config;
            try {
                config = rpm::parse_configuration(perceive_layout);
            } catch (const rpm::DataError& e) {
                throw UsageError(e.what());
            }
            const auto files = rpm::perceive_directory(perceive_images, config, workers);
            const auto layout = rpm::layout_of(config);
            std::string text;
            std::size_t failed = 0;
            for (const auto& f : files) {
                text += rpm::perceived_record(f, layout) + "\n";
                if (!f.values) {
                    ++failed;
                    std::cerr << f.file << ": " << f.error << "\n";
                }
            }
            rpm::write_text(perceive_out, text);
            std::cout << "perceived " << files.size() - failed << " of " << files.size() << " images\n";
            if (failed) return 2;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const rpm::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
