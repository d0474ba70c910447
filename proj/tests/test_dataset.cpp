#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>

#include "fixtures.hpp"
#include "rpm/dataset.hpp"
#include "rpm/induction.hpp"
#include "rpm/solver.hpp"

using namespace rpm;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("rpm_ds_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                                    ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::vector<Problem> sample_corpus(int count, std::uint64_t seed = 5) {
    GenSpec spec;
    spec.configs = {kAllConfigurations.begin(), kAllConfigurations.end()};
    spec.count = count;
    spec.seed = seed;
    return generate_corpus(spec, 1);
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

}  // namespace

TEST(Corpus, WriteReadRoundTrip) {
    TempDir dir;
    const auto problems = sample_corpus(100);
    GenSpec spec;
    spec.count = 100;
    const auto m = write_corpus(problems, dir.path() / "c.jsonl", spec);
    EXPECT_TRUE(fs::exists(dir.path() / "c.manifest"));
    const Corpus back = read_corpus(dir.path() / "c.jsonl");
    EXPECT_EQ(back.problems, problems);
    EXPECT_EQ(back.manifest, m);
    ASSERT_TRUE(back.manifest.gen_spec.has_value());
    EXPECT_EQ(back.manifest.gen_spec->count, 100);
    EXPECT_EQ(m.counts.at("center"), 15u);
}

TEST(Corpus, SameInputSameBytes) {
    TempDir dir;
    write_corpus(sample_corpus(30), dir.path() / "a.jsonl");
    write_corpus(sample_corpus(30), dir.path() / "b.jsonl");
    EXPECT_EQ(read_file(dir.path() / "a.jsonl"), read_file(dir.path() / "b.jsonl"));
    EXPECT_EQ(read_file(dir.path() / "a.manifest"), read_file(dir.path() / "b.manifest"));
}

TEST(Corpus, TruncationNamesTheRecord) {
    TempDir dir;
    const auto path = dir.path() / "c.jsonl";
    write_corpus(sample_corpus(20), path);
    std::string bytes = read_file(path);
    // cut inside record 12
    std::size_t pos = 0;
    for (int i = 0; i < 12; ++i) pos = bytes.find('\n', pos) + 1;
    write(path, bytes.substr(0, pos + 40));
    EXPECT_NE(error_of([&] { read_corpus(path); }).find("record 12"), std::string::npos);
    // cut exactly at a record boundary
    write(path, bytes.substr(0, pos));
    EXPECT_NE(error_of([&] { read_corpus(path); }).find("record 12 missing"), std::string::npos);
}

TEST(Corpus, InvalidRecordReportsItsLine) {
    TempDir dir;
    auto problems = sample_corpus(5);
    problems[3].candidates[0].components[0].entities[0].color = 12;
    write_corpus(problems, dir.path() / "c.jsonl");
    const std::string err = error_of([&] { read_corpus(dir.path() / "c.jsonl"); });
    EXPECT_NE(err.find("line 4"), std::string::npos) << err;
    EXPECT_NE(err.find("Color 12"), std::string::npos) << err;
}

TEST(Corpus, NewerFormatVersionIsExplicit) {
    TempDir dir;
    write_corpus(sample_corpus(3), dir.path() / "c.jsonl");
    auto mtext = read_file(dir.path() / "c.manifest");
    mtext.replace(mtext.find("\"format_version\": 1"), 19, "\"format_version\": 2");
    write(dir.path() / "c.manifest", mtext);
    EXPECT_NE(error_of([&] { read_corpus(dir.path() / "c.jsonl"); }).find("unsupported format_version 2"),
              std::string::npos);
}

TEST(Corpus, MissingManifest) {
    TempDir dir;
    write(dir.path() / "c.jsonl", "");
    EXPECT_NE(error_of([&] { read_corpus(dir.path() / "c.jsonl"); }).find("missing manifest"), std::string::npos);
}

namespace {

// Center problems in the external format. Rows: Type Progression (+1), Size
// Constant, Color ArithmeticPlus.
std::string external_line(const std::string& id, int truth) {
    std::string cands;
    for (int i = 0; i < 8; ++i) {
        const int type = i == truth ? 3 : (i % 2 ? 1 : 4);
        const int color = i == truth ? 7 : (i % 3) + 1;
        cands += std::string(i ? "," : "") + "{\"center\":{\"Type\":" + std::to_string(type) +
                 ",\"Size\":2,\"Color\":" + std::to_string(color) + "}}";
    }
    return "{\"id\":\"" + id +
           "\",\"config\":\"center\","
           "\"matrices\":{\"center\":{\"Type\":[0,1,2,2,3,4,1,2],\"Size\":[2,2,2,3,3,3,2,2],"
           "\"Color\":[1,2,3,2,2,4,3,4]}},"
           "\"candidates\":[" +
           cands + "],\"truth_index\":" + std::to_string(truth) + "}";
}

}  // namespace

TEST(External, HandWrittenProblemsSolve) {
    TempDir dir;
    const auto path = dir.path() / "ext.jsonl";
    write(path, external_line("a", 2) + "\n\n" + external_line("b", 6) + "\n" + external_line("c", 0) + "\n");
    const auto problems = import_external_attributes(path);
    ASSERT_EQ(problems.size(), 3u);
    RulePool pool;
    pool.insert("single", make_rule({RuleFamily::Progression, 0}, AttributeKind::Type));
    pool.insert("single", make_rule(RuleKind::constant(), AttributeKind::Size));
    pool.insert("single", make_rule({RuleFamily::ArithmeticPlus, 0}, AttributeKind::Color));
    for (const auto& p : problems) {
        const auto r = solve_problem(p, pool);
        ASSERT_TRUE(r.chosen_index.has_value());
        EXPECT_EQ(*r.chosen_index, *p.truth_index) << p.id;
    }
}

TEST(External, EmptyFileIsEmpty) {
    TempDir dir;
    write(dir.path() / "e.jsonl", "");
    EXPECT_TRUE(import_external_attributes(dir.path() / "e.jsonl").empty());
}

TEST(External, PopcountMismatchRejected) {
    TempDir dir;
    std::string cands;
    for (int i = 0; i < 8; ++i) {
        cands += std::string(i ? "," : "") + "{\"grid\":{\"Number\":" + (i == 5 ? "3" : "2") +
                 ",\"Position\":3,\"Type\":1,\"Size\":" + std::to_string(i % 6) + ",\"Color\":1}}";
    }
    const std::string line =
        "{\"id\":\"g\",\"config\":\"grid2x2\",\"matrices\":{\"grid\":{\"Position\":[1,2,4,1,2,4,1,2],"
        "\"Type\":[1,1,1,1,1,1,1,1],\"Size\":[1,1,1,1,1,1,1,1],\"Color\":[1,1,1,1,1,1,1,1]}},\"candidates\":[" +
        cands + "]}";
    write(dir.path() / "g.jsonl", line + "\n");
    const std::string err = error_of([&] { import_external_attributes(dir.path() / "g.jsonl"); });
    EXPECT_NE(err.find("line 1"), std::string::npos) << err;
    EXPECT_NE(err.find("popcount"), std::string::npos) << err;
}

TEST(External, MissingCandidatesRejected) {
    TempDir dir;
    std::string line = external_line("a", 2);
    // drop the last candidate
    const auto end = line.find("],\"truth_index\"");
    const auto last = line.rfind(",{\"center\"", end);
    line.erase(last, end - last);
    write(dir.path() / "m.jsonl", line + "\n");
    EXPECT_NE(error_of([&] { import_external_attributes(dir.path() / "m.jsonl"); }).find("expected 8 candidates"),
              std::string::npos);
}

TEST(External, MalformedJsonHasLineNumber) {
    TempDir dir;
    write(dir.path() / "x.jsonl", external_line("a", 1) + "\n{\"id\": \n");
    EXPECT_NE(error_of([&] { import_external_attributes(dir.path() / "x.jsonl"); }).find("line 2"), std::string::npos);
}
