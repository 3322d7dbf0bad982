#include <doctest.h>

#include <map>

#include "srcmark/commands.hpp"
#include "srcmark/fsutil.hpp"
#include "srcmark/marker.hpp"
#include "srcmark/overlay.hpp"
#include "testutil.hpp"

using namespace srcmark;
using testutil::TempDir;

namespace {

// A three-file toy project within the language subset.
void write_toy_project(const std::filesystem::path& root) {
    testutil::write_file(root / "src" / "Mat.java",
                         "class Mat {\n"
                         "  void square(int x) {\n"
                         "    multiply(x, x);\n"
                         "  }\n"
                         "  void fact(int n) {\n"
                         "    multiply(n, n);\n"
                         "  }\n"
                         "}\n");
    testutil::write_file(root / "src" / "Util.java",
                         "class Util {\n"
                         "  void multiply(int a, int b) {\n"
                         "    int c = a * b;\n"
                         "  }\n"
                         "}\n");
    testutil::write_file(root / "README.txt", "not a source file\n");
}

std::map<std::string, std::string> snapshot(const ToolConfig& config) {
    std::map<std::string, std::string> bytes;
    auto files = enumerate_files(config);
    REQUIRE(files.ok());
    for (const std::string& rel : *files)
        bytes[rel] = testutil::read_file(config.project_root / rel);
    return bytes;
}

ToolConfig toy_config(const TempDir& dir, std::vector<std::string> analyzers) {
    ToolConfig config = default_config(dir.path());
    config.active_analyzers = std::move(analyzers);
    config.jobs = 2;
    return config;
}

}  // namespace

TEST_CASE("label/strip round trip over a project tree") {
    TempDir dir;
    write_toy_project(dir.path());
    ToolConfig config = toy_config(dir, {"callers"});

    std::map<std::string, std::string> before = snapshot(config);

    auto labeled = cmd_label(config);
    REQUIRE(labeled.ok());
    CHECK(labeled->files_selected == 2);  // README.txt not matched by *.java
    CHECK(labeled->files_labeled == 1);   // only Util.java gains markers
    CHECK(labeled->block_markers == 2);   // square and fact both call multiply

    std::string util = testutil::read_file(dir.path() / "src" / "Util.java");
    CHECK(util.find("//@ Caller(class=\"Mat\", method=\"fact\")\n") != std::string::npos);
    CHECK(util.find("//@ Caller(class=\"Mat\", method=\"square\")\n") != std::string::npos);
    CHECK(std::filesystem::exists(manifest_path_for(dir.path(), "src/Util.java")));

    auto status = cmd_status(config);
    REQUIRE(status.ok());
    REQUIRE(status->entries.size() == 1);
    CHECK(status->entries[0].file == "src/Util.java");
    CHECK(status->entries[0].marker_counts.at("callers") == 2);
    CHECK(status->entries[0].has_manifest);
    CHECK(!status->entries[0].manifest_stale);

    auto stripped = cmd_strip(config);
    REQUIRE(stripped.ok());
    CHECK(stripped->errors.empty());
    CHECK(stripped->markers_removed == 2);
    CHECK(stripped->manifests_removed == 1);
    CHECK(snapshot(config) == before);
    CHECK(!std::filesystem::exists(manifest_path_for(dir.path(), "src/Util.java")));
}

TEST_CASE("second label run without strip is a collision error, files unchanged") {
    TempDir dir;
    write_toy_project(dir.path());
    ToolConfig config = toy_config(dir, {"callers"});

    REQUIRE(cmd_label(config).ok());
    std::map<std::string, std::string> labeled_tree = snapshot(config);

    auto again = cmd_label(config);
    REQUIRE(!again.ok());
    CHECK(again.error().kind == ErrorKind::Collision);
    CHECK(snapshot(config) == labeled_tree);
}

TEST_CASE("all-or-nothing: one colliding file blocks every write") {
    TempDir dir;
    write_toy_project(dir.path());
    testutil::write_file(dir.path() / "src" / "Dirty.java",
                         "class Dirty {\n  int x; //+3\n}\n");
    ToolConfig config = toy_config(dir, {"callers"});

    std::map<std::string, std::string> before = snapshot(config);
    auto result = cmd_label(config);
    REQUIRE(!result.ok());
    CHECK(result.error().kind == ErrorKind::Collision);
    CHECK(result.error().message.find("Dirty.java") != std::string::npos);
    CHECK(snapshot(config) == before);
}

TEST_CASE("target selection labels only the requested method") {
    TempDir dir;
    write_toy_project(dir.path());
    ToolConfig config = toy_config(dir, {"callers"});

    // Mat.square is called by nobody; Util.multiply is called by two methods.
    config.targets = {"Util.multiply"};
    REQUIRE(cmd_label(config).ok());
    std::string util = testutil::read_file(dir.path() / "src" / "Util.java");
    std::string mat = testutil::read_file(dir.path() / "src" / "Mat.java");
    CHECK(util.find("//@ Caller") != std::string::npos);
    CHECK(mat.find("//@") == std::string::npos);
}

TEST_CASE("coverage labeling via config report path and modes") {
    TempDir dir;
    write_toy_project(dir.path());
    testutil::write_file(dir.path() / "cov.lcov",
                         "SF:src/Util.java\n"
                         "DA:2,4\n"
                         "DA:3,0\n"
                         "end_of_record\n");
    ToolConfig config = toy_config(dir, {"coverage"});
    config.coverage_report = "cov.lcov";

    auto counts = cmd_label(config);
    REQUIRE(counts.ok());
    CHECK(counts->line_markers == 1);
    std::string util = testutil::read_file(dir.path() / "src" / "Util.java");
    CHECK(util.find("void multiply(int a, int b) { //+4\n") != std::string::npos);
    CHECK(util.find("//+0") == std::string::npos);
    REQUIRE(cmd_strip(config).ok());

    config.coverage_mode = CoverageMode::Full;
    auto full = cmd_label(config);
    REQUIRE(full.ok());
    CHECK(full->line_markers == 2);
    util = testutil::read_file(dir.path() / "src" / "Util.java");
    CHECK(util.find("int c = a * b; //+0\n") != std::string::npos);
    REQUIRE(cmd_strip(config).ok());
}

TEST_CASE("label without analyzers or without coverage report is a config error") {
    TempDir dir;
    write_toy_project(dir.path());

    auto none = cmd_label(toy_config(dir, {}));
    REQUIRE(!none.ok());
    CHECK(none.error().kind == ErrorKind::Config);

    auto no_report = cmd_label(toy_config(dir, {"coverage"}));
    REQUIRE(!no_report.ok());
    CHECK(no_report.error().kind == ErrorKind::Config);
}

TEST_CASE("strip tolerates hand-edited line marker payloads") {
    TempDir dir;
    testutil::write_file(dir.path() / "A.java", "class A {\n  int x;\n}\n");
    ToolConfig config = toy_config(dir, {"coverage"});
    testutil::write_file(dir.path() / "cov.lcov", "SF:A.java\nDA:2,7\nend_of_record\n");
    config.coverage_report = "cov.lcov";
    REQUIRE(cmd_label(config).ok());

    // hand-edit the payload; grammar strip still removes the suffix exactly
    std::string labeled = testutil::read_file(dir.path() / "A.java");
    std::size_t pos = labeled.find("//+7");
    REQUIRE(pos != std::string::npos);
    labeled.replace(pos, 4, "//+7777");
    testutil::write_file(dir.path() / "A.java", labeled);

    auto stripped = cmd_strip(config);
    REQUIRE(stripped.ok());
    CHECK(testutil::read_file(dir.path() / "A.java") == "class A {\n  int x;\n}\n");
}

TEST_CASE("strip on a clean tree is a successful no-op") {
    TempDir dir;
    write_toy_project(dir.path());
    ToolConfig config = toy_config(dir, {});
    std::map<std::string, std::string> before = snapshot(config);
    auto stripped = cmd_strip(config);
    REQUIRE(stripped.ok());
    CHECK(stripped->files_changed == 0);
    CHECK(stripped->markers_removed == 0);
    CHECK(snapshot(config) == before);
}

TEST_CASE("status reflects hand-deleted markers and flags the manifest stale") {
    TempDir dir;
    write_toy_project(dir.path());
    ToolConfig config = toy_config(dir, {"callers"});
    REQUIRE(cmd_label(config).ok());

    // delete one marker line by hand
    std::string util = testutil::read_file(dir.path() / "src" / "Util.java");
    std::size_t start = util.find("  //@ Caller(class=\"Mat\", method=\"fact\")\n");
    REQUIRE(start != std::string::npos);
    util.erase(start, util.find('\n', start) - start + 1);
    testutil::write_file(dir.path() / "src" / "Util.java", util);

    auto status = cmd_status(config);
    REQUIRE(status.ok());
    REQUIRE(status->entries.size() == 1);
    CHECK(status->entries[0].marker_counts.at("callers") == 1);  // actual file contents
    CHECK(status->entries[0].manifest_stale);
}

TEST_CASE("status on a clean tree reports nothing") {
    TempDir dir;
    write_toy_project(dir.path());
    auto status = cmd_status(toy_config(dir, {}));
    REQUIRE(status.ok());
    CHECK(status->entries.empty());
    CHECK(status->totals.empty());
}

TEST_CASE("verify passes on a healthy tree and never touches files") {
    TempDir dir;
    write_toy_project(dir.path());
    // trailing whitespace and mixed endings round-trip too
    testutil::write_file(dir.path() / "src" / "Messy.java",
                         "class Messy {   \r\n  void f() {\r\n    g();  \r\n  }\r\n}");
    ToolConfig config = toy_config(dir, {"callers"});

    std::map<std::string, std::string> before = snapshot(config);
    auto verify = cmd_verify(config);
    REQUIRE(verify.ok());
    CHECK(verify->all_ok());
    CHECK(verify->files_checked == 3);
    CHECK(snapshot(config) == before);
}

TEST_CASE("verify lists scanner failures as skipped and reports label errors") {
    TempDir dir;
    write_toy_project(dir.path());
    testutil::write_file(dir.path() / "src" / "Broken.java", "class Broken {\n  void f() {\n}\n");
    testutil::write_file(dir.path() / "src" / "Dirty.java", "class Dirty {\n  int x; //+1\n}\n");
    ToolConfig config = toy_config(dir, {"callers"});

    auto verify = cmd_verify(config);
    REQUIRE(verify.ok());
    CHECK(!verify->all_ok());
    REQUIRE(verify->skipped.size() == 1);
    CHECK(verify->skipped[0].find("Broken.java") != std::string::npos);
    REQUIRE(verify->label_errors.size() == 1);
    CHECK(verify->label_errors[0].find("Dirty.java") != std::string::npos);
    CHECK(verify->mismatches.empty());
}

TEST_CASE("native style end-to-end: label, status, strip, byte identity") {
    TempDir dir;
    write_toy_project(dir.path());
    ToolConfig config = toy_config(dir, {"callers"});
    config.marker_style = MarkerStyle::Native;

    std::map<std::string, std::string> before = snapshot(config);
    auto labeled = cmd_label(config);
    REQUIRE(labeled.ok());
    CHECK(labeled->import_lines == 1);
    std::string util = testutil::read_file(dir.path() / "src" / "Util.java");
    CHECK(util.find("import srcmark.annotations.Caller;\n") != std::string::npos);
    CHECK(util.find("  @Caller(class=\"Mat\", method=\"fact\")\n") != std::string::npos);

    auto status = cmd_status(config);
    REQUIRE(status.ok());
    REQUIRE(status->entries.size() == 1);
    CHECK(!status->entries[0].manifest_stale);

    auto stripped = cmd_strip(config);
    REQUIRE(stripped.ok());
    CHECK(stripped->errors.empty());
    CHECK(snapshot(config) == before);
}

TEST_CASE("native strip failure is per-file; other files still strip") {
    TempDir dir;
    write_toy_project(dir.path());
    ToolConfig config = toy_config(dir, {"callers"});
    config.marker_style = MarkerStyle::Native;
    REQUIRE(cmd_label(config).ok());

    // tamper with the inserted annotation in Util.java
    std::string util = testutil::read_file(dir.path() / "src" / "Util.java");
    std::size_t pos = util.find("@Caller(");
    REQUIRE(pos != std::string::npos);
    util.replace(pos, 8, "@Faller(");
    testutil::write_file(dir.path() / "src" / "Util.java", util);

    // also give Mat.java a comment marker so something else changes
    std::string mat = testutil::read_file(dir.path() / "src" / "Mat.java");
    testutil::write_file(dir.path() / "src" / "Mat.java", "//@ Author(\"x\")\n" + mat);

    auto stripped = cmd_strip(config);
    REQUIRE(stripped.ok());
    REQUIRE(stripped->errors.size() == 1);
    CHECK(stripped->errors[0].find("Util.java") != std::string::npos);
    // the tampered file kept its manifest for recovery
    CHECK(std::filesystem::exists(manifest_path_for(dir.path(), "src/Util.java")));
    // the other file was stripped
    CHECK(testutil::read_file(dir.path() / "src" / "Mat.java") == mat);
}

TEST_CASE("include and exclude globs narrow the selection") {
    TempDir dir;
    write_toy_project(dir.path());
    ToolConfig config = toy_config(dir, {"callers"});
    config.exclude_globs = {"*Util*"};
    REQUIRE(cmd_label(config).ok());
    std::string util = testutil::read_file(dir.path() / "src" / "Util.java");
    CHECK(util.find("//@") == std::string::npos);  // excluded file untouched
}

TEST_CASE("parallel labeling is deterministic: jobs=1 equals jobs=4") {
    TempDir one, four;
    for (const TempDir* dir : {&one, &four}) {
        write_toy_project(dir->path());
        for (int i = 0; i < 24; ++i) {
            std::string name = "Gen" + std::to_string(i);
            testutil::write_file(dir->path() / "gen" / (name + ".java"),
                                 "class " + name + " {\n"
                                 "  void call" + std::to_string(i) + "() {\n"
                                 "    multiply(1, 2);\n"
                                 "  }\n"
                                 "}\n");
        }
    }
    ToolConfig config_one = toy_config(one, {"callers"});
    config_one.jobs = 1;
    ToolConfig config_four = toy_config(four, {"callers"});
    config_four.jobs = 4;

    auto first = cmd_label(config_one);
    auto second = cmd_label(config_four);
    REQUIRE(first.ok());
    REQUIRE(second.ok());
    CHECK(first->files_labeled == second->files_labeled);
    CHECK(first->block_markers == second->block_markers);
    CHECK(snapshot(config_one) == snapshot(config_four));
}
