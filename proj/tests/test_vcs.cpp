#include <doctest.h>

#include <random>
#include <sstream>

#include "srcmark/overlay.hpp"
#include "srcmark/vcs.hpp"
#include "testutil.hpp"

using namespace srcmark;
using testutil::TempDir;

namespace {

const MarkerSyntax& syntax() { return MarkerSyntax::standard(); }

std::string stream_strip(std::string_view input) {
    std::istringstream in{std::string(input)};
    std::ostringstream out;
    filter_stream(in, out, syntax());
    return out.str();
}

}  // namespace

TEST_CASE("filter stream equals strip_file") {
    std::string labeled =
        "class A {\n"
        "  //@ Author(\"Ann\")\n"
        "  void f() {\n"
        "    g(); //+3\n"
        "  }\n"
        "}\n";
    CHECK(stream_strip(labeled) == strip_file(labeled, syntax()));
    CHECK(stream_strip("") == "");
    CHECK(stream_strip("no newline at end //+1") == "no newline at end");
}

TEST_CASE("property: chunked stream strip equals strip_file on arbitrary bytes") {
    std::mt19937 rng(1234);
    testutil::FileGenerator gen(1234);
    std::uniform_int_distribution<std::size_t> chunk(1, 17);
    std::uniform_int_distribution<int> inject(0, 3);

    for (int iter = 0; iter < 150; ++iter) {
        std::string content = gen.file();
        if (inject(rng) == 0) content += " //+12\r\nclean\n//@ Author(\"x\")\nrest //+9";
        std::string expected = strip_file(content, syntax());

        StreamStripper stripper(syntax());
        std::string produced;
        std::string_view rest = content;
        while (!rest.empty()) {
            std::size_t n = std::min(chunk(rng), rest.size());
            stripper.feed(rest.substr(0, n), produced);
            rest.remove_prefix(n);
        }
        stripper.finish(produced);
        CHECK(produced == expected);
    }
}

TEST_CASE("large stream strips with bounded line buffering") {
    // a few MB with markers sprinkled in; compare against strip_file
    std::string big;
    big.reserve(4 << 20);
    for (int i = 0; i < 60000; ++i) {
        big += "line number " + std::to_string(i);
        if (i % 7 == 0) big += " //+5";
        big += i % 13 == 0 ? "\r\n" : "\n";
        if (i % 11 == 0) big += "//@ Caller(class=\"A\", method=\"b\")\n";
    }
    CHECK(stream_strip(big) == strip_file(big, syntax()));
}

TEST_CASE("discover_repo finds hooks for a .git directory") {
    TempDir dir;
    testutil::git_init(dir.path());
    auto repo = discover_repo(dir.path(), "/usr/bin/srcmark");
    REQUIRE(repo.ok());
    CHECK(repo->hooks_dir == dir.path() / ".git" / "hooks");

    TempDir empty;
    auto missing = discover_repo(empty.path(), "srcmark");
    REQUIRE(!missing.ok());
    CHECK(missing.error().kind == ErrorKind::Environment);
}

TEST_CASE("hook install is idempotent and refuses foreign hooks") {
    TempDir dir;
    testutil::git_init(dir.path());
    auto repo = discover_repo(dir.path(), "/opt/srcmark");
    REQUIRE(repo.ok());

    auto first = install_hook(*repo, false);
    REQUIRE(first.ok());
    CHECK(first->installed);
    CHECK(!first->already_current);
    std::string hook_bytes = testutil::read_file(first->hook_path);
    CHECK(hook_bytes.find("/opt/srcmark") != std::string::npos);

    auto again = install_hook(*repo, false);
    REQUIRE(again.ok());
    CHECK(again->already_current);
    CHECK(testutil::read_file(again->hook_path) == hook_bytes);

    // a user's own hook is refused without force and left untouched
    std::string foreign = "#!/bin/sh\necho mine\n";
    testutil::write_file(first->hook_path, foreign);
    auto refused = install_hook(*repo, false);
    REQUIRE(!refused.ok());
    CHECK(testutil::read_file(first->hook_path) == foreign);

    auto forced = install_hook(*repo, true);
    REQUIRE(forced.ok());
    CHECK(testutil::read_file(first->hook_path) == hook_bytes);
}

TEST_CASE("blame of a single-commit file attributes every line to its author") {
    TempDir dir;
    testutil::git_init(dir.path());
    testutil::write_file(dir.path() / "A.java", "class A {\n  void f() {\n  }\n}\n");
    testutil::git(dir.path(), {"add", "."}, "John Doe", "john@example.com", 1600000000);
    testutil::git(dir.path(), {"commit", "-q", "-m", "one"}, "John Doe", "john@example.com",
                  1600000000);

    auto repo = discover_repo(dir.path(), "srcmark");
    REQUIRE(repo.ok());
    auto blame = collect_blame(*repo, "A.java");
    REQUIRE(blame.ok());
    REQUIRE(blame->lines.size() == 4);
    for (const auto& [line, attribution] : blame->lines) {
        CHECK(attribution.author_name == "John Doe");
        CHECK(attribution.commit_time == 1600000000);
        CHECK(attribution.commit_id.size() == 40);
    }
}

TEST_CASE("blame distinguishes commits per line and ignores uncommitted edits") {
    TempDir dir;
    testutil::git_init(dir.path());
    testutil::write_file(dir.path() / "B.java",
                         "class B {\n  int x = 1;\n  int y = 2;\n}\n");
    testutil::git(dir.path(), {"add", "."}, "Alice", "alice@example.com", 1111111111);
    testutil::git(dir.path(), {"commit", "-q", "-m", "base"}, "Alice", "alice@example.com",
                  1111111111);
    testutil::write_file(dir.path() / "B.java",
                         "class B {\n  int x = 1;\n  int y = 99;\n}\n");
    testutil::git(dir.path(), {"add", "."}, "Bob", "bob@example.com", 1222222222);
    testutil::git(dir.path(), {"commit", "-q", "-m", "tweak"}, "Bob", "bob@example.com",
                  1222222222);

    auto repo = discover_repo(dir.path(), "srcmark");
    REQUIRE(repo.ok());
    auto blame = collect_blame(*repo, "B.java");
    REQUIRE(blame.ok());
    CHECK(blame->lines.at(1).author_name == "Alice");
    CHECK(blame->lines.at(2).author_name == "Alice");
    CHECK(blame->lines.at(3).author_name == "Bob");
    CHECK(blame->lines.at(3).commit_time == 1222222222);
    CHECK(blame->lines.at(4).author_name == "Alice");

    // stage an edit without committing: attribution stays with HEAD
    testutil::write_file(dir.path() / "B.java",
                         "class B {\n  int x = 777;\n  int y = 99;\n}\n");
    testutil::git(dir.path(), {"add", "."});
    auto staged = collect_blame(*repo, "B.java");
    REQUIRE(staged.ok());
    CHECK(staged->lines.at(2).author_name == "Alice");
}

TEST_CASE("blame errors for untracked files") {
    TempDir dir;
    testutil::git_init(dir.path());
    testutil::write_file(dir.path() / "tracked.java", "class T {\n}\n");
    testutil::git(dir.path(), {"add", "."});
    testutil::git(dir.path(), {"commit", "-q", "-m", "one"});
    testutil::write_file(dir.path() / "untracked.java", "class U {\n}\n");

    auto repo = discover_repo(dir.path(), "srcmark");
    REQUIRE(repo.ok());
    auto blame = collect_blame(*repo, "untracked.java");
    REQUIRE(!blame.ok());
    CHECK(blame.error().kind == ErrorKind::Plan);
    CHECK(blame.error().message.find("no history") != std::string::npos);
}

TEST_CASE("a pre-commit hook of the installed shape keeps committed blobs clean") {
    TempDir dir;
    testutil::git_init(dir.path());
    std::string labeled = "class A {\n  int x; //+4\n}\n";
    testutil::write_file(dir.path() / "A.java", labeled);

    auto repo = discover_repo(dir.path(), "unused");
    REQUIRE(repo.ok());
    // stand-in for `srcmark filter` so this test stays independent of the
    // CLI binary; the real end-to-end guarantee runs in the acceptance suite
    std::string hook =
        "#!/bin/sh\n"
        "set -e\n"
        "git diff --cached --name-only --diff-filter=ACM | while IFS= read -r path; do\n"
        "  [ -f \"$path\" ] || continue\n"
        "  sed 's| //+4||' < \"$path\" > \"$path.tmp\"\n"
        "  mv \"$path.tmp\" \"$path\"\n"
        "  git add -- \"$path\"\n"
        "done\n";
    testutil::write_file(repo->hooks_dir / "pre-commit", hook);
    std::filesystem::permissions(repo->hooks_dir / "pre-commit",
                                 std::filesystem::perms::owner_all);

    testutil::git(dir.path(), {"add", "."});
    auto commit = testutil::git(dir.path(), {"commit", "-q", "-m", "c"});
    REQUIRE(commit.exit_code == 0);
    auto shown = testutil::git(dir.path(), {"show", "HEAD:A.java"});
    CHECK(shown.output == "class A {\n  int x;\n}\n");
}
