#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "srcmark/analyzers.hpp"
#include "srcmark/error.hpp"
#include "srcmark/marker.hpp"

namespace srcmark {

struct RepoContext {
    std::filesystem::path root;       // contains the VCS metadata directory
    std::filesystem::path hooks_dir;  // where hook files live
    std::string tool_invocation;      // how the hook invokes this tool
};

// Locates the hooks directory for a repository rooted at `root`. Handles
// both a `.git` directory and a `.git` gitlink file (worktrees).
Result<RepoContext> discover_repo(const std::filesystem::path& root, std::string tool_invocation);

struct HookReport {
    std::filesystem::path hook_path;
    bool installed = false;        // a hook file was written
    bool already_current = false;  // identical hook was already present
    std::vector<std::string> notes;
};

// Installs a pre-commit hook that strips staged files and re-stages them.
// Refuses to overwrite a foreign hook unless forced. The report carries the
// configuration lines for the alternative content-filter mode.
Result<HookReport> install_hook(const RepoContext& repo, bool force);

std::string hook_script_text(const std::string& tool_invocation);

// Streaming equivalent of strip_file: feed chunks of any size, output equals
// strip_file applied to the concatenated input. Memory is bounded by the
// longest line.
class StreamStripper {
public:
    explicit StreamStripper(const MarkerSyntax& syntax) : syntax_(syntax) {}
    void feed(std::string_view chunk, std::string& out);
    void finish(std::string& out);

private:
    void emit_line(std::string_view line_with_terminator, std::string& out);

    const MarkerSyntax& syntax_;
    std::string pending_;
};

void filter_stream(std::istream& in, std::ostream& out, const MarkerSyntax& syntax);

// Parses `git blame --line-porcelain` into per-line attribution using the
// committer time for recency. Untracked or uncommitted files yield a
// "no history" operation error; a missing git binary is an environment error.
Result<BlameInfo> collect_blame(const RepoContext& repo, const std::string& relative_file);

}  // namespace srcmark
