#include "srcmark/vcs.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "srcmark/bytes.hpp"
#include "srcmark/overlay.hpp"
#include "srcmark/subprocess.hpp"

namespace srcmark {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kHookSignature = "# srcmark pre-commit hook v1";

std::string_view chomp(std::string_view s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

Result<RepoContext> discover_repo(const fs::path& root, std::string tool_invocation) {
    fs::path git_entry = root / ".git";
    std::error_code ec;
    if (fs::is_directory(git_entry, ec))
        return RepoContext{root, git_entry / "hooks", std::move(tool_invocation)};
    if (fs::is_regular_file(git_entry, ec)) {
        // worktree gitlink: "gitdir: <path>"
        std::ifstream in(git_entry);
        std::string line;
        std::getline(in, line);
        std::string_view body = chomp(line);
        if (body.starts_with("gitdir:")) {
            body.remove_prefix(7);
            while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            fs::path gitdir{std::string(body)};
            if (gitdir.is_relative()) gitdir = root / gitdir;
            return RepoContext{root, gitdir / "hooks", std::move(tool_invocation)};
        }
    }
    return fail<RepoContext>(ErrorKind::Environment,
                             "no git repository at " + root.string() + " (missing .git)");
}

std::string hook_script_text(const std::string& tool_invocation) {
    std::string script;
    script += "#!/bin/sh\n";
    script += std::string(kHookSignature) + "\n";
    script += "# Strips srcmark markers from staged files and re-stages them,\n";
    script += "# so committed content never carries markers.\n";
    script += "set -e\n";
    script += "SRCMARK=\"" + tool_invocation + "\"\n";
    script += "git diff --cached --name-only --diff-filter=ACM | while IFS= read -r path; do\n";
    script += "    [ -f \"$path\" ] || continue\n";
    script += "    tmp=\"$path.srcmark-strip\"\n";
    script += "    \"$SRCMARK\" filter < \"$path\" > \"$tmp\"\n";
    script += "    if cmp -s \"$path\" \"$tmp\"; then\n";
    script += "        rm -f \"$tmp\"\n";
    script += "    else\n";
    script += "        mv \"$tmp\" \"$path\"\n";
    script += "        git add -- \"$path\"\n";
    script += "    fi\n";
    script += "done\n";
    return script;
}

Result<HookReport> install_hook(const RepoContext& repo, bool force) {
    HookReport report;
    report.hook_path = repo.hooks_dir / "pre-commit";
    const std::string script = hook_script_text(repo.tool_invocation);

    std::error_code ec;
    fs::create_directories(repo.hooks_dir, ec);
    if (ec)
        return fail<HookReport>(ErrorKind::Environment,
                                "cannot create hooks directory " + repo.hooks_dir.string());

    if (fs::exists(report.hook_path)) {
        std::ifstream in(report.hook_path, std::ios::binary);
        std::stringstream existing;
        existing << in.rdbuf();
        if (existing.str() == script) {
            report.already_current = true;
            report.installed = true;
        } else if (existing.str().find(kHookSignature) == std::string::npos && !force) {
            return fail<HookReport>(
                ErrorKind::Environment,
                "a pre-commit hook not installed by srcmark already exists at " +
                    report.hook_path.string() +
                    "; re-run with --force to replace it, or chain srcmark into your hook with: " +
                    repo.tool_invocation + " filter");
        }
    }

    if (!report.already_current) {
        std::ofstream out(report.hook_path, std::ios::binary | std::ios::trunc);
        if (!out)
            return fail<HookReport>(ErrorKind::Io, "cannot write " + report.hook_path.string());
        out << script;
        out.close();
        report.installed = true;
    }
    fs::permissions(report.hook_path,
                    fs::perms::owner_all | fs::perms::group_read | fs::perms::group_exec |
                        fs::perms::others_read | fs::perms::others_exec,
                    fs::perm_options::replace, ec);

    report.notes.push_back("pre-commit hook installed: " + report.hook_path.string());
    report.notes.push_back(
        "alternative content-filter mode (strips on commit, keeps working copies labeled):");
    report.notes.push_back("  git config filter.srcmark.clean '" + repo.tool_invocation +
                           " filter'");
    report.notes.push_back("  echo '*.java filter=srcmark' >> " +
                           (repo.root / ".gitattributes").string());
    return report;
}

void StreamStripper::emit_line(std::string_view line_with_terminator, std::string& out) {
    std::string_view content = line_with_terminator;
    std::string_view terminator;
    if (content.ends_with("\r\n")) {
        terminator = content.substr(content.size() - 2);
        content.remove_suffix(2);
    } else if (content.ends_with("\n")) {
        terminator = content.substr(content.size() - 1);
        content.remove_suffix(1);
    }
    if (parse_block_marker(content, syntax_)) return;
    if (auto parsed = parse_line_marker(content, syntax_)) {
        out += parsed->first;
        out += terminator;
        return;
    }
    out += content;
    out += terminator;
}

void StreamStripper::feed(std::string_view chunk, std::string& out) {
    while (!chunk.empty()) {
        std::size_t nl = chunk.find('\n');
        if (nl == std::string_view::npos) {
            pending_.append(chunk);
            return;
        }
        pending_.append(chunk.substr(0, nl + 1));
        emit_line(pending_, out);
        pending_.clear();
        chunk.remove_prefix(nl + 1);
    }
}

void StreamStripper::finish(std::string& out) {
    if (!pending_.empty()) {
        emit_line(pending_, out);
        pending_.clear();
    }
}

void filter_stream(std::istream& in, std::ostream& out, const MarkerSyntax& syntax) {
    StreamStripper stripper(syntax);
    char buffer[65536];
    std::string produced;
    while (in) {
        in.read(buffer, sizeof(buffer));
        std::streamsize n = in.gcount();
        if (n <= 0) break;
        produced.clear();
        stripper.feed(std::string_view(buffer, static_cast<std::size_t>(n)), produced);
        out.write(produced.data(), static_cast<std::streamsize>(produced.size()));
    }
    produced.clear();
    stripper.finish(produced);
    out.write(produced.data(), static_cast<std::streamsize>(produced.size()));
    out.flush();
}

Result<BlameInfo> collect_blame(const RepoContext& repo, const std::string& relative_file) {
    // Blaming HEAD pins attribution to the last committed state; staged or
    // working-tree edits never surface as a fake "not committed" author.
    Result<RunResult> run = run_process({"git", "-C", repo.root.string(), "blame",
                                         "--line-porcelain", "HEAD", "--", relative_file});
    if (!run) return run.error();
    if (run->exit_code != 0)
        return fail<BlameInfo>(ErrorKind::Plan, "no history for " + relative_file + ": " +
                                                    std::string(chomp(run->error_output)));

    BlameInfo info;
    std::map<std::string, LineAttribution> by_commit;
    std::string current_commit;
    std::size_t current_line = 0;

    for (const Line& raw : split_lines(run->output)) {
        std::string_view line = raw.content;
        if (line.starts_with('\t')) {
            // content line: the group for current_line is complete
            if (current_line > 0 && !current_commit.empty()) {
                auto it = by_commit.find(current_commit);
                if (it != by_commit.end()) info.lines[current_line] = it->second;
            }
            current_line = 0;
            continue;
        }
        // header: <40-hex sha> <orig line> <final line> [<group size>]
        if (line.size() > 40 && line[40] == ' ' &&
            line.substr(0, 40).find_first_not_of("0123456789abcdef") == std::string_view::npos) {
            current_commit.assign(line.substr(0, 40));
            std::string_view rest = line.substr(41);
            std::size_t first_space = rest.find(' ');
            if (first_space != std::string_view::npos) {
                std::string_view final_field = rest.substr(first_space + 1);
                std::size_t end = final_field.find(' ');
                if (end != std::string_view::npos) final_field = final_field.substr(0, end);
                if (!final_field.empty() &&
                    final_field.find_first_not_of("0123456789") == std::string_view::npos)
                    current_line = std::stoull(std::string(final_field));
            }
            by_commit.try_emplace(current_commit).first->second.commit_id = current_commit;
            continue;
        }
        if (line.starts_with("author ")) {
            by_commit[current_commit].author_name.assign(line.substr(7));
        } else if (line.starts_with("committer-time ")) {
            std::string_view value = line.substr(15);
            if (!value.empty() && value.find_first_not_of("0123456789") == std::string_view::npos)
                by_commit[current_commit].commit_time = std::stoll(std::string(value));
        }
    }
    if (info.lines.empty())
        return fail<BlameInfo>(ErrorKind::Plan, "no history for " + relative_file);
    return info;
}

}  // namespace srcmark
