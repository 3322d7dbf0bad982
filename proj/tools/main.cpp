#include <CLI11.hpp>

#include <unistd.h>

#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "srcmark/analyzers.hpp"
#include "srcmark/commands.hpp"
#include "srcmark/config.hpp"
#include "srcmark/error.hpp"
#include "srcmark/marker.hpp"
#include "srcmark/vcs.hpp"

namespace fs = std::filesystem;
using namespace srcmark;

namespace {

constexpr const char* kDefaultConfigName = "srcmark.conf";

struct GlobalFlags {
    std::string config_path;
    std::optional<unsigned> jobs;
    std::string style;
    std::string mode;
    std::vector<std::string> only_globs;
    std::vector<std::string> targets;
    std::vector<std::string> analyzers;
    bool force = false;
};

int report_error(const Error& error) {
    std::cerr << "srcmark: error: " << error.message << "\n";
    return exit_code_for(error.kind);
}

Result<ToolConfig> build_config(const GlobalFlags& flags) {
    ToolConfig config;
    if (!flags.config_path.empty()) {
        Result<ToolConfig> loaded = load_config(flags.config_path);
        if (!loaded) return loaded;
        config = std::move(*loaded);
    } else if (fs::exists(kDefaultConfigName)) {
        Result<ToolConfig> loaded = load_config(kDefaultConfigName);
        if (!loaded) return loaded;
        config = std::move(*loaded);
    } else {
        config = default_config(fs::current_path());
    }

    CliOverrides overrides;
    overrides.jobs = flags.jobs;
    if (flags.style == "comment")
        overrides.style = MarkerStyle::Comment;
    else if (flags.style == "native")
        overrides.style = MarkerStyle::Native;
    else if (!flags.style.empty())
        return fail<ToolConfig>(ErrorKind::Config, "--style must be 'comment' or 'native'");
    if (flags.mode == "counts")
        overrides.coverage_mode = CoverageMode::Counts;
    else if (flags.mode == "full")
        overrides.coverage_mode = CoverageMode::Full;
    else if (!flags.mode.empty())
        return fail<ToolConfig>(ErrorKind::Config, "--mode must be 'counts' or 'full'");
    overrides.only_globs = flags.only_globs;
    overrides.targets = flags.targets;
    overrides.analyzers = flags.analyzers;
    apply_overrides(config, overrides);
    return config;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string self_invocation(const char* argv0) {
    char buffer[4096];
    ssize_t n = ::readlink("/proc/self/exe", buffer, sizeof(buffer) - 1);
    if (n > 0) {
        buffer[n] = '\0';
        return buffer;
    }
    std::error_code ec;
    fs::path absolute = fs::absolute(argv0, ec);
    return ec ? std::string(argv0) : absolute.string();
}

int run_label(const GlobalFlags& flags) {
    Result<ToolConfig> config = build_config(flags);
    if (!config) return report_error(config.error());
    Result<LabelSummary> summary = cmd_label(*config);
    if (!summary) return report_error(summary.error());
    print_warnings(summary->warnings);
    std::cout << "labeled " << summary->files_labeled << " of " << summary->files_selected
              << " files: " << summary->line_markers << " line markers, "
              << summary->block_markers << " block markers";
    if (summary->import_lines > 0) std::cout << ", " << summary->import_lines << " import lines";
    std::cout << "\n";
    return 0;
}

int run_strip(const GlobalFlags& flags) {
    Result<ToolConfig> config = build_config(flags);
    if (!config) return report_error(config.error());
    Result<StripSummary> summary = cmd_strip(*config);
    if (!summary) return report_error(summary.error());
    for (const std::string& e : summary->errors) std::cerr << "error: " << e << "\n";
    std::cout << "stripped " << summary->markers_removed << " markers from "
              << summary->files_changed << " of " << summary->files_processed << " files, removed "
              << summary->manifests_removed << " manifests\n";
    return summary->errors.empty() ? 0 : 1;
}

int run_verify(const GlobalFlags& flags) {
    Result<ToolConfig> config = build_config(flags);
    if (!config) return report_error(config.error());
    Result<VerifySummary> summary = cmd_verify(*config);
    if (!summary) return report_error(summary.error());
    print_warnings(summary->warnings);
    for (const std::string& file : summary->mismatches)
        std::cout << "MISMATCH " << file << "\n";
    for (const std::string& entry : summary->label_errors)
        std::cout << "LABEL-ERROR " << entry << "\n";
    for (const std::string& entry : summary->skipped) std::cout << "SKIPPED " << entry << "\n";
    if (summary->all_ok()) {
        std::cout << "all files round-trip (" << summary->files_checked << " checked)\n";
        return 0;
    }
    return 1;
}

int run_status(const GlobalFlags& flags) {
    Result<ToolConfig> config = build_config(flags);
    if (!config) return report_error(config.error());
    Result<StatusReport> report = cmd_status(*config);
    if (!report) return report_error(report.error());
    for (const StatusEntry& entry : report->entries) {
        std::cout << entry.file << ":";
        for (const auto& [analyzer, count] : entry.marker_counts)
            std::cout << " " << analyzer << "=" << count;
        if (entry.has_manifest)
            std::cout << (entry.manifest_stale ? " [manifest: stale]" : " [manifest: ok]");
        std::cout << "\n";
    }
    if (report->entries.empty()) {
        std::cout << "no markers in " << report->files_scanned << " files\n";
    } else {
        std::cout << "totals:";
        for (const auto& [analyzer, count] : report->totals)
            std::cout << " " << analyzer << "=" << count;
        std::cout << "\n";
    }
    return 0;
}

int run_install_hook(const GlobalFlags& flags, const char* argv0) {
    Result<ToolConfig> config = build_config(flags);
    if (!config) return report_error(config.error());
    Result<HookReport> report = cmd_install_hook(*config, flags.force, self_invocation(argv0));
    if (!report) return report_error(report.error());
    for (const std::string& note : report->notes) std::cout << note << "\n";
    if (report->already_current) std::cout << "hook was already up to date\n";
    return 0;
}

int run_filter() {
    std::ios::sync_with_stdio(false);
    filter_stream(std::cin, std::cout, MarkerSyntax::standard());
    return 0;
}

int run_analyzers_list() {
    for (const AnalyzerDescriptor& d : analyzer_registry()) {
        std::cout << d.id << "  "
                  << (d.granularity == Granularity::Line ? "line       " : "declaration")
                  << "  marker: " << (d.granularity == Granularity::Line ? "//" : "//@ ")
                  << d.marker << (d.granularity == Granularity::Line ? "<payload>" : "(...)");
        if (!d.config_keys.empty()) {
            std::cout << "  keys:";
            for (std::string_view key : d.config_keys) std::cout << " " << key;
        }
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"srcmark - labels source files with removable analysis markers"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "configuration file (default: ./srcmark.conf)");
    app.add_option("--jobs", flags.jobs, "parallel file workers")
        ->check(CLI::Range(1u, std::numeric_limits<unsigned>::max()));
    app.add_option("--style", flags.style, "marker style: comment|native");
    app.add_option("--mode", flags.mode, "coverage mode: counts|full");
    app.add_option("--only", flags.only_globs, "restrict to files matching this glob (repeatable)");
    app.add_option("--target", flags.targets, "qualified class/method to label (repeatable)");
    app.add_option("--analyzer", flags.analyzers, "activate an analyzer (repeatable)");
    app.add_flag("--force", flags.force, "overwrite a foreign pre-commit hook");

    CLI::App* label = app.add_subcommand("label", "run analyzers and write markers into sources");
    CLI::App* strip = app.add_subcommand("strip", "remove all markers, restoring original bytes");
    CLI::App* verify =
        app.add_subcommand("verify", "check the label/strip round trip without touching files");
    CLI::App* status = app.add_subcommand("status", "list files containing markers");
    CLI::App* install_hook =
        app.add_subcommand("install-hook", "install the pre-commit strip hook");
    CLI::App* filter = app.add_subcommand("filter", "strip markers from stdin to stdout");
    CLI::App* analyzers = app.add_subcommand("analyzers", "list registered analyzers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (label->parsed()) return run_label(flags);
    if (strip->parsed()) return run_strip(flags);
    if (verify->parsed()) return run_verify(flags);
    if (status->parsed()) return run_status(flags);
    if (install_hook->parsed()) return run_install_hook(flags, argv[0]);
    if (filter->parsed()) return run_filter();
    if (analyzers->parsed()) return run_analyzers_list();
    return 2;
}
