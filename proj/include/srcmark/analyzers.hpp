#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srcmark/decl_scan.hpp"
#include "srcmark/error.hpp"
#include "srcmark/marker.hpp"
#include "srcmark/overlay.hpp"

namespace srcmark {

enum class Granularity { Line, Declaration };

struct AnalyzerDescriptor {
    std::string_view id;
    Granularity granularity;
    std::string_view marker;  // sigil (line granularity) or block-marker name
    std::vector<std::string_view> config_keys;
};

// Fixed registry order; merged plans follow it.
std::span<const AnalyzerDescriptor> analyzer_registry();
const AnalyzerDescriptor* find_analyzer(std::string_view id);

// Per-file, per-line execution counts keyed by project-relative path.
struct CoverageReport {
    std::map<std::string, std::map<std::size_t, unsigned long long>> files;
};

struct LcovData {
    CoverageReport report;
    std::vector<std::string> warnings;
};

// Recognizes SF/DA/end_of_record; other record kinds are ignored. SF paths
// are resolved against the project root; absolute paths are accepted only
// inside it. Counts repeated across records accumulate.
Result<LcovData> parse_lcov(std::string_view text, const std::filesystem::path& project_root);

struct LineAttribution {
    std::string author_name;
    long long commit_time = 0;  // committer time, seconds since epoch
    std::string commit_id;
};

struct BlameInfo {
    std::map<std::size_t, LineAttribution> lines;
};

struct FileRecord {
    std::string path;  // project-relative
    std::string content;
    std::size_t line_count = 0;
    std::vector<Declaration> declarations;
    std::vector<CallSite> call_sites;
};

struct ProjectState {
    std::vector<FileRecord> files;  // sorted by path
    CoverageReport coverage;
    std::map<std::string, BlameInfo> blame;  // keyed by project-relative path

    const FileRecord* find(std::string_view path) const;
};

// Exact qualified-name selection: "Class" selects the class and everything
// nested in it, "Class.method" exactly that method. Empty selects all.
struct TargetFilter {
    std::vector<std::string> paths;

    bool empty() const { return paths.empty(); }
    bool selects(const Declaration& decl) const;
    bool selects_line(const FileRecord& file, std::size_t line) const;
};

enum class CoverageMode { Counts, Full };

struct PlanBuild {
    std::vector<AnchoredMetadata> entries;
    std::vector<std::string> warnings;
};

// One Caller block marker per distinct (caller class, caller method) whose
// body calls the target method's name; callers sorted lexicographically.
PlanBuild callers_plan(const ProjectState& state, const TargetFilter& targets,
                       const MarkerSyntax& syntax);

// Counts mode marks lines executed at least once with their count; Full mode
// additionally marks instrumented-but-unexecuted lines with "0".
PlanBuild coverage_plan(const ProjectState& state, const TargetFilter& targets, CoverageMode mode,
                        const MarkerSyntax& syntax);

// One Author block marker per targeted class/method naming the author of the
// most recent committer-time line in its span (ties broken by commit id).
PlanBuild author_plan(const ProjectState& state, const TargetFilter& targets,
                      const MarkerSyntax& syntax);

// Union of the active analyzers' plans in registry order. Two line markers
// on one line is a plan error.
Result<PlanBuild> run_analyzers(std::span<const std::string> active_ids, const ProjectState& state,
                                const TargetFilter& targets, CoverageMode mode,
                                const MarkerSyntax& syntax);

}  // namespace srcmark
