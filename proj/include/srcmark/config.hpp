#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "srcmark/analyzers.hpp"
#include "srcmark/error.hpp"
#include "srcmark/overlay.hpp"

namespace srcmark {

struct ToolConfig {
    std::filesystem::path project_root;
    std::string lang_profile = "java";
    std::vector<std::string> active_analyzers;  // default: all off
    std::vector<std::string> include_globs;     // default: derived from the profile
    std::vector<std::string> exclude_globs;
    std::vector<std::string> targets;  // qualified declaration paths; empty = whole tree
    std::filesystem::path coverage_report;
    CoverageMode coverage_mode = CoverageMode::Counts;
    MarkerStyle marker_style = MarkerStyle::Comment;
    unsigned jobs = 0;  // 0 = logical CPU count, normalized by validation
};

// Command-line values; set fields override file values, which override
// defaults.
struct CliOverrides {
    std::optional<unsigned> jobs;
    std::optional<MarkerStyle> style;
    std::optional<CoverageMode> coverage_mode;
    std::vector<std::string> only_globs;  // replaces include_globs when non-empty
    std::vector<std::string> targets;
    std::vector<std::string> analyzers;
};

ToolConfig default_config(std::filesystem::path project_root);

// Parses the line-oriented `key = value` format with [analyzer.<id>]
// sections. Unknown keys fail fast with their line number.
Result<ToolConfig> load_config(const std::filesystem::path& path);

void apply_overrides(ToolConfig& config, const CliOverrides& overrides);

// Normalizes defaults (jobs, include globs) and checks the config
// invariants; every command runs this before using a config.
Result<void> validate_config(ToolConfig& config);

const char* style_name(MarkerStyle style);
const char* mode_name(CoverageMode mode);

}  // namespace srcmark
