#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "srcmark/config.hpp"
#include "srcmark/error.hpp"
#include "srcmark/vcs.hpp"

namespace srcmark {

struct LabelSummary {
    std::size_t files_selected = 0;
    std::size_t files_labeled = 0;
    std::size_t line_markers = 0;
    std::size_t block_markers = 0;
    std::size_t import_lines = 0;
    std::vector<std::string> warnings;
};

struct StripSummary {
    std::size_t files_processed = 0;
    std::size_t files_changed = 0;
    std::size_t markers_removed = 0;
    std::size_t manifests_removed = 0;
    std::vector<std::string> errors;  // per-file failures; other files still stripped
};

struct VerifySummary {
    std::size_t files_checked = 0;
    std::vector<std::string> mismatches;    // files whose round trip is not byte-identical
    std::vector<std::string> label_errors;  // files whose labeling would fail (collisions, ...)
    std::vector<std::string> skipped;       // files skipped with a reason (scanner errors)
    std::vector<std::string> warnings;

    bool all_ok() const { return mismatches.empty() && label_errors.empty() && skipped.empty(); }
};

struct StatusEntry {
    std::string file;
    std::map<std::string, std::size_t> marker_counts;  // analyzer id -> markers present
    bool has_manifest = false;
    bool manifest_stale = false;
};

struct StatusReport {
    std::vector<StatusEntry> entries;  // only files with markers or manifests
    std::map<std::string, std::size_t> totals;
    std::size_t files_scanned = 0;
};

// Scans, plans all active analyzers, labels every selected file and writes
// manifests. All-or-nothing: if any file fails its preconditions, nothing is
// written.
Result<LabelSummary> cmd_label(const ToolConfig& config);

// Strips every selected file; removes manifests. Native-style manifest
// mismatches fail per file while the rest proceed.
Result<StripSummary> cmd_strip(const ToolConfig& config);

// Runs the label/strip round trip against in-memory shadow copies; working
// files are never touched.
Result<VerifySummary> cmd_verify(const ToolConfig& config);

Result<StatusReport> cmd_status(const ToolConfig& config);

Result<HookReport> cmd_install_hook(const ToolConfig& config, bool force,
                                    std::string tool_invocation);

}  // namespace srcmark
