#include "srcmark/commands.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "srcmark/bytes.hpp"
#include "srcmark/digest.hpp"
#include "srcmark/fsutil.hpp"
#include "srcmark/marker.hpp"
#include "srcmark/overlay.hpp"

namespace srcmark {

namespace fs = std::filesystem;

namespace {

bool analyzer_active(const ToolConfig& config, std::string_view id) {
    return std::find(config.active_analyzers.begin(), config.active_analyzers.end(), id) !=
           config.active_analyzers.end();
}

struct LoadedProject {
    ProjectState state;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::string>> scan_errors;  // (file, reason)
};

// Reads every selected file and, when required, scans declarations, ingests
// the coverage report and collects blame. Scan failures are collected per
// file so each command can decide between aborting and skipping.
Result<LoadedProject> load_project(const ToolConfig& config) {
    const bool need_decls = analyzer_active(config, "callers") ||
                            analyzer_active(config, "author") || !config.targets.empty();
    const bool need_blame = analyzer_active(config, "author");

    Result<std::vector<std::string>> files = enumerate_files(config);
    if (!files) return files.error();

    LoadedProject loaded;
    loaded.state.files.resize(files->size());
    std::vector<std::optional<Error>> io_errors(files->size());
    std::vector<std::optional<Error>> scan_errors(files->size());
    const LangProfile& profile = LangProfile::java();

    parallel_for(config.jobs, files->size(), [&](std::size_t i) {
        FileRecord& record = loaded.state.files[i];
        record.path = (*files)[i];
        Result<std::string> content = read_file(config.project_root / record.path);
        if (!content) {
            io_errors[i] = content.error();
            return;
        }
        record.content = std::move(*content);
        record.line_count = split_lines(record.content).size();
        if (need_decls) {
            Result<FileScan> scan = scan_file(record.content, profile);
            if (!scan) {
                scan_errors[i] = scan.error();
                return;
            }
            record.declarations = std::move(scan->declarations);
            record.call_sites = std::move(scan->call_sites);
        }
    });
    for (std::size_t i = 0; i < files->size(); ++i) {
        if (io_errors[i]) return *io_errors[i];
        if (scan_errors[i])
            loaded.scan_errors.emplace_back((*files)[i], scan_errors[i]->message);
    }

    if (analyzer_active(config, "coverage")) {
        fs::path report_path = config.coverage_report;
        if (report_path.is_relative()) report_path = config.project_root / report_path;
        Result<std::string> text = read_file(report_path);
        if (!text)
            return Error{ErrorKind::Config,
                         "cannot read coverage report " + report_path.string()};
        Result<LcovData> lcov = parse_lcov(*text, config.project_root);
        if (!lcov) return lcov.error();
        loaded.state.coverage = std::move(lcov->report);
        loaded.warnings.insert(loaded.warnings.end(), lcov->warnings.begin(),
                               lcov->warnings.end());
    }

    if (need_blame) {
        Result<RepoContext> repo = discover_repo(config.project_root, "srcmark");
        if (!repo) return repo.error();
        std::vector<std::optional<Error>> blame_errors(loaded.state.files.size());
        std::vector<std::optional<BlameInfo>> blame(loaded.state.files.size());
        parallel_for(config.jobs, loaded.state.files.size(), [&](std::size_t i) {
            Result<BlameInfo> info = collect_blame(*repo, loaded.state.files[i].path);
            if (info)
                blame[i] = std::move(*info);
            else
                blame_errors[i] = info.error();
        });
        for (std::size_t i = 0; i < loaded.state.files.size(); ++i) {
            if (blame[i]) {
                loaded.state.blame.emplace(loaded.state.files[i].path, std::move(*blame[i]));
            } else if (blame_errors[i]) {
                if (blame_errors[i]->kind == ErrorKind::Environment) return *blame_errors[i];
                // untracked/uncommitted: the author planner downgrades this
                // to a per-file warning by finding no blame entry
            }
        }
    }
    return loaded;
}

void drop_scan_failures(LoadedProject& loaded) {
    if (loaded.scan_errors.empty()) return;
    std::set<std::string> failed;
    for (const auto& [file, reason] : loaded.scan_errors) failed.insert(file);
    std::erase_if(loaded.state.files,
                  [&](const FileRecord& record) { return failed.count(record.path) > 0; });
}

// Entries of a merged plan that belong to one file; the plan is sorted by
// file, so this is a contiguous slice.
std::span<const AnchoredMetadata> entries_for(const std::vector<AnchoredMetadata>& entries,
                                              std::string_view path) {
    auto first = std::find_if(entries.begin(), entries.end(), [&](const AnchoredMetadata& e) {
        return e.anchor.file == path;
    });
    if (first == entries.end()) return {};
    auto last = std::find_if(first, entries.end(), [&](const AnchoredMetadata& e) {
        return e.anchor.file != path;
    });
    return {&*first, static_cast<std::size_t>(last - first)};
}

Result<std::optional<LabelManifest>> load_manifest(const fs::path& root,
                                                   const std::string& relative) {
    fs::path path = manifest_path_for(root, relative);
    std::error_code ec;
    if (!fs::exists(path, ec)) return std::optional<LabelManifest>{};
    Result<std::string> text = read_file(path);
    if (!text) return text.error();
    Result<LabelManifest> manifest = LabelManifest::parse(*text);
    if (!manifest) return manifest.error();
    return std::optional<LabelManifest>(std::move(*manifest));
}

void remove_manifest(const fs::path& root, const std::string& relative) {
    std::error_code ec;
    fs::path path = manifest_path_for(root, relative);
    fs::remove(path, ec);
    // prune now-empty directories up to the store root
    fs::path dir = path.parent_path();
    const fs::path stop = manifest_store_dir(root);
    while (dir != stop && fs::is_empty(dir, ec) && !ec) {
        fs::remove(dir, ec);
        dir = dir.parent_path();
    }
}

}  // namespace

Result<LabelSummary> cmd_label(const ToolConfig& input_config) {
    ToolConfig config = input_config;
    if (Result<void> valid = validate_config(config); !valid) return valid.error();
    if (config.active_analyzers.empty())
        return fail<LabelSummary>(ErrorKind::Config,
                                  "no analyzers active; nothing to label (set 'analyzers = ...' "
                                  "or pass --analyzer)");

    Result<LoadedProject> loaded = load_project(config);
    if (!loaded) return loaded.error();
    if (!loaded->scan_errors.empty()) {
        std::string message = "cannot scan";
        for (const auto& [file, reason] : loaded->scan_errors)
            message += "\n  " + file + ": " + reason;
        message += "\nno files were modified";
        return fail<LabelSummary>(ErrorKind::Scan, std::move(message));
    }

    ProjectState& state = loaded->state;
    LabelSummary summary;
    summary.files_selected = state.files.size();
    summary.warnings = std::move(loaded->warnings);

    // Precondition pass: every selected file must be collision-free before
    // anything is written.
    std::vector<std::vector<Collision>> collisions(state.files.size());
    parallel_for(config.jobs, state.files.size(), [&](std::size_t i) {
        collisions[i] = scan_collisions(state.files[i].content, MarkerSyntax::standard());
    });
    std::string collision_report;
    for (std::size_t i = 0; i < state.files.size(); ++i)
        for (const Collision& c : collisions[i])
            collision_report += "\n  " + state.files[i].path + ":" + std::to_string(c.line_number);
    if (!collision_report.empty())
        return fail<LabelSummary>(ErrorKind::Collision,
                                  "clean input already matches the marker grammar (strip first, "
                                  "or adjust the sigil registry):" +
                                      collision_report + "\nno files were modified");

    TargetFilter targets{config.targets};
    Result<PlanBuild> plan = run_analyzers(config.active_analyzers, state, targets,
                                           config.coverage_mode, MarkerSyntax::standard());
    if (!plan) return plan.error();
    summary.warnings.insert(summary.warnings.end(), plan->warnings.begin(), plan->warnings.end());

    struct Transformed {
        bool changed = false;
        std::string labeled;
        LabelManifest manifest;
    };
    std::vector<Transformed> outputs(state.files.size());
    std::vector<std::optional<Error>> label_errors(state.files.size());
    std::vector<std::vector<std::string>> label_warnings(state.files.size());

    parallel_for(config.jobs, state.files.size(), [&](std::size_t i) {
        const FileRecord& record = state.files[i];
        std::span<const AnchoredMetadata> entries = entries_for(plan->entries, record.path);
        if (entries.empty()) return;
        Result<LabelResult> result =
            label_file(record.content, entries, MarkerSyntax::standard(), config.marker_style);
        if (!result) {
            label_errors[i] = result.error();
            return;
        }
        label_warnings[i] = std::move(result->warnings);
        if (result->labeled != record.content) {
            outputs[i].changed = true;
            outputs[i].labeled = std::move(result->labeled);
            outputs[i].manifest = std::move(result->manifest);
            outputs[i].manifest.file = record.path;
        }
    });

    for (std::size_t i = 0; i < state.files.size(); ++i) {
        if (label_errors[i])
            return Error{label_errors[i]->kind, state.files[i].path + ": " +
                                                    label_errors[i]->message +
                                                    "\nno files were modified"};
        for (std::string& w : label_warnings[i]) summary.warnings.push_back(std::move(w));
    }

    // Every file transformed cleanly; only now touch the tree.
    std::vector<std::optional<Error>> write_errors(state.files.size());
    parallel_for(config.jobs, state.files.size(), [&](std::size_t i) {
        if (!outputs[i].changed) return;
        Result<void> written =
            write_file_atomic(config.project_root / state.files[i].path, outputs[i].labeled);
        if (!written) {
            write_errors[i] = written.error();
            return;
        }
        fs::path manifest_path = manifest_path_for(config.project_root, state.files[i].path);
        std::error_code ec;
        fs::create_directories(manifest_path.parent_path(), ec);
        Result<void> saved = write_file_atomic(manifest_path, outputs[i].manifest.serialize());
        if (!saved) write_errors[i] = saved.error();
    });
    for (std::size_t i = 0; i < state.files.size(); ++i)
        if (write_errors[i]) return *write_errors[i];

    for (std::size_t i = 0; i < state.files.size(); ++i) {
        if (!outputs[i].changed) continue;
        ++summary.files_labeled;
        summary.line_markers += outputs[i].manifest.modified_lines.size();
        summary.block_markers += outputs[i].manifest.inserted_lines.size();
        summary.import_lines += outputs[i].manifest.import_lines.size();
    }
    return summary;
}

Result<StripSummary> cmd_strip(const ToolConfig& input_config) {
    ToolConfig config = input_config;
    if (Result<void> valid = validate_config(config); !valid) return valid.error();

    Result<std::vector<std::string>> files = enumerate_files(config);
    if (!files) return files.error();

    StripSummary summary;
    summary.files_processed = files->size();
    const MarkerSyntax& syntax = MarkerSyntax::standard();

    struct Outcome {
        bool changed = false;
        bool manifest_present = false;
        bool keep_manifest = false;
        std::size_t removed = 0;
        std::string stripped;
        std::optional<std::string> error;
    };
    std::vector<Outcome> outcomes(files->size());

    parallel_for(config.jobs, files->size(), [&](std::size_t i) {
        Outcome& outcome = outcomes[i];
        const std::string& path = (*files)[i];
        Result<std::string> content = read_file(config.project_root / path);
        if (!content) {
            outcome.error = content.error().message;
            return;
        }
        Result<std::optional<LabelManifest>> manifest = load_manifest(config.project_root, path);
        if (!manifest) {
            outcome.error = manifest.error().message;
            return;
        }
        outcome.manifest_present = manifest->has_value();

        if (*manifest && (*manifest)->style == MarkerStyle::Native) {
            Result<std::string> restored = strip_native(*content, **manifest, syntax);
            if (!restored) {
                outcome.error = restored.error().message;
                outcome.keep_manifest = true;  // evidence for manual recovery
                return;
            }
            outcome.removed = (*manifest)->inserted_lines.size() +
                              (*manifest)->import_lines.size() +
                              (*manifest)->modified_lines.size();
            outcome.changed = *restored != *content;
            outcome.stripped = std::move(*restored);
            return;
        }

        outcome.removed = scan_collisions(*content, syntax).size();
        std::string stripped = strip_file(*content, syntax);
        outcome.changed = stripped != *content;
        outcome.stripped = std::move(stripped);
    });

    for (std::size_t i = 0; i < files->size(); ++i) {
        Outcome& outcome = outcomes[i];
        const std::string& path = (*files)[i];
        if (outcome.error) {
            summary.errors.push_back(path + ": " + *outcome.error);
            continue;
        }
        if (outcome.changed) {
            Result<void> written =
                write_file_atomic(config.project_root / path, outcome.stripped);
            if (!written) {
                summary.errors.push_back(path + ": " + written.error().message);
                continue;
            }
            ++summary.files_changed;
            summary.markers_removed += outcome.removed;
        }
        if (outcome.manifest_present && !outcome.keep_manifest) {
            remove_manifest(config.project_root, path);
            ++summary.manifests_removed;
        }
    }
    return summary;
}

Result<VerifySummary> cmd_verify(const ToolConfig& input_config) {
    ToolConfig config = input_config;
    if (Result<void> valid = validate_config(config); !valid) return valid.error();

    Result<LoadedProject> loaded = load_project(config);
    if (!loaded) return loaded.error();

    VerifySummary summary;
    summary.warnings = std::move(loaded->warnings);
    for (const auto& [file, reason] : loaded->scan_errors)
        summary.skipped.push_back(file + ": " + reason);
    drop_scan_failures(*loaded);

    ProjectState& state = loaded->state;
    TargetFilter targets{config.targets};
    Result<PlanBuild> plan = run_analyzers(config.active_analyzers, state, targets,
                                           config.coverage_mode, MarkerSyntax::standard());
    if (!plan) return plan.error();
    summary.warnings.insert(summary.warnings.end(), plan->warnings.begin(), plan->warnings.end());

    std::vector<std::optional<std::string>> mismatches(state.files.size());
    std::vector<std::optional<std::string>> label_errors(state.files.size());
    parallel_for(config.jobs, state.files.size(), [&](std::size_t i) {
        const FileRecord& record = state.files[i];
        Result<bool> identical =
            verify_roundtrip(record.content, entries_for(plan->entries, record.path),
                             MarkerSyntax::standard(), config.marker_style);
        if (!identical)
            label_errors[i] = record.path + ": " + identical.error().message;
        else if (!*identical)
            mismatches[i] = record.path;
    });
    summary.files_checked = state.files.size();
    for (std::size_t i = 0; i < state.files.size(); ++i) {
        if (mismatches[i]) summary.mismatches.push_back(std::move(*mismatches[i]));
        if (label_errors[i]) summary.label_errors.push_back(std::move(*label_errors[i]));
    }
    return summary;
}

Result<StatusReport> cmd_status(const ToolConfig& input_config) {
    ToolConfig config = input_config;
    if (Result<void> valid = validate_config(config); !valid) return valid.error();

    Result<std::vector<std::string>> files = enumerate_files(config);
    if (!files) return files.error();

    StatusReport report;
    report.files_scanned = files->size();
    const MarkerSyntax& syntax = MarkerSyntax::standard();
    std::vector<std::optional<StatusEntry>> entries(files->size());

    parallel_for(config.jobs, files->size(), [&](std::size_t i) {
        const std::string& path = (*files)[i];
        Result<std::string> content = read_file(config.project_root / path);
        if (!content) return;

        StatusEntry entry;
        entry.file = path;
        std::vector<Line> lines = split_lines(*content);
        for (const Line& line : lines) {
            if (auto parsed = parse_line_marker(line.content, syntax)) {
                ++entry.marker_counts[parsed->second.analyzer_id];
            } else if (auto block = parse_block_marker(line.content, syntax)) {
                ++entry.marker_counts[block->analyzer_id];
            }
        }

        Result<std::optional<LabelManifest>> manifest = load_manifest(config.project_root, path);
        if (manifest && *manifest) {
            entry.has_manifest = true;
            const LabelManifest& m = **manifest;
            auto line_at = [&](std::size_t number) -> std::optional<std::string_view> {
                if (number < 1 || number > lines.size()) return std::nullopt;
                return lines[number - 1].content;
            };
            bool stale = false;
            for (std::size_t n : m.inserted_lines) {
                auto text = line_at(n);
                if (!text) {
                    stale = true;
                    break;
                }
                if (m.style == MarkerStyle::Comment) {
                    auto block = parse_block_marker(*text, syntax);
                    if (!block) stale = true;
                } else {
                    std::string_view body = text->substr(leading_indent(*text).size());
                    if (!body.starts_with('@')) stale = true;
                    // count native annotations under their analyzer
                    if (body.starts_with('@')) {
                        std::size_t name_end = 1;
                        while (name_end < body.size() &&
                               std::isalnum(static_cast<unsigned char>(body[name_end])))
                            ++name_end;
                        if (const std::string* analyzer =
                                syntax.analyzer_for_block_name(body.substr(1, name_end - 1)))
                            ++entry.marker_counts[*analyzer];
                    }
                }
                if (stale) break;
            }
            if (!stale)
                for (std::size_t n : m.modified_lines) {
                    auto text = line_at(n);
                    if (!text || !parse_line_marker(*text, syntax)) {
                        stale = true;
                        break;
                    }
                }
            if (!stale)
                for (std::size_t n : m.import_lines) {
                    auto text = line_at(n);
                    if (!text || text->find("import ") == std::string_view::npos) {
                        stale = true;
                        break;
                    }
                }
            entry.manifest_stale = stale;
        }

        if (!entry.marker_counts.empty() || entry.has_manifest) entries[i] = std::move(entry);
    });

    for (std::optional<StatusEntry>& entry : entries) {
        if (!entry) continue;
        for (const auto& [analyzer, count] : entry->marker_counts)
            report.totals[analyzer] += count;
        report.entries.push_back(std::move(*entry));
    }
    return report;
}

Result<HookReport> cmd_install_hook(const ToolConfig& input_config, bool force,
                                    std::string tool_invocation) {
    ToolConfig config = input_config;
    if (Result<void> valid = validate_config(config); !valid) return valid.error();
    Result<RepoContext> repo = discover_repo(config.project_root, std::move(tool_invocation));
    if (!repo) return repo.error();
    return install_hook(*repo, force);
}

}  // namespace srcmark
