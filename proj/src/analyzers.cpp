#include "srcmark/analyzers.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "srcmark/bytes.hpp"

namespace srcmark {

namespace {

const std::array<AnalyzerDescriptor, 3> kRegistry = {{
    {"callers", Granularity::Declaration, "Caller", {}},
    {"coverage", Granularity::Line, "+", {"report", "mode"}},
    {"author", Granularity::Declaration, "Author", {}},
}};

std::string_view trim_cr(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

// Splits "Outer.Inner.method" into the enclosing path and the final segment.
std::pair<std::string_view, std::string_view> split_last_segment(std::string_view qualified) {
    std::size_t dot = qualified.rfind('.');
    if (dot == std::string_view::npos) return {std::string_view{}, qualified};
    return {qualified.substr(0, dot), qualified.substr(dot + 1)};
}

AnchoredMetadata make_block_entry(const FileRecord& file, const Declaration& decl,
                                  BlockMarker marker) {
    Anchor anchor;
    anchor.file = file.path;
    anchor.kind = AnchorKind::Declaration;
    anchor.line_number = decl.header_line;
    anchor.decl_path = decl.qualified_path;
    marker.indent = decl.indent;
    return {std::move(anchor), std::move(marker)};
}

}  // namespace

std::span<const AnalyzerDescriptor> analyzer_registry() { return kRegistry; }

const AnalyzerDescriptor* find_analyzer(std::string_view id) {
    for (const AnalyzerDescriptor& d : kRegistry)
        if (d.id == id) return &d;
    return nullptr;
}

const FileRecord* ProjectState::find(std::string_view path) const {
    for (const FileRecord& f : files)
        if (f.path == path) return &f;
    return nullptr;
}

bool TargetFilter::selects(const Declaration& decl) const {
    if (paths.empty()) return true;
    for (const std::string& p : paths) {
        if (decl.qualified_path == p) return true;
        if (decl.qualified_path.size() > p.size() && decl.qualified_path.starts_with(p) &&
            decl.qualified_path[p.size()] == '.')
            return true;
    }
    return false;
}

bool TargetFilter::selects_line(const FileRecord& file, std::size_t line) const {
    if (paths.empty()) return true;
    for (const Declaration& decl : file.declarations)
        if (selects(decl) && line >= decl.body_span.first && line <= decl.body_span.second)
            return true;
    return false;
}

Result<LcovData> parse_lcov(std::string_view text, const std::filesystem::path& project_root) {
    LcovData data;
    std::string current;  // project-relative path of the open SF section
    bool in_section = false;
    bool section_usable = false;

    std::vector<Line> lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = trim_cr(lines[i].content);
        if (line.empty()) continue;
        if (line.starts_with("SF:")) {
            std::filesystem::path sf(std::string(line.substr(3)));
            std::filesystem::path relative;
            if (sf.is_absolute()) {
                relative = sf.lexically_proximate(project_root);
                if (relative.empty() || relative.native().starts_with("..")) {
                    data.warnings.push_back("coverage record outside the project root: " +
                                            sf.string());
                    in_section = true;
                    section_usable = false;
                    continue;
                }
            } else {
                relative = sf.lexically_normal();
            }
            current = relative.generic_string();
            in_section = true;
            section_usable = true;
            data.report.files.try_emplace(current);
            continue;
        }
        if (line.starts_with("DA:")) {
            if (!in_section)
                return fail<LcovData>(ErrorKind::Config,
                                      "LCOV line " + std::to_string(i + 1) + ": DA record outside an SF section");
            if (!section_usable) continue;
            std::string_view body = line.substr(3);
            std::size_t comma = body.find(',');
            if (comma == std::string_view::npos)
                return fail<LcovData>(ErrorKind::Config,
                                      "LCOV line " + std::to_string(i + 1) + ": malformed DA record");
            std::string_view line_field = body.substr(0, comma);
            std::string_view count_field = body.substr(comma + 1);
            // an optional trailing ,<checksum> is ignored
            std::size_t extra = count_field.find(',');
            if (extra != std::string_view::npos) count_field = count_field.substr(0, extra);
            if (line_field.empty() || count_field.empty() ||
                line_field.find_first_not_of("0123456789") != std::string_view::npos ||
                count_field.find_first_not_of("0123456789") != std::string_view::npos)
                return fail<LcovData>(ErrorKind::Config,
                                      "LCOV line " + std::to_string(i + 1) + ": malformed DA record");
            std::size_t line_number = std::stoull(std::string(line_field));
            unsigned long long count = std::stoull(std::string(count_field));
            if (line_number < 1)
                return fail<LcovData>(ErrorKind::Config,
                                      "LCOV line " + std::to_string(i + 1) + ": DA line numbers are 1-based");
            data.report.files[current][line_number] += count;
            continue;
        }
        if (line == "end_of_record") {
            in_section = false;
            section_usable = false;
            continue;
        }
        // TN:, FN:, FNDA:, LF:, LH:, BRDA:, ... carry nothing we consume
    }
    return data;
}

PlanBuild callers_plan(const ProjectState& state, const TargetFilter& targets,
                       const MarkerSyntax& syntax) {
    (void)syntax;
    PlanBuild build;

    // callee name -> distinct (caller class, caller method), self-sorting map
    std::map<std::string, std::set<std::pair<std::string, std::string>>> callers_of;
    for (const FileRecord& file : state.files) {
        std::map<std::string_view, const Declaration*> by_path;
        for (const Declaration& decl : file.declarations) by_path[decl.qualified_path] = &decl;
        for (const CallSite& call : file.call_sites) {
            auto it = by_path.find(call.enclosing);
            if (it == by_path.end() || it->second->kind != DeclKind::Method)
                continue;  // class-initializer calls carry no (class, method) identity
            auto [cls, method] = split_last_segment(call.enclosing);
            callers_of[call.callee_name].emplace(std::string(cls), std::string(method));
        }
    }

    for (const FileRecord& file : state.files) {
        for (const Declaration& decl : file.declarations) {
            if (decl.kind != DeclKind::Method || !targets.selects(decl)) continue;
            auto it = callers_of.find(decl.name);
            if (it == callers_of.end()) continue;
            for (const auto& [caller_class, caller_method] : it->second) {
                BlockMarker marker;
                marker.analyzer_id = "callers";
                marker.name = "Caller";
                marker.args = {{"class", caller_class}, {"method", caller_method}};
                build.entries.push_back(make_block_entry(file, decl, std::move(marker)));
            }
        }
    }
    return build;
}

PlanBuild coverage_plan(const ProjectState& state, const TargetFilter& targets, CoverageMode mode,
                        const MarkerSyntax& syntax) {
    PlanBuild build;
    const std::string* sigil = syntax.sigil_for("coverage");
    for (const auto& [path, counts] : state.coverage.files) {
        const FileRecord* file = state.find(path);
        if (!file) {
            if (!counts.empty())
                build.warnings.push_back("coverage report references a file outside the selection: " +
                                         path);
            continue;
        }
        for (const auto& [line, count] : counts) {
            if (line > file->line_count) {
                build.warnings.push_back("coverage record beyond end of file: " + path + ":" +
                                         std::to_string(line) + "; entry dropped");
                continue;
            }
            if (mode == CoverageMode::Counts && count == 0) continue;
            if (!targets.selects_line(*file, line)) continue;
            Anchor anchor;
            anchor.file = path;
            anchor.kind = AnchorKind::Line;
            anchor.line_number = line;
            build.entries.push_back(
                {std::move(anchor),
                 LineMarker{"coverage", std::to_string(count), sigil ? *sigil : ""}});
        }
    }
    return build;
}

PlanBuild author_plan(const ProjectState& state, const TargetFilter& targets,
                      const MarkerSyntax& syntax) {
    (void)syntax;
    PlanBuild build;
    for (const FileRecord& file : state.files) {
        bool has_targeted_decl = false;
        for (const Declaration& decl : file.declarations)
            if (targets.selects(decl)) has_targeted_decl = true;
        if (!has_targeted_decl) continue;

        auto blame_it = state.blame.find(file.path);
        if (blame_it == state.blame.end()) {
            build.warnings.push_back("no version-control history for " + file.path +
                                     "; author markers skipped");
            continue;
        }
        const BlameInfo& blame = blame_it->second;

        for (const Declaration& decl : file.declarations) {
            if (!targets.selects(decl)) continue;
            const LineAttribution* best = nullptr;
            auto it = blame.lines.lower_bound(decl.body_span.first);
            for (; it != blame.lines.end() && it->first <= decl.body_span.second; ++it) {
                const LineAttribution& candidate = it->second;
                if (!best || candidate.commit_time > best->commit_time ||
                    (candidate.commit_time == best->commit_time &&
                     candidate.commit_id > best->commit_id))
                    best = &candidate;
            }
            if (!best) {
                build.warnings.push_back("no blame entries cover " + decl.qualified_path + " in " +
                                         file.path + "; author marker skipped");
                continue;
            }
            BlockMarker marker;
            marker.analyzer_id = "author";
            marker.name = "Author";
            marker.args = {{"", best->author_name}};
            build.entries.push_back(make_block_entry(file, decl, std::move(marker)));
        }
    }
    return build;
}

Result<PlanBuild> run_analyzers(std::span<const std::string> active_ids, const ProjectState& state,
                                const TargetFilter& targets, CoverageMode mode,
                                const MarkerSyntax& syntax) {
    for (const std::string& id : active_ids)
        if (!find_analyzer(id))
            return fail<PlanBuild>(ErrorKind::Config, "unknown analyzer '" + id + "'");

    PlanBuild merged;
    for (const AnalyzerDescriptor& descriptor : analyzer_registry()) {
        if (std::find(active_ids.begin(), active_ids.end(), descriptor.id) == active_ids.end())
            continue;
        PlanBuild part;
        if (descriptor.id == "callers")
            part = callers_plan(state, targets, syntax);
        else if (descriptor.id == "coverage")
            part = coverage_plan(state, targets, mode, syntax);
        else if (descriptor.id == "author")
            part = author_plan(state, targets, syntax);
        merged.entries.insert(merged.entries.end(), std::make_move_iterator(part.entries.begin()),
                              std::make_move_iterator(part.entries.end()));
        merged.warnings.insert(merged.warnings.end(),
                               std::make_move_iterator(part.warnings.begin()),
                               std::make_move_iterator(part.warnings.end()));
    }

    std::map<std::pair<std::string_view, std::size_t>, std::size_t> line_marker_count;
    std::string conflicts;
    for (const AnchoredMetadata& entry : merged.entries) {
        if (!std::holds_alternative<LineMarker>(entry.marker)) continue;
        auto key = std::make_pair(std::string_view(entry.anchor.file), entry.anchor.line_number);
        if (++line_marker_count[key] == 2)
            conflicts += " " + entry.anchor.file + ":" + std::to_string(entry.anchor.line_number);
    }
    if (!conflicts.empty())
        return fail<PlanBuild>(ErrorKind::Plan,
                               "conflicting line markers (one line, several analyzers):" + conflicts);

    std::stable_sort(merged.entries.begin(), merged.entries.end(),
                     [](const AnchoredMetadata& a, const AnchoredMetadata& b) {
                         if (a.anchor.file != b.anchor.file) return a.anchor.file < b.anchor.file;
                         return a.anchor.line_number < b.anchor.line_number;
                     });
    return merged;
}

}  // namespace srcmark
