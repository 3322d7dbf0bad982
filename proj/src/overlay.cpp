#include "srcmark/overlay.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "srcmark/bytes.hpp"
#include "srcmark/digest.hpp"

namespace srcmark {

namespace {

constexpr std::string_view kManifestHeader = "srcmark-manifest 1";

std::string join_numbers(const std::vector<std::size_t>& numbers) {
    std::string out;
    for (std::size_t n : numbers) {
        if (!out.empty()) out.push_back(',');
        out += std::to_string(n);
    }
    return out;
}

Result<std::vector<std::size_t>> parse_numbers(std::string_view text) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string_view field = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                                  : comma - pos);
        if (field.empty() || field.find_first_not_of("0123456789") != std::string_view::npos)
            return fail<std::vector<std::size_t>>(ErrorKind::Manifest,
                                                  "malformed line-number list in manifest");
        out.push_back(std::stoull(std::string(field)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Bare host-language annotation, e.g. `@Caller(class="Math", method="square")`.
Result<std::string> render_native_annotation(const BlockMarker& marker) {
    if (!is_identifier(marker.name))
        return fail<std::string>(ErrorKind::Config,
                                 "annotation name '" + marker.name + "' is not an identifier");
    std::string out = marker.indent + "@" + marker.name + "(";
    bool first = true;
    for (const auto& [key, value] : marker.args) {
        if (value.find('\n') != std::string::npos)
            return fail<std::string>(ErrorKind::Config, "annotation argument value may not contain a newline");
        if (!first) out += ", ";
        first = false;
        if (!key.empty()) {
            out += key;
            out += '=';
        }
        out.push_back('"');
        for (char c : value) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        out.push_back('"');
    }
    out += ')';
    return out;
}

// Terminator for a line inserted above 0-based index `idx`. Only the final
// line of a file can lack a terminator, so a backward search always finds one
// unless the file is a single unterminated line.
std::string_view insertion_terminator(const std::vector<Line>& lines, std::size_t idx) {
    if (idx < lines.size() && !lines[idx].terminator.empty()) return lines[idx].terminator;
    for (std::size_t i = std::min(idx, lines.size()); i-- > 0;)
        if (!lines[i].terminator.empty()) return lines[i].terminator;
    return "\n";
}

bool starts_with_word(std::string_view line, std::string_view word) {
    std::string_view body = line.substr(leading_indent(line).size());
    return body.size() > word.size() && body.substr(0, word.size()) == word &&
           (body[word.size()] == ' ' || body[word.size()] == '\t');
}

}  // namespace

std::string LabelManifest::serialize() const {
    std::string out(kManifestHeader);
    out += '\n';
    out += "file = " + file + "\n";
    out += std::string("style = ") + (style == MarkerStyle::Native ? "native" : "comment") + "\n";
    out += "digest = " + digest_hex + "\n";
    out += "overlay_digest = " + overlay_digest_hex + "\n";
    out += "inserted = " + join_numbers(inserted_lines) + "\n";
    out += "modified = " + join_numbers(modified_lines) + "\n";
    out += "imports = " + join_numbers(import_lines) + "\n";
    return out;
}

Result<LabelManifest> LabelManifest::parse(std::string_view text) {
    std::vector<Line> lines = split_lines(text);
    if (lines.empty() || trim(lines[0].content) != kManifestHeader)
        return fail<LabelManifest>(ErrorKind::Manifest, "not a srcmark manifest");
    LabelManifest manifest;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string_view line = trim(lines[i].content);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            return fail<LabelManifest>(ErrorKind::Manifest,
                                       "malformed manifest line " + std::to_string(i + 1));
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (key == "file") {
            manifest.file.assign(value);
        } else if (key == "style") {
            if (value == "native")
                manifest.style = MarkerStyle::Native;
            else if (value == "comment")
                manifest.style = MarkerStyle::Comment;
            else
                return fail<LabelManifest>(ErrorKind::Manifest, "unknown manifest style");
        } else if (key == "digest") {
            manifest.digest_hex.assign(value);
        } else if (key == "overlay_digest") {
            manifest.overlay_digest_hex.assign(value);
        } else if (key == "inserted" || key == "modified" || key == "imports") {
            auto numbers = parse_numbers(value);
            if (!numbers) return numbers.error();
            if (key == "inserted")
                manifest.inserted_lines = std::move(*numbers);
            else if (key == "modified")
                manifest.modified_lines = std::move(*numbers);
            else
                manifest.import_lines = std::move(*numbers);
        } else {
            return fail<LabelManifest>(ErrorKind::Manifest,
                                       "unknown manifest key '" + std::string(key) + "'");
        }
    }
    return manifest;
}

std::filesystem::path manifest_store_dir(const std::filesystem::path& project_root) {
    return project_root / ".srcmark" / "manifests";
}

std::filesystem::path manifest_path_for(const std::filesystem::path& project_root,
                                        std::string_view relative_file) {
    std::filesystem::path path = manifest_store_dir(project_root);
    path /= std::filesystem::path(std::string(relative_file));
    path += ".mf";
    return path;
}

Result<LabelResult> label_file(std::string_view original,
                               std::span<const AnchoredMetadata> entries,
                               const MarkerSyntax& syntax, MarkerStyle style) {
    std::vector<Collision> collisions = scan_collisions(original, syntax);
    if (!collisions.empty()) {
        std::string message = "content already matches the marker grammar at line";
        if (collisions.size() > 1) message += 's';
        for (const Collision& c : collisions) message += " " + std::to_string(c.line_number);
        return fail<LabelResult>(ErrorKind::Collision, message);
    }

    std::vector<Line> lines = split_lines(original);
    LabelResult result;
    result.manifest.style = style;
    result.manifest.digest_hex = sha256_hex(original);

    std::map<std::size_t, std::vector<const AnchoredMetadata*>> blocks_at;
    std::map<std::size_t, const AnchoredMetadata*> suffix_at;
    for (const AnchoredMetadata& entry : entries) {
        const std::size_t line_number = entry.anchor.line_number;
        const bool is_line_marker = std::holds_alternative<LineMarker>(entry.marker);
        if (is_line_marker != (entry.anchor.kind == AnchorKind::Line))
            return fail<LabelResult>(ErrorKind::Plan,
                                     "anchor kind does not match marker kind at " + entry.anchor.file +
                                         ":" + std::to_string(line_number));
        if (line_number < 1 || line_number > lines.size()) {
            result.warnings.push_back("anchor out of range: " + entry.anchor.file + ":" +
                                      std::to_string(line_number) + " (file has " +
                                      std::to_string(lines.size()) + " lines); entry skipped");
            continue;
        }
        if (is_line_marker) {
            auto [it, inserted] = suffix_at.emplace(line_number, &entry);
            if (!inserted)
                return fail<LabelResult>(ErrorKind::Plan,
                                         "two line markers target " + entry.anchor.file + ":" +
                                             std::to_string(line_number));
        } else {
            blocks_at[line_number].push_back(&entry);
        }
    }

    // Native style: one import per distinct annotation name, placed after the
    // last existing import (or the package line), never after an unterminated
    // final line.
    std::size_t import_before = lines.size() + 1;  // sentinel: no imports
    std::vector<std::string> import_names;
    if (style == MarkerStyle::Native && !blocks_at.empty()) {
        std::set<std::string> names;
        for (const auto& [line_number, block_entries] : blocks_at)
            for (const AnchoredMetadata* entry : block_entries)
                names.insert(std::get<BlockMarker>(entry->marker).name);
        import_names.assign(names.begin(), names.end());

        std::size_t anchor_idx = 0;
        bool found = false;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (starts_with_word(lines[i].content, "import")) {
                anchor_idx = i + 1;
                found = true;
            } else if (!found && starts_with_word(lines[i].content, "package")) {
                anchor_idx = i + 1;
                found = true;
            }
        }
        import_before = found ? anchor_idx : 0;
        if (import_before == lines.size() && !lines.empty() && lines.back().terminator.empty())
            --import_before;
    }

    std::string out;
    out.reserve(original.size() + entries.size() * 48);
    std::size_t out_line = 0;
    std::string overlay_bytes;  // contents of every inserted line, in order

    auto emit_imports = [&](std::size_t before_idx) {
        std::string_view term = insertion_terminator(lines, before_idx);
        for (const std::string& name : import_names) {
            std::string text = "import ";
            text += kNativeAnnotationPackage;
            text += '.';
            text += name;
            text += ';';
            out += text;
            out += term;
            overlay_bytes += text;
            overlay_bytes += '\n';
            result.manifest.import_lines.push_back(++out_line);
        }
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i == import_before) emit_imports(i);
        if (auto it = blocks_at.find(i + 1); it != blocks_at.end()) {
            std::string_view term = insertion_terminator(lines, i);
            for (const AnchoredMetadata* entry : it->second) {
                BlockMarker marker = std::get<BlockMarker>(entry->marker);
                marker.indent.assign(leading_indent(lines[i].content));
                Result<std::string> rendered = style == MarkerStyle::Native
                                                   ? render_native_annotation(marker)
                                                   : encode_block_marker(marker, syntax);
                if (!rendered) return rendered.error();
                out += *rendered;
                out += term;
                overlay_bytes += *rendered;
                overlay_bytes += '\n';
                result.manifest.inserted_lines.push_back(++out_line);
            }
        }
        out += lines[i].content;
        if (auto it = suffix_at.find(i + 1); it != suffix_at.end()) {
            Result<std::string> rendered =
                encode_line_marker(std::get<LineMarker>(it->second->marker), syntax);
            if (!rendered) return rendered.error();
            out += *rendered;
            result.manifest.modified_lines.push_back(out_line + 1);
        }
        out += lines[i].terminator;
        ++out_line;
    }
    if (import_before == lines.size() && !import_names.empty()) emit_imports(lines.size());

    result.manifest.overlay_digest_hex = sha256_hex(overlay_bytes);
    result.labeled = std::move(out);
    return result;
}

std::string strip_file(std::string_view content, const MarkerSyntax& syntax) {
    std::string out;
    out.reserve(content.size());
    for (const Line& line : split_lines(content)) {
        if (parse_block_marker(line.content, syntax)) continue;  // drop the whole line
        if (auto parsed = parse_line_marker(line.content, syntax)) {
            out += parsed->first;
            out += line.terminator;
            continue;
        }
        out += line.content;
        out += line.terminator;
    }
    return out;
}

Result<std::string> strip_native(std::string_view content, const LabelManifest& manifest,
                                 const MarkerSyntax& syntax) {
    std::vector<Line> lines = split_lines(content);
    std::set<std::size_t> drop(manifest.inserted_lines.begin(), manifest.inserted_lines.end());
    drop.insert(manifest.import_lines.begin(), manifest.import_lines.end());
    std::set<std::size_t> modified(manifest.modified_lines.begin(), manifest.modified_lines.end());

    for (std::size_t n : drop)
        if (n < 1 || n > lines.size())
            return fail<std::string>(ErrorKind::Manifest,
                                     "manifest references line " + std::to_string(n) +
                                         " but the file has " + std::to_string(lines.size()) +
                                         " lines");

    std::string out;
    out.reserve(content.size());
    std::string overlay_bytes;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t number = i + 1;
        if (drop.count(number)) {
            overlay_bytes += lines[i].content;
            overlay_bytes += '\n';
            continue;
        }
        if (modified.count(number)) {
            auto parsed = parse_line_marker(lines[i].content, syntax);
            if (!parsed)
                return fail<std::string>(ErrorKind::Manifest,
                                         "line " + std::to_string(number) +
                                             " no longer carries the recorded line marker");
            out += parsed->first;
            out += lines[i].terminator;
            continue;
        }
        out += lines[i].content;
        out += lines[i].terminator;
    }

    if (sha256_hex(overlay_bytes) != manifest.overlay_digest_hex)
        return fail<std::string>(ErrorKind::Manifest,
                                 "inserted lines were edited since labeling in '" + manifest.file +
                                     "'; refusing to remove them");
    if (sha256_hex(out) != manifest.digest_hex)
        return fail<std::string>(ErrorKind::Manifest,
                                 "stripped content does not match the recorded digest for '" +
                                     manifest.file + "' (file edited since labeling)");
    return out;
}

Result<bool> verify_roundtrip(std::string_view original,
                              std::span<const AnchoredMetadata> entries,
                              const MarkerSyntax& syntax, MarkerStyle style) {
    Result<LabelResult> labeled = label_file(original, entries, syntax, style);
    if (!labeled) return labeled.error();
    if (style == MarkerStyle::Native) {
        Result<std::string> restored = strip_native(labeled->labeled, labeled->manifest, syntax);
        if (!restored) return restored.error();
        return *restored == original;
    }
    return strip_file(labeled->labeled, syntax) == original;
}

}  // namespace srcmark
