#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "srcmark/error.hpp"
#include "srcmark/marker.hpp"

namespace srcmark {

enum class MarkerStyle { Comment, Native };

enum class AnchorKind { Line, Declaration };

// Where a marker lands. Declaration anchors are resolved to line numbers by
// the planner before label_file sees them; line_number is authoritative.
struct Anchor {
    std::string file;  // project-relative path
    AnchorKind kind = AnchorKind::Line;
    std::size_t line_number = 0;  // 1-based
    std::string decl_path;        // qualified name, declaration anchors only
};

struct AnchoredMetadata {
    Anchor anchor;
    std::variant<LineMarker, BlockMarker> marker;
};

struct OverlayPlan {
    MarkerStyle style = MarkerStyle::Comment;
    std::vector<AnchoredMetadata> entries;
};

// Record of one labeling session for one file. Line numbers use
// post-insertion coordinates. `digest_hex` covers the pre-label bytes;
// `overlay_digest_hex` covers the inserted lines' contents, so edits to
// inserted lines are detected before native-style removal.
struct LabelManifest {
    std::string file;
    MarkerStyle style = MarkerStyle::Comment;
    std::string digest_hex;
    std::string overlay_digest_hex;
    std::vector<std::size_t> inserted_lines;  // whole inserted marker/annotation lines
    std::vector<std::size_t> modified_lines;  // lines that received a line-marker suffix
    std::vector<std::size_t> import_lines;    // native style only

    bool empty() const {
        return inserted_lines.empty() && modified_lines.empty() && import_lines.empty();
    }
    std::string serialize() const;
    static Result<LabelManifest> parse(std::string_view text);
};

// Manifests live under <project_root>/.srcmark/manifests, mirroring the tree.
std::filesystem::path manifest_store_dir(const std::filesystem::path& project_root);
std::filesystem::path manifest_path_for(const std::filesystem::path& project_root,
                                        std::string_view relative_file);

struct LabelResult {
    std::string labeled;
    LabelManifest manifest;
    std::vector<std::string> warnings;  // per-entry anchor problems, entries skipped
};

// Applies one file's plan entries. Block markers become whole lines above
// their anchor with the anchor line's indentation; line markers are appended
// before the anchor line's terminator. Native style renders annotations
// instead of block-marker comments and manages one import line per distinct
// annotation name. Refuses to touch content that already matches the marker
// grammar.
Result<LabelResult> label_file(std::string_view original,
                               std::span<const AnchoredMetadata> entries,
                               const MarkerSyntax& syntax,
                               MarkerStyle style = MarkerStyle::Comment);

// Grammar-driven removal: block marker lines are deleted whole, line-marker
// suffixes removed, everything else passes through byte-exact. Needs no
// manifest and is idempotent.
std::string strip_file(std::string_view content, const MarkerSyntax& syntax);

// Manifest-driven removal for native style; also restores comment-style line
// markers recorded in the manifest. Refuses when the result does not match
// the recorded pre-label digest.
Result<std::string> strip_native(std::string_view content, const LabelManifest& manifest,
                                 const MarkerSyntax& syntax);

// True iff strip(label(original)) equals original byte for byte. Label
// preconditions surface as errors, not as false.
Result<bool> verify_roundtrip(std::string_view original,
                              std::span<const AnchoredMetadata> entries,
                              const MarkerSyntax& syntax,
                              MarkerStyle style = MarkerStyle::Comment);

// Package used for native-style annotation imports.
inline constexpr std::string_view kNativeAnnotationPackage = "srcmark.annotations";

}  // namespace srcmark
