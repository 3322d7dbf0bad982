#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srcmark/error.hpp"

namespace srcmark {

// Metadata appended to the end of an existing code line:
//   <code line> <line_comment_token><sigil><payload>
// The payload is a single line and may not reintroduce the marker grammar.
struct LineMarker {
    std::string analyzer_id;
    std::string payload;
    std::string sigil;

    bool operator==(const LineMarker&) const = default;
};

// A whole inserted comment line above a declaration:
//   <indent><block_prefix> <Name>(key="value", ...)
// Positional arguments use an empty key and render as a bare quoted value.
struct BlockMarker {
    std::string analyzer_id;
    std::string name;
    std::vector<std::pair<std::string, std::string>> args;
    std::string indent;

    bool operator==(const BlockMarker&) const = default;
};

// Per-language comment conventions plus the registry of reserved sigils and
// block-marker names. Construction validates that the registered grammar is
// unambiguous:
//   - sigils are non-empty, free of whitespace, unique, and pairwise
//     prefix-free (otherwise parse(encode(m)) could decode a different
//     marker than was encoded),
//   - no sigil is a prefix of the block prefix's tail (otherwise a rendered
//     block marker could parse as a line marker),
//   - block names are unique identifiers.
class MarkerSyntax {
public:
    static Result<MarkerSyntax> create(
        std::string line_comment_token, std::string block_prefix,
        std::vector<std::pair<std::string, std::string>> sigil_registry,  // analyzer -> sigil
        std::vector<std::pair<std::string, std::string>> block_names);    // analyzer -> name

    // Built-in registry: coverage "+", Caller/Author block markers, "//" comments.
    static const MarkerSyntax& standard();

    const std::string& line_comment_token() const { return line_comment_token_; }
    const std::string& block_prefix() const { return block_prefix_; }

    const std::string* sigil_for(std::string_view analyzer_id) const;
    const std::string* analyzer_for_sigil(std::string_view sigil) const;
    const std::string* analyzer_for_block_name(std::string_view name) const;
    const std::string* block_name_for(std::string_view analyzer_id) const;

    const std::vector<std::pair<std::string, std::string>>& sigil_registry() const {
        return sigils_;
    }
    const std::vector<std::pair<std::string, std::string>>& block_name_registry() const {
        return block_names_;
    }

private:
    MarkerSyntax() = default;

    std::string line_comment_token_;
    std::string block_prefix_;
    std::vector<std::pair<std::string, std::string>> sigils_;
    std::vector<std::pair<std::string, std::string>> block_names_;
};

enum class MarkerGrammar { Line, Block };

struct Collision {
    std::size_t line_number;  // 1-based
    MarkerGrammar grammar;

    bool operator==(const Collision&) const = default;
};

// Renders the exact suffix to append to a code line: one space, the comment
// token, the sigil, the payload. Rejects payloads whose rendered form would
// not decode back to the same marker.
Result<std::string> encode_line_marker(const LineMarker& marker, const MarkerSyntax& syntax);

// Recognizes lines ending in a suffix produced by encode_line_marker for a
// registered sigil. Returns the byte-exact code part (a view into `line`)
// and the decoded marker.
std::optional<std::pair<std::string_view, LineMarker>> parse_line_marker(
    std::string_view line, const MarkerSyntax& syntax);

// Renders one full marker line (no terminator).
Result<std::string> encode_block_marker(const BlockMarker& marker, const MarkerSyntax& syntax);

// Recognizes exactly the lines produced by encode_block_marker, any indent.
std::optional<BlockMarker> parse_block_marker(std::string_view line, const MarkerSyntax& syntax);

// Every line of the content that already matches a marker grammar. An empty
// result means the content is safe to label.
std::vector<Collision> scan_collisions(std::string_view content, const MarkerSyntax& syntax);

}  // namespace srcmark
