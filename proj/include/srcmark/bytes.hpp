#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace srcmark {

// One physical line of a byte buffer. `content` excludes the terminator;
// `terminator` is "\n", "\r\n", or "" (final line without a newline).
// Concatenating content+terminator over all lines reproduces the buffer
// byte for byte. A lone '\r' is not a terminator and stays in `content`.
struct Line {
    std::string_view content;
    std::string_view terminator;
};

std::vector<Line> split_lines(std::string_view bytes);

// Leading run of spaces and tabs.
std::string_view leading_indent(std::string_view line);

bool is_identifier(std::string_view text);

}  // namespace srcmark
