#include "srcmark/bytes.hpp"

#include <cctype>

namespace srcmark {

std::vector<Line> split_lines(std::string_view bytes) {
    std::vector<Line> lines;
    std::size_t start = 0;
    while (start < bytes.size()) {
        std::size_t nl = bytes.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back({bytes.substr(start), std::string_view{}});
            return lines;
        }
        std::size_t content_end = nl;
        std::size_t term_start = nl;
        if (nl > start && bytes[nl - 1] == '\r') {
            content_end = nl - 1;
            term_start = nl - 1;
        }
        lines.push_back({bytes.substr(start, content_end - start),
                         bytes.substr(term_start, nl + 1 - term_start)});
        start = nl + 1;
    }
    return lines;
}

std::string_view leading_indent(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    return line.substr(0, i);
}

bool is_identifier(std::string_view text) {
    if (text.empty()) return false;
    unsigned char first = static_cast<unsigned char>(text.front());
    if (!std::isalpha(first) && first != '_') return false;
    for (char c : text) {
        unsigned char uc = static_cast<unsigned char>(c);
        if (!std::isalnum(uc) && uc != '_') return false;
    }
    return true;
}

}  // namespace srcmark
